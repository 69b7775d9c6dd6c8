pub mod circuit;
pub mod error;
pub mod hhl;
pub mod prep;
pub mod problem;
pub mod readout;
pub mod registry;

pub use error::{Error, Result};
