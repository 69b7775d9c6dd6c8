//! Two-dimensional fracture-flow problems and their discretization.
//!
//! Nodes are numbered column-major, `index = col * ny + row`, so the left
//! boundary column occupies indices `0..ny`.

mod assemble;
mod fracture;
mod sparse;

pub use assemble::{assemble_system, classical_solve, region_average, LinearSystem};
pub use fracture::{fracture_cells, generate_pitchfork_permeability, FractureSpec, Orientation};
pub use sparse::SparseMatrix;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "unit")]
    pub dx: f64,
    #[serde(default = "unit")]
    pub dy: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        GridSpec {
            nx,
            ny,
            dx: 1.0,
            dy: 1.0,
        }
        .validated()
    }

    pub fn with_spacing(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        GridSpec { nx, ny, dx, dy }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.nx < 2 || self.ny < 2 || !self.nx.is_power_of_two() || !self.ny.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "nx and ny must be powers of two and at least 2, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.dx > 0.0 && self.dy > 0.0 && self.dx.is_finite() && self.dy.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got dx={} dy={}",
                self.dx, self.dy
            )));
        }
        Ok(self)
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_b(&self) -> usize {
        self.n_cells().trailing_zeros() as usize
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        col * self.ny + row
    }

    /// `(col, row)` of a node index.
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index / self.ny, index % self.ny)
    }
}

/// Per-cell permeability, held as base-10 logarithms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PermeabilityField {
    log10: Vec<f64>,
}

impl PermeabilityField {
    pub fn uniform(n_cells: usize, value: f64) -> Result<Self> {
        Self::from_values(&vec![value; n_cells])
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidPermeability(format!(
                "cell {i} has permeability {v}"
            )));
        }
        Ok(PermeabilityField {
            log10: values.iter().map(|v| v.log10()).collect(),
        })
    }

    pub fn from_log10(log10: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = log10.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidPermeability(format!(
                "cell {i} has log10 permeability {v}"
            )));
        }
        Ok(PermeabilityField { log10 })
    }

    pub fn len(&self) -> usize {
        self.log10.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log10.is_empty()
    }

    pub fn log10(&self) -> &[f64] {
        &self.log10
    }

    pub fn value(&self, cell: usize) -> f64 {
        10f64.powf(self.log10[cell])
    }

    pub fn values(&self) -> Vec<f64> {
        self.log10.iter().map(|l| 10f64.powf(*l)).collect()
    }
}

/// Left/right boundary treatment. Top and bottom are always zero-flux.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// Dirichlet pressures on the left and right columns.
    PressureGradient { p_left: f64, p_right: f64 },
    /// Point sources at the listed cells with zero pressure on left and right.
    Wells { sites: Vec<(usize, f64)> },
}

impl BoundaryCondition {
    pub fn validate(&self, n_cells: usize) -> Result<()> {
        match self {
            BoundaryCondition::PressureGradient { p_left, p_right } => {
                if !(p_left.is_finite() && p_right.is_finite()) {
                    return Err(Error::InvalidBoundary("pressures must be finite".into()));
                }
            }
            BoundaryCondition::Wells { sites } => {
                if sites.is_empty() {
                    return Err(Error::InvalidBoundary(
                        "at least one well is required".into(),
                    ));
                }
                let mut seen = std::collections::BTreeSet::new();
                for &(i, rate) in sites {
                    if i >= n_cells {
                        return Err(Error::InvalidBoundary(format!(
                            "well cell {i} outside {n_cells} cells"
                        )));
                    }
                    if !seen.insert(i) {
                        return Err(Error::InvalidBoundary(format!("duplicate well cell {i}")));
                    }
                    if rate == 0.0 || !rate.is_finite() {
                        return Err(Error::InvalidBoundary(format!("well {i} has rate {rate}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `w` distinct wells with standard-normal rates, sorted by cell index.
pub fn sample_random_wells(grid: &GridSpec, w: usize, seed: u64) -> Result<BoundaryCondition> {
    let n = grid.n_cells();
    if w == 0 || w > n {
        return Err(Error::InvalidBoundary(format!(
            "well count {w} must be in 1..={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = sample(&mut rng, n, w).into_vec();
    cells.sort_unstable();
    let sites = cells
        .into_iter()
        .map(|i| {
            let rate = loop {
                let r: f64 = StandardNormal.sample(&mut rng);
                if r != 0.0 {
                    break r;
                }
            };
            (i, rate)
        })
        .collect();
    Ok(BoundaryCondition::Wells { sites })
}

/// Serializable problem description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub grid: GridSpec,
    pub permeability: PermeabilityField,
    pub boundary: BoundaryCondition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fracture: Option<FractureSpec>,
}

impl Problem {
    pub fn validate(&self) -> Result<()> {
        self.grid.validated()?;
        if self.permeability.len() != self.grid.n_cells() {
            return Err(Error::InvalidPermeability(format!(
                "field has {} cells, grid has {}",
                self.permeability.len(),
                self.grid.n_cells()
            )));
        }
        self.boundary.validate(self.grid.n_cells())
    }

    pub fn assemble(&self) -> Result<LinearSystem> {
        self.validate()?;
        assemble_system(&self.grid, &self.permeability, &self.boundary)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("problem serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Problem = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }
}
