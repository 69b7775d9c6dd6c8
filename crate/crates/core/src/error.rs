use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fracture depth {depth} does not fit a {nx}x{ny} grid: {reason}")]
    FractureTooDeep {
        depth: usize,
        nx: usize,
        ny: usize,
        reason: String,
    },

    #[error("invalid permeability: {0}")]
    InvalidPermeability(String),

    #[error("invalid boundary condition: {0}")]
    InvalidBoundary(String),

    #[error("linear system is singular or too ill-conditioned (condition estimate {condition:.3e}, relative residual {residual:.3e})")]
    Singular { condition: f64, residual: f64 },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("gate acts on qubit {0} more than once")]
    DuplicateQubit(usize),

    #[error("matrix gate is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix gate has dimension {got}, expected {expected}")]
    MatrixShape { got: usize, expected: usize },

    #[error("{n_qubits} qubits exceeds the simulator cap of {cap}")]
    QubitCap { n_qubits: usize, cap: usize },

    #[error("measurement gates cannot be simulated exactly; sample the final state instead")]
    MeasurementInCircuit,

    #[error("state vector length {0} is not a power of two")]
    StateLength(usize),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid sparse state: {0}")]
    InvalidSparseState(String),

    #[error("pressure-gradient preparation needs an even qubit count of at least 2, got {0}; pad the grid so nx*ny is an even power of two")]
    OddQubitCount(usize),

    #[error("invalid HHL configuration: {0}")]
    InvalidHhlConfig(String),

    #[error("matrix is not symmetric (max deviation {0:.3e})")]
    NotSymmetric(f64),

    #[error("HHL postselection probability {0:.3e} is too small to recover a solution")]
    DegenerateHhl(f64),

    #[error("clock register weight on |0..0> is {weight:.9}, below the required {required:.9}; increase the clock size")]
    ClockResidual { weight: f64, required: f64 },

    #[error("register width mismatch: {0}")]
    RegisterMismatch(String),

    #[error("gate cannot be promoted to a controlled gate: {0}")]
    NotControllable(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("readout error: {0}")]
    Readout(String),

    #[error("unknown strategy '{name}' (available: {available})")]
    UnknownStrategy { name: String, available: String },

    #[error("circuit format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
