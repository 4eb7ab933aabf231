use thiserror::Error;

/// Errors surfaced by the library's domain checks and numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: usize },

    #[error("matrix is numerically singular (pivot {pivot:.3e})")]
    Singular { pivot: f64 },

    #[error("inverse power iteration failed after {shifts} singularity shifts")]
    InversePowerStalled { shifts: usize },

    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCountOutOfRange { n: usize, min: usize, max: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("basis index {index} out of range for {n_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("tableau violates the symplectic condition")]
    NotSymplectic,

    #[error("parameter vector length {got} does not match ansatz ({expected})")]
    ParamCountMismatch { expected: usize, got: usize },

    #[error("objective returned a non-finite value at {params:?}")]
    NonFiniteObjective { params: Vec<f64> },

    #[error("invalid optimizer config: {reason}")]
    InvalidOptimizerConfig { reason: String },

    #[error("{0}")]
    Invalid(String),
}
