use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {requested} exceeds the configured cap {cap}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("matrix is not Hermitian (deviation {deviation:.3e} > tol_herm {tol:.1e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e} > tol_unitary {tol:.1e})")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state vector is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("trace {trace:.12} differs from 1 by more than tol_trace {tol:.1e}")]
    BadTrace { trace: f64, tol: f64 },

    #[error("index {index} out of range (dimension {dim})")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("QR iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("environment is not homogeneous")]
    NotHomogeneous,

    #[error("environment has infinite correlation length: {0}")]
    InfiniteCorrelationLength(String),

    #[error("⟨H⟩_anc does not commute with the initial system state (residual {residual:.3e})")]
    CommutatorHypothesis { residual: f64 },

    #[error("scenario is specified by a bare unitary; a Hamiltonian is required")]
    MissingHamiltonian,

    #[error("operator norm of the Hamiltonian is {norm:.12} > 1")]
    HamiltonianNorm { norm: f64 },

    #[error("integration became unstable at t = {t}")]
    Unstable { t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
