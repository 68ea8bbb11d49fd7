use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),

    #[error("state is not bipartite ({0} subsystems)")]
    NotBipartite(usize),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigendecomposition failed to converge")]
    EigenFailure,

    #[error("soft-sector violation: k*dx = {kdx} exceeds threshold {threshold}")]
    SoftSector { kdx: f64, threshold: f64 },

    #[error("dipole approximation violated: k*a = {ka} exceeds threshold {threshold}")]
    DipoleRegime { ka: f64, threshold: f64 },

    #[error("scattering expansion truncated outside its validity: {0}")]
    Truncation(String),

    #[error("measure has degenerate probabilities; perturbative eigenvalues need distinct weights")]
    DegenerateMeasure,

    #[error("no decoherence: eta_bar vanishes, receptivity undefined")]
    NoDecoherence,

    #[error("partition mismatch: {0}")]
    Partition(String),

    #[error("dense dimension {dim} exceeds the oracle cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("bound regime violated: {0}")]
    BoundRegime(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
