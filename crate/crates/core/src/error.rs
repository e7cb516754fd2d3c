use thiserror::Error;

/// Failures raised by the library. Numerical values are carried as `f64`
/// regardless of the scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spin label {0}: expected a non-negative half-integer")]
    InvalidSpin(String),

    #[error("spin j = {j} exceeds the configured maximum {j_max}")]
    SpinTooLarge { j: f64, j_max: f64 },

    #[error("non-compact algebra unsupported: m·n = {product} must be positive")]
    NonCompactAlgebra { product: f64 },

    #[error("matrix must be square, got {rows}×{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("generator is not anti-Hermitian: deviation {deviation:e} exceeds {tolerance:e}")]
    NotAntiHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("time {t} outside the protocol window [0, {horizon}]")]
    OutOfWindow { t: f64, horizon: f64 },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("coordinate singularity at t = {t}: |sin a| < {floor:e} (a = {a}, b = {b})")]
    CoordinateSingularity { t: f64, a: f64, b: f64, floor: f64 },

    #[error("invalid step {0}: must be positive and finite")]
    InvalidStep(f64),

    #[error("step-halving check failed: terminal deviation {deviation:e} exceeds {tolerance:e}")]
    StepHalving { deviation: f64, tolerance: f64 },

    #[error("time grids differ between inputs")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("lambda = {0} is not an eigenvalue of A_z in this representation")]
    NotAnEigenvalue(f64),

    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),

    #[error("degenerate branch: effective field vanishes, theta undefined")]
    DegenerateBranch,

    #[error("protocol is not constant; no stationary solution")]
    NotStationary,

    #[error("level index {index} out of range for {levels} levels")]
    LevelOutOfRange { index: usize, levels: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
