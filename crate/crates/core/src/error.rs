use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The Neumann problem has no solution unless the profile mass equals `m`.
    #[error("mass mismatch: profile mass {mass} but constraint m = {m}")]
    MassMismatch { mass: f64, m: f64 },

    /// Breakpoint interval `interval` (0 = the one touching `y = 0`) shrank below `gap`.
    #[error("breakpoint interval {interval} shrank below {gap:e}")]
    JumpCollision { interval: usize, gap: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("right-hand side has nonzero mean {mean:e}")]
    NonZeroMean { mean: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("no instability found below eps = {ceiling}")]
    BracketFailure { ceiling: f64 },

    #[error("zero-mode coefficients sum to {sum:e}, expected 0")]
    ConstraintViolation { sum: f64 },

    #[error("cells {0} and {1} carry the same spin")]
    SameSpin(usize, usize),

    #[error("a = {a} is not below the stability bound {bound} for k = {k}")]
    HypothesisViolation { a: f64, bound: f64, k: usize },

    #[error("field format: {0}")]
    Format(String),
}
