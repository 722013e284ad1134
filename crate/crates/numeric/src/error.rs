use thiserror::Error;
use weylpt_core::AlgebraError;

#[derive(Debug, Error)]
pub enum NumericError {
    #[error("dimension {dim} is too small: need at least {needed}")]
    DimensionTooSmall { dim: usize, needed: usize },

    #[error("eigensolver did not converge at dimension {0}")]
    NonConvergent(usize),

    #[error("wave function has zero norm")]
    ZeroNorm,

    #[error("grid too coarse or narrow: trapezoid norm {trapezoid:.12e} vs coefficient norm {coefficient:.12e}")]
    Normalization { trapezoid: f64, coefficient: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Algebra(#[from] AlgebraError),

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}
