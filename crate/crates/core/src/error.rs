use thiserror::Error;

use crate::symbol::{BasisKey, Convention};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("operator products are only defined in the scaled convention (got {left:?} and {right:?})")]
    ConventionMismatch { left: Convention, right: Convention },

    #[error("no solution with odd momentum parity; obstruction monomials: {}", render_keys(.monomials))]
    Obstruction { monomials: Vec<BasisKey> },

    #[error("generator series is valid through order {available}, but order {requested} was requested; build a deeper hierarchy")]
    InsufficientDepth { requested: u32, available: u32 },

    #[error("order {0} is not supported here")]
    UnsupportedOrder(u32),

    #[error("series conventions differ")]
    MixedConventions,

    #[error("half-integer power of the mass survives in the physical form: {0}")]
    HalfIntegerExponent(String),

    #[error("classical limit does not exist: negative power of hbar in {0}")]
    LimitUndefined(String),

    #[error("residual check failed at order {order}: {detail}")]
    ResidualNonzero { order: u32, detail: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("malformed JSON operator: {0}")]
    Json(String),
}

fn render_keys(keys: &[BasisKey]) -> String {
    keys.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
}
