use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid needs at least one axis")]
    EmptyDims,

    #[error("side length {0} on axis {1} must be greater than 2")]
    SideTooShort(usize, usize),

    #[error("vertex {vertex} out of range for grid with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("axis {axis} out of range for a {d}-dimensional grid")]
    AxisOutOfRange { axis: usize, d: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NonConvergence { sweeps: usize, off_norm: f64 },

    #[error("eigendecomposition check `{check}` failed: {value:e} exceeds {bound:e}")]
    ToleranceExceeded {
        check: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("diagonal entries are not pairwise distinct (index {0} and {1})")]
    RepeatedDiagonal(usize, usize),

    #[error("vertex {i} is not reachable from {k} in the support graph")]
    Unreachable { i: usize, k: usize },

    #[error("source and target coincide ({0})")]
    SameVertex(usize),

    #[error("automorphism pool exceeds cap of {0} elements")]
    PoolCapExceeded(usize),

    #[error("{0} is not an odd prime")]
    NotOddPrime(usize),

    #[error("{n} vertices exceed the enumeration cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
