use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("level mismatch: expected {expected}, found {found}")]
    LevelMismatch { expected: usize, found: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("similarity rejected: condition estimate {cond:e} (limit {limit:e})")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("block sizes {sizes:?} do not sum to level {level}")]
    BlockSizes { sizes: Vec<usize>, level: usize },

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("not demilinear: {0}")]
    NotDemilinear(String),

    #[error("point outside the domain: {0}")]
    OutsideDomain(String),

    #[error("evaluation failed: {0}")]
    Evaluator(String),

    #[error("domain has no nonempty level among {0:?}")]
    EmptyDomain(Vec<usize>),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path endpoints differ by {0:e}")]
    EndpointMismatch(f64),

    #[error("no path available at level {0}: domain is not convex and no waypoints were supplied")]
    NoPath(usize),

    #[error(
        "constant extraction failed for levels ({m}, {n}): structure residual {residual:e} exceeds {tolerance:e}"
    )]
    ConstantExtraction {
        m: usize,
        n: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("anchor placement failed: {0}")]
    Anchor(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
