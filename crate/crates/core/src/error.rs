use thiserror::Error;

/// Errors produced anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration is empty")]
    Empty,
    #[error("points {first} and {second} are closer than the minimum separation ({distance:e})")]
    DuplicatePoint { first: usize, second: usize, distance: f64 },
    #[error("point {index} has radius {radius} outside the annulus [{r_min}, {r_max}]")]
    OutsideAnnulus {
        index: usize,
        radius: f64,
        r_min: f64,
        r_max: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("no candidate axis clears the forbidden directions (best clearance {best_clearance:e} rad)")]
    ExhaustedCandidates { best_clearance: f64 },
    #[error("projected points {first} and {second} collide (distance {distance:e})")]
    ProjectionCollision { first: usize, second: usize, distance: f64 },
    #[error("dipole {index} projects to zero on the reduction plane")]
    ZeroProjection { index: usize },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("bad order {0}")]
    BadOrder(i64),
    #[error("nodes {first} and {second} coincide")]
    DuplicateNodes { first: usize, second: usize },
    #[error("node {index} is zero")]
    ZeroNode { index: usize },
    #[error("matrix block is numerically singular: {0}")]
    SingularBlock(String),
    #[error("G is ill-conditioned (cond {cond:e} > {threshold:e})")]
    IllConditioned { cond: f64, threshold: f64 },
    #[error("{n_k} nodes exceeds the double-precision limit of {max}")]
    TooManyNodes { n_k: usize, max: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("masses sum to {sum:e}, expected zero")]
    MassImbalance { sum: f64 },
    #[error("bad sampler or kind selection: {0}")]
    BadSampler(String),
    #[error("expansion has no terms")]
    EmptyExpansion,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.to_string())
        } else {
            Error::Parse(e.to_string())
        }
    }
}
