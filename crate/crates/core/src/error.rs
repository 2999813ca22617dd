use thiserror::Error;

use crate::geometry::Lattice;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} outside the supported range 2..=8")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattice mismatch: {0:?} vs {1:?}")]
    LatticeMismatch(Lattice, Lattice),
    #[error("axis mask {mask:#b} is not valid in dimension {d}")]
    InvalidAxes { mask: u16, d: usize },
    #[error("coordinate parity does not match the {0:?} lattice")]
    Parity(Lattice),
    #[error("expected a primal edge")]
    NotAnEdge,
    #[error("expected a plaquette")]
    NotAPlaquette,
    #[error("expected a d-dimensional cube of the dual lattice")]
    NotACube,
    #[error("subfacet dimension {k} exceeds facet dimension {dim}")]
    SubfacetDimension { k: usize, dim: usize },
    #[error("window too small: the set must lie inside B_{need} but the window is B_{have}")]
    WindowTooSmall { need: u32, have: u32 },
    #[error("box too small: need B_{need}, have B_{have}")]
    BoxTooSmall { need: u32, have: u32 },
    #[error("vertex {0} lies outside the configuration box")]
    OutsideBox(String),
    #[error("sequence is not nested at step {0}")]
    NotNested(usize),
    #[error("set at step {0} is empty or not connected")]
    NotConnected(usize),
    #[error("plaquette {0} reappeared after leaving (trichotomy violated)")]
    TrichotomyViolation(String),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("critical singularity: G'(eta) = 1 at p = 1/b")]
    CriticalSingularity,
    #[error("iteration did not converge: {0}")]
    NonConvergent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
