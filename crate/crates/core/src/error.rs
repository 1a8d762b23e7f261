use thiserror::Error;

use crate::torus::{Coord, Shape};

/// Errors raised by the algebraic and combinatorial operations of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid shape {m}x{n}: rows and columns must be at least {min}")]
    InvalidShape { m: usize, n: usize, min: usize },

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: Shape, right: Shape },

    #[error("threshold {t} is outside [1, {max}]")]
    InvalidThreshold { t: usize, max: usize },

    #[error("threshold mismatch: t={left} vs t={right}")]
    ThresholdMismatch { left: usize, right: usize },

    #[error("coordinate {coord} lies outside the {shape} grid")]
    CoordOutOfRange { coord: Coord, shape: Shape },

    #[error("commutation of a generator with itself is undefined ({0})")]
    SelfCommutation(Coord),

    #[error("coordinates {left} and {right} are not out of order")]
    NotOutOfOrder { left: Coord, right: Coord },

    #[error("negative exponent {exponent} at {coord}")]
    NegativeExponent { coord: Coord, exponent: i64 },

    #[error("exponent overflow")]
    ExponentOverflow,

    #[error("the zero element has no leading term")]
    ZeroPolynomial,

    #[error("element is not invertible in the quantum torus")]
    NotInvertible,

    #[error("diagram is not a Cauchon diagram: black square {0} has a white square to its left and above it")]
    NotCauchon(Coord),

    #[error("path does not run from a row vertex to a column vertex")]
    NotRowToColumn,

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("paths have different endpoints")]
    EndpointMismatch,

    #[error("row and column index sets differ in size ({rows} vs {cols})")]
    SizeMismatch { rows: usize, cols: usize },

    #[error("index set must be nonempty and strictly increasing")]
    InvalidIndexSet,

    #[error("no vertex-disjoint path system exists")]
    EmptyFamily,

    #[error("maximum coordinate {max} of the minor exceeds the threshold coordinate {rs}")]
    AboveThreshold { max: Coord, rs: Coord },

    #[error("operation requires t >= 2")]
    NoPreviousThreshold,

    #[error("operation requires t = mn (got t={t}, mn={mn})")]
    NotTopThreshold { t: usize, mn: usize },

    #[error("reduction exceeded its iteration bound of {0}")]
    IterationCap(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("enumeration cap exceeded: {cells} cells > cap {cap}")]
    CapExceeded { cells: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
