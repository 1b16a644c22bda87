use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("support mismatch: [{0}, {1}] vs [{2}, {3}]")]
    SupportMismatch(f64, f64, f64, f64),

    #[error("affine pushforward requires a nonzero scale")]
    ZeroScale,

    #[error("abscissa {x} outside domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("polynomial degree {0} exceeds cap {1}")]
    DegreeOverflow(usize, usize),

    #[error("cannot differentiate across the jump at {0}")]
    JumpDifferentiation(f64),

    #[error("order {0} outside the supported range 1..=8")]
    OrderOverflow(u32),

    #[error("unknown quadrature rule `{0}`")]
    UnknownRule(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid piecewise polynomial: {0}")]
    InvalidPiecewise(String),

    #[error("cascade routes disagree near x = {x} (iterated {iterated} vs derivative {derivative})")]
    CascadeInconsistent { x: f64, iterated: f64, derivative: f64 },

    #[error("malformed measure spec: {0}")]
    ParseError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
