use thiserror::Error;

use crate::psi::IntervalUnion;

/// Errors produced by the hedging library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("conditioning coordinate has zero variance")]
    DegenerateConditioning,

    #[error("correlation {0} outside (-1, 1)")]
    InvalidCorrelation(f64),

    /// The adaptive rule ran out of subdivisions. The best estimate is kept.
    #[error("quadrature tolerance not met: estimate {estimate}, error {error:e}")]
    ToleranceNotMet { estimate: f64, error: f64 },

    /// No sign change of the spread-set equation was found. `fallback` is the
    /// set implied by the sign observed over the search window.
    #[error("root bracket failure while building spread set")]
    RootBracketFailure { fallback: IntervalUnion },

    #[error("{column} increases from {v_lo} at c={c_lo} to {v_hi} at c={c_hi}")]
    MonotonicityViolation {
        column: &'static str,
        c_lo: f64,
        c_hi: f64,
        v_lo: f64,
        v_hi: f64,
    },

    #[error("{what} = {value} outside admissible range {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ToleranceNotMet { .. }
                | Error::RootBracketFailure { .. }
                | Error::MonotonicityViolation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
