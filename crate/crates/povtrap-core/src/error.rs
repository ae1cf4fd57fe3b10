use alloc::string::String;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter or input is outside its valid range.
    #[error("invalid `{name}` = {value}: {reason}")]
    InvalidParameter {
        /// Parameter name as it appears in configuration files.
        name: &'static str,
        /// Offending value.
        value: f64,
        /// Human readable constraint.
        reason: &'static str,
    },
    /// A function was evaluated at a pole.
    #[error("{what}: pole at {at}")]
    Pole {
        /// Function name.
        what: &'static str,
        /// Argument.
        at: f64,
    },
    /// Argument lies outside the domain of a function (e.g. on a branch cut).
    #[error("{what}: argument {at} outside the domain")]
    Domain {
        /// Function name.
        what: &'static str,
        /// Argument.
        at: f64,
    },
    /// An iterative method did not converge.
    #[error("{what} did not converge")]
    NonConvergence {
        /// Method name.
        what: &'static str,
    },
    /// A boundary-condition system is numerically singular.
    #[error("singular {what} system (condition number {condition:e})")]
    Singular {
        /// Which system.
        what: &'static str,
        /// Estimated 1-norm condition number.
        condition: f64,
    },
    /// A probability came out further outside `[0, 1]` than roundoff explains.
    #[error("{what} = {value} at x = {x} is outside [0, 1]")]
    OutOfRange {
        /// Quantity name.
        what: &'static str,
        /// Offending value.
        value: f64,
        /// Evaluation point.
        x: f64,
    },
    /// The target probability is not bracketed by the search interval.
    #[error("target {target} not bracketed: value {at_lo} at lo, {at_hi} at hi")]
    NoBracket {
        /// Requested probability.
        target: f64,
        /// Probability at the lower end of the search interval.
        at_lo: f64,
        /// Probability at the upper end of the search interval.
        at_hi: f64,
    },
    /// Probability is not monotone over the bracket.
    #[error("probability is not non-increasing over the bracket: {0}")]
    NonMonotone(String),
}

impl Error {
    /// True when the error stems from invalid user input rather than from a
    /// numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. } | Error::NoBracket { .. })
    }
}

/// Crate result alias.
pub type Result<T> = core::result::Result<T, Error>;
