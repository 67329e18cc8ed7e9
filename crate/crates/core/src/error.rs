use thiserror::Error;

use crate::expr::{EvalError, ParseError};

/// Strict-increase / positivity violation of a λ sequence.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaViolation {
    #[error("lambda_{0} is not positive")]
    NonPositive(usize),
    #[error("lambda_{0} does not exceed lambda_{}", .0 - 1)]
    NotIncreasing(usize),
    #[error("horizon must be at least 1")]
    HorizonTooSmall,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExponentError {
    #[error("p_{0} = {1} is not strictly positive")]
    NonPositive(usize, f64),
    #[error("p_{index} = {value} exceeds the declared bound {bound}")]
    ExceedsBound { index: usize, value: f64, bound: f64 },
    #[error("declared bound {0} must be positive and finite")]
    InvalidBound(f64),
    #[error("non-constant exponent sequence needs a declared upper bound")]
    MissingBound,
    #[error("q_{0} is smaller than q_{}; q must be nondecreasing", .0 - 1)]
    NotNondecreasing(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("evaluation error at index {index}: {source}")]
    Eval {
        index: String,
        #[source]
        source: EvalError,
    },
    #[error("invalid lambda: {0}")]
    Lambda(#[from] LambdaViolation),
    #[error("invalid exponent sequence: {0}")]
    Exponent(#[from] ExponentError),
    #[error("invalid input: {0}")]
    Spec(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("exponents are neither all > 1 nor all < 1 on the horizon")]
    MixedExponents,
    #[error("conjugate exponent undefined at k = {0} (p_k = 1)")]
    ConjugateUndefined(usize),
    #[error("unsupported condition `{0}` (expected 4.6 to 4.21)")]
    UnsupportedCondition(String),
    #[error("brute-force subset enumeration supports at most 20 entries, got {0}")]
    BruteForceTooLarge(usize),
}

impl Error {
    pub(crate) fn eval_at(index: impl ToString, source: EvalError) -> Self {
        Error::Eval { index: index.to_string(), source }
    }

    /// True for rational-mode evaluation failures caused by the mode itself.
    pub fn is_rational_unsupported(&self) -> bool {
        matches!(self, Error::Eval { source: EvalError::RationalUnsupported { .. }, .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
