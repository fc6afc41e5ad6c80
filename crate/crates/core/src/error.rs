use thiserror::Error;

/// Errors raised by the numeric engine and the predicates built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// An iterative method hit its iteration cap before meeting its tolerance.
    #[error("{func} did not converge within {iterations} iterations")]
    Convergence { func: &'static str, iterations: usize },

    /// Two weight vectors that must be compared have different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Malformed or inconsistent input (empty sample, bad certificate, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The counterexample search ran out of budget.
    #[error("search exhausted after {probes} probes (best margin {best_margin:e})")]
    SearchExhausted { probes: usize, best_margin: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
