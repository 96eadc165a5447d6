use thiserror::Error;

/// Errors raised by the trace calculus.
///
/// Variants map onto the CLI exit-code convention: precondition violations
/// (`Domain`, `Range`, `Resource`, `Parse`, `Io`, `Json`) exit with 2 and
/// numerical failures (`Computation`) exit with 3.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A request reaches beyond the retained truncation.
    #[error("range error: {0}")]
    Range(String),

    /// A quadrature or grid budget is insufficient.
    #[error("resource error: {0}")]
    Resource(String),

    /// A numerical routine failed on a specific block.
    #[error("computation error in block {block}: {message}")]
    Computation { block: usize, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > -1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "lambda must exceed -1 (got {lambda}): Q+λ1 is invertible only for λ > -1"
        )))
    }
}
