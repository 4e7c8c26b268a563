use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The CLI maps [`Error::Domain`], [`Error::Unsupported`] and
/// [`Error::Config`] to exit code 2 and everything else to exit code 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("quadrature did not converge ({context}): best estimate {best:e}, error estimate {err:e}")]
    Quadrature { context: String, best: f64, err: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by bad input rather than by a numerical breakdown.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Unsupported(_) | Error::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
