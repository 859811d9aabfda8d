//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A distribution, scenario, or mechanism was configured with invalid
    /// parameters. The message names the offending field.
    #[error("configuration error: {0}")]
    Config(String),

    /// A precondition of an estimator or simulation operation was violated.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// Root finding could not bracket a sign change of G on [1e-6, 1e6].
    #[error("no root in bracket: G({hi:.1e}) = {g_hi:.6} is still negative within noise")]
    NoRootInBracket { hi: f64, g_hi: f64 },

    /// A user-supplied mirror map failed the Legendre registration checks.
    #[error("mirror map rejected at registration: {0}")]
    MapRejected(String),

    /// I/O failure, annotated with the path involved.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Input data could not be parsed into the expected shape.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
