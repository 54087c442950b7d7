use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the function it was passed to.
    #[error("{name} = {value} is outside the domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid channel profile: {0}")]
    InvalidProfile(String),

    #[error("invalid antenna configuration: {0}")]
    InvalidAntennas(String),

    #[error("invalid power split: {0}")]
    InvalidSplit(String),

    #[error("invalid simulation config: {0}")]
    InvalidSimulation(String),

    /// Sweep/config validation failure, tagged with the offending field.
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// A probability landed outside [0, 1] by more than rounding can explain.
    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: Option<&PathBuf>, source: std::io::Error) -> Self {
        let context = match path {
            Some(p) => format!("writing {}", p.display()),
            None => "writing to stdout".to_string(),
        };
        Error::Io { context, source }
    }
}

/// Rejects non-finite or negative `x`.
pub(crate) fn check_nonnegative(name: &'static str, x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        Err(Error::domain(name, x, "must be nonnegative and finite"))
    } else {
        Ok(())
    }
}

pub(crate) fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        Err(Error::domain(name, x, "must be strictly positive and finite"))
    } else {
        Ok(())
    }
}
