use thiserror::Error;

/// Errors raised by the special functions, channel models and outage evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The scenario or parameter set is inconsistent (pole collision, empty
    /// interferer set on an analytical path, invalid power split, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical procedure did not reach its target accuracy.
    #[error("numeric failure in {what}: {detail}")]
    Numeric {
        what: String,
        detail: String,
        /// Best available estimate when the procedure gave up.
        estimate: Option<f64>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numeric(what: impl Into<String>, detail: impl Into<String>, estimate: Option<f64>) -> Self {
        Error::Numeric {
            what: what.into(),
            detail: detail.into(),
            estimate,
        }
    }

    /// Prefixes the `what` of a numeric failure with the name of the term being evaluated.
    pub fn in_term(self, term: &str) -> Self {
        match self {
            Error::Numeric { what, detail, estimate } => Error::Numeric {
                what: format!("{term}: {what}"),
                detail,
                estimate,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
