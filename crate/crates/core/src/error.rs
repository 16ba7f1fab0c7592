use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of a function.
    #[error("domain error in {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    /// A parameter violates a documented precondition.
    #[error("invalid parameter `{name}`: {detail}")]
    Parameter { name: String, detail: String },

    /// A channel draw is numerically rank deficient.
    #[error("degenerate realization: {0}")]
    Degenerate(String),

    /// The requested closed form does not exist for this configuration.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// Configuration file could not be read or interpreted.
    #[error("config error at `{key}`: {detail}")]
    Config { key: String, detail: String },

    #[error("rate region `{0}` has no points")]
    EmptyRegion(String),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Parameter { name: name.into(), detail: detail.into() }
    }

    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { function, detail: detail.into() }
    }
}
