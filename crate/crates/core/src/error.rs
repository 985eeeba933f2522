use thiserror::Error;

/// Errors shared by the workbench modules.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("evaluation pole: {0}")]
    Pole(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("size guard exceeded: {0}")]
    Size(String),

    #[error("divergent: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
