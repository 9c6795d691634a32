use thiserror::Error;

/// Errors raised anywhere in the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} = {value} (limit {limit})")]
    Capacity { what: &'static str, value: u128, limit: u128 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("degenerate cavity surface: tesserae {first} and {second} are {distance:e} bohr apart")]
    DegenerateSurface { first: usize, second: usize, distance: f64 },

    #[error("singular surface-charge system (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("davidson stagnated after {iterations} expansions (residual {residual:e})")]
    Stagnation { iterations: usize, residual: f64 },

    #[error("no configuration in the sample set has the target particle numbers ({n_alpha}, {n_beta}); increase the shot count")]
    RecoveryBootstrap { n_alpha: u32, n_beta: u32 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io { path: path.display().to_string(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
