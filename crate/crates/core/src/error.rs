use thiserror::Error;

/// Broad failure class, used by the CLI to choose an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {value} ({bound})")]
    Invalid {
        field: &'static str,
        value: f64,
        bound: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no endemic equilibrium: R0 = {r0} <= 1")]
    NoEndemicEquilibrium { r0: f64 },

    #[error("positivity violated: {compartment} = {value} (population {population})")]
    PositivityViolated {
        compartment: &'static str,
        value: f64,
        population: f64,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("step {index} failed: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: row {row}: {message}")]
    Data {
        path: String,
        row: usize,
        message: String,
    },

    #[error("{0}")]
    Validation(String),

    #[error("no overlap between trajectory and observed dates")]
    NoOverlap,

    #[error("trajectory does not match parameters: {0}")]
    Mismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Invalid { .. }
            | Error::Config { .. }
            | Error::Data { .. }
            | Error::Validation(_)
            | Error::NoOverlap
            | Error::Mismatch(_) => ErrorKind::Validation,
            Error::Domain(_)
            | Error::NoEndemicEquilibrium { .. }
            | Error::PositivityViolated { .. }
            | Error::NonFinite(_) => ErrorKind::Numerical,
            Error::Step { source, .. } => source.kind(),
            Error::Io { .. } | Error::Json(_) => ErrorKind::Io,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
