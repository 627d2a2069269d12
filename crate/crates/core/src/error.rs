use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error(
        "basis index (n={n}, q={q}) outside n in [-{n_max}, {n_max}], q in [-{q_max}, {q_max}]"
    )]
    IndexOutOfRange {
        n: i64,
        q: i64,
        n_max: i64,
        q_max: i64,
    },

    #[error("cannot allocate {bytes} bytes for a {dim}x{dim} matrix")]
    Resource { dim: usize, bytes: u128 },

    #[error(
        "eigensolver did not converge after {iterations} iterations (best residual {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("coefficient vector is not normalized (norm {norm})")]
    Unnormalized { norm: f64 },

    #[error("requested {requested} eigenpairs from a {dim}-dimensional matrix")]
    TooManyEigenpairs { requested: usize, dim: usize },

    #[error("Fermi level {fermi_level} exceeds the highest computed band mean {highest}; compute more bands")]
    InsufficientBands { fermi_level: f64, highest: f64 },

    #[error("no nonzero conductivity plateau found")]
    NoPlateau,

    #[error(
        "ambiguous quantization unit: {first} and {second} both fit with different assignments"
    )]
    AmbiguousUnit { first: f64, second: f64 },

    #[error("solver failed at E = {efield}, k = {k}: {source}")]
    AtPoint {
        efield: f64,
        k: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("config field `{field}`: {message}")]
    ConfigField { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
