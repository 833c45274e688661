use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("mixing ratio {0} is outside the open interval (0, 1)")]
    InvalidLambda(f64),

    #[error("invalid Beta parameters alpha={alpha}, beta={beta}: both must be positive")]
    InvalidBeta { alpha: f64, beta: f64 },

    #[error("value {value} is outside [0, 1]")]
    OutOfUnitInterval { value: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("empty graph has no nodes to pool")]
    EmptyGraph,

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("indistinguishable mixing ratio: |lambda - 0.5| < {tol}")]
    IndistinguishableRatio { tol: f64 },

    #[error("not a mix of binary edge matrices: {0}")]
    NotBinaryMix(String),

    #[error("feature recovery failed at row {row}: {reason}")]
    FeatureRecovery { row: usize, reason: String },

    #[error("inconsistent recovery: {0}")]
    InconsistentRecovery(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Data(String),

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn dims(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            actual,
        }
    }
}
