use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid corpus spec: {0}")]
    InvalidSpec(String),
    #[error("no topical mass: the topical word set is empty or carries zero probability")]
    NoTopicalMass,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("labelings differ in length: {left} vs {right} tokens")]
    LengthMismatch { left: usize, right: usize },
    #[error("labeling is empty")]
    EmptyLabeling,
    #[error("label {label} out of range for {num_labels} labels")]
    LabelOutOfRange { label: u32, num_labels: usize },
    #[error("invalid sampler config: {0}")]
    InvalidConfig(String),
    #[error("unknown hyperparameter preset `{0}` (expected ldags_default or ldavb_default)")]
    UnknownPreset(String),
    #[error("{matrix} row {row} sums to {sum}, expected 1 within 1e-9")]
    NotStochastic {
        matrix: &'static str,
        row: usize,
        sum: f64,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: unsupported format `{found}` (expected `{expected}`)", path.display())]
    UnsupportedVersion {
        path: PathBuf,
        found: String,
        expected: String,
    },
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
