use thiserror::Error;

pub type Result<T> = std::result::Result<T, CrcError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrcError {
    #[error("invalid loss spec: {0}")]
    InvalidSpec(String),

    #[error("invalid loss curve: {0}")]
    InvalidCurve(String),

    #[error("loss value {value} outside [{lower}, {upper}]")]
    LossOutOfBounds { value: f64, lower: f64, upper: f64 },

    #[error("fold condition violated: K = {k} but K >= {min_k} is required (K >= B/(alpha - b) - 1)")]
    FoldCondition { k: usize, min_k: usize },

    #[error("invalid fold layout: {0}")]
    InvalidFolds(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
