use thiserror::Error;

/// Errors raised by the filters, the statistics helpers and the experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An augmented quantity violated its conjugate block pattern beyond tolerance.
    #[error("augmented consistency violated: {0}")]
    Consistency(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid second-order statistics: {0}")]
    InvalidStats(StatsViolation),

    /// Strictly linear filtering is undefined for models that act on conjugates.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Which second-order invariant a [`crate::improper::SecondOrderStats`] broke.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsViolation {
    #[error("inconsistent dimensions ({0})")]
    Dimension(String),
    #[error("hermitian covariance is not Hermitian")]
    NonHermitian,
    #[error("complementary covariance is not symmetric")]
    NonSymmetric,
    #[error("augmented covariance is not PSD (min eigenvalue {0:e})")]
    AugmentedNotPsd(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
