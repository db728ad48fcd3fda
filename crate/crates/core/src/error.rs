use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad parameter passed to a computation (out of domain, non-finite, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An operation's precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("degenerate reference: {0}")]
    DegenerateReference(String),

    #[error("dataset is empty after {0}")]
    EmptyDataset(String),

    #[error("unknown institution {label:?}; known institutions: {}", known.join(", "))]
    UnknownInstitution { label: String, known: Vec<String> },

    /// Input is structurally unusable, e.g. a required column is missing.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{rejected} of {total} rows rejected, above the {threshold:.0}% limit")]
    TooManyRejects {
        rejected: usize,
        total: usize,
        threshold: f64,
    },

    #[error("capability unavailable: {0}")]
    Capability(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 for data errors, 2 for configuration errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter(_) | Error::UnknownInstitution { .. } => 2,
            _ => 1,
        }
    }
}
