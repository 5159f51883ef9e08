use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("momentum {n} outside window [-{halfwidth}, {halfwidth}]")]
    OutOfWindow { n: i64, halfwidth: usize },

    #[error("coefficient vector has zero norm")]
    ZeroNorm,

    #[error("window mismatch: {left} vs {right}")]
    WindowMismatch { left: usize, right: usize },

    #[error("truncation: {leaked:.3e} probability left the window of half-width {halfwidth}")]
    Truncation { leaked: f64, halfwidth: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("estimation failed: {reason}")]
    EstimationFailed { reason: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error{}: {message}", field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
    Config {
        field: Option<String>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn estimation(reason: impl Into<String>) -> Self {
        Error::EstimationFailed {
            reason: reason.into(),
        }
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EstimationFailed { .. } => 1,
            Error::Truncation { .. } => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
            _ => 2,
        }
    }
}
