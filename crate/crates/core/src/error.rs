use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the domain (axis {axis})")]
    DomainViolation { point: Vec<f64>, axis: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("contraction factor γ = {gamma} is not below 1")]
    ContractionViolation { gamma: f64 },

    #[error("mean-value offset ε = {epsilon} is not below c² = {c_squared}")]
    MeanValueViolation { epsilon: f64, c_squared: f64 },

    #[error("step {step} outside the horizon [1, {horizon}]")]
    StepOutOfRange { step: u64, horizon: u64 },

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
