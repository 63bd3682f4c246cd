use thiserror::Error;

/// Errors raised by the planner, simulator and configuration layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("query grid [{start}, {end}] outside source span [{span_start}, {span_end}]")]
    OutsideSpan {
        start: f64,
        end: f64,
        span_start: f64,
        span_end: f64,
    },

    #[error("actuator input {channel} = {value} outside [{min}, {max}]")]
    ActuatorOutOfRange {
        channel: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("every candidate maneuver is infeasible")]
    AllInfeasible,

    #[error("empty candidate set")]
    NoCandidates,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
