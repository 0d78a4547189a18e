use thiserror::Error;

/// Errors raised across the estimation, numerics and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample too small: population {population} has {len} observations, need at least 2")]
    SampleTooSmall { population: usize, len: usize },
    #[error("degenerate sample: population {population} has zero spread (t = 0)")]
    DegenerateSample { population: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("linex parameter a = {a} must be smaller than the exponential rate {rate}")]
    LinexShapeViolation { a: f64, rate: f64 },
    #[error("quadrature did not converge: {0}")]
    QuadratureNoConverge(String),
    #[error("bracket [{lo}, {hi}] does not straddle a root (f = {f_lo}, {f_hi})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("estimator {kind} is not available for {target}")]
    UnsupportedKind { kind: String, target: String },
    #[error("invalid censoring plan: {0}")]
    InvalidCensoringPlan(String),
    #[error("observations are not a strictly increasing record sequence")]
    NotRecordSequence,
    #[error("config error at line {line}, field `{field}`: {message}")]
    Config { line: usize, field: String, message: String },
}

impl Error {
    /// Short machine-readable tag, used by the CLI error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SampleTooSmall { .. } => "SampleTooSmall",
            Error::DegenerateSample { .. } => "DegenerateSample",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::LinexShapeViolation { .. } => "LinexShapeViolation",
            Error::QuadratureNoConverge(_) => "QuadratureNoConverge",
            Error::NoSignChange { .. } => "NoSignChange",
            Error::UnsupportedKind { .. } => "UnsupportedKind",
            Error::InvalidCensoringPlan(_) => "InvalidCensoringPlan",
            Error::NotRecordSequence => "NotRecordSequence",
            Error::Config { .. } => "ConfigError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
