use alloc::string::String;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed header: expected `{expected}`, found `{found}`")]
    MalformedHeader {
        expected: &'static str,
        found: String,
    },
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("row {row}: label {value} outside {{0, 1}}")]
    LabelOutOfRange { row: usize, value: f64 },
    #[error("feature `{feature}` has zero variance on the fitting split")]
    ZeroVariance { feature: &'static str },
    #[error("need at least {need} records, got {got}")]
    TooFewRecords { need: usize, got: usize },
    #[error("class {class} has {count} records, fewer than k = {k}")]
    ClassTooSmall { class: u8, count: usize, k: usize },
    #[error("synthetic dataset size must be even and >= 2, got {n}")]
    BadSyntheticSize { n: usize },
    #[error("engagement index undefined: alpha + theta must be positive")]
    EngagementDomain,
    #[error("frontal alpha powers must be strictly positive for the log ratio")]
    FaaDomain,
    #[error("shape mismatch: {context}")]
    ShapeMismatch { context: String },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("invalid parameter: {context}")]
    InvalidParam { context: String },
    #[error("cannot quantize an all-zero weight matrix")]
    AllZeroWeights,
    #[error("spike event at t = {t} s outside (0, {limit} s]")]
    EventOutsideWindow { t: f64, limit: f64 },
    #[error("output spike at t = {t} s outside [0, {limit} s]")]
    SpikeOutsideTrial { t: f64, limit: f64 },
    #[error("label/prediction length mismatch: {expected} vs {got}")]
    LengthMismatch { expected: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
