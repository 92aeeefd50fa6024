use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong inside the evaluation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sampling grid: dt = {dt}, count = {count} (need dt > 0 and count >= 2)")]
    InvalidGrid { dt: f64, count: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },

    #[error("negative deviation {value} at sample {index}")]
    NegativeDeviation { index: usize, value: f64 },

    #[error("signal and corridor do not share a sampling grid")]
    GridMismatch,

    #[error("corridor violation at sample {sample}: {detail}")]
    CorridorViolation { sample: usize, detail: &'static str },

    #[error("degenerate corridor: reference and permissible domains coincide (h_max = 0)")]
    DegenerateCorridor,

    #[error("unsupported derivative order {0} (supported: 1..=3)")]
    UnsupportedOrder(u8),

    #[error("too few samples: need {needed}, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("invalid scale configuration: {0}")]
    InvalidScale(&'static str),

    #[error("invalid parameter range: h_min = {h_min}, h_max = {h_max}")]
    InvalidRange { h_min: f64, h_max: f64 },

    #[error("invalid permissible amplitude {0} (must be > 0)")]
    InvalidAmplitude(f64),

    #[error("grade {grade} has no conceptual label")]
    LabelOutOfRange { grade: i64 },

    #[error("empty input")]
    EmptyInput,

    #[error("weight {index} is not a positive finite number ({value})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error(
        "incomplete tensor: missing cell (element {element}, mode {mode}, \
         characteristic {characteristic}, criterion {criterion})"
    )]
    IncompleteTensor { element: usize, mode: usize, characteristic: usize, criterion: usize },

    #[error("index out of range: {what} {index} >= {len}")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },

    #[error("{what} has length {found}, expected {expected}")]
    ShapeMismatch { what: &'static str, expected: usize, found: usize },

    #[error("zero dimension in {0}")]
    ZeroDimension(&'static str),

    #[error("global scores disagree: element-first {via_elements}, mode-first {via_modes}")]
    IdentityViolation { via_elements: f64, via_modes: f64 },

    #[error("candidate {candidate} has non-positive component {component} ({value})")]
    NonPositiveComponent { candidate: usize, component: usize, value: f64 },

    #[error("invalid history: {0}")]
    InvalidHistory(&'static str),

    #[error("invalid basis: {0}")]
    InvalidBasis(&'static str),

    #[error("basis is rank deficient on the sample times")]
    RankDeficient,

    #[error("forecast {value} at the last examination is already below threshold {threshold}")]
    AlreadyBelowThreshold { value: f64, threshold: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
