use thiserror::Error;

/// Errors raised by the signal-processing core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("audio clip is empty")]
    EmptyAudio,
    #[error("invalid sample rate {0} Hz")]
    InvalidRate(u32),
    #[error("degenerate frame grid: {0}")]
    DegenerateGrid(&'static str),
    #[error("frame grid mismatch: {0}")]
    GridMismatch(&'static str),
    #[error("autocorrelation is singular")]
    SingularAutocorrelation,
    #[error("all-pole model is unstable")]
    UnstableModel,
    #[error("envelope contains non-positive or non-finite values")]
    NonPositiveEnvelope,
    #[error("frame of {len} samples is too short, need at least {min}")]
    FrameTooShort { len: usize, min: usize },
    #[error("moving-average window is narrower than two bins")]
    WindowTooNarrow,
    #[error("speed factor {0} outside [0.5, 2.0]")]
    InvalidFactor(f64),
    #[error("clip is shorter than {0} frames")]
    TooShort(usize),
    #[error("clip is silent")]
    SilentClip,
    #[error("no spectral peak found in the search band")]
    NoPeakFound,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
