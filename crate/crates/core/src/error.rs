use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported audio format in {path}: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("{path} contains no audio samples")]
    EmptyAudio { path: PathBuf },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("window of {window_len} samples is too short (minimum {min})")]
    WindowTooShort { window_len: usize, min: usize },

    #[error("signal of {len} samples is too short (minimum {min})")]
    SignalTooShort { len: usize, min: usize },

    #[error("scale {0} is outside (0, 0.5]")]
    ScaleOutOfRange(f64),

    #[error("need at least {min} contrast frames, got {got}")]
    TooFewFrames { got: usize, min: usize },

    #[error("spectra have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("spectrum contains a negative or non-finite entry")]
    InvalidSpectrum,

    #[error("surrogate variance sample is unusable: {0}")]
    DegenerateNull(String),

    #[error("INS curve scales do not match the region partition: {0}")]
    ScaleMismatch(String),

    #[error("region contains no scales")]
    EmptyRegion,
}

impl Error {
    /// True for errors caused by violating an operation's input requirements
    /// (as opposed to I/O or decoding failures).
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::Io { .. } | Error::UnsupportedFormat { .. } | Error::EmptyAudio { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
