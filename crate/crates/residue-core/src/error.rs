//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("WAV error: {0}")]
    Wav(String),

    #[error("unsupported audio: {0}")]
    UnsupportedAudio(String),

    #[error("audio buffer is empty")]
    EmptyAudio,

    #[error("buffer too short: {len} samples, need at least {need}")]
    BufferTooShort { len: usize, need: usize },

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("need at least {need} partials, frame has {got}")]
    TooFewPartials { need: usize, got: usize },

    #[error("no regular grid: fit residual {rms_cents:.1} cents exceeds {max_cents:.1}")]
    NoRegularGrid { rms_cents: f64, max_cents: f64 },

    #[error("partial {index} at {freq_hz:.1} Hz is at or above Nyquist ({nyquist:.1} Hz)")]
    AboveNyquist {
        index: usize,
        freq_hz: f64,
        nyquist: f64,
    },

    #[error("inharmonicity fit diverged: residual {residual_rms_hz:.3} Hz")]
    FitDiverged { residual_rms_hz: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
