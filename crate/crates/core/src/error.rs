use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(f64, f64),

    #[error("signals are not aligned: {0}")]
    Misaligned(String),

    #[error("frequency {freq} Hz is outside the representable band (rate {rate} Hz)")]
    OutOfBand { freq: f64, rate: f64 },

    #[error("filter is unstable: {0}")]
    UnstableFilter(String),

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid packet configuration: {0}")]
    InvalidPacket(String),

    #[error("correlation peak at window edge (index {0})")]
    EdgePeak(usize),

    #[error("degenerate correlation curvature: {0}")]
    DegenerateCurvature(String),

    #[error("phase undefined: {0}")]
    PhaseUndefined(String),

    #[error("zero-energy input")]
    ZeroEnergy,

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("empty result")]
    EmptyResult,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
