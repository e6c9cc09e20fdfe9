use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the analysis and generation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty power vector")]
    EmptyPowerVector,

    #[error("nonpositive power {0} at index {1}")]
    NonpositivePower(f64, usize),

    #[error("degenerate ray set: {0} ray(s) remain, need at least 2")]
    DegenerateRaySet(usize),

    #[error("realization has no LoS ray")]
    NoLosRay,

    #[error("ICK needs >= 2 rays, got {0}")]
    IckNeedsTwoRays(usize),

    #[error("ICK undefined for a single-ray cluster")]
    IckUndefined,

    #[error("wrong situation: {0}")]
    WrongSituation(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("ray at delay {delay_s:e} s falls outside the {window_s:e} s tap window")]
    DelayOutsideWindow { delay_s: f64, window_s: f64 },

    #[error("need at least {needed} rays for {k} clusters, got {got}")]
    TooFewRays { needed: usize, k: usize, got: usize },

    #[error("empty sample set")]
    EmptySamples,

    #[error("no reference row for {0}")]
    UnknownReferenceRow(String),

    #[error("unknown band `{0}`")]
    UnknownBand(String),

    #[error("{path}: {field}: {reason}")]
    Parse {
        path: PathBuf,
        field: String,
        reason: String,
    },

    #[error("{path}: {reason}")]
    Io { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            reason: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
