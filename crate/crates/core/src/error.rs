use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside medium domain: {axis} = {value} not in [{min}, {max}]")]
    OutsideDomain {
        axis: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("ray integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("beam lost positivity: Im(P/Q) = {value} at t = {t} (step too large or bad medium)")]
    InvariantViolation { t: f64, value: f64 },

    #[error("degenerate beam: {0}")]
    Degenerate(String),

    #[error("amplitude branch jump of {jump} rad between samples at t = {t}; reduce dt")]
    BranchJump { t: f64, jump: f64 },

    #[error("ray does not cross the receiver line y = {y_star}")]
    MissesReceiver { y_star: f64 },

    #[error("beam spacing h = {h} must be smaller than the initial width eta0 = {eta0}")]
    SpacingTooLarge { h: f64, eta0: f64 },

    #[error("caustic: crossing abscissas not strictly increasing near s = {s}")]
    Caustic { s: f64 },

    #[error("bundle does not cover the receiver window: {0}")]
    Coverage(String),

    #[error("moment order p = {0} out of range (0..=8)")]
    MomentOrder(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("slope fit: {0}")]
    Fit(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}
