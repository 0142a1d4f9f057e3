use thiserror::Error;

/// Errors raised by the kinematics core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains a non-finite value")]
    NonFinite,

    #[error("matrix is not orthogonal: |M^T M - I|_F = {residual:e} exceeds {tol:e}")]
    NotOrthogonal { residual: f64, tol: f64 },

    #[error("matrix is not a proper rotation: det = {det} (|det - 1| exceeds {tol:e})")]
    NotProperRotation { det: f64, tol: f64 },

    #[error("matrix cannot be projected onto SO(3): det = {det}")]
    NotProjectable { det: f64 },

    #[error(
        "polar iteration did not converge after {iterations} iterations (last step {last_step:e})"
    )]
    NoConvergence { iterations: usize, last_step: f64 },

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("invalid tolerance {name} = {value}: must lie in (0, 1e-2)")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("samples are not uniformly spaced: {0}")]
    NonUniformSampling(String),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("time {t} is outside the profile range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("rate profile has no samples")]
    EmptyProfile,

    #[error("bad step: {0}")]
    BadStep(String),

    #[error("invalid rate profile: {0}")]
    InvalidProfile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
