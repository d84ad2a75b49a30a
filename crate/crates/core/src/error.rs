use thiserror::Error;

/// Errors raised by the closed forms, the spectral constructions and the
/// numeric oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole at x = {x}: closed form is singular")]
    Pole { x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameter m = 0 is not allowed for inverse-power families")]
    ZeroParameter,

    #[error("ladder orbit violated at step {step} (m = {m}): {reason}")]
    OrbitViolation { step: usize, m: f64, reason: String },

    #[error("ground state at m = {m} is not normalizable: divergent at {end}")]
    NotNormalizable { m: f64, end: DivergentEnd },

    #[error("grid too coarse: h * max|W| = {ratio:.3} exceeds {limit}")]
    GridTooCoarse { ratio: f64, limit: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("eigenvalue bisection did not converge")]
    NoConvergence,
}

/// The end of an interval on which a probe integral diverged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergentEnd {
    Left,
    Right,
    Both,
}

impl std::fmt::Display for DivergentEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DivergentEnd::Left => "the left end",
            DivergentEnd::Right => "the right end",
            DivergentEnd::Both => "both ends",
        };
        f.write_str(s)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
