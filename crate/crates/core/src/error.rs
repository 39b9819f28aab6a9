use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    /// Evaluation hit a declared singular point (pole, singular axis or kink).
    #[error("singular point: {term} at {point:?}")]
    Singular { term: String, point: Vec<f64> },

    #[error("gradient vanishes; the normalized operator is undefined at critical points")]
    CriticalPoint,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid radial profile: {0}")]
    InvalidProfile(String),

    /// The scale parameter of the far-pole construction was too small.
    #[error("witness not positive at s = {s}; a larger s is needed")]
    NeedsLargerScale { s: f64 },

    /// The line scan of the reflection construction found no witness.
    #[error("no witness found on (0, {eps}]; a smaller step is needed")]
    NeedsSmallerStep { eps: f64 },

    #[error("invalid construction: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
