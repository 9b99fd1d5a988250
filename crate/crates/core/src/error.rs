use thiserror::Error;

/// Errors raised by the simulation primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arm count must be at least 1")]
    NoArms,

    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),

    #[error("beta parameters must be positive, got alpha={alpha}, beta={beta}")]
    InvalidBeta { alpha: f64, beta: f64 },

    #[error("information gain at action {index} must be positive, got {gain}")]
    NonPositiveGain { index: usize, gain: f64 },

    #[error("shortfall at action {index} must be non-negative, got {delta}")]
    NegativeShortfall { index: usize, delta: f64 },

    #[error("shortfall and gain vectors differ in length ({deltas} vs {gains})")]
    LengthMismatch { deltas: usize, gains: usize },

    #[error("cannot optimize over an empty action set")]
    EmptyActionSet,

    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("Monte-Carlo sample count must be at least 1")]
    NoSamples,

    #[error("numerical integration did not converge (error estimate {estimate:e})")]
    Quadrature { estimate: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
