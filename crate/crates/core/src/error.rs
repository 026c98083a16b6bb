use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("flow integration failed: {0}")]
    IntegrationFailure(String),

    #[error("quadrature accuracy not reached: estimate {estimate:e} > target {target:e} (value {value})")]
    AccuracyNotReached { value: f64, estimate: f64, target: f64 },

    #[error("word is not in {membership}")]
    DomainError { membership: &'static str },

    #[error("circle lift unwrapping ambiguous at grid size {grid}")]
    UnwrapAmbiguity { grid: usize },

    #[error("invalid map spec: {0}")]
    InvalidSpec(String),

    #[error("cocycle identity violated (residual {residual:e})")]
    NotACocycle { residual: f64 },

    #[error("cochain is not basic (residual {residual:e})")]
    NotBasic { residual: f64 },

    #[error("cochain is not a connection (residual {residual:e})")]
    NotConnection { residual: f64 },

    #[error("chord and boundary-arc strategies disagree by {difference:e}")]
    StrategyMismatch { difference: f64 },

    #[error("configuration error: {0}")]
    ConfigError(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
