use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The dynamical map is not invertible at this instant (cos F(t) = 0).
    #[error("singular generator at t = {t}: |cos F| = {cos_f:e}")]
    SingularGenerator { t: f64, cos_f: f64 },

    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("relative entropy is infinite: support of rho is not contained in support of sigma")]
    InfiniteRelativeEntropy,

    #[error("power is undefined for a cycle of zero total duration")]
    UndefinedPower,

    #[error("invalid cycle configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("{0}")]
    Io(String),
}
