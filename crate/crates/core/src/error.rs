use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation does not apply to this configuration (e.g. quantizing
    /// a scalar channel).
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    /// The CSI vectors handed to the beamformer are (numerically) linearly
    /// dependent.
    #[error("degenerate beamforming geometry: {0}")]
    DegenerateGeometry(String),

    #[error("arrival rate {lambda} is not below service rate {mu}")]
    UnstableQueue { lambda: f64, mu: f64 },

    #[error("no positive root: {0}")]
    NoPositiveRoot(String),

    #[error("root left the convergence window (0, {upper})")]
    ConvergenceWindow { upper: f64 },

    #[error("singular perturbation: denominator {0:e}")]
    SingularPerturbation(f64),

    #[error("rate vector lies outside the stability region")]
    ExteriorPoint,

    #[error("power budget exceeded: {used} > {budget}")]
    PowerBudget { used: f64, budget: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Unsupported(_) | Error::Config(_) | Error::Json(_)
        )
    }
}
