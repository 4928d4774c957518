use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// An a-priori bound that must hold for any correct evaluation was violated.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("small-jump cutoff {epsilon:e} gives {expected_jumps:.3e} expected jumps; use epsilon >= {suggested:e}")]
    CutoffTooSmall {
        epsilon: f64,
        expected_jumps: f64,
        suggested: f64,
    },

    #[error("level {level} not reached within path horizon {horizon}")]
    HorizonTooShort { level: f64, horizon: f64 },

    #[error("explicit scheme unstable: dt = {dt:e} exceeds hx^2/4 = {limit:e}")]
    Stability { dt: f64, limit: f64 },

    #[error("Laplace inversion unreliable at t = {t}: methods disagree by {discrepancy:.3e}")]
    Unreliable { t: f64, discrepancy: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
