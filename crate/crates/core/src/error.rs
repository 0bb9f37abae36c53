use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Exponent or weight parameters outside the admissible range.
    #[error("inadmissible: {0}")]
    Inadmissible(String),

    #[error("quadrature did not converge on [{a}, {b}] (estimated error {error:e})")]
    QuadratureNonConvergence { a: f64, b: f64, error: f64 },

    #[error("support radius {support} exceeds the allowed {allowed}")]
    SupportTooLarge { support: f64, allowed: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("zero norm for corpus member {0}")]
    ZeroNorm(usize),

    #[error("advective CFL number {cfl} exceeds {limit}")]
    CflViolation { cfl: f64, limit: f64 },

    #[error("blow-up guard tripped at t = {time}: max |u| = {max_speed:e}")]
    BlowUp { time: f64, max_speed: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
