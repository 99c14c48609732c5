use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cyclic representation: {0}")]
    InvalidRep(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix: inversion residual {residual:e} exceeds {limit:e}")]
    SingularMatrix { residual: f64, limit: f64 },

    #[error("singular gauge matrix: |sinh(k*eta)| = {magnitude:e} for k = {k}")]
    SingularGauge { k: String, magnitude: f64 },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("spectral parameter within {distance:e} of a pole")]
    PoleProximity { distance: f64 },

    #[error("Bethe solver did not converge: {0}")]
    NonConvergence(String),

    #[error("Bethe root collision: {0}")]
    RootCollision(String),
}

pub type Result<T> = std::result::Result<T, Error>;
