use alloc::string::String;

/// Failure modes of the operator pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// `z` lies within the singularity guard of an eigenvalue of `H`.
    #[error("z = {re}{im:+}i is within {distance:e} of the spectrum (guard {guard:e})")]
    SpectrumHit {
        re: f64,
        im: f64,
        distance: f64,
        guard: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// Neither the Schur path nor the dense fallback is well conditioned.
    #[error("singular block operator (condition estimate {condition:e})")]
    SingularBlock { condition: f64 },
    /// `Θ + M_z` could not be inverted: `z` is not in the admissible set.
    #[error("Θ + M_z is not invertible at z = {re}{im:+}i (condition estimate {condition:e})")]
    ThetaSingular { re: f64, im: f64, condition: f64 },
    #[error("λ = {lambda} is not below the invertibility threshold {threshold}")]
    NotBelowThreshold { lambda: f64, threshold: f64 },
    #[error("quadrature failed: estimate {estimate:e}, error {error:e} > tolerance {tol:e}")]
    QuadratureFailure { estimate: f64, error: f64, tol: f64 },
    #[error("insufficient data: need {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    /// Two independent evaluation paths disagree.
    #[error("internal mismatch between evaluation paths: {residual:e} > {tol:e}")]
    InternalMismatch { residual: f64, tol: f64 },
    #[error("operation not supported by this backend: {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
