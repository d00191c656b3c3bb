//! The Nelson self-energy counterterm
//!
//! ```text
//! ℰ_Λ = 1/(4π²) ∫₀^Λ κ² (κ²+µ²)^{−1/2} (κ²/2m + (κ²+µ²)^{1/2})^{−1} dκ,
//! ```
//!
//! integrated in `t` with `κ = σ sinh t` (`σ = µ`, or `1` for a massless
//! field), which flattens the integrand near the origin and turns the
//! logarithmic tail into a bounded one on `[0, asinh(Λ/σ)]`.

use crate::error::{Error, Result};
use crate::math::{asinh, cosh, sinh, sqrt, PI};
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelsonParams {
    /// Field mass `µ ≥ 0`.
    pub mu: f64,
    /// Particle mass `m > 0`.
    pub m: f64,
    pub g: f64,
    pub n_particles: u32,
}

impl NelsonParams {
    pub fn new(mu: f64, m: f64, g: f64, n_particles: u32) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::Domain(alloc::format!("field mass {mu} must be >= 0")));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Domain(alloc::format!("particle mass {m} must be > 0")));
        }
        if n_particles == 0 {
            return Err(Error::Domain("need at least one particle".into()));
        }
        Ok(Self { mu, m, g, n_particles })
    }

    /// `ℰ_Λ ~ slope · ln Λ` for large `Λ`.
    pub fn asymptotic_slope(&self) -> f64 {
        self.m / (2.0 * PI * PI)
    }

    /// `g² N ℰ_Λ`.
    pub fn scaled_counterterm(&self, lambda: f64, quad_tol: f64) -> Result<f64> {
        Ok(self.g * self.g * self.n_particles as f64 * nelson_counterterm(self, lambda, quad_tol)?)
    }
}

/// Radial integrand in `κ`, without the `1/(4π²)` prefactor.
pub fn radial_integrand(p: &NelsonParams, kappa: f64) -> f64 {
    let w = sqrt(kappa * kappa + p.mu * p.mu);
    if w == 0.0 {
        return 0.0;
    }
    kappa * kappa / (w * (kappa * kappa / (2.0 * p.m) + w))
}

/// `ℰ_Λ` to absolute error `quad_tol`.
pub fn nelson_counterterm(p: &NelsonParams, lambda: f64, quad_tol: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(alloc::format!("cutoff {lambda} must be positive")));
    }
    if !(quad_tol > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive".into()));
    }
    let sigma = if p.mu > 0.0 { p.mu } else { 1.0 };
    let pref = 1.0 / (4.0 * PI * PI);
    let f = |t: f64| {
        let kappa = sigma * sinh(t);
        pref * radial_integrand(p, kappa) * sigma * cosh(t)
    };
    Ok(integrate(&f, 0.0, asinh(lambda / sigma), quad_tol)?.value)
}
