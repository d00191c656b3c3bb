//! Norm-resolvent distances along cutoff families, hypothesis checks and
//! empirical rate fits.

use alloc::vec::Vec;

use faer::c64;

use crate::algebra::{diff_norm, rel_diff, OpAlgebra};
use crate::error::{Error, Result};
use crate::math::{exp, ln, real};
use crate::models::CutoffFamily;
use crate::singular::{direct_cutoff_resolvent, direct_resolvent, regularized_resolvent, SingularModel};
use crate::spectral::FreeHamiltonian;

/// Allowed relative disagreement between the direct and the block-formula
/// cutoff resolvent.
pub const PATH_TOL: f64 = 1e-10;
/// Distances at or below this are treated as zero by the fits.
pub const FIT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSample {
    /// `‖(−(H_n − E_n) + z)⁻¹ − R̂_z‖₂`.
    pub distance: f64,
    /// Relative difference between the direct and block-formula resolvents.
    pub path_mismatch: f64,
}

/// `(−(H_n − E_n) + z)⁻¹` by both paths, checked against each other.
pub fn cutoff_resolvent<F: FreeHamiltonian>(
    family: &CutoffFamily<F>,
    i: usize,
    z: c64,
) -> Result<(F::Op, f64)> {
    let l = family.level(i)?;
    let m = family.model();
    m.check_admissible(z)?;
    let direct = direct_cutoff_resolvent(m, &l.a_n, &l.e_n, z)?;
    let block = regularized_resolvent(m, &l.a_n, &l.e_n, family.lambda_circ(), z)?;
    let mismatch = rel_diff(&block, &direct);
    if !(mismatch <= PATH_TOL) {
        return Err(Error::InternalMismatch { residual: mismatch, tol: PATH_TOL });
    }
    Ok((direct, mismatch))
}

/// Distance at level index `i` to the Kreĭn resolvent of `limit`.
pub fn nr_distance<F: FreeHamiltonian>(
    family: &CutoffFamily<F>,
    limit: &SingularModel<F>,
    i: usize,
    z: c64,
) -> Result<DistanceSample> {
    let target = limit.krein_resolvent(z)?;
    nr_distance_to(family, &target, i, z)
}

/// Like [`nr_distance`] with the limit resolvent already evaluated at `z`.
pub fn nr_distance_to<F: FreeHamiltonian>(
    family: &CutoffFamily<F>,
    target: &F::Op,
    i: usize,
    z: c64,
) -> Result<DistanceSample> {
    let (r, path_mismatch) = cutoff_resolvent(family, i, z)?;
    Ok(DistanceSample { distance: diff_norm(&r, target), path_mismatch })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    pub constant: f64,
    pub residual: f64,
    pub levels_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCurve {
    pub z_probe: c64,
    pub levels: Vec<usize>,
    pub distances: Vec<f64>,
    pub path_mismatch: Vec<f64>,
    /// `‖R^{(n_k)} − R^{(n_{k+1})}‖₂` between consecutive levels.
    pub cauchy: Vec<f64>,
    pub fitted_rate: Option<RateFit>,
    pub fitted_log: Option<LogFit>,
}

impl ConvergenceCurve {
    /// Nonincreasing up to `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.distances.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    pub fn final_distance(&self) -> Option<f64> {
        self.distances.last().copied()
    }
}

/// Evaluates every level of `family` at `z` against `limit`.
pub fn sweep<F: FreeHamiltonian>(
    family: &CutoffFamily<F>,
    limit: &SingularModel<F>,
    z: c64,
) -> Result<ConvergenceCurve> {
    let target = limit.krein_resolvent(z)?;
    let mut distances = Vec::new();
    let mut path_mismatch = Vec::new();
    let mut cauchy = Vec::new();
    let mut prev: Option<F::Op> = None;
    for i in 0..family.levels().len() {
        let (r, mm) = cutoff_resolvent(family, i, z)?;
        distances.push(diff_norm(&r, &target));
        path_mismatch.push(mm);
        if let Some(p) = prev {
            cauchy.push(diff_norm(&r, &p));
        }
        prev = Some(r);
    }
    let levels = family.level_indices();
    let fitted_rate = fit_rate(&levels, &distances).ok();
    Ok(ConvergenceCurve { z_probe: z, levels, distances, path_mismatch, cauchy, fitted_rate, fitted_log: None })
}

/// Ordinary least squares `y = slope·x + intercept`, with the largest
/// absolute residual.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).abs())
        .fold(0.0, f64::max);
    (slope, intercept, residual)
}

/// Fits `log d_n = log C − rate · log n` on the points with `d_n > FIT_FLOOR`,
/// restricted to the upper half of those levels when that still leaves four.
pub fn fit_rate(levels: &[usize], distances: &[f64]) -> Result<RateFit> {
    if levels.len() != distances.len() {
        return Err(Error::DimensionMismatch { expected: levels.len(), got: distances.len() });
    }
    let usable: Vec<(f64, f64)> = levels
        .iter()
        .zip(distances)
        .filter(|(n, d)| **d > FIT_FLOOR && d.is_finite() && **n > 0)
        .map(|(n, d)| (ln(*n as f64), ln(*d)))
        .collect();
    if usable.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: usable.len() });
    }
    let half = usable.len() / 2;
    let pts = if usable.len() - half >= 4 { &usable[half..] } else { &usable[..] };
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (slope, intercept, residual) = line_fit(&x, &y);
    Ok(RateFit { rate: -slope, constant: exp(intercept), residual, levels_used: pts.len() })
}

/// Fits `value = slope · ln Λ + intercept` over the upper half of the `Λ`
/// range; the residual is the largest deviation there.
pub fn log_growth_fit(pairs: &[(f64, f64)]) -> Result<LogFit> {
    if pairs.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: pairs.len() });
    }
    if pairs.windows(2).any(|w| !(w[1].0 > w[0].0)) || pairs.iter().any(|p| !(p.0 > 0.0) || !p.1.is_finite()) {
        return Err(Error::Domain("cutoffs must be positive and increasing, values finite".into()));
    }
    let top = &pairs[pairs.len() / 2..];
    let x: Vec<f64> = top.iter().map(|p| ln(p.0)).collect();
    let y: Vec<f64> = top.iter().map(|p| p.1).collect();
    let (slope, intercept, residual) = line_fit(&x, &y);
    Ok(LogFit { slope, intercept, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallnessReport {
    pub gamma: f64,
    pub per_level: Vec<f64>,
    pub sup: f64,
    pub margin: f64,
    pub pass: bool,
}

/// `a_n = ‖(E_n − A_n R A_n†)(−(H_n − A_n R A_n†) + iγ)⁻¹‖₂` at `γ = γ*`,
/// passing iff `sup_n a_n < 1 − margin`.
pub fn uniform_smallness_check<F: FreeHamiltonian>(family: &CutoffFamily<F>, margin: f64) -> Result<SmallnessReport> {
    let gamma = family.gamma_star()?;
    let z = c64::new(0.0, gamma);
    let h = family.model().h_op();
    let mut per_level = Vec::new();
    for (i, l) in family.levels().iter().enumerate() {
        let gap = family.renormalized_gap(i)?;
        let base = h.add(&l.a_n.adjoint()).add(&l.a_n).sub(&l.e_n).add(&gap);
        let res = direct_resolvent(&base, z)?;
        per_level.push(gap.mul(&res).norm2());
    }
    let sup = per_level.iter().copied().fold(0.0, f64::max);
    Ok(SmallnessReport { gamma, per_level, sup, margin, pass: sup < 1.0 - margin })
}

/// `‖(E_n − A_n R A_n† − T_S)(T_S† T_S + 1)^{−1/2}‖₂`.
pub fn target_gap<F: FreeHamiltonian>(
    family: &CutoffFamily<F>,
    limit: &SingularModel<F>,
    i: usize,
) -> Result<f64> {
    let ts = limit.t_s();
    let weight = ts.adjoint().mul(&ts).shift(real(1.0)).hermitian_fn(&|x| 1.0 / crate::math::sqrt(x))?;
    Ok(family.renormalized_gap(i)?.sub(&ts).mul(&weight).norm2())
}
