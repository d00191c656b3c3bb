//! Residuals of the identity suite on one model.
//!
//! Every function returns the worst residual over its probe set; a failed
//! evaluation (spectrum hit, singular block) becomes [`FAILED_RESIDUAL`].

use faer::linalg::solvers::DenseSolveCore;
use krein_core::algebra::{eye, rel_diff};
use krein_core::block::schur_invert;
use krein_core::singular::{direct_cutoff_resolvent, regularized_resolvent, regularized_schur_inverse, SingularModel};
use krein_core::spectral::{op_norm_scale, pseudo_resolvent_defect};
use krein_core::{c64, BlockOp2, CMat, FreeHamiltonian, OpAlgebra, OperatorModel, Result};
use rand_chacha::ChaCha8Rng;

use crate::gen;
use crate::report::{Worst, FAILED_RESIDUAL};

pub type Model = SingularModel<OperatorModel>;

/// How a residual is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// `residual ≤ tol`.
    Identity,
    /// `value < 1`, a strict contraction.
    Contraction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub name: &'static str,
    pub value: f64,
    pub kind: Kind,
}

fn id(name: &'static str, value: f64) -> Residual {
    Residual { name, value, kind: Kind::Identity }
}

fn run(f: impl FnOnce() -> Result<f64>) -> f64 {
    f().unwrap_or(FAILED_RESIDUAL)
}

pub fn dense_inverse(m: &CMat) -> CMat {
    m.partial_piv_lu().inverse()
}

/// `(−X + z)⁻¹` by LU.
pub fn dense_resolvent(x: &CMat, z: c64) -> CMat {
    dense_inverse(&x.scale(c64::new(-1.0, 0.0)).shift(z))
}

fn pairs(pts: &[c64]) -> impl Iterator<Item = (c64, c64)> + '_ {
    pts.iter().enumerate().flat_map(move |(i, &z)| pts[i + 1..].iter().map(move |&w| (z, w)))
}

fn entrywise(a: &CMat, b: &CMat) -> f64 {
    let mut w = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            w = w.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    w
}

pub fn resolvent_adjoint_symmetry(m: &OperatorModel, pts: &[c64]) -> f64 {
    let mut w = Worst::default();
    for &z in pts {
        w.add(run(|| Ok(entrywise(&m.resolvent(z)?.adjoint().to_owned(), &m.resolvent(z.conj())?))));
    }
    w.0
}

pub fn first_resolvent_identity(m: &OperatorModel, pts: &[c64]) -> f64 {
    let mut w = Worst::default();
    for (z, v) in pairs(pts) {
        w.add(run(|| {
            let d = pseudo_resolvent_defect(|x| m.resolvent(x), z, v)?;
            Ok(d / (m.resolvent(z)?.norm2() * m.resolvent(v)?.norm2()))
        }));
    }
    w.0
}

/// `max(‖R_λ‖_{𝔉,𝔥_s} − (λ_inf − λ)^{s−1}, 0)` over the `(δ, s)` grid with
/// `λ = λ_inf − δ·√(λ_inf²+1)`.
pub fn interpolation_excess(m: &OperatorModel) -> f64 {
    let li = m.lambda_inf();
    let mut w = Worst::default();
    for delta in [1.0, 2.0, 10.0] {
        let lam = li - delta * (li * li + 1.0).sqrt();
        for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
            w.add(run(|| {
                let lhs = op_norm_scale(m, &m.resolvent(c64::new(lam, 0.0))?, 0.0, s)?;
                Ok((lhs - (li - lam).powf(s - 1.0)).max(0.0))
            }));
        }
    }
    w.0
}

pub fn scale_weight_group_law(m: &OperatorModel) -> f64 {
    let mut w = Worst::default();
    for (s, t) in [(0.3, 0.5), (-0.4, 0.9), (0.5, 0.5), (-1.0, 0.25), (0.7, -0.7)] {
        w.add(run(|| {
            let lhs = m.scale_weight(s)?.w.mul(&m.scale_weight(t)?.w);
            Ok(rel_diff(&lhs, &m.scale_weight(s + t)?.w))
        }));
    }
    w.0
}

/// Block inverse against the dense inverse of the assembled matrix, on a
/// random diagonally dominated block and on `Θ_S + M_z`.
pub fn schur_vs_dense(sm: &Model, rng: &mut ChaCha8Rng) -> f64 {
    let n = sm.model().dim();
    let d = eye(n).scale(c64::new(3.0, 0.0));
    let k = 1.0 / (n as f64).sqrt();
    let random = BlockOp2 {
        a11: gen::gaussian(rng, n, k).add(&d),
        a12: gen::gaussian(rng, n, k),
        a21: gen::gaussian(rng, n, k),
        a22: gen::gaussian(rng, n, k).sub(&d),
    };
    let mut w = Worst::default();
    let blocks = [Ok(random), sm.theta_plus_m(c64::new(0.0, sm.gamma_star()))];
    for b in blocks {
        w.add(run(|| {
            let b = b?;
            let inv = schur_invert(&b)?.assemble();
            Ok(rel_diff(&inv, &dense_inverse(&b.assemble())))
        }));
    }
    w.0
}

pub fn g_z_adjoint_form(sm: &Model, pts: &[c64]) -> f64 {
    let mut w = Worst::default();
    for &z in pts {
        w.add(run(|| Ok(rel_diff(&sm.g_z_from_adjoint(z)?, &sm.g_z(z)?))));
    }
    w.0
}

/// `(z − w) R_w G_z = G_w − G_z`.
pub fn rg_identity(sm: &Model, pts: &[c64]) -> f64 {
    let mut w = Worst::default();
    for (z, v) in pairs(pts) {
        w.add(run(|| {
            let lhs = sm.model().resolvent(v)?.mul(&sm.g_z(z)?).scale(z - v);
            Ok(rel_diff(&lhs, &sm.g_z(v)?.sub(&sm.g_z(z)?)))
        }));
    }
    w.0
}

/// `(z − w) R_w 𝔾_z = 𝔾_w − 𝔾_z`, slot by slot.
pub fn rgg_identity(sm: &Model, pts: &[c64]) -> f64 {
    let mut w = Worst::default();
    for (z, v) in pairs(pts) {
        w.add(run(|| {
            let rv = sm.model().resolvent(v)?;
            let ggz = sm.gg_z(z)?;
            let d = sm.gg_z(v)?.sub(&ggz);
            let l = rel_diff(&rv.mul(&ggz.left).scale(z - v), &d.left);
            let r = rel_diff(&rv.mul(&ggz.right).scale(z - v), &d.right);
            Ok(l.max(r))
        }));
    }
    w.0
}

/// `𝔸(𝔾 − 𝔾_z) = (z − λ∘) 𝔾† 𝔾_z = (z − λ∘) 𝔾_z̄† 𝔾`.
pub fn m_z_forms(sm: &Model, pts: &[c64]) -> f64 {
    let lc = c64::new(sm.lambda_circ(), 0.0);
    let mut w = Worst::default();
    for &z in pts {
        w.add(run(|| {
            let mz = sm.m_z(z)?;
            let conj = sm.gg_z(z.conj())?.adjoint_times(&sm.gg_z(lc)?).scale(z - lc);
            Ok(mz.blockwise_diff(&sm.m_z_product(z)?).max(mz.blockwise_diff(&conj)))
        }));
    }
    w.0
}

/// `M_z − M_w = (z − w) 𝔾_w̄† 𝔾_z`.
pub fn qft_difference(sm: &Model, pts: &[c64]) -> f64 {
    let mut w = Worst::default();
    for (z, v) in pairs(pts) {
        w.add(run(|| {
            let lhs = sm.m_z(z)?.sub(&sm.m_z(v)?);
            let rhs = sm.gg_z(v.conj())?.adjoint_times(&sm.gg_z(z)?).scale(z - v);
            Ok(lhs.blockwise_diff(&rhs))
        }));
    }
    w.0
}

/// `M_z† = M_z̄`.
pub fn qft_adjoint(sm: &Model, pts: &[c64]) -> f64 {
    let mut w = Worst::default();
    for &z in pts {
        w.add(run(|| Ok(sm.m_z(z)?.adjoint().blockwise_diff(&sm.m_z(z.conj())?))));
    }
    w.0
}

pub fn gsg_factorization(sm: &Model) -> f64 {
    sm.theta_s().blockwise_diff(&sm.theta_s_factored())
}

pub fn theta_symmetry(sm: &Model) -> f64 {
    sm.theta_s().symmetry_defect()
}

/// Factored `T_S` against `S − G†S − SG + G†SG`.
pub fn t_s_expansion(sm: &Model) -> f64 {
    let (g, s) = (sm.g(), sm.corr().s());
    let gh = OpAlgebra::adjoint(g);
    let expanded = s.sub(&gh.mul(s)).sub(&s.mul(g)).add(&gh.mul(s).mul(g));
    rel_diff(&sm.t_s(), &expanded).max(krein_core::algebra::hermiticity_defect(&sm.t_s()))
}

pub fn krein_oracle(sm: &Model, pts: &[c64]) -> f64 {
    let hs = sm.h_s_direct();
    let mut w = Worst::default();
    w.add(krein_core::algebra::hermiticity_defect(&hs));
    for &z in pts {
        w.add(run(|| Ok(rel_diff(&sm.krein_resolvent(z)?, &dense_resolvent(&hs, z)))));
    }
    w.0
}

/// `R̂_z† = R̂_z̄`, relative.
pub fn krein_adjoint_symmetry(sm: &Model, pts: &[c64]) -> f64 {
    let mut w = Worst::default();
    for &z in pts {
        w.add(run(|| Ok(rel_diff(&OpAlgebra::adjoint(&sm.krein_resolvent(z)?), &sm.krein_resolvent(z.conj())?))));
    }
    w.0
}

/// Pseudo-resolvent defect over `(1 + ‖R̂_z‖)(1 + ‖R̂_w‖)`.
pub fn krein_pseudo_resolvent(sm: &Model, pts: &[c64]) -> f64 {
    let mut w = Worst::default();
    for (z, v) in pairs(pts) {
        w.add(run(|| {
            let d = pseudo_resolvent_defect(|x| sm.krein_resolvent(x), z, v)?;
            let scale = (1.0 + sm.krein_resolvent(z)?.norm2()) * (1.0 + sm.krein_resolvent(v)?.norm2());
            Ok(d / scale)
        }));
    }
    w.0
}

/// Three new reference points below `lambda_threshold`.
pub fn reparametrization_points(sm: &Model) -> [f64; 3] {
    let t = sm.lambda_threshold();
    [t - 5.0, t - 1.0, sm.lambda_circ() - 2.0]
}

/// Blockwise `Θ̃_S̃ + M̃_z` vs `Θ_S + M_z`, the two Kreĭn resolvents, and the
/// pre-hermitization asymmetry of `S̃`.
pub fn reparametrization(sm: &Model, pts: &[c64]) -> f64 {
    let mut w = Worst::default();
    for lam in reparametrization_points(sm) {
        w.add(run(|| {
            let (tilde, asym) = sm.reparametrize(lam)?;
            let mut r = asym;
            for &z in pts {
                r = r.max(tilde.theta_plus_m(z)?.blockwise_diff(&sm.theta_plus_m(z)?));
                r = r.max(rel_diff(&tilde.krein_resolvent(z)?, &sm.krein_resolvent(z)?));
            }
            Ok(r)
        }));
    }
    w.0
}

/// Regularized formula and the second-Schur-complement inverse against the
/// dense cutoff resolvent, for a random `(A_n, E_n)`.
pub fn regularized(m: &OperatorModel, rng: &mut ChaCha8Rng, pts: &[c64]) -> (f64, f64) {
    let (a_n, e_n, lc) = match gen::cutoff_pair(rng, m) {
        Ok(p) => p,
        Err(_) => return (FAILED_RESIDUAL, FAILED_RESIDUAL),
    };
    let (mut formula, mut schur) = (Worst::default(), Worst::default());
    for &z in pts {
        let direct = match direct_cutoff_resolvent(m, &a_n, &e_n, z) {
            Ok(d) => d,
            Err(_) => {
                formula.add(FAILED_RESIDUAL);
                continue;
            }
        };
        formula.add_result(regularized_resolvent(m, &a_n, &e_n, lc, z).map(|r| rel_diff(&r, &direct)));
        schur.add_result(regularized_schur_inverse(m, &a_n, &e_n, lc, z).map(|r| rel_diff(&r, &direct)));
    }
    (formula.0, schur.0)
}

/// `A = 0`: `R̂_z = R_z (1 + S R_z)⁻¹`.
pub fn a_zero_reduction(sm: &Model, pts: &[c64]) -> f64 {
    let n = sm.model().dim();
    let mut w = Worst::default();
    for &z in pts {
        w.add(run(|| {
            let rz = sm.model().resolvent(z)?;
            let expect = rz.mul(&dense_inverse(&eye(n).add(&sm.corr().s().mul(&rz))));
            Ok(rel_diff(&sm.krein_resolvent(z)?, &expect))
        }));
    }
    w.0
}

/// Largest `‖G_λ‖` for `λ = lambda_threshold − δ`.
pub fn lambda_contraction(sm: &Model) -> f64 {
    let t = sm.lambda_threshold();
    let mut w = Worst::default();
    for d in [0.1, 1.0, 10.0, 100.0] {
        w.add(run(|| Ok(sm.g_z(c64::new(t - d, 0.0))?.norm2())));
    }
    w.0
}

/// Largest `‖G_{iγ}‖` for `|γ| = gamma_threshold + δ`.
pub fn gamma_contraction(sm: &Model) -> f64 {
    let t = sm.gamma_threshold();
    let mut w = Worst::default();
    for d in [0.1, 1.0, 10.0, 100.0] {
        for sign in [1.0, -1.0] {
            w.add(run(|| Ok(sm.g_z(c64::new(0.0, sign * (t + d)))?.norm2())));
        }
    }
    w.0
}

/// The full suite on the model of `seed` at dimension `n`.
pub fn model_suite(seed: u64, n: usize) -> Vec<Residual> {
    let sm = match gen::singular_model(seed, n) {
        Ok(sm) => sm,
        Err(_) => return failed_suite(),
    };
    let m = sm.model();
    let pts = sm.probe_points();
    let mut rng = gen::rng(seed ^ 0x5eed);
    let (reg, schur) = regularized(m, &mut rng, &pts);
    let a0 = gen::unperturbed_model(seed, n).map(|z| a_zero_reduction(&z, &pts)).unwrap_or(FAILED_RESIDUAL);
    vec![
        id("reconstruction", m.reconstruction_error()),
        id("resolvent_adjoint_symmetry", resolvent_adjoint_symmetry(m, &pts)),
        id("first_resolvent_identity", first_resolvent_identity(m, &pts)),
        id("interpolation_bound", interpolation_excess(m)),
        id("scale_weight_group_law", scale_weight_group_law(m)),
        id("schur_vs_dense", schur_vs_dense(&sm, &mut rng)),
        id("g_z_adjoint_form", g_z_adjoint_form(&sm, &pts)),
        id("rg_identity", rg_identity(&sm, &pts)),
        id("rgg_identity", rgg_identity(&sm, &pts)),
        id("m_z_forms", m_z_forms(&sm, &pts)),
        id("qft_difference", qft_difference(&sm, &pts)),
        id("qft_adjoint", qft_adjoint(&sm, &pts)),
        id("gsg_factorization", gsg_factorization(&sm)),
        id("theta_symmetry", theta_symmetry(&sm)),
        id("t_s_expansion", t_s_expansion(&sm)),
        id("krein_oracle", krein_oracle(&sm, &pts)),
        id("krein_adjoint_symmetry", krein_adjoint_symmetry(&sm, &pts)),
        id("krein_pseudo_resolvent", krein_pseudo_resolvent(&sm, &pts)),
        id("reparametrization", reparametrization(&sm, &pts)),
        id("regularized_resolvent", reg),
        id("schur_complement_resolvent", schur),
        id("a_zero_reduction", a0),
        Residual { name: "lambda_threshold_contraction", value: lambda_contraction(&sm), kind: Kind::Contraction },
        Residual { name: "gamma_threshold_contraction", value: gamma_contraction(&sm), kind: Kind::Contraction },
    ]
}

pub const SUITE_NAMES: [&str; 24] = [
    "reconstruction",
    "resolvent_adjoint_symmetry",
    "first_resolvent_identity",
    "interpolation_bound",
    "scale_weight_group_law",
    "schur_vs_dense",
    "g_z_adjoint_form",
    "rg_identity",
    "rgg_identity",
    "m_z_forms",
    "qft_difference",
    "qft_adjoint",
    "gsg_factorization",
    "theta_symmetry",
    "t_s_expansion",
    "krein_oracle",
    "krein_adjoint_symmetry",
    "krein_pseudo_resolvent",
    "reparametrization",
    "regularized_resolvent",
    "schur_complement_resolvent",
    "a_zero_reduction",
    "lambda_threshold_contraction",
    "gamma_threshold_contraction",
];

fn failed_suite() -> Vec<Residual> {
    SUITE_NAMES
        .iter()
        .map(|&name| {
            let kind = if name.ends_with("contraction") { Kind::Contraction } else { Kind::Identity };
            Residual { name, value: FAILED_RESIDUAL, kind }
        })
        .collect()
}
