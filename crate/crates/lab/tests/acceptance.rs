//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use krein_core::c64;
use krein_core::convergence::{fit_rate, log_growth_fit, sweep};
use krein_core::models::{fock_build, friedrichs_family, nelson_counterterm, van_hove_model, FriedrichsParams, NelsonParams};
use krein_lab::gen::{rng, singular_model, sub_seed, unperturbed_model};
use krein_lab::suite::{self, Model};

const SEED: u64 = 20_240_917;
const MODELS: u64 = 100;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn dim_of(i: u64) -> usize {
    4 + (i % 37) as usize
}

fn models(count: u64, salt: u64) -> Vec<Model> {
    (0..count)
        .map(|i| singular_model(sub_seed(SEED ^ salt, i), dim_of(i)).expect("seeded model"))
        .collect()
}

fn max_over<T>(xs: &[T], f: impl Fn(&T) -> f64) -> f64 {
    xs.iter().map(f).fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed < Duration::from_secs(secs)
}

fn krein_oracle() -> Outcome {
    let ms = models(MODELS, 0);
    let start = Instant::now();
    let worst = max_over(&ms, |sm| suite::krein_oracle(sm, &sm.probe_points()));
    let t = start.elapsed();
    outcome(worst <= 1e-10 && within(t, 30), format!("worst {worst:.2e} (≤ 1e-10), {:.2}s (< 30s)", t.as_secs_f64()))
}

fn regularized_identity() -> Outcome {
    let ms = models(MODELS, 0);
    let start = Instant::now();
    let (mut formula, mut schur) = (0.0f64, 0.0f64);
    for (i, sm) in ms.iter().enumerate() {
        let mut r = rng(sub_seed(SEED ^ 0xa11, i as u64));
        let (f, s) = suite::regularized(sm.model(), &mut r, &sm.probe_points());
        formula = formula.max(f);
        schur = schur.max(s);
    }
    let t = start.elapsed();
    outcome(
        formula <= 1e-10 && schur <= 1e-10 && within(t, 30),
        format!("formula {formula:.2e}, Schur {schur:.2e} (≤ 1e-10), {:.2}s (< 30s)", t.as_secs_f64()),
    )
}

fn structural() -> Outcome {
    let ms = models(MODELS, 0);
    let ident = max_over(&ms, |sm| {
        let pts = sm.probe_points();
        suite::rg_identity(sm, &pts)
            .max(suite::rgg_identity(sm, &pts))
            .max(suite::m_z_forms(sm, &pts))
            .max(suite::qft_difference(sm, &pts))
            .max(suite::gsg_factorization(sm))
    });
    let theta = max_over(&ms, suite::theta_symmetry);
    let m_adj = max_over(&ms, |sm| suite::qft_adjoint(sm, &sm.probe_points()));
    let pseudo = max_over(&ms, |sm| suite::krein_pseudo_resolvent(sm, &sm.probe_points()));
    let adj = max_over(&ms, |sm| suite::krein_adjoint_symmetry(sm, &sm.probe_points()));
    outcome(
        ident <= 1e-11 && theta == 0.0 && m_adj <= 1e-12 && pseudo <= 1e-10 && adj <= 1e-11,
        format!("identities {ident:.2e}, Θ symmetry {theta:.1e}, M adjoint {m_adj:.2e}, pseudo-resolvent {pseudo:.2e}, R̂ adjoint {adj:.2e}"),
    )
}

fn thresholds() -> Outcome {
    let ms = models(50, 0x7e5);
    let g_lambda = max_over(&ms, suite::lambda_contraction);
    let g_gamma = max_over(&ms, suite::gamma_contraction);
    let interp = max_over(&ms, |sm| suite::interpolation_excess(sm.model()));
    outcome(
        g_lambda < 1.0 && g_gamma < 1.0 && interp <= 1e-10,
        format!("sup ‖G_λ‖ {g_lambda:.3}, sup ‖G_iγ‖ {g_gamma:.3} (< 1), interpolation excess {interp:.2e} (≤ 1e-10)"),
    )
}

fn reparametrization() -> Outcome {
    let ms = models(MODELS, 0);
    let worst = max_over(&ms, |sm| suite::reparametrization(sm, &sm.probe_points()));
    outcome(worst <= 1e-10, format!("worst {worst:.2e} over 3 reference points per model (≤ 1e-10)"))
}

fn renormalization() -> Outcome {
    let start = Instant::now();
    let levels = [16, 64, 256, 1024, 4096];
    let p = FriedrichsParams::default();
    let run = || -> krein_core::Result<_> {
        let fam = friedrichs_family(&p, &levels, None)?;
        let limit = fam.limit_model()?;
        let z = c64::new(0.0, fam.gamma_star()?);
        let curve = sweep(&fam, &limit, z)?;
        let fit = fit_rate(&curve.levels, &curve.distances)?;
        Ok((fam.lambda_circ(), curve, fit))
    };
    let (lc, curve, fit) = match run() {
        Ok(x) => x,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let t = start.elapsed();
    let se: Vec<f64> = levels.iter().map(|&n| -p.self_energy(n, lc)).collect();
    let se_mono = se.windows(2).all(|w| w[1] > w[0]);
    let growth = se[se.len() - 1] / se[0];
    let mono = curve.is_monotone(0.0);
    let last = curve.final_distance().unwrap_or(f64::INFINITY);
    outcome(
        se_mono && growth > 10.0 && mono && last < 1e-3 && fit.rate > 0.0 && within(t, 120),
        format!(
            "self-energy ×{growth:.1}, distances monotone {mono}, final {last:.2e} (< 1e-3), rate {:.3}, {:.2}s (< 120s)",
            fit.rate,
            t.as_secs_f64()
        ),
    )
}

fn van_hove() -> Outcome {
    let configs: [(&[f64], &[f64]); 5] = [
        (&[1.0], &[1.0]),
        (&[1.0, 3.0], &[1.0, 1.0]),
        (&[2.0, 3.0], &[1.0, 1.5]),
        (&[1.0, 2.0, 4.0], &[0.5, 0.8, 1.0]),
        (&[0.5, 1.5, 2.5], &[0.4, 0.6, 0.8]),
    ];
    let start = Instant::now();
    let mut gap = 0.0f64;
    let mut ccr = 0.0f64;
    for (freqs, v) in configs {
        let v: Vec<c64> = v.iter().map(|&x| c64::new(x, 0.0)).collect();
        let w: Vec<c64> = (0..v.len()).map(|j| c64::new(0.3 + 0.1 * j as f64, -0.2)).collect();
        let r = fock_build(freqs, 12).and_then(|f| {
            let vh = van_hove_model(&f, &v, 0.5)?;
            Ok(((vh.truncated_ground_energy()? - vh.exact_energy).abs(), f.ccr_defect(&v, &w)?))
        });
        match r {
            Ok((g, c)) => {
                gap = gap.max(g);
                ccr = ccr.max(c);
            }
            Err(e) => return outcome(false, format!("error: {e}")),
        }
    }
    let t = start.elapsed();
    outcome(
        gap <= 1e-6 && ccr <= 1e-12 && within(t, 60),
        format!("energy gap {gap:.2e} (≤ 1e-6), CCR defect {ccr:.2e} (≤ 1e-12), {:.2}s (< 60s)", t.as_secs_f64()),
    )
}

fn nelson() -> Outcome {
    let start = Instant::now();
    let p = NelsonParams::new(1.0, 1.0, 1.0, 1).expect("valid parameters");
    let pairs: krein_core::Result<Vec<(f64, f64)>> =
        [1e3, 1e4, 1e5, 1e6].iter().map(|&l| nelson_counterterm(&p, l, 1e-10).map(|e| (l, e))).collect();
    let pairs = match pairs {
        Ok(x) => x,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let fit = match log_growth_fit(&pairs) {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let t = start.elapsed();
    let slope_err = (fit.slope / p.asymptotic_slope() - 1.0).abs();
    let resid = fit.residual / pairs[3].1;
    outcome(
        slope_err <= 0.05 && resid < 0.02 && within(t, 10),
        format!(
            "slope {:.6} vs {:.6} ({:.2e} relative, ≤ 5%), residual {resid:.2e} of E at 1e6 (< 2%), {:.2}s (< 10s)",
            fit.slope,
            p.asymptotic_slope(),
            slope_err,
            t.as_secs_f64()
        ),
    )
}

fn a_zero() -> Outcome {
    let worst = (0..20u64)
        .map(|i| match unperturbed_model(sub_seed(SEED ^ 0xa0, i), dim_of(i)) {
            Ok(sm) => suite::a_zero_reduction(&sm, &sm.probe_points()),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    outcome(worst <= 1e-12, format!("worst {worst:.2e} over 20 models (≤ 1e-12)"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("krein_oracle_equivalence", krein_oracle),
        ("regularized_resolvent_identity", regularized_identity),
        ("structural_identities", structural),
        ("threshold_soundness", thresholds),
        ("coordinate_change_invariance", reparametrization),
        ("renormalization_convergence", renormalization),
        ("fock_van_hove_oracle", van_hove),
        ("nelson_counterterm", nelson),
        ("a_zero_reduction", a_zero),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {} {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
