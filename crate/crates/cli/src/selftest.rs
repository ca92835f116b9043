//! Reduced-size versions of every module's invariant suite, run in a fixed order.

use std::time::Instant;

use kpz_lab::asep_exact::{f_series, tagged_particle_cdf_raw, AsepParams, AsepSizes, TWKernelSpec};
use kpz_lab::asep_sim::{
    build_environment, evolve, gartner_identity_check, gartner_params, init_geometry, GeometryKind, Simulation, Window,
};
use kpz_lab::fredholm::{airy_determinant, DEFAULT_SCALE};
use kpz_lab::kpz::{
    kpz_crossover_cdf_csc_raw, kpz_crossover_cdf_raw, rescale_longtime, tw_gue_fredholm, tw_gue_painleve, CrossoverParams,
    CrossoverResolution, CscCalibration, CscResolution,
};
use kpz_lab::linalg::{complex_det, CMatrix};
use kpz_lab::polymer::{
    endpoint_law, last_passage, last_passage_enumerate, martingale_w, partition_enumerate, partition_transfer, DisorderField,
    WeightDistribution,
};
use kpz_lab::quadrature::{composite_gauss_legendre, gauss_legendre, panel_breaks};
use kpz_lab::special::{airy, csc_power, gamma};
use kpz_lab::table::{csv_string, parse_csv, CsvData};
use kpz_lab::{Complex64, Result};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        format!("{} {} {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SelftestOptions {
    pub perturb_lambda: f64,
}

type CheckFn = fn(&SelftestOptions) -> Result<(bool, String)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("quadrature.gauss-legendre-exactness", gauss_legendre_exactness),
    ("linalg.determinant-multiplicative", determinant_multiplicative),
    ("special.airy-origin", airy_origin),
    ("special.gamma-reflection", gamma_reflection),
    ("special.csc-identity", csc_identity),
    ("fredholm.airy-resolution", airy_resolution),
    ("kpz.tw-gue-two-routes", tw_gue_two_routes),
    ("kpz.crossover-two-routes", crossover_two_routes),
    ("kpz.rescale-longtime", rescale_check),
    ("asep-exact.f-series-conjugate", f_series_conjugate),
    ("asep-exact.tasep-first-particle", tasep_first_particle),
    ("asep-sim.lazy-matches-graphical", lazy_matches_graphical),
    ("asep-sim.event-equivalence", event_equivalence),
    ("asep-sim.gartner-identity", gartner_identity),
    ("polymer.transfer-vs-enumeration", transfer_vs_enumeration),
    ("polymer.endpoint-normalization", endpoint_normalization),
    ("polymer.last-passage", last_passage_check),
    ("polymer.martingale-beta-zero", martingale_beta_zero),
    ("table.round-trip", table_round_trip),
];

/// Runs every check in order; `report` sees each line as soon as it is known.
pub fn run(options: &SelftestOptions, mut report: impl FnMut(&Check)) -> Vec<Check> {
    let mut out = Vec::with_capacity(CHECKS.len());
    for &(name, f) in CHECKS {
        let start = Instant::now();
        let (passed, detail) = match f(options) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let check = Check { name, passed, detail: format!("{detail} ({:.1}s)", start.elapsed().as_secs_f64()) };
        report(&check);
        out.push(check);
    }
    out
}

fn verdict(err: f64, tol: f64) -> (bool, String) {
    (err < tol, format!("err={err:.2e} tol={tol:.0e}"))
}

fn gauss_legendre_exactness(_: &SelftestOptions) -> Result<(bool, String)> {
    let rule = gauss_legendre(20)?;
    let err = (0..40).map(|k| {
        let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
        (rule.integrate(|x| x.powi(k)) - exact).abs()
    });
    Ok(verdict(err.fold(0.0, f64::max), 1e-13))
}

fn test_matrix(n: usize, phase: f64) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let a = (i * 7 + j * 3) as f64 + phase;
        Complex64::new(a.sin(), (1.3 * a).cos()) + if i == j { Complex64::new(2.0, 0.0) } else { Complex64::new(0.0, 0.0) }
    })
}

fn determinant_multiplicative(_: &SelftestOptions) -> Result<(bool, String)> {
    let (a, b) = (test_matrix(40, 0.1), test_matrix(40, 0.7));
    let da = complex_det(&a)?.value;
    let db = complex_det(&b)?.value;
    let dab = complex_det(&a.matmul(&b)?)?.value;
    Ok(verdict((dab - da * db).norm() / dab.norm(), 1e-11))
}

fn airy_origin(_: &SelftestOptions) -> Result<(bool, String)> {
    let p = airy(0.0)?;
    let err = (p.ai - 0.355_028_053_887_817_2).abs().max((p.ai_prime + 0.258_819_403_792_806_8).abs());
    Ok(verdict(err, 1e-14))
}

fn gamma_reflection(_: &SelftestOptions) -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    for z in [Complex64::new(0.3, 0.7), Complex64::new(-2.4, 1.1), Complex64::new(0.5, -3.0)] {
        let lhs = gamma(z)? * gamma(1.0 - z)?;
        let rhs = std::f64::consts::PI / (std::f64::consts::PI * z).sin();
        err = err.max((lhs - rhs).norm() / rhs.norm());
    }
    Ok(verdict(err, 1e-12))
}

/// `2^{1/3}∫ μ e^{wt}/(e^t − μ) dt` by composite Gauss–Legendre, `Re w ∈ (0, 1)`.
pub fn csc_t_integral(mu: Complex64, w: Complex64) -> Result<Complex64> {
    let rule = composite_gauss_legendre(&panel_breaks(-220.0, 220.0, 1.0), 20)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
        sum += wt * mu * (w * t).exp() / (t.exp() - mu);
    }
    Ok(2f64.cbrt() * sum)
}

fn csc_identity(_: &SelftestOptions) -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    for (k, &re) in [0.2, 0.5, 0.8].iter().enumerate() {
        let mu = Complex64::new(-1.0 + k as f64, 1.0);
        let w = Complex64::new(-re, 0.7 * k as f64 - 0.5);
        let quad = csc_t_integral(mu, -w)?;
        let closed = csc_power(mu, w / 2f64.cbrt())?;
        err = err.max((quad - closed).norm() / closed.norm());
    }
    Ok(verdict(err, 1e-8))
}

fn airy_resolution(_: &SelftestOptions) -> Result<(bool, String)> {
    let a = airy_determinant(-2.0, 80, DEFAULT_SCALE)?;
    let b = airy_determinant(-2.0, 160, DEFAULT_SCALE)?;
    Ok(verdict((a - b).norm(), 1e-7))
}

fn tw_gue_two_routes(_: &SelftestOptions) -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    for s in [-4.0, -2.0, 0.0, 2.0] {
        err = err.max((tw_gue_fredholm(s, 60)? - tw_gue_painleve(s)?).abs());
    }
    Ok(verdict(err, 1e-5))
}

fn crossover_two_routes(_: &SelftestOptions) -> Result<(bool, String)> {
    let params = CrossoverParams::new(1.0)?;
    let a = kpz_crossover_cdf_raw(&params, 0.0, &CrossoverResolution::default(), true)?;
    let b = kpz_crossover_cdf_csc_raw(1.0, 0.0, &CscResolution::default(), &CscCalibration::default(), true)?;
    Ok(verdict((a.re - b.re).abs(), 1e-4))
}

fn rescale_check(_: &SelftestOptions) -> Result<(bool, String)> {
    Ok(verdict((rescale_longtime(8.0, 1.0) - 2f64.powf(2.0 / 3.0)).abs(), 1e-14))
}

fn f_series_conjugate(_: &SelftestOptions) -> Result<(bool, String)> {
    let (mu, z, tau) = (Complex64::new(0.4, 0.3), Complex64::new(1.2, -0.5), 0.5);
    let a = f_series(mu, z, tau, 1e-15)?;
    let b = f_series(mu.conj(), z.conj(), tau, 1e-15)?;
    Ok(verdict((a.conj() - b).norm(), 1e-13))
}

fn tasep_first_particle(_: &SelftestOptions) -> Result<(bool, String)> {
    let params = AsepParams::new(0.0, 1.0)?;
    let spec = TWKernelSpec::new(0.0, 1.0, 1, 0);
    let v = tagged_particle_cdf_raw(&params, &spec, &AsepSizes::default(), false)?;
    Ok(verdict((v.re - (1.0 - (-1.0f64).exp())).abs(), 1e-10))
}

fn lazy_matches_graphical(_: &SelftestOptions) -> Result<(bool, String)> {
    let params = AsepParams::from_gamma(0.6)?;
    let window = Window::for_observation(0, 40.0)?;
    let mut sim = Simulation::new(GeometryKind::Wedge, &params, window, 40.0, 3, 0)?;
    sim.advance(40.0)?;
    let env = build_environment(window, 40.0, params.p, params.q, 3)?;
    let direct = evolve(&init_geometry(GeometryKind::Wedge, window, 3), &env, 40.0)?;
    let same = direct.occupation == sim.state().occupation && direct.flux == sim.state().flux;
    Ok((same, format!("h(0)={} flux agrees={same}", direct.height(0)?)))
}

fn event_equivalence(_: &SelftestOptions) -> Result<(bool, String)> {
    let params = AsepParams::from_gamma(0.5)?;
    let window = Window::for_observation(6, 8.0)?;
    let mut bad = 0usize;
    let mut total = 0usize;
    for r in 0..50u64 {
        let mut sim = Simulation::new(GeometryKind::Wedge, &params, window, 8.0, 4, r)?;
        sim.advance(8.0)?;
        let st = sim.state();
        for x in -6..=6i64 {
            for m in 1..=8i64 {
                let lhs = st.height(x)? >= 2 * m - x;
                let rhs = st.tagged[(m - 1) as usize] <= x;
                total += 1;
                bad += usize::from(lhs != rhs);
            }
        }
    }
    Ok((bad == 0, format!("{bad} mismatches in {total} events")))
}

fn gartner_identity(o: &SelftestOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for k in 1..=20 {
        let eps = 0.245 * k as f64 / 20.0;
        let mut g = gartner_params(eps)?;
        g.lambda_eps += o.perturb_lambda;
        for spins in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            worst = worst.max(gartner_identity_check(&g, spins)?);
        }
    }
    Ok(verdict(worst, 1e-12))
}

fn transfer_vs_enumeration(_: &SelftestOptions) -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    for r in 0..3u64 {
        let field = DisorderField::replica(12, WeightDistribution::StandardNormal, 21, r);
        for beta in [0.0, 0.5, 2.0] {
            let arr = partition_transfer(&field, 12, beta)?;
            for y in (-12..=12).step_by(4) {
                let e = partition_enumerate(&field, 12, y, beta)?;
                err = err.max((arr.log_z(y)?.exp() - e).abs() / e);
            }
        }
    }
    Ok(verdict(err, 1e-12))
}

fn endpoint_normalization(_: &SelftestOptions) -> Result<(bool, String)> {
    let field = DisorderField::replica(30, WeightDistribution::CenteredExponential, 5, 0);
    let law = endpoint_law(&field, 30, 4, 11, 0.7)?;
    Ok(verdict((law.iter().sum::<f64>() - 1.0).abs(), 1e-12))
}

fn last_passage_check(_: &SelftestOptions) -> Result<(bool, String)> {
    let field = DisorderField::replica(14, WeightDistribution::StandardNormal, 8, 0);
    Ok(verdict((last_passage(&field, 14, 2)? - last_passage_enumerate(&field, 14, 2)?).abs(), 1e-12))
}

fn martingale_beta_zero(_: &SelftestOptions) -> Result<(bool, String)> {
    Ok(verdict((martingale_w(WeightDistribution::StandardNormal, 200, 0.0, 1, 0)? - 1.0).abs(), 1e-12))
}

fn table_round_trip(_: &SelftestOptions) -> Result<(bool, String)> {
    let s: Vec<f64> = (0..50).map(|k| -3.0 + 0.137 * k as f64).collect();
    let v: Vec<f64> = s.iter().map(|&x| kpz_lab::special::gaussian_cdf(x)).collect();
    let text = csv_string(("s", "value"), &s, &v);
    let ok = match parse_csv(&text)? {
        CsvData::Table { s: s2, values: v2, .. } => csv_string(("s", "value"), &s2, &v2) == text,
        CsvData::Samples(_) => false,
    };
    Ok((ok, format!("lossless={ok}")))
}
