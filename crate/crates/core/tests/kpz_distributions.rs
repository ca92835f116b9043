use std::f64::consts::PI;

use kpz_lab::fredholm::DEFAULT_REAL_NODES;
use kpz_lab::kpz::{
    gamma_airy, kpz_crossover_cdf, kpz_crossover_cdf_csc, kpz_crossover_cdf_csc_raw, kpz_crossover_cdf_raw, kpz_edge_cdf,
    kpz_edge_cdf_raw, rescale_longtime, rescale_shorttime, sigma_weight, solve_hastings_mcleod, tw_gue_fredholm,
    tw_gue_painleve, CrossoverParams, CrossoverResolution, CscCalibration, CscResolution, EdgeResolution, GammaAiryKind,
    GammaAirySizes, MuContourSpec, PAINLEVE_X0, PAINLEVE_X_MIN,
};
use kpz_lab::special::airy;
use kpz_lab::table::{uniform_grid, DistributionTable};
use kpz_lab::{Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn crossover_params_kappa() {
    let p = CrossoverParams::new(8.0).unwrap();
    assert!((p.kappa() - 2f64.powf(-1.0 / 3.0) * 2.0).abs() < 1e-15);
    assert!(CrossoverParams::new(0.0).is_err());
    assert!(CrossoverParams::new(-1.0).is_err());
}

#[test]
fn gue_fredholm_examples() {
    assert!((tw_gue_fredholm(8.0, DEFAULT_REAL_NODES).unwrap() - 1.0).abs() < 1e-9);
    let f0 = tw_gue_fredholm(0.0, DEFAULT_REAL_NODES).unwrap();
    assert!((f0 - tw_gue_painleve(0.0).unwrap()).abs() < 1e-6);
    let v: Vec<f64> = [-4.0, -2.0, 0.0, 2.0].iter().map(|&s| tw_gue_fredholm(s, DEFAULT_REAL_NODES).unwrap()).collect();
    assert!(v.windows(2).all(|w| w[0] < w[1]));
    assert!(matches!(tw_gue_fredholm(9.0, 80), Err(Error::OutOfRange(_))));
}

#[test]
fn gue_known_value() {
    // F_GUE(−2) = 0.41322 to five tabulated digits.
    assert!((tw_gue_painleve(-2.0).unwrap() - 0.41322).abs() < 1e-5);
    assert!((tw_gue_painleve(-2.0).unwrap() - tw_gue_fredholm(-2.0, DEFAULT_REAL_NODES).unwrap()).abs() < 1e-6);
}

#[test]
fn painleve_solution_invariants() {
    let sol = solve_hastings_mcleod(PAINLEVE_X0, PAINLEVE_X_MIN).unwrap();
    assert!((sol.q_values[0] - airy(PAINLEVE_X0).unwrap().ai).abs() < 1e-10);
    assert!(sol.x_grid.windows(2).all(|w| w[1] < w[0]));
    for x in [5.0, 6.0, 7.0, 7.9] {
        assert!((sol.q(x).unwrap() - airy(x).unwrap().ai).abs() < 1e-8);
    }
    // ODE residual by central differences of q with step h.
    let h = 1e-3;
    for k in 0..60 {
        let x = -10.0 + 0.3 * k as f64;
        let (qm, q0, qp) = (sol.q(x - h).unwrap(), sol.q(x).unwrap(), sol.q(x + h).unwrap());
        let r = (qp - 2.0 * q0 + qm) / (h * h) - (x + 2.0 * q0 * q0) * q0;
        assert!(r.abs() < 1e-5 * (1.0 + x.abs()), "x={x} r={r:e}");
    }
    assert!((tw_gue_painleve(8.0).unwrap() - 1.0).abs() < 1e-10);
    assert!(tw_gue_painleve(PAINLEVE_X_MIN - 1.0).is_err());
}

#[test]
fn sigma_weight_examples() {
    let p = CrossoverParams::new(1.0).unwrap();
    let mu = c(-1.0, 0.0);
    assert!((sigma_weight(&p, mu, 0.0).unwrap() - 0.5).norm() < 1e-15);
    assert!((sigma_weight(&p, mu, 200.0).unwrap() - 1.0).norm() < 1e-12);
    assert!(sigma_weight(&p, mu, -200.0).unwrap().norm() < 1e-12);
    assert!(matches!(sigma_weight(&p, c(1.0, 0.0), 0.0), Err(Error::Pole(_))));
}

#[test]
fn mu_contour_spec_checks() {
    let spec = MuContourSpec::default();
    assert!(spec.validate().is_ok());
    assert!(MuContourSpec { m: 20.0, ..spec }.validate().is_err());
    let rule = spec.rule(false).unwrap();
    // The hairpin stays at distance ≥ 1 from [0, ∞).
    for z in &rule.points {
        let dist = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
        assert!(dist >= 1.0 - 1e-12);
    }
    // (1/2πi)∫ e^{−μ} dμ/μ over the contour is 1: the integrand's only singularity inside is μ = 0.
    let i = rule.integrate(|mu| (-mu).exp() / mu) / c(0.0, 2.0 * PI);
    assert!((i - 1.0).norm() < 1e-12);
}

#[test]
fn crossover_far_right_tail() {
    let p = CrossoverParams::new(1.0).unwrap();
    let s = 8.0 * p.kappa();
    let v = kpz_crossover_cdf(&p, s, &CrossoverResolution::default()).unwrap();
    assert!((v - 1.0).abs() < 1e-6);
}

#[test]
fn crossover_imaginary_part_vanishes() {
    let p = CrossoverParams::new(1.0).unwrap();
    let full = kpz_crossover_cdf_raw(&p, -1.0, &CrossoverResolution::default(), false).unwrap();
    assert!(full.im.abs() < 1e-8);
    let sym = kpz_crossover_cdf_raw(&p, -1.0, &CrossoverResolution::default(), true).unwrap();
    assert!((full.re - sym.re).abs() < 1e-10);
}

#[test]
fn crossover_table_is_a_cdf_and_tracks_gue_at_large_time() {
    let t = 10.0;
    let p = CrossoverParams::new(t).unwrap();
    let res = CrossoverResolution::for_time(t);
    let grid = uniform_grid(-3.0, 1.0, 1.0).unwrap();
    let table = DistributionTable::tabulate(&grid, |s| kpz_crossover_cdf(&p, rescale_longtime(t, s), &res)).unwrap();
    assert!(table.values().windows(2).all(|w| w[0] < w[1]));
    for (&s, &v) in grid.iter().zip(table.values()) {
        assert!((v - tw_gue_painleve(s).unwrap()).abs() < 0.1);
    }
}

#[test]
fn crossover_window_enforced() {
    let p = CrossoverParams::new(2000.0).unwrap();
    assert!(kpz_crossover_cdf(&p, 0.0, &CrossoverResolution::default()).is_err());
}

#[test]
fn csc_route_agrees_at_origin() {
    let p = CrossoverParams::new(1.0).unwrap();
    let reference = kpz_crossover_cdf(&p, 0.0, &CrossoverResolution::default()).unwrap();
    let res = CscResolution::default();
    let (cal, resid) = CscCalibration::calibrate(1.0, 0.0, reference, &res).unwrap();
    assert!(resid < 1e-5);
    assert_eq!(cal, CscCalibration::default());
    let v = kpz_crossover_cdf_csc(1.0, 0.0, &res, &cal).unwrap();
    assert!((v - reference).abs() < 1e-5);
    let raw = kpz_crossover_cdf_csc_raw(1.0, 0.0, &res, &cal, false).unwrap();
    assert!(raw.im.abs() < 1e-8);
}

#[test]
fn csc_line_offset() {
    let res = CscResolution::default();
    // Re(−2^{1/3}(ζ − η')) for ζ on Re = −offset and η' on Re = +offset.
    assert!((2f64.cbrt() * 2.0 * res.offset() - 0.5).abs() < 1e-15);
    assert!(kpz_crossover_cdf_csc_raw(0.2, 0.0, &res, &CscCalibration::default(), true).is_err());
}

#[test]
fn gamma_airy_reduces_to_airy() {
    let sizes = GammaAirySizes::default();
    for a in [0.0, 1.0] {
        let ai = airy(a).unwrap().ai;
        assert!((gamma_airy(GammaAiryKind::Lower, a, 0.0, 1.0, &sizes).unwrap() - ai).abs() < 1e-8);
        assert!((gamma_airy(GammaAiryKind::Lower, a, 0.0, 2.0, &sizes).unwrap() - ai).abs() < 1e-8);
    }
}

#[test]
fn gamma_airy_truncation_certificate() {
    let sizes = GammaAirySizes::default();
    let longer = GammaAirySizes { extent: 1.3, ..sizes };
    for (kind, a, b, c) in [(GammaAiryKind::Upper, 0.5, 1.0, -0.3), (GammaAiryKind::Lower, -1.0, 0.8, 0.2)] {
        let x = gamma_airy(kind, a, b, c, &sizes).unwrap();
        let y = gamma_airy(kind, a, b, c, &longer).unwrap();
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn edge_cdf_properties() {
    let res = EdgeResolution::default();
    let v1 = kpz_edge_cdf(1.0, 1.0, 0.0, &res).unwrap();
    let v0 = kpz_edge_cdf(1.0, 0.0, 0.0, &res).unwrap();
    assert!((v1 - v0).abs() > 1e-3);
    assert!(kpz_edge_cdf_raw(1.0, 1.0, 0.0, &res, false).unwrap().im.abs() < 1e-6);
    assert!((kpz_edge_cdf(1.0, 0.0, 8.0, &res).unwrap() - 1.0).abs() < 1e-4);
    let lo = kpz_edge_cdf(1.0, 0.0, -2.0, &res).unwrap();
    assert!(lo < v0 + 1e-4);
}

#[test]
fn rescaling_maps() {
    assert!((rescale_longtime(8.0, 1.0) - 2f64.powf(2.0 / 3.0)).abs() < 1e-15);
    let shift = -(2.0 * PI).sqrt().ln();
    let slope = 2f64.powf(-0.5) * PI.powf(0.25);
    assert!((rescale_shorttime(1.0, 0.0) - slope * shift).abs() < 1e-15);
    for t in [0.125, 1.0, 50.0] {
        assert!(rescale_longtime(t, 0.1) > rescale_longtime(t, 0.0));
        assert!(rescale_shorttime(t, 0.1) > rescale_shorttime(t, 0.0));
    }
}
