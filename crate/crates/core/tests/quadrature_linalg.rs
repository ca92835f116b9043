use kpz_lab::linalg::{complex_det, CMatrix};
use kpz_lab::quadrature::{circle_rule, composite_gauss_legendre, gauss_legendre, map_semiinfinite, panel_breaks, Domain};
use kpz_lab::special::airy;
use kpz_lab::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn one_and_two_point_rules() {
    let r = gauss_legendre(1).unwrap();
    assert_eq!(r.nodes, vec![0.0]);
    assert!((r.weights[0] - 2.0).abs() < 1e-15);
    let r = gauss_legendre(2).unwrap();
    let x = 1.0 / 3f64.sqrt();
    assert!((r.nodes[0] + x).abs() < 1e-15 && (r.nodes[1] - x).abs() < 1e-15);
    assert!(r.weights.iter().all(|w| (w - 1.0).abs() < 1e-15));
}

#[test]
fn zero_order_rejected() {
    assert!(gauss_legendre(0).is_err());
}

#[test]
fn twenty_points_integrate_degree_38() {
    let r = gauss_legendre(20).unwrap();
    assert!((r.integrate(|x| x.powi(38)) - 2.0 / 39.0).abs() < 1e-13);
}

#[test]
fn rule_invariants() {
    for n in [1, 3, 10, 33, 80, 161] {
        let r = gauss_legendre(n).unwrap();
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.nodes.iter().all(|x| x.abs() < 1.0));
        assert!(r.weights.iter().all(|&w| w > 0.0));
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
    }
}

#[test]
fn doubling_changes_smooth_integral_little() {
    let f = |x: f64| (3.0 * x).cos() * (-x * x).exp();
    for n in [20, 40] {
        let a = gauss_legendre(n).unwrap().integrate(f);
        let b = gauss_legendre(2 * n).unwrap().integrate(f);
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn composite_rule_covers_panels() {
    let r = composite_gauss_legendre(&panel_breaks(0.0, 3.0, 0.7), 8).unwrap();
    assert!((r.integrate(f64::exp) - (3f64.exp() - 1.0)).abs() < 1e-13);
}

#[test]
fn semiinfinite_exponential() {
    let r = map_semiinfinite(&gauss_legendre(60).unwrap(), 0.0, 10.0).unwrap();
    assert!((r.integrate(|x| (-x).exp()) - 1.0).abs() < 1e-8);
    assert_eq!(r.domain, Domain::SemiInfinite { start: 0.0, scale: 10.0 });
}

#[test]
fn semiinfinite_airy_integral() {
    let ai = |x: f64| airy(x.min(200.0)).unwrap().ai;
    let a = map_semiinfinite(&gauss_legendre(80).unwrap(), 0.0, 10.0).unwrap().integrate(ai);
    let b = map_semiinfinite(&gauss_legendre(160).unwrap(), 0.0, 10.0).unwrap().integrate(ai);
    assert!((a - b).abs() < 1e-9);
    assert!((a - 1.0 / 3.0).abs() < 1e-8, "{a}");
}

#[test]
fn semiinfinite_shift_and_scale_checks() {
    let r = map_semiinfinite(&gauss_legendre(30).unwrap(), 5.0, 10.0).unwrap();
    assert!(r.nodes[0] > 5.0);
    assert!(map_semiinfinite(&gauss_legendre(30).unwrap(), 5.0, 0.0).is_err());
    assert!(map_semiinfinite(&gauss_legendre(30).unwrap(), 5.0, -1.0).is_err());
}

#[test]
fn circle_residues() {
    let r = circle_rule(c(0.0, 0.0), 1.0, 32).unwrap();
    let two_pi_i = c(0.0, 2.0 * std::f64::consts::PI);
    assert!((r.integrate(|z| 1.0 / z) / two_pi_i - 1.0).norm() < 1e-12);
    assert!(r.integrate(|z| z).norm() < 1e-12);
    assert!((r.integrate(|z| z.exp() / (z * z)) / two_pi_i - 1.0).norm() < 1e-10);
    assert!(r.dz_weights.iter().sum::<Complex64>().norm() < 1e-12);
}

#[test]
fn circle_point_count_checked() {
    assert!(circle_rule(c(0.0, 0.0), 1.0, 3).is_err());
}

#[test]
fn circle_doubling_for_entire_integrand() {
    let f = |z: Complex64| (z * z).sin() * z.exp();
    let center = c(0.3, -0.2);
    let a = circle_rule(center, 1.5, 48).unwrap().integrate(f);
    let b = circle_rule(center, 1.5, 96).unwrap().integrate(f);
    assert!((a - b).norm() / (2.0 * std::f64::consts::PI) < 1e-10);
}

#[test]
fn determinant_examples() {
    let d = complex_det(&CMatrix::identity(5)).unwrap();
    assert!((d.value - 1.0).norm() < 1e-15 && !d.singular);
    let m = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c(2.0, 0.0),
        (1, 1) => c(0.0, 3.0),
        _ => c(0.0, 0.0),
    });
    assert!((complex_det(&m).unwrap().value - c(0.0, 6.0)).norm() < 1e-14);
}

#[test]
fn singular_matrix_flagged() {
    let d = complex_det(&CMatrix::zeros(3, 3)).unwrap();
    assert!(d.singular);
    assert_eq!(d.value, c(0.0, 0.0));
}

fn cofactor(m: &[Vec<Complex64>]) -> Complex64 {
    if m.len() == 1 {
        return m[0][0];
    }
    let mut sum = c(0.0, 0.0);
    for j in 0..m.len() {
        let minor: Vec<Vec<Complex64>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect()).collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * m[0][j] * cofactor(&minor);
    }
    sum
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

#[test]
fn determinant_matches_cofactor_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let m = random_matrix(4, &mut rng);
        let rows: Vec<Vec<Complex64>> = (0..4).map(|i| m.row(i).to_vec()).collect();
        let exact = cofactor(&rows);
        let d = complex_det(&m).unwrap().value;
        assert!((d - exact).norm() / exact.norm() < 1e-12);
    }
}

#[test]
fn large_dimension_keeps_log_magnitude() {
    let m = CMatrix::from_fn(300, 300, |i, j| if i == j { c(20.0, 0.0) } else { c(0.0, 0.0) });
    let d = complex_det(&m).unwrap();
    assert!((d.log_abs - 300.0 * 20f64.ln()).abs() < 1e-9);
    assert!(d.phase.abs() < 1e-12);
}

proptest! {
    #[test]
    fn product_rule(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(6, &mut rng);
        let b = random_matrix(6, &mut rng);
        let ab = complex_det(&a.matmul(&b).unwrap()).unwrap().value;
        let prod = complex_det(&a).unwrap().value * complex_det(&b).unwrap().value;
        prop_assert!((ab - prod).norm() <= 1e-10 * prod.norm());
    }

    #[test]
    fn mapped_interval_integrates_polynomials(a in -5.0f64..5.0, w in 0.1f64..10.0, k in 0i32..15) {
        let b = a + w;
        let r = gauss_legendre(8).unwrap().on_interval(a, b);
        let exact = (b.powi(k + 1) - a.powi(k + 1)) / f64::from(k + 1);
        prop_assert!((r.integrate(|x| x.powi(k)) - exact).abs() <= 1e-11 * (1.0 + exact.abs()));
    }
}
