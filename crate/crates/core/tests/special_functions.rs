use std::f64::consts::PI;

use kpz_lab::quadrature::{composite_gauss_legendre, panel_breaks};
use kpz_lab::special::{airy, csc_power, erfc, gamma, gaussian_cdf, log_gamma, AIRY_RANGE};
use kpz_lab::{Complex64, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Maclaurin series `Ai(x) = c₁f(x) − c₂g(x)` summed to `terms` terms.
fn airy_series(x: f64, terms: usize) -> (f64, f64) {
    let c1 = 0.355_028_053_887_817_2;
    let c2 = 0.258_819_403_792_806_8;
    let x3 = x * x * x;
    let (mut f, mut g, mut fp, mut gp) = (0.0, 0.0, 0.0, 0.0);
    let (mut tf, mut tg) = (1.0, x);
    for k in 0..terms {
        let k3 = 3.0 * k as f64;
        f += tf;
        g += tg;
        if k > 0 {
            fp += k3 * tf / x;
        }
        gp += (k3 + 1.0) * tg / x;
        tf *= x3 / ((k3 + 2.0) * (k3 + 3.0));
        tg *= x3 / ((k3 + 3.0) * (k3 + 4.0));
    }
    if x == 0.0 {
        return (c1, -c2);
    }
    (c1 * f - c2 * g, c1 * fp - c2 * gp)
}

#[test]
fn airy_at_zero_and_one() {
    let a0 = airy(0.0).unwrap();
    let exact = 3f64.powf(-2.0 / 3.0) / gamma(c(2.0 / 3.0, 0.0)).unwrap().re;
    assert!((a0.ai - exact).abs() < 1e-12);
    assert!((a0.ai - 0.355_028_053_887_817).abs() < 1e-12);
    let (s, _) = airy_series(1.0, 50);
    assert!((airy(1.0).unwrap().ai - s).abs() < 1e-12);
    assert!((s - 0.135_292_416_313).abs() < 1e-11);
}

#[test]
fn airy_matches_series_oracle() {
    for k in 0..=120 {
        let x = -6.0 + 0.1 * k as f64;
        let (ai, aip) = airy_series(x, 80);
        let a = airy(x).unwrap();
        assert!((a.ai - ai).abs() < 1e-10, "x={x}");
        assert!((a.ai_prime - aip).abs() < 1e-10, "x={x}");
    }
}

#[test]
fn airy_positive_and_decreasing_on_right() {
    let vals: Vec<f64> = (0..=200).map(|k| airy(0.05 * k as f64).unwrap().ai).collect();
    assert!(vals.iter().all(|&v| v > 0.0 && v <= 0.3551));
    assert!(vals.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn airy_satisfies_its_ode() {
    let h = 1e-3;
    for k in 0..=400 {
        let x = -20.0 + 0.1 * k as f64;
        let r = airy(x + h).unwrap().ai - 2.0 * airy(x).unwrap().ai + airy(x - h).unwrap().ai - h * h * x * airy(x).unwrap().ai;
        assert!(r.abs() <= 5.0 * h.powi(4) * (1.0 + x * x), "x={x} r={r:e}");
    }
}

#[test]
fn airy_derivative_consistent() {
    let h = 1e-4;
    for k in 0..=80 {
        let x = -20.0 + 0.5 * k as f64;
        let d = (airy(x + h).unwrap().ai - airy(x - h).unwrap().ai) / (2.0 * h);
        assert!((d - airy(x).unwrap().ai_prime).abs() < 1e-6, "x={x}");
    }
}

#[test]
fn airy_seam_is_continuous() {
    for x in [4.4, 4.5, 4.6, -4.4, -4.5, -4.6] {
        let (ai, _) = airy_series(x, 120);
        assert!((airy(x).unwrap().ai - ai).abs() < 1e-11, "x={x}");
    }
}

#[test]
fn airy_range_enforced() {
    assert!(airy(AIRY_RANGE).is_ok());
    assert!(matches!(airy(AIRY_RANGE + 1.0), Err(Error::OutOfRange(_))));
    assert!(airy(-AIRY_RANGE - 1.0).is_err());
    assert!(airy(-200.0).unwrap().ai.is_finite());
}

#[test]
fn gamma_factorials() {
    assert!((gamma(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-13);
    assert!((gamma(c(5.0, 0.0)).unwrap() - 24.0).norm() < 1e-11 * 24.0);
}

#[test]
fn gamma_half_by_integration() {
    // Γ(1/2) = ∫₀^∞ t^{-1/2} e^{-t} dt = 2∫₀^∞ e^{-u²} du.
    let rule = composite_gauss_legendre(&panel_breaks(0.0, 12.0, 0.5), 20).unwrap();
    let integral = 2.0 * rule.integrate(|u| (-u * u).exp());
    let g = gamma(c(0.5, 0.0)).unwrap();
    assert!((g.re - integral).abs() < 1e-12);
    assert!((g.re - PI.sqrt()).abs() < 1e-12);
}

#[test]
fn gamma_poles_rejected() {
    for k in 0..5 {
        assert!(matches!(log_gamma(c(-(k as f64), 0.0)), Err(Error::Pole(_))));
    }
}

#[test]
fn gamma_reflection_region() {
    let z = c(-2.3, 0.7);
    let lhs = gamma(z).unwrap() * gamma(1.0 - z).unwrap();
    let rhs = PI / (PI * z).sin();
    assert!((lhs - rhs).norm() / rhs.norm() < 1e-11);
}

proptest! {
    #[test]
    fn gamma_recurrence(re in -20.0f64..20.0, im in -20.0f64..20.0) {
        let z = c(re, im);
        prop_assume!((z - z.re.round()).norm() > 1e-3 || z.re > 0.5);
        let lhs = gamma(z + 1.0).unwrap();
        let rhs = z * gamma(z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm());
    }

    #[test]
    fn gaussian_symmetry(s in -10.0f64..10.0) {
        prop_assert!((gaussian_cdf(s) + gaussian_cdf(-s) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn gaussian_values() {
    assert_eq!(gaussian_cdf(0.0), 0.5);
    assert!((gaussian_cdf(1.959_963_985) - 0.975).abs() < 1e-9);
    // Mills-ratio tail oracle for large x: erfc(x) ≈ e^{-x²}/(x√π)·(1 − 1/(2x²) + 3/(4x⁴)).
    let x: f64 = 6.0;
    let tail = (-x * x).exp() / (x * PI.sqrt()) * (1.0 - 0.5 / (x * x) + 0.75 / x.powi(4) - 15.0 / 8.0 / x.powi(6));
    assert!((erfc(x) - tail).abs() / tail < 1e-4);
}

/// `∫ μ e^{−a t}/(e^t − μ) dt` over the real line, the integral side of the csc identity.
fn t_integral(mu: Complex64, a: Complex64) -> Complex64 {
    let rule = composite_gauss_legendre(&panel_breaks(-230.0, 230.0, 0.5), 16).unwrap();
    let mut sum = c(0.0, 0.0);
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        sum += w * mu * (-a * t).exp() / (t.exp() - mu);
    }
    sum
}

#[test]
fn csc_identity_at_minus_one() {
    let s = 2f64.cbrt();
    // Re(−z̃/2) = 1/2 means the exponent a = z̃/2 has real part −1/2.
    for im in [0.0, 0.7, -1.9] {
        let a = c(-0.5, im);
        let closed = csc_power(c(-1.0, 0.0), a / s).unwrap() / s;
        assert!((t_integral(c(-1.0, 0.0), a) - closed).norm() < 1e-8);
    }
}

#[test]
fn csc_conjugate_symmetry() {
    let mu = c(-1.0, 0.0);
    for z in [c(0.0, 0.4), c(0.3, -1.2), c(-0.2, 2.0)] {
        let a = csc_power(mu, z.conj()).unwrap();
        let b = csc_power(mu, z).unwrap().conj();
        assert!((a - b).norm() < 1e-13 * b.norm());
    }
}

#[test]
fn csc_pole_rejected_and_blows_up() {
    let s = 2f64.cbrt();
    let mu = c(-1.0, 0.0);
    let near: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|&d| csc_power(mu, c((1.0 - d) / s, 0.0)).unwrap().norm()).collect();
    assert!(near.windows(2).all(|w| w[1] > 10.0 * w[0]));
    assert!(csc_power(mu, c(1.0 / s, 0.0)).is_err());
    assert!(csc_power(c(2.0, 0.0), c(0.1, 0.0)).is_err());
}

#[test]
fn csc_power_is_analytic() {
    let mu = c(-0.7, 0.4);
    let h = 1e-5;
    for z in [c(0.1, 0.3), c(-0.3, -0.8), c(0.25, 1.5)] {
        let f = |z| csc_power(mu, z).unwrap();
        let dx = (f(z + h) - f(z - h)) / (2.0 * h);
        let dy = (f(z + c(0.0, h)) - f(z - c(0.0, h))) / (2.0 * h);
        // Cauchy–Riemann: ∂f/∂y = i ∂f/∂x.
        assert!((dy - c(0.0, 1.0) * dx).norm() < 1e-6 * (1.0 + dx.norm()));
    }
}
