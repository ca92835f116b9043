//! Real Airy functions, complex log-Gamma, the csc/power factor and the Gaussian CDF.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::{composite_gauss_legendre, QuadratureRule};

/// `Ai(x)` and `Ai'(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPair {
    pub ai: f64,
    pub ai_prime: f64,
}

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;
const SERIES_EDGE: f64 = 4.5;
const ASYMPTOTIC_EDGE: f64 = -30.0;
pub const AIRY_RANGE: f64 = 200.0;

/// Airy function and derivative on `|x| ≤ 200`.
pub fn airy(x: f64) -> Result<AiryPair> {
    if !(x.abs() <= AIRY_RANGE) {
        return Err(Error::OutOfRange(x));
    }
    Ok(airy_unchecked(x))
}

/// Airy pair for any finite argument: beyond the documented range the values underflow
/// to zero on the right; on the left the asymptotic expansion is used.
pub(crate) fn airy_unchecked(x: f64) -> AiryPair {
    if x.abs() <= SERIES_EDGE {
        airy_maclaurin(x)
    } else if x > 0.0 {
        airy_saddle(x)
    } else if x >= ASYMPTOTIC_EDGE {
        airy_taylor_step(x)
    } else {
        airy_asymptotic_negative(x)
    }
}

/// Maclaurin series; used on `|x| ≤ 4.5` and as an oracle in tests.
pub fn airy_maclaurin(x: f64) -> AiryPair {
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    let (mut fp, mut gp) = (0.0, 1.0);
    let (mut tfp, mut tgp) = (0.5 * x * x, 1.0);
    fp += tfp;
    for k in 0..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        tgp *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        if k >= 1 {
            tfp *= x3 / ((3.0 * kf) * (3.0 * kf + 2.0));
            fp += tfp;
        }
        f += tf;
        g += tg;
        gp += tgp;
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if tf.abs() + tg.abs() + tfp.abs() + tgp.abs() < 1e-18 * scale {
            break;
        }
    }
    AiryPair { ai: AI0 * f + AIP0 * g, ai_prime: AI0 * fp + AIP0 * gp }
}

fn saddle_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| {
        composite_gauss_legendre(&[0.0, 0.75, 1.5, 2.25, 3.0, 3.75, 4.5], 20).expect("static rule")
    })
}

/// Steepest-descent integral through the saddle `z = √x`, valid for `x > 0`:
/// `Ai(x) = e^{−ζ}/π ∫₀^∞ e^{−√x t²} cos(t³/3) dt`, `ζ = (2/3)x^{3/2}`.
pub fn airy_saddle(x: f64) -> AiryPair {
    let rx = x.sqrt();
    let zeta = 2.0 / 3.0 * x * rx;
    if zeta > 745.0 {
        return AiryPair { ai: 0.0, ai_prime: 0.0 };
    }
    let rule = saddle_rule();
    let (mut a, mut b) = (0.0, 0.0);
    // All nodes of the fixed rule live on [0, 4.5]; rescale time so the gaussian fits.
    let stretch = (2.12 / rx).sqrt().min(1.0);
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = u * stretch;
        let e = (-rx * t * t).exp();
        let (s, c) = (t * t * t / 3.0).sin_cos();
        a += w * e * c;
        b += w * e * (rx * c + t * s);
    }
    let pre = (-zeta).exp() / PI * stretch;
    AiryPair { ai: pre * a, ai_prime: -pre * b }
}

const TAYLOR_ANCHOR_STEP: f64 = 0.25;
const TAYLOR_TERMS: usize = 40;

/// Taylor series of the Airy solution about `x0` from value and slope there.
fn airy_taylor(x0: f64, y0: f64, yp0: f64, dx: f64) -> (f64, f64) {
    // y^{(n+2)} = x0 y^{(n)} + n y^{(n-1)}
    let mut d = [0.0f64; TAYLOR_TERMS + 2];
    d[0] = y0;
    d[1] = yp0;
    for n in 0..TAYLOR_TERMS {
        let prev = if n >= 1 { n as f64 * d[n - 1] } else { 0.0 };
        d[n + 2] = x0 * d[n] + prev;
    }
    let (mut y, mut yp) = (0.0, 0.0);
    let mut pw = 1.0;
    let mut fact = 1.0;
    for n in 0..TAYLOR_TERMS {
        if n > 0 {
            fact *= n as f64;
        }
        y += d[n] * pw / fact;
        yp += d[n + 1] * pw / fact;
        pw *= dx;
    }
    (y, yp)
}

fn taylor_anchors() -> &'static Vec<(f64, f64)> {
    static ANCHORS: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    ANCHORS.get_or_init(|| {
        let start = airy_maclaurin(-SERIES_EDGE);
        let count = ((ASYMPTOTIC_EDGE.abs() - SERIES_EDGE) / TAYLOR_ANCHOR_STEP).round() as usize + 2;
        let mut anchors = Vec::with_capacity(count);
        let (mut y, mut yp) = (start.ai, start.ai_prime);
        anchors.push((y, yp));
        for k in 0..count {
            let x0 = -SERIES_EDGE - k as f64 * TAYLOR_ANCHOR_STEP;
            // Two half steps per anchor interval keep the series short.
            let (y1, yp1) = airy_taylor(x0, y, yp, -0.5 * TAYLOR_ANCHOR_STEP);
            let (y2, yp2) = airy_taylor(x0 - 0.5 * TAYLOR_ANCHOR_STEP, y1, yp1, -0.5 * TAYLOR_ANCHOR_STEP);
            y = y2;
            yp = yp2;
            anchors.push((y, yp));
        }
        anchors
    })
}

/// Oscillatory region `[−30, −4.5)`: Taylor expansion about a precomputed anchor.
fn airy_taylor_step(x: f64) -> AiryPair {
    let anchors = taylor_anchors();
    let k = ((-SERIES_EDGE - x) / TAYLOR_ANCHOR_STEP).round() as usize;
    let k = k.min(anchors.len() - 1);
    let x0 = -SERIES_EDGE - k as f64 * TAYLOR_ANCHOR_STEP;
    let (y0, yp0) = anchors[k];
    let (ai, ai_prime) = airy_taylor(x0, y0, yp0, x - x0);
    AiryPair { ai, ai_prime }
}

/// Asymptotic expansion for large negative `x`, twelve correction terms.
pub fn airy_asymptotic_negative(x: f64) -> AiryPair {
    let z = -x;
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    const TERMS: usize = 12;
    let mut u = [0.0f64; TERMS];
    let mut v = [0.0f64; TERMS];
    u[0] = 1.0;
    v[0] = 1.0;
    for k in 1..TERMS {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
    }
    let (mut pu, mut qu, mut pv, mut qv) = (0.0, 0.0, 0.0, 0.0);
    let mut zpow = 1.0;
    for k in 0..TERMS {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pu += sign * u[k] / zpow;
            pv += sign * v[k] / zpow;
        } else {
            qu += sign * u[k] / zpow;
            qv += sign * v[k] / zpow;
        }
        zpow *= zeta;
    }
    let (s, c) = (zeta - 0.25 * PI).sin_cos();
    let amp = 1.0 / PI.sqrt();
    AiryPair {
        ai: amp * z.powf(-0.25) * (c * pu + s * qu),
        ai_prime: amp * z.powf(0.25) * (s * pv - c * qv),
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Complex `log Γ(z)`; the imaginary part is determined modulo `2π`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && (z.re - z.re.round()).abs() < 1e-14 {
        return Err(Error::Pole(format!("Gamma pole at {}", z.re)));
    }
    if z.re < 0.5 {
        let ls = log_sin_pi(z);
        let rest = log_gamma_lanczos(1.0 - z);
        Ok(Complex64::new(PI.ln(), 0.0) - ls - rest)
    } else {
        Ok(log_gamma_lanczos(z))
    }
}

fn log_gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `log sin(πz)`, stable for large `|Im z|`.
fn log_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 2.0 {
        return (PI * z).sin().ln();
    }
    if z.im < 0.0 {
        return log_sin_pi(z.conj()).conj();
    }
    // sin(πz) = (i/2)·e^{−iπz}·(1 − e^{2iπz}) for Im z > 0.
    let e = (Complex64::new(0.0, 2.0 * PI) * z).exp();
    Complex64::new(-std::f64::consts::LN_2, 0.5 * PI) - Complex64::new(0.0, PI) * z + (1.0 - e).ln()
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// `1/Γ(z)`, entire: zero at the non-positive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // 1/Γ(z) = sin(πz)·Γ(1−z)/π
        if z.im.abs() < 2.0 {
            (PI * z).sin() * log_gamma_lanczos(1.0 - z).exp() / PI
        } else {
            (log_sin_pi(z) + log_gamma_lanczos(1.0 - z)).exp() / PI
        }
    } else {
        (-log_gamma_lanczos(z)).exp()
    }
}

/// `π·2^{1/3}·(−μ)^{−w}/sin(πw)` with `w = 2^{1/3}·zdiff`, principal branch of `log(−μ)`.
pub fn csc_power(mu: Complex64, zdiff: Complex64) -> Result<Complex64> {
    let log_m = minus_log(mu)?;
    let w = 2f64.cbrt() * zdiff;
    Ok((-w * log_m).exp() * csc_factor(w)?)
}

/// `log(−μ)` with its cut along `μ ∈ [0, ∞)`.
pub(crate) fn minus_log(mu: Complex64) -> Result<Complex64> {
    if mu.im == 0.0 && mu.re >= 0.0 {
        return Err(Error::Pole("mu on the branch cut [0, inf)".into()));
    }
    Ok((-mu).ln())
}

/// `π·2^{1/3}/sin(πw)`, the μ-free part of [`csc_power`].
pub(crate) fn csc_factor(w: Complex64) -> Result<Complex64> {
    let nearest = w.re.round();
    if (w - nearest).norm() < 1e-8 {
        return Err(Error::Pole(format!("csc pole near w = {nearest}")));
    }
    Ok(PI * 2f64.cbrt() / (PI * w).sin())
}

/// Gaussian CDF `G(s)`.
pub fn gaussian_cdf(s: f64) -> f64 {
    0.5 * erfc(-s / std::f64::consts::SQRT_2)
}

/// Complementary error function: power series below 2, continued fraction above.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/√π · e^{−x²} Σ 2^n x^{2n+1} / (1·3·…·(2n+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..200 {
        term *= 2.0 * x2 / (2.0 * n as f64 + 1.0);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // Lentz evaluation of erfc(x) = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = 0.5 * n as f64;
        d = x + a * d;
        d = if d.abs() < tiny { tiny } else { d };
        c = x + a / c;
        c = if c.abs() < tiny { tiny } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() / f
}
