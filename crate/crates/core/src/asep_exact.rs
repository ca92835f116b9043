//! The Tracy–Widom formula for step-initial ASEP: an integral over a μ-circle of an infinite
//! product times a Fredholm determinant on a circle, whose kernel is itself a ζ-circle integral.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::linalg::{complex_det, zgemm_into, CMatrix};

/// Jump rates: left (growth) at rate `q`, right at rate `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsepParams {
    pub p: f64,
    pub q: f64,
}

impl AsepParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p >= 0.0 && q > p && ((p + q) - 1.0).abs() < 1e-12) {
            return Err(invalid("ASEP rates need p + q = 1 and q > p >= 0"));
        }
        Ok(AsepParams { p, q })
    }

    /// `q = (1 + γ)/2`, `p = (1 − γ)/2`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(invalid("asymmetry gamma must lie in (0, 1]"));
        }
        AsepParams::new(0.5 * (1.0 - gamma), 0.5 * (1.0 + gamma))
    }

    pub fn gamma(&self) -> f64 {
        self.q - self.p
    }

    pub fn tau(&self) -> f64 {
        self.p / self.q
    }
}

/// Contour radii and exponent data for one formula evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TWKernelSpec {
    /// Time argument of the exponent (the particle is observed at `t/γ`).
    pub t: f64,
    pub m: i64,
    pub x: i64,
    pub rho_eta: f64,
    pub r_zeta: f64,
    /// Reference point of Ψ; cancels in the kernel and only sets the scale of the factors.
    pub xi: Complex64,
}

impl TWKernelSpec {
    /// Default radii, centered in the admissible annuli.
    pub fn new(tau: f64, t: f64, m: i64, x: i64) -> Self {
        let rho = 1.0 - 0.5 * (1.0 - tau);
        let r_zeta = if tau > 0.0 { 1.0 + 0.25 * (rho / tau - 1.0) } else { 1.5 };
        TWKernelSpec { t, m, x, rho_eta: rho, r_zeta, xi: Complex64::new(-1.0, 0.0) }
    }

    pub fn validate(&self, tau: f64) -> Result<()> {
        let upper = if tau > 0.0 { self.rho_eta / tau } else { f64::INFINITY };
        if !(tau < self.rho_eta && self.rho_eta < 1.0 && 1.0 < self.r_zeta && self.r_zeta < upper) {
            return Err(invalid("radii must satisfy tau < rho < 1 < r_zeta < rho/tau"));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(invalid("time must be nonnegative"));
        }
        if self.m < 1 {
            return Err(invalid("particle index m must be positive"));
        }
        Ok(())
    }

    /// `Λ(ζ) = −x log(1−ζ) + tζ/(1−ζ) + m log ζ` (integer x, m make `e^Λ` single valued).
    pub fn lambda(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        -(self.x as f64) * (one - z).ln() + self.t * z / (one - z) + self.m as f64 * z.ln()
    }
}

/// Quadrature sizes for the three circles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsepSizes {
    pub n_mu: usize,
    pub n_eta: usize,
    pub n_zeta: usize,
    /// Truncation tolerance of the bilateral f-series.
    pub f_tol: f64,
}

impl Default for AsepSizes {
    fn default() -> Self {
        AsepSizes { n_mu: 128, n_eta: 96, n_zeta: 96, f_tol: 1e-15 }
    }
}

impl AsepSizes {
    pub fn doubled(&self) -> Self {
        AsepSizes { n_mu: 2 * self.n_mu, n_eta: 2 * self.n_eta, n_zeta: 2 * self.n_zeta, ..*self }
    }
}

pub const ASEP_TOLERANCE: f64 = 1e-3;
const PRODUCT_CUTOFF: f64 = 1e-14;
const POLE_GUARD: f64 = 1e-10;

/// `f(μ, z) = Σ_{k∈ℤ} τ^k z^k/(1 − τ^k μ)` for `1 < |z| < 1/τ`.
pub fn f_series(mu: Complex64, z: Complex64, tau: f64, tol: f64) -> Result<Complex64> {
    let az = z.norm();
    if !(az > 1.0 && tau * az < 1.0) {
        return Err(invalid(format!("|z| = {az} is outside the annulus (1, 1/tau)")));
    }
    if mu.norm() < POLE_GUARD {
        return Err(Error::Pole("mu = 0".into()));
    }
    if !(0.0..1.0).contains(&tau) {
        return Err(invalid("tau must lie in [0, 1)"));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    // k ≥ 0: terms ~ (τz)^k once τ^k|μ| is small.
    let rate = tau * az;
    let mut tk = 1.0;
    let mut zk = one;
    for _ in 0..100_000 {
        let d = one - tk * mu;
        if d.norm() < POLE_GUARD {
            return Err(Error::Pole(format!("mu near 1/tau^k: {mu}")));
        }
        let term = tk * zk / d;
        sum += term;
        tk *= tau;
        zk *= z;
        let tail = (tk * zk.norm()) / (1.0 - rate) / (1.0 - tk * mu.norm()).max(0.5);
        if tk * mu.norm() < 0.5 && tail < tol * sum.norm().max(1.0) {
            break;
        }
        if tk == 0.0 {
            break;
        }
    }
    // k = −j < 0: the term is z^{−j}/(τ^j − μ), rate 1/|z|.
    let zinv = one / z;
    let mut zj = zinv;
    let mut tj = tau;
    for _ in 0..100_000 {
        let d = tj - mu;
        if d.norm() < POLE_GUARD {
            return Err(Error::Pole(format!("mu near tau^j: {mu}")));
        }
        sum += zj / d;
        zj *= zinv;
        tj *= tau;
        let tail = zj.norm() / (1.0 - 1.0 / az) / (mu.norm() - tj).max(0.5 * mu.norm());
        if tj < 0.5 * mu.norm() && tail < tol * sum.norm().max(1.0) {
            break;
        }
    }
    Ok(sum)
}

/// `Π_{k≥0} (1 − μτ^k)`, truncated once `τ^k < 1e-14`.
pub fn q_pochhammer(mu: Complex64, tau: f64) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    let mut tk = 1.0;
    while tk >= PRODUCT_CUTOFF {
        prod *= 1.0 - mu * tk;
        tk *= tau;
    }
    prod
}

/// The discretized `det(I + μJ)` for a fixed kernel spec.
struct JOperator {
    tau: f64,
    f_tol: f64,
    n_eta: usize,
    n_zeta: usize,
    zeta: Vec<Complex64>,
    eta: Vec<Complex64>,
    /// `dζ_k/(2πi)·e^{Ψ(ζ_k)}/(ζ_k − η_i)`, rows i, columns k.
    left: Vec<Complex64>,
    /// `e^{−Ψ(η_j)}/η_j · dη_j/(2πi)`.
    right: Vec<Complex64>,
}

impl JOperator {
    fn new(tau: f64, spec: &TWKernelSpec, sizes: &AsepSizes) -> Result<Self> {
        let (ne, nz) = (sizes.n_eta, sizes.n_zeta);
        if ne < 4 || nz < 4 {
            return Err(invalid("circle rules need at least 4 points"));
        }
        let c = spec.lambda(spec.xi).re;
        let circle = |r: f64, n: usize| -> Vec<Complex64> {
            (0..n).map(|k| Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / n as f64)).collect()
        };
        let zeta = circle(spec.r_zeta, nz);
        let eta = circle(spec.rho_eta, ne);
        let mut left = vec![Complex64::new(0.0, 0.0); ne * nz];
        for (i, &e) in eta.iter().enumerate() {
            for (k, &z) in zeta.iter().enumerate() {
                // dζ/(2πi) = ζ/n on the trapezoid rule.
                left[i * nz + k] = z / nz as f64 * (spec.lambda(z) - c).exp() / (z - e);
            }
        }
        let right = eta.iter().map(|&e| (c - spec.lambda(e)).exp() / e * (e / ne as f64)).collect();
        Ok(JOperator { tau, f_tol: sizes.f_tol, n_eta: ne, n_zeta: nz, zeta, eta, left, right })
    }

    fn det(&self, mu: Complex64) -> Result<Complex64> {
        let (ne, nz) = (self.n_eta, self.n_zeta);
        let mut f = vec![Complex64::new(0.0, 0.0); nz * ne];
        if nz == ne {
            // Equal angular grids: ζ_k/η_j depends on k − j only.
            let diag: Result<Vec<Complex64>> =
                (0..ne).map(|d| f_series(mu, self.zeta[d] / self.eta[0], self.tau, self.f_tol)).collect();
            let diag = diag?;
            for k in 0..nz {
                for j in 0..ne {
                    f[k * ne + j] = diag[(k + ne - j) % ne];
                }
            }
        } else {
            for (k, &z) in self.zeta.iter().enumerate() {
                for (j, &e) in self.eta.iter().enumerate() {
                    f[k * ne + j] = f_series(mu, z / e, self.tau, self.f_tol)?;
                }
            }
        }
        let mut j = vec![Complex64::new(0.0, 0.0); ne * ne];
        zgemm_into(ne, nz, ne, &self.left, &f, &mut j);
        for (i, row) in j.chunks_exact_mut(ne).enumerate() {
            for (x, &r) in row.iter_mut().zip(&self.right) {
                *x *= mu * r;
            }
            row[i] += 1.0;
        }
        let d = complex_det(&CMatrix::from_rows(ne, ne, j)?)?;
        if d.singular {
            return Err(Error::Singular);
        }
        Ok(d.value)
    }
}

/// `P(x(t/γ, m) ≤ x)` from the formula at one resolution, as the raw complex contour sum.
/// With `symmetric` only the upper half of the μ-circle is evaluated and reflected.
pub fn tagged_particle_cdf_raw(params: &AsepParams, spec: &TWKernelSpec, sizes: &AsepSizes, symmetric: bool) -> Result<Complex64> {
    let tau = params.tau();
    spec.validate(tau)?;
    if sizes.n_mu < 4 || sizes.n_mu % 2 != 0 {
        return Err(invalid("the mu circle needs an even number (>= 4) of points"));
    }
    let op = JOperator::new(tau, spec, sizes)?;
    let n = sizes.n_mu;
    let r = 0.5 * (tau + 1.0);
    let count = if symmetric { n / 2 + 1 } else { n };
    let terms: Result<Vec<Complex64>> = crate::par::map_indexed(count, |k| {
        let mu = Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64);
        Ok(q_pochhammer(mu, tau) * op.det(mu)?)
    })
    .into_iter()
    .collect();
    let terms = terms?;
    // (1/2πi)∮ g dμ/μ on the trapezoid rule is the plain mean of g.
    let sum = if symmetric {
        let mut s = terms[0].re + terms[n / 2].re;
        for t in &terms[1..n / 2] {
            s += 2.0 * t.re;
        }
        Complex64::new(s, 0.0)
    } else {
        terms.iter().sum()
    };
    Ok(sum / n as f64)
}

/// `P(x(t/γ, m) ≤ x)`, certified against doubled circle counts.
pub fn tagged_particle_cdf(params: &AsepParams, spec: &TWKernelSpec, sizes: &AsepSizes) -> Result<f64> {
    let v = tagged_particle_cdf_raw(params, spec, sizes, true)?.re;
    let check = tagged_particle_cdf_raw(params, spec, &sizes.doubled(), true)?.re;
    let diff = (v - check).abs();
    if diff > ASEP_TOLERANCE {
        return Err(Error::Certificate { what: "ASEP formula".into(), diff, tol: ASEP_TOLERANCE });
    }
    Ok(check)
}

/// Smallest `m` with `{h(t,x) ≥ s} = {h(t,x) ≥ 2m − x}`; heights have the parity of `x`.
pub fn height_event_m(x: i64, s: i64) -> i64 {
    (s + x).div_euclid(2) + (s + x).rem_euclid(2)
}

/// `P(h_γ(t, x) ≥ s)` for the wedge, with `t` the physical time of the height function.
pub fn asep_height_cdf(params: &AsepParams, t: f64, x: i64, s: i64, sizes: &AsepSizes) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("time must be nonnegative"));
    }
    // h(t, x) ≥ |x| always.
    if s <= x.abs() {
        return Ok(1.0);
    }
    let m = height_event_m(x, s);
    let spec = TWKernelSpec::new(params.tau(), params.gamma() * t, m, x);
    tagged_particle_cdf(params, &spec, sizes)
}

/// `m = ⌈½(ε^{−1/2}(−s + log(ε^{−1/2}/2) + X²/2T) + t/2 + x)⌉` with `t = ε^{−3/2}T`, `x = ε^{−1}X`.
///
/// Rounding up makes `{h ≥ 2m − x}` the same event as `h` exceeding the real threshold, since `h(x) ≡ x` mod 2.
pub fn wasep_m(epsilon: f64, s: f64, t_macro: f64, x_macro: f64) -> Result<i64> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(invalid("epsilon must lie in (0, 1/4)"));
    }
    if !(t_macro > 0.0) {
        return Err(invalid("T must be positive"));
    }
    let r = epsilon.sqrt();
    let t = t_macro / (epsilon * r);
    let x = x_macro / epsilon;
    let inner = (-s + (0.5 / r).ln() + x_macro * x_macro / (2.0 * t_macro)) / r;
    Ok((0.5 * (inner + 0.5 * t + x)).ceil() as i64)
}

/// Weakly asymmetric parameters `p = ½ − ½ε^{1/2}`, `q = ½ + ½ε^{1/2}`.
pub fn wasep_params(epsilon: f64) -> Result<AsepParams> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(invalid("epsilon must lie in (0, 1/4)"));
    }
    AsepParams::from_gamma(epsilon.sqrt())
}

/// `P(H_ε(T,X) − X²/2T − T/24 ≥ −s)` through the ASEP formula; `ε^{−1}X` must be an integer.
pub fn wasep_crossover_probability(epsilon: f64, t_macro: f64, x_macro: f64, s: f64, sizes: &AsepSizes) -> Result<f64> {
    let params = wasep_params(epsilon)?;
    let xf = x_macro / epsilon;
    if (xf - xf.round()).abs() > 1e-9 {
        return Err(invalid("X/epsilon must be an integer site"));
    }
    let x = xf.round() as i64;
    let m = wasep_m(epsilon, s, t_macro, x_macro)?;
    if m < 1 {
        return Ok(1.0);
    }
    let t = t_macro / epsilon.powf(1.5);
    let spec = TWKernelSpec::new(params.tau(), t, m, x);
    tagged_particle_cdf(&params, &spec, sizes)
}
