//! The csc-kernel route to `F_T`: a determinant on the vertical lines `Re η = θc₃`, `Re ζ = −θc₃`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{certify, mu_contour_integral, scale_count, CrossoverParams, MuContourSpec, CROSSOVER_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::linalg::{complex_det, zgemm_into, CMatrix};
use crate::quadrature::{composite_gauss_legendre, QuadratureRule};
use crate::special::{csc_factor, minus_log};

/// `c₃ = 2^{−4/3}`.
pub const C3: f64 = 0.396_850_262_992_049_9;

/// Overall constant multiplying the discretized kernel; fixed once by calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CscCalibration {
    pub factor: Complex64,
}

impl CscCalibration {
    /// The two line orientations (each line run up or down) change the factor only by a sign.
    pub fn orientations() -> [CscCalibration; 2] {
        let d = CscCalibration::default();
        [d, CscCalibration { factor: -d.factor }]
    }

    /// Picks the orientation whose value at `(t, s)` is closest to `reference`; returns it with the residual.
    pub fn calibrate(t: f64, s: f64, reference: f64, res: &CscResolution) -> Result<(CscCalibration, f64)> {
        let mut best: Option<(CscCalibration, f64)> = None;
        for cal in CscCalibration::orientations() {
            let v = kpz_crossover_cdf_csc_raw(t, s, res, &cal, true)?;
            let d = (v.re - reference).abs();
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((cal, d));
            }
        }
        Ok(best.expect("two candidates"))
    }
}

impl Default for CscCalibration {
    /// Both line integrals normalized by `1/(2πi)`.
    fn default() -> Self {
        CscCalibration { factor: Complex64::new(-1.0 / (4.0 * PI * PI), 0.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CscResolution {
    /// The lines sit at `Re η = −Re ζ = θ·2^{−4/3}`, so `Re 2^{1/3}(ζ − η') = −θ` (θ = ½ is the
    /// symmetric choice; any θ in (0, 1) gives the same determinant).
    pub theta: f64,
    /// Lines truncated where the gaussian envelope drops below this.
    pub tail: f64,
    /// Phase (radians of the cubic oscillation) allowed per Gauss–Legendre panel.
    pub phase_per_panel: f64,
    pub max_width: f64,
    pub per_panel: usize,
    pub mu: MuContourSpec,
}

impl Default for CscResolution {
    fn default() -> Self {
        CscResolution { theta: 0.5, tail: 1e-6, phase_per_panel: 32.0, max_width: 1.0, per_panel: 16, mu: MuContourSpec::default() }
    }
}

impl CscResolution {
    pub fn scaled(&self, f: f64) -> Self {
        CscResolution {
            tail: self.tail.powf(f.sqrt()),
            phase_per_panel: self.phase_per_panel / f,
            max_width: self.max_width / f,
            mu: MuContourSpec {
                per_panel: scale_count(self.mu.per_panel, f),
                cap_points: scale_count(self.mu.cap_points, f),
                ..self.mu
            },
            ..*self
        }
    }

    /// Half the horizontal distance between the lines.
    pub fn offset(&self) -> f64 {
        self.theta * C3
    }

    /// `r_max` with `e^{−T·offset·r²} = tail`.
    pub fn r_max(&self, t: f64) -> f64 {
        (-self.tail.ln() / (t * self.offset())).sqrt()
    }
}

/// Panels on `[−r_max, r_max]` whose width follows the local phase rate `T r² + 2^{1/3}|s| + 1`.
fn line_rule(t: f64, s: f64, r_max: f64, phase: f64, max_width: f64, per_panel: usize) -> Result<QuadratureRule> {
    let rate = |r: f64| t * r * r + 2f64.cbrt() * s.abs() + 1.0;
    let mut half = vec![0.0];
    while *half.last().unwrap() < r_max {
        let r = *half.last().unwrap();
        let mut h = (phase / rate(r)).min(max_width);
        h = (phase / rate(r + h)).min(h);
        half.push((r + h).min(r_max));
    }
    let mut breaks: Vec<f64> = half.iter().rev().map(|r| -r).collect();
    breaks.extend(half.iter().skip(1));
    composite_gauss_legendre(&breaks, per_panel)
}

fn exponent(t: f64, s: f64, z: Complex64) -> Complex64 {
    -t / 3.0 * z * z * z + 2f64.cbrt() * s * z
}

/// Discretized `K^csc` for one `(T, s)`. The μ dependence `(−μ)^{−2^{1/3}(ζ−η')}` splits into
/// diagonal factors, so the csc matrix is built once.
struct CscOperator {
    n: usize,
    /// Cauchy factor `dζ_k/(ζ_k − η_i)`, row-major (i rows, k columns).
    cauchy: Vec<Complex64>,
    /// `e^{E(ζ_k) − E(η_j)}·π2^{1/3}/sin(πw_kj)·dη_j`, row-major (k rows, j columns).
    csc: Vec<Complex64>,
    eta: Vec<Complex64>,
    zeta: Vec<Complex64>,
    factor: Complex64,
}

impl CscOperator {
    fn new(t: f64, s: f64, res: &CscResolution, cal: &CscCalibration) -> Result<Self> {
        if !(res.theta > 0.0 && res.theta < 1.0) {
            return Err(invalid("theta must lie in (0, 1)"));
        }
        let rule = line_rule(t, s, res.r_max(t), res.phase_per_panel, res.max_width, res.per_panel)?;
        let n = rule.len();
        let a = res.offset();
        let eta: Vec<Complex64> = rule.nodes.iter().map(|&r| Complex64::new(a, r)).collect();
        let zeta: Vec<Complex64> = rule.nodes.iter().map(|&r| Complex64::new(-a, r)).collect();
        let dz: Vec<Complex64> = rule.weights.iter().map(|&w| Complex64::new(0.0, w)).collect();
        let ee: Vec<Complex64> = eta.iter().map(|&z| exponent(t, s, z)).collect();
        let ez: Vec<Complex64> = zeta.iter().map(|&z| exponent(t, s, z)).collect();
        let mut cauchy = vec![Complex64::new(0.0, 0.0); n * n];
        let mut csc = cauchy.clone();
        for i in 0..n {
            for k in 0..n {
                cauchy[i * n + k] = dz[k] / (zeta[k] - eta[i]);
            }
        }
        let c = 2f64.cbrt();
        for k in 0..n {
            for j in 0..n {
                csc[k * n + j] = (ez[k] - ee[j]).exp() * csc_factor(c * (zeta[k] - eta[j]))? * dz[j];
            }
        }
        Ok(CscOperator { n, cauchy, csc, eta, zeta, factor: cal.factor })
    }

    fn det(&self, mu: Complex64) -> Result<Complex64> {
        let n = self.n;
        let l = 2f64.cbrt() * minus_log(mu)?;
        let left: Vec<Complex64> = self.zeta.iter().map(|&z| (-z * l).exp()).collect();
        let right: Vec<Complex64> = self.eta.iter().map(|&z| (z * l).exp() * -self.factor).collect();
        let mut c = self.cauchy.clone();
        for row in c.chunks_exact_mut(n) {
            for (x, &d) in row.iter_mut().zip(&left) {
                *x *= d;
            }
        }
        let mut k = vec![Complex64::new(0.0, 0.0); n * n];
        zgemm_into(n, n, n, &c, &self.csc, &mut k);
        for (i, row) in k.chunks_exact_mut(n).enumerate() {
            for (x, &d) in row.iter_mut().zip(&right) {
                *x *= d;
            }
            row[i] += 1.0;
        }
        let d = complex_det(&CMatrix::from_rows(n, n, k)?)?;
        if d.singular {
            return Err(Error::Singular);
        }
        Ok(d.value)
    }
}

/// `det(I − K_s^csc)` at one μ, with the size of the discretization.
pub fn csc_determinant(t: f64, s: f64, mu: Complex64, res: &CscResolution, cal: &CscCalibration) -> Result<(Complex64, usize)> {
    let op = CscOperator::new(t, s, res, cal)?;
    Ok((op.det(mu)?, op.n))
}

/// `F_T(s)` through the csc kernel at one resolution.
pub fn kpz_crossover_cdf_csc_raw(t: f64, s: f64, res: &CscResolution, cal: &CscCalibration, symmetric: bool) -> Result<Complex64> {
    if t < 0.25 {
        return Err(invalid("the csc route needs T >= 0.25"));
    }
    let op = CscOperator::new(t, s, res, cal)?;
    mu_contour_integral(&res.mu, symmetric, |mu| op.det(mu))
}

/// `F_T(s)` through the csc kernel, certified against a 1.5× recomputation.
pub fn kpz_crossover_cdf_csc(t: f64, s: f64, res: &CscResolution, cal: &CscCalibration) -> Result<f64> {
    CrossoverParams::new(t)?;
    let v = kpz_crossover_cdf_csc_raw(t, s, res, cal, true)?;
    let check = kpz_crossover_cdf_csc_raw(t, s, &res.scaled(1.5), cal, true)?;
    certify("crossover CDF (csc route)", v.re, check.re, CROSSOVER_TOLERANCE)?;
    Ok(v.re)
}
