//! Γ-deformed Airy functions and the edge crossover distribution `F^edge_{T,X}`.
//!
//! Both functions are normalized as `(1/2πi)∫ e^{z³/3 − az} g(z) dz` over an upward contour, so
//! that `Ai_Γ(a, 0, 1) = Ai(a)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{certify, scale_count, sigma_weight, CrossoverParams, MuContourSpec, SigmaRuleSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::{complex_det, dgemm_into, CMatrix};
use crate::quadrature::{composite_gauss_legendre, gauss_legendre, map_semiinfinite};
use crate::special::{log_gamma, rgamma};

/// Advertised accuracy of [`kpz_edge_cdf`].
pub const EDGE_TOLERANCE: f64 = 1e-4;
/// Documented window `(T_min, T_max, |X|_max)`.
pub const EDGE_WINDOW: (f64, f64, f64) = (0.5, 100.0, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaAiryKind {
    /// `Ai^Γ`, with `Γ(−bz + c)`; the contour stays left of the pole at `c/b`.
    Upper,
    /// `Ai_Γ`, with `1/Γ(bz + c)`.
    Lower,
}

/// Quadrature sizes for one Γ-deformed Airy evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaAirySizes {
    pub per_panel: usize,
    pub max_panel: f64,
    /// The contour is kept until the integrand falls `e^{−margin}` below its peak.
    pub margin: f64,
    /// Multiplies the kept length of the contour (1 = as determined by `margin`).
    pub extent: f64,
}

impl Default for GammaAirySizes {
    fn default() -> Self {
        GammaAirySizes { per_panel: 12, max_panel: 0.5, margin: 40.0, extent: 1.0 }
    }
}

impl GammaAirySizes {
    pub fn scaled(&self, f: f64) -> Self {
        GammaAirySizes { max_panel: self.max_panel / f, margin: self.margin * f.sqrt(), ..*self }
    }
}

/// `Ai^Γ(a, b, c)` or `Ai_Γ(a, b, c)`; real for real arguments.
pub fn gamma_airy(kind: GammaAiryKind, a: f64, b: f64, c: f64, sizes: &GammaAirySizes) -> Result<f64> {
    gamma_airy_scaled(kind, a, b, c, 0.0, sizes)
}

/// `e^{λa}` times [`gamma_airy`], with the factor folded into every exponent.
pub fn gamma_airy_scaled(kind: GammaAiryKind, a: f64, b: f64, c: f64, lambda: f64, sizes: &GammaAirySizes) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && lambda.is_finite()) {
        return Err(invalid("non-finite Γ-Airy argument"));
    }
    if b < 0.0 {
        return Err(invalid("Γ-Airy requires b >= 0"));
    }
    let g = GammaFactor::new(kind, b, c)?;
    // Crossing point and direction of the upper half of the contour.
    let (mut x0, theta, peak) = if a >= 1.0 {
        (a.sqrt(), PI / 2.0, 0.0)
    } else if a >= 0.0 {
        (0.0, PI / 3.0, 0.0)
    } else {
        let y = (-a).sqrt();
        (-y, PI / 4.0, y * std::f64::consts::SQRT_2)
    };
    let mut pole_gap = f64::INFINITY;
    if let Some(shift) = g.pole_clearance() {
        // Poles sit at (c + n)/b; keep the crossing at least `shift` to the left of any of them.
        let n = (x0 * b - c).round().max(0.0);
        let zn = (c + n) / b;
        if (x0 - zn).abs() < shift {
            x0 = zn - shift;
        }
        pole_gap = shift;
    }
    let dir = Complex64::from_polar(1.0, theta);
    let log_mag = |rho: f64| -> Result<f64> {
        let z = x0 + rho * dir;
        Ok((z * z * z / 3.0 - a * z).re + lambda * a + g.log_value(z)?.re)
    };
    let step = 0.25;
    let mut top = log_mag(peak)?;
    let mut hi = peak;
    loop {
        hi += step;
        let m = log_mag(hi)?;
        top = top.max(m);
        if m < top - sizes.margin && hi > peak + 1.0 {
            break;
        }
        if hi > peak + 400.0 {
            return Err(Error::Resource("Γ-Airy contour did not decay".into()));
        }
    }
    let mut lo = peak;
    while lo > 0.0 {
        lo = (lo - step).max(0.0);
        let m = log_mag(lo)?;
        top = top.max(m);
        if m < top - sizes.margin {
            break;
        }
    }
    hi = peak + (hi - peak) * sizes.extent;
    lo = (peak - (peak - lo) * sizes.extent).max(0.0);
    let curvature = 2.0 * (x0 + peak * dir).norm();
    let mut width = sizes.max_panel.min(2.0 / curvature.max(1e-12).sqrt());
    if lo == 0.0 {
        width = width.min(pole_gap);
    }
    let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=panels).map(|j| lo + (hi - lo) * j as f64 / panels as f64).collect();
    let rule = composite_gauss_legendre(&breaks, sizes.per_panel)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&rho, &w) in rule.nodes.iter().zip(&rule.weights) {
        let z = x0 + rho * dir;
        let e = z * z * z / 3.0 - a * z + lambda * a + g.log_value(z)?;
        acc += e.exp() * dir * w;
    }
    // The lower half is the mirror image, so the full contour gives 2i·Im(acc).
    let mut value = acc.im / PI;
    if let GammaFactor::Upper { b, c } = g {
        if b > 0.0 {
            let mut n = 0usize;
            loop {
                let zn = (c + n as f64) / b;
                if zn >= x0 {
                    break;
                }
                let lf = crate::special::log_gamma(Complex64::new(n as f64 + 1.0, 0.0))?.re;
                let e = zn * zn * zn / 3.0 - a * zn + lambda * a - b.ln() - lf;
                let term = e.exp();
                value += if n % 2 == 0 { term } else { -term };
                n += 1;
            }
        }
    }
    if !value.is_finite() {
        return Err(Error::BlowUp(a));
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy)]
enum GammaFactor {
    Upper { b: f64, c: f64 },
    Lower { b: f64, c: f64 },
}

impl GammaFactor {
    fn new(kind: GammaAiryKind, b: f64, c: f64) -> Result<Self> {
        if b == 0.0 && kind == GammaAiryKind::Upper && c <= 0.0 && (c - c.round()).abs() < 1e-12 {
            return Err(Error::Pole(format!("Γ({c}) is a pole")));
        }
        Ok(match kind {
            GammaAiryKind::Upper => GammaFactor::Upper { b, c },
            GammaAiryKind::Lower => GammaFactor::Lower { b, c },
        })
    }

    /// Minimal distance kept between the real crossing and a pole of `Γ(−bz + c)`.
    fn pole_clearance(&self) -> Option<f64> {
        match *self {
            GammaFactor::Upper { b, .. } if b > 0.0 => Some((0.3 / b).min(0.5)),
            _ => None,
        }
    }

    fn log_value(&self, z: Complex64) -> Result<Complex64> {
        match *self {
            GammaFactor::Upper { b, c } => log_gamma(-b * z + c),
            GammaFactor::Lower { b, c } => {
                let w = b * z + c;
                if w.im.abs() < 1e-300 && w.re <= 0.0 && (w.re - w.re.round()).abs() < 1e-14 {
                    return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
                }
                if w.norm() < 1e-3 {
                    return Ok(rgamma(w).ln());
                }
                log_gamma(w).map(|l| -l)
            }
        }
    }
}

/// Discretization sizes for the edge determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeResolution {
    pub n_x: usize,
    pub scale: f64,
    pub t: SigmaRuleSpec,
    pub mu: MuContourSpec,
    pub airy: GammaAirySizes,
}

impl Default for EdgeResolution {
    fn default() -> Self {
        EdgeResolution {
            n_x: 40,
            scale: 10.0,
            t: SigmaRuleSpec::default(),
            mu: MuContourSpec::default(),
            airy: GammaAirySizes::default(),
        }
    }
}

impl EdgeResolution {
    pub fn scaled(&self, f: f64) -> Self {
        EdgeResolution {
            n_x: scale_count(self.n_x, f),
            scale: self.scale,
            t: self.t.scaled(f),
            mu: self.mu.scaled(f),
            airy: self.airy.scaled(f),
        }
    }
}

/// `K^Γ_{σ_{T,X,μ}}` on the Nyström nodes, conjugated by `e^{λx}` so that it is trace class
/// even when `Ai^Γ` grows to the right.
struct EdgeOperator {
    params: CrossoverParams,
    sqrt_w: Vec<f64>,
    t: Vec<f64>,
    tw: Vec<f64>,
    /// `e^{λx_i} Ai^Γ(x_i + t_k)`, row-major `n_x × n_t`.
    upper: Vec<f64>,
    /// `e^{−λx_j} Ai_Γ(x_j + t_k)` transposed: row-major `n_t × n_x`.
    lower_t: Vec<f64>,
}

impl EdgeOperator {
    fn new(params: CrossoverParams, x_pos: f64, s: f64, res: &EdgeResolution) -> Result<Self> {
        let kappa = params.kappa();
        let b = 1.0 / kappa;
        let c = -(2f64.powf(-2.0 / 3.0)) * x_pos / kappa;
        let lambda = (c / b).min(0.0) - 0.5;
        let x_rule = map_semiinfinite(&gauss_legendre(res.n_x)?, s / kappa, res.scale)?;
        let t_rule = res.t.rule(kappa)?;
        let (nx, nt) = (x_rule.len(), t_rule.len());
        let cells: Vec<Result<(f64, f64)>> = crate::par::map_indexed(nx * nt, |idx| {
            let (i, k) = (idx / nt, idx % nt);
            let (x, t) = (x_rule.nodes[i], t_rule.nodes[k]);
            // e^{λx}Ai^Γ(x+t) = e^{−λt}·e^{λ(x+t)}Ai^Γ(x+t), and likewise for Ai_Γ.
            let up = gamma_airy_scaled(GammaAiryKind::Upper, x + t, b, c, lambda, &res.airy)? * (-lambda * t).exp();
            let lo = gamma_airy_scaled(GammaAiryKind::Lower, x + t, b, c, -lambda, &res.airy)? * (lambda * t).exp();
            Ok((up, lo))
        });
        let mut upper = vec![0.0; nx * nt];
        let mut lower_t = vec![0.0; nx * nt];
        for (idx, cell) in cells.into_iter().enumerate() {
            let (i, k) = (idx / nt, idx % nt);
            let (up, lo) = cell.map_err(|e| Error::Kernel { index: i, reason: e.to_string() })?;
            upper[i * nt + k] = up;
            lower_t[k * nx + i] = lo;
        }
        Ok(EdgeOperator {
            params,
            sqrt_w: x_rule.weights.iter().map(|w| w.sqrt()).collect(),
            t: t_rule.nodes,
            tw: t_rule.weights,
            upper,
            lower_t,
        })
    }

    fn det(&self, mu: Complex64) -> Result<Complex64> {
        let (nx, nt) = (self.sqrt_w.len(), self.t.len());
        let mut c = Vec::with_capacity(nt);
        for (&t, &w) in self.t.iter().zip(&self.tw) {
            c.push(sigma_weight(&self.params, mu, t)? * w);
        }
        let mut uc_re = vec![0.0; nx * nt];
        let mut uc_im = vec![0.0; nx * nt];
        for i in 0..nx {
            for k in 0..nt {
                let v = self.upper[i * nt + k];
                uc_re[i * nt + k] = v * c[k].re;
                uc_im[i * nt + k] = v * c[k].im;
            }
        }
        let mut k_re = vec![0.0; nx * nx];
        let mut k_im = vec![0.0; nx * nx];
        dgemm_into(nx, nt, nx, &uc_re, &self.lower_t, &mut k_re);
        dgemm_into(nx, nt, nx, &uc_im, &self.lower_t, &mut k_im);
        let m = CMatrix::from_fn(nx, nx, |i, j| {
            let w = self.sqrt_w[i] * self.sqrt_w[j];
            let kij = Complex64::new(k_re[i * nx + j], k_im[i * nx + j]) * w;
            if i == j {
                1.0 - kij
            } else {
                -kij
            }
        });
        let d = complex_det(&m)?;
        if d.singular {
            return Err(Error::Singular);
        }
        Ok(d.value)
    }
}

fn check_edge_window(t: f64, x: f64) -> Result<()> {
    if !(EDGE_WINDOW.0..=EDGE_WINDOW.1).contains(&t) {
        return Err(Error::OutOfRange(t));
    }
    if !(x.abs() <= EDGE_WINDOW.2) {
        return Err(Error::OutOfRange(x));
    }
    Ok(())
}

/// `F^edge_{T,X}(s)` at a single resolution, as a complex number.
pub fn kpz_edge_cdf_raw(t: f64, x: f64, s: f64, res: &EdgeResolution, symmetric: bool) -> Result<Complex64> {
    let params = CrossoverParams::new(t)?;
    let op = EdgeOperator::new(params, x, s, res)?;
    super::mu_contour_integral(&res.mu, symmetric, |mu| op.det(mu))
}

/// `F^edge_{T,X}(s)` for half-Brownian data, certified against a 1.5× recomputation.
pub fn kpz_edge_cdf(t: f64, x: f64, s: f64, res: &EdgeResolution) -> Result<f64> {
    check_edge_window(t, x)?;
    let v = kpz_edge_cdf_raw(t, x, s, res, true)?;
    let check = kpz_edge_cdf_raw(t, x, s, &res.scaled(1.5), true)?;
    certify("edge crossover CDF", v.re, check.re, EDGE_TOLERANCE)?;
    Ok(v.re)
}
