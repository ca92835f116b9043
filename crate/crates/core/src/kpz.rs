//! Tracy–Widom GUE, the KPZ crossover distribution `F_T` and the edge crossover `F^edge`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::fredholm::{airy_determinant, DEFAULT_SCALE};
use crate::linalg::{complex_det, dgemm_into, CMatrix};
use crate::par::map_indexed;
use crate::quadrature::{
    composite_gauss_legendre, gauss_legendre, map_semiinfinite, mu_hairpin, panel_breaks, ContourRule,
    QuadratureRule,
};
use crate::special::{airy, airy_unchecked};

mod csc;
mod edge;
mod painleve;

pub use csc::{csc_determinant, kpz_crossover_cdf_csc, kpz_crossover_cdf_csc_raw, CscCalibration, CscResolution, C3};
pub use edge::{
    gamma_airy, gamma_airy_scaled, kpz_edge_cdf, kpz_edge_cdf_raw, EdgeResolution, GammaAiryKind, GammaAirySizes, EDGE_TOLERANCE,
    EDGE_WINDOW,
};
pub use painleve::{solve_hastings_mcleod, tw_gue_painleve, PainleveSolution, PAINLEVE_X0, PAINLEVE_X_MIN};

/// Advertised accuracy of [`tw_gue_fredholm`].
pub const GUE_TOLERANCE: f64 = 1e-6;
/// Advertised accuracy of [`kpz_crossover_cdf`].
pub const CROSSOVER_TOLERANCE: f64 = 1e-6;

/// `F_GUE(s) = det(I − K_Ai)` on `L²(s, ∞)`, certified against a 1.5× recomputation.
pub fn tw_gue_fredholm(s: f64, n: usize) -> Result<f64> {
    if !(-10.0..=8.0).contains(&s) {
        return Err(Error::OutOfRange(s));
    }
    let d = airy_determinant(s, n, DEFAULT_SCALE)?;
    let check = airy_determinant(s, n * 3 / 2, DEFAULT_SCALE)?;
    certify("F_GUE Fredholm determinant", d.re, check.re, GUE_TOLERANCE)?;
    if d.im.abs() > 1e-10 {
        return Err(invalid("Airy determinant has a non-negligible imaginary part"));
    }
    Ok(d.re)
}

pub(crate) fn certify(what: &str, a: f64, b: f64, tol: f64) -> Result<()> {
    let diff = (a - b).abs();
    if !(diff <= tol) {
        return Err(Error::Certificate { what: what.into(), diff, tol });
    }
    Ok(())
}

/// KPZ time and its scale `κ_T = 2^{−1/3} T^{1/3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverParams {
    t: f64,
}

impl CrossoverParams {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(invalid("KPZ time must be positive"));
        }
        Ok(CrossoverParams { t })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn kappa(&self) -> f64 {
        (self.t / 2.0).cbrt()
    }
}

/// `σ_{T,μ}(t) = μ/(μ − e^{−κ_T t})`.
pub fn sigma_weight(params: &CrossoverParams, mu: Complex64, t: f64) -> Result<Complex64> {
    let e = (-params.kappa() * t).exp();
    let den = mu - e;
    if den.norm() < 1e-12 {
        return Err(Error::Pole(format!("sigma denominator vanishes at t = {t}")));
    }
    Ok(mu / den)
}

/// `∂σ_{T,μ}/∂t = −κ μ e^{−κt}/(μ − e^{−κt})²`.
pub fn sigma_weight_derivative(params: &CrossoverParams, mu: Complex64, t: f64) -> Complex64 {
    let k = params.kappa();
    let e = (-k * t).exp();
    let den = mu - e;
    -k * mu * e / (den * den)
}

/// Shape and density of the μ hairpin `{x ± iδ} ∪ {δe^{iθ}}`, truncated at `Re μ = m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuContourSpec {
    pub delta: f64,
    pub m: f64,
    pub cap: f64,
    /// Gauss–Legendre points per leg panel (panels grow geometrically from width 1).
    pub per_panel: usize,
    /// Points on the quarter of the cap above the real axis.
    pub cap_points: usize,
}

impl Default for MuContourSpec {
    fn default() -> Self {
        MuContourSpec { delta: 1.0, m: 40.0, cap: 1.0, per_panel: 12, cap_points: 16 }
    }
}

impl MuContourSpec {
    pub fn validate(&self) -> Result<()> {
        if self.delta != 1.0 || self.cap != 1.0 {
            return Err(invalid("the mu hairpin is implemented for offset 1 with a unit cap"));
        }
        if (-self.m).exp() >= 1e-14 {
            return Err(invalid("mu truncation must satisfy exp(-M) < 1e-14"));
        }
        Ok(())
    }

    pub fn rule(&self, upper_only: bool) -> Result<ContourRule> {
        self.validate()?;
        mu_hairpin(self.m, self.per_panel, self.cap_points, upper_only)
    }

    pub fn scaled(&self, f: f64) -> Self {
        MuContourSpec {
            per_panel: scale_count(self.per_panel, f),
            cap_points: scale_count(self.cap_points, f),
            ..*self
        }
    }
}

pub(crate) fn scale_count(n: usize, f: f64) -> usize {
    ((n as f64) * f).round() as usize
}

/// Discretization sizes for the Theorem 1.1 route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverResolution {
    pub n_x: usize,
    pub scale: f64,
    pub t: SigmaRuleSpec,
    pub mu: MuContourSpec,
}

impl Default for CrossoverResolution {
    fn default() -> Self {
        CrossoverResolution { n_x: 80, scale: DEFAULT_SCALE, t: SigmaRuleSpec::default(), mu: MuContourSpec::default() }
    }
}

impl CrossoverResolution {
    /// The default with `n_x` grown like `T^{−1/3}` below `T = 1/2`, where the kernel spreads out.
    pub fn for_time(t: f64) -> Self {
        let d = CrossoverResolution::default();
        let grow = if t > 0.0 { (0.5 / t).cbrt().max(1.0) } else { 1.0 };
        CrossoverResolution { n_x: (d.n_x as f64 * grow).ceil() as usize, ..d }
    }

    /// Every size multiplied by `f` (panel widths divided by `f`).
    pub fn scaled(&self, f: f64) -> Self {
        CrossoverResolution { n_x: scale_count(self.n_x, f), scale: self.scale, t: self.t.scaled(f), mu: self.mu.scaled(f) }
    }
}

/// The t-rule for integrals weighted by `σ_{T,μ}` or its derivative.
///
/// For `μ = x ± i` the weight has a peak of width `~1/(κx)` at `e^{−κt} = x`. In the variable
/// `u = e^{−κt}` it is a Lorentzian of unit width for every μ on the contour, so the band
/// `1 ≤ u ≤ u_max` is integrated in `u`; plain t-panels cover `[−40/κ − 10, −log(u_max)/κ]`
/// and `[0, 30]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaRuleSpec {
    pub t_panel_width: f64,
    pub t_per_panel: usize,
    pub u_max: f64,
    pub u_panel_width: f64,
    pub u_per_panel: usize,
}

impl Default for SigmaRuleSpec {
    fn default() -> Self {
        SigmaRuleSpec { t_panel_width: 5.0, t_per_panel: 16, u_max: 60.0, u_panel_width: 2.0, u_per_panel: 12 }
    }
}

impl SigmaRuleSpec {
    pub fn scaled(&self, f: f64) -> Self {
        SigmaRuleSpec { t_panel_width: self.t_panel_width / f, u_panel_width: self.u_panel_width / f, ..*self }
    }

    pub fn rule(&self, kappa: f64) -> Result<QuadratureRule> {
        let lo = -40.0 / kappa - 10.0;
        let t_band = -self.u_max.ln() / kappa;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let left = composite_gauss_legendre(&panel_breaks(lo, t_band, self.t_panel_width), self.t_per_panel)?;
        nodes.extend(&left.nodes);
        weights.extend(&left.weights);
        // u runs from u_max down to 1 as t increases.
        let band = composite_gauss_legendre(&panel_breaks(1.0, self.u_max, self.u_panel_width), self.u_per_panel)?;
        for (&u, &w) in band.nodes.iter().zip(&band.weights).rev() {
            nodes.push(-u.ln() / kappa);
            weights.push(w / (kappa * u));
        }
        let right = composite_gauss_legendre(&panel_breaks(0.0, 30.0, self.t_panel_width), self.t_per_panel)?;
        nodes.extend(&right.nodes);
        weights.extend(&right.weights);
        Ok(QuadratureRule { nodes, weights, domain: crate::quadrature::Domain::Interval { a: lo, b: 30.0 } })
    }
}

/// `K_σ` on the Nyström nodes for one `(T, s)`, ready to be evaluated at any μ.
///
/// Uses `K_σ(x, y) = ∫ σ'(t) K_Ai(x+t, y+t) dt`, which follows from integrating by parts
/// against `∂_t K_Ai(x+t, y+t) = −Ai(x+t)Ai(y+t)`; the integrand then no longer carries the
/// fast oscillation of the Airy product far to the left.
pub struct CrossoverOperator {
    params: CrossoverParams,
    x: Vec<f64>,
    sqrt_w: Vec<f64>,
    t: Vec<f64>,
    tw: Vec<f64>,
    /// `Ai(x_i + t_k)`, row-major `n_x × n_t`.
    a: Vec<f64>,
    /// `Ai'(x_j + t_k)` transposed: row-major `n_t × n_x`.
    d_t: Vec<f64>,
    /// `Ai'(x_i+t_k)² − (x_i+t_k)Ai(x_i+t_k)²`, the diagonal of `K_Ai`.
    diag: Vec<f64>,
}

impl CrossoverOperator {
    pub fn new(params: CrossoverParams, s: f64, res: &CrossoverResolution) -> Result<Self> {
        let x_rule = map_semiinfinite(&gauss_legendre(res.n_x)?, s / params.kappa(), res.scale)?;
        let t_rule = res.t.rule(params.kappa())?;
        let (nx, nt) = (x_rule.len(), t_rule.len());
        let mut a = vec![0.0; nx * nt];
        let mut d_t = vec![0.0; nx * nt];
        let mut diag = vec![0.0; nx * nt];
        for i in 0..nx {
            for k in 0..nt {
                let u = x_rule.nodes[i] + t_rule.nodes[k];
                let p = airy_unchecked(u);
                a[i * nt + k] = p.ai;
                d_t[k * nx + i] = p.ai_prime;
                diag[i * nt + k] = p.ai_prime * p.ai_prime - u * p.ai * p.ai;
            }
        }
        Ok(CrossoverOperator {
            params,
            sqrt_w: x_rule.weights.iter().map(|w| w.sqrt()).collect(),
            x: x_rule.nodes,
            t: t_rule.nodes,
            tw: t_rule.weights,
            a,
            d_t,
            diag,
        })
    }

    pub fn dimension(&self) -> usize {
        self.x.len()
    }

    /// Weighted matrix of `K_{σ_{T,μ}}`.
    pub fn matrix(&self, mu: Complex64) -> CMatrix {
        let (nx, nt) = (self.x.len(), self.t.len());
        let c: Vec<Complex64> =
            self.t.iter().zip(&self.tw).map(|(&t, &w)| w * sigma_weight_derivative(&self.params, mu, t)).collect();
        let mut ac_re = vec![0.0; nx * nt];
        let mut ac_im = vec![0.0; nx * nt];
        for i in 0..nx {
            for k in 0..nt {
                let v = self.a[i * nt + k];
                ac_re[i * nt + k] = v * c[k].re;
                ac_im[i * nt + k] = v * c[k].im;
            }
        }
        let mut p_re = vec![0.0; nx * nx];
        let mut p_im = vec![0.0; nx * nx];
        dgemm_into(nx, nt, nx, &ac_re, &self.d_t, &mut p_re);
        dgemm_into(nx, nt, nx, &ac_im, &self.d_t, &mut p_im);
        CMatrix::from_fn(nx, nx, |i, j| {
            let w = self.sqrt_w[i] * self.sqrt_w[j];
            if i == j {
                let row = &self.diag[i * nt..(i + 1) * nt];
                let s: Complex64 = row.iter().zip(&c).map(|(&e, &ck)| ck * e).sum();
                s * w
            } else {
                let num = Complex64::new(p_re[i * nx + j] - p_re[j * nx + i], p_im[i * nx + j] - p_im[j * nx + i]);
                num * (w / (self.x[i] - self.x[j]))
            }
        })
    }

    /// `det(I − K_{σ_{T,μ}})`.
    pub fn det(&self, mu: Complex64) -> Result<Complex64> {
        let m = self.matrix(mu);
        let d = complex_det(&m.identity_plus(Complex64::new(-1.0, 0.0)))?;
        Ok(d.value)
    }
}

/// `(1/2πi)∫_C e^{−μ} g(μ) dμ/μ` over the μ hairpin, for `g(μ̄) = conj g(μ)`.
///
/// With `symmetric`, only the upper half is evaluated and reflected; otherwise the whole
/// contour is summed, which is how the reflection symmetry itself is checked.
pub(crate) fn mu_contour_integral(
    spec: &MuContourSpec,
    symmetric: bool,
    g: impl Fn(Complex64) -> Result<Complex64> + Sync + Send,
) -> Result<Complex64> {
    let rule = spec.rule(symmetric)?;
    let values = map_indexed(rule.len(), |k| {
        let mu = rule.points[k];
        g(mu).map(|v| v * (-mu).exp() / mu * rule.dz_weights[k])
    });
    let mut sum = Complex64::new(0.0, 0.0);
    for v in values {
        sum += v?;
    }
    let total = if symmetric { crate::quadrature::reflect_upper(sum) } else { sum };
    Ok(total / Complex64::new(0.0, 2.0 * PI))
}

/// `F_T(s)` by the Airy-kernel formula at a single resolution, as a complex number.
pub fn kpz_crossover_cdf_raw(params: &CrossoverParams, s: f64, res: &CrossoverResolution, symmetric: bool) -> Result<Complex64> {
    let op = CrossoverOperator::new(*params, s, res)?;
    mu_contour_integral(&res.mu, symmetric, |mu| op.det(mu))
}

/// `F_T(s)`, certified against a 1.5× recomputation.
pub fn kpz_crossover_cdf(params: &CrossoverParams, s: f64, res: &CrossoverResolution) -> Result<f64> {
    check_crossover_window(params)?;
    let v = kpz_crossover_cdf_raw(params, s, res, true)?;
    let check = kpz_crossover_cdf_raw(params, s, &res.scaled(1.5), true)?;
    certify("crossover CDF (Airy-kernel route)", v.re, check.re, CROSSOVER_TOLERANCE)?;
    Ok(v.re)
}

/// Documented window of KPZ times for the Airy-kernel route.
pub const CROSSOVER_T_WINDOW: (f64, f64) = (0.05, 1000.0);

fn check_crossover_window(params: &CrossoverParams) -> Result<()> {
    let t = params.time();
    if t < CROSSOVER_T_WINDOW.0 || t > CROSSOVER_T_WINDOW.1 {
        return Err(Error::OutOfRange(t));
    }
    Ok(())
}

/// Long-time variable `2^{−1/3}T^{1/3}s`: `F_T` at this point tends to `F_GUE(s)`.
pub fn rescale_longtime(t: f64, s: f64) -> f64 {
    (t / 2.0).cbrt() * s
}

/// Short-time variable `2^{−1/2}π^{1/4}T^{1/4}(s − log√(2πT))`: `F_T` there tends to `G(s)`.
pub fn rescale_shorttime(t: f64, s: f64) -> f64 {
    2f64.powf(-0.5) * PI.powf(0.25) * t.powf(0.25) * (s - (2.0 * PI * t).sqrt().ln())
}

/// `Ai` at `x0`, exposed for the Painlevé boundary data.
pub(crate) fn airy_pair(x: f64) -> Result<(f64, f64)> {
    let p = airy(x)?;
    Ok((p.ai, p.ai_prime))
}
