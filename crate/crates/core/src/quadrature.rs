//! Quadrature rules on real intervals and complex contours.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    /// `[start, ∞)` reached through `x = start + scale·(1+u)/(1−u)`.
    SemiInfinite { start: f64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Domain,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Affine image of a rule on `[-1, 1]` onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> QuadratureRule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        QuadratureRule {
            nodes: self.nodes.iter().map(|u| mid + half * u).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
            domain: Domain::Interval { a, b },
        }
    }
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(invalid("Gauss-Legendre order must be at least 1"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights, domain: Domain::Interval { a: -1.0, b: 1.0 } })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule over consecutive panels `[b_k, b_{k+1}]`.
pub fn composite_gauss_legendre(breaks: &[f64], per_panel: usize) -> Result<QuadratureRule> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("panel breakpoints must be strictly increasing"));
    }
    let base = gauss_legendre(per_panel)?;
    let mut nodes = Vec::with_capacity(per_panel * (breaks.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for w in breaks.windows(2) {
        let panel = base.on_interval(w[0], w[1]);
        nodes.extend(panel.nodes);
        weights.extend(panel.weights);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: Domain::Interval { a: breaks[0], b: *breaks.last().unwrap() },
    })
}

/// Equal-width panels covering `[a, b]` with width at most `width`.
pub fn panel_breaks(a: f64, b: f64, width: f64) -> Vec<f64> {
    let count = ((b - a) / width).ceil().max(1.0) as usize;
    (0..=count).map(|k| a + (b - a) * k as f64 / count as f64).collect()
}

/// Maps a rule on `[-1, 1]` onto `[s, ∞)`.
pub fn map_semiinfinite(rule: &QuadratureRule, s: f64, scale: f64) -> Result<QuadratureRule> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(invalid("semi-infinite map scale must be positive"));
    }
    if rule.domain != (Domain::Interval { a: -1.0, b: 1.0 }) {
        return Err(invalid("semi-infinite map expects a rule on [-1, 1]"));
    }
    let nodes = rule.nodes.iter().map(|&u| s + scale * (1.0 + u) / (1.0 - u)).collect();
    let weights = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| w * 2.0 * scale / ((1.0 - u) * (1.0 - u)))
        .collect();
    Ok(QuadratureRule { nodes, weights, domain: Domain::SemiInfinite { start: s, scale } })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourShape {
    Circle { center: Complex64, radius: f64 },
    VerticalSegment { re: f64, r_lo: f64, r_hi: f64 },
    /// Legs `x ± iδ` for `0 ≤ x ≤ m` joined by a left semicircle of radius `cap` (= δ).
    Hairpin { delta: f64, m: f64, cap: f64 },
    /// The upper half of a conjugate-symmetric contour; callers reflect the sum.
    UpperHairpin { delta: f64, m: f64, cap: f64 },
    Path,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourRule {
    pub points: Vec<Complex64>,
    pub dz_weights: Vec<Complex64>,
    pub descriptor: ContourShape,
}

impl ContourRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ f(z_k) dz_k`, without the `1/(2πi)` factor.
    pub fn integrate<F: FnMut(Complex64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.points.iter().zip(&self.dz_weights).map(|(&z, &w)| w * f(z)).sum()
    }
}

/// Positively oriented trapezoid rule on a circle.
pub fn circle_rule(center: Complex64, radius: f64, n: usize) -> Result<ContourRule> {
    if n < 4 {
        return Err(invalid("circle rule needs at least 4 points"));
    }
    if !(radius > 0.0) {
        return Err(invalid("circle radius must be positive"));
    }
    let mut points = Vec::with_capacity(n);
    let mut dz = Vec::with_capacity(n);
    for k in 0..n {
        let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        points.push(center + radius * e);
        dz.push(Complex64::new(0.0, 2.0 * PI * radius / n as f64) * e);
    }
    Ok(ContourRule { points, dz_weights: dz, descriptor: ContourShape::Circle { center, radius } })
}

/// Upward vertical segment `re + i r`, `r` distributed by `r_rule`.
pub fn vertical_segment_rule(re: f64, r_rule: &QuadratureRule) -> ContourRule {
    let points = r_rule.nodes.iter().map(|&r| Complex64::new(re, r)).collect();
    let dz_weights = r_rule.weights.iter().map(|&w| Complex64::new(0.0, w)).collect();
    let (r_lo, r_hi) = match r_rule.domain {
        Domain::Interval { a, b } => (a, b),
        Domain::SemiInfinite { start, .. } => (start, f64::INFINITY),
    };
    ContourRule { points, dz_weights, descriptor: ContourShape::VerticalSegment { re, r_lo, r_hi } }
}

/// Hairpin around `[0, ∞)`: from `m + iδ` left to the cap, around `-δ`, then to `m − iδ`.
///
/// With `upper_only`, just the part with `Im z ≥ 0` is produced; see [`reflect_upper`].
pub fn hairpin_rule(delta: f64, m: f64, leg: &QuadratureRule, cap: &QuadratureRule, upper_only: bool) -> Result<ContourRule> {
    if !(delta > 0.0) || !(m > 0.0) {
        return Err(invalid("hairpin needs positive offset and truncation"));
    }
    let mut points = Vec::new();
    let mut dz = Vec::new();
    // Upper leg, traversed right to left.
    for (&u, &w) in leg.nodes.iter().zip(&leg.weights).rev() {
        points.push(Complex64::new(u, delta));
        dz.push(Complex64::new(-w, 0.0));
    }
    // Cap: angle from π/2 to 3π/2 (or π for the upper half).
    for (&th, &w) in cap.nodes.iter().zip(&cap.weights) {
        if upper_only && th > PI {
            continue;
        }
        let e = Complex64::from_polar(delta, th);
        points.push(e);
        dz.push(Complex64::i() * e * w);
    }
    if !upper_only {
        for (&u, &w) in leg.nodes.iter().zip(&leg.weights) {
            points.push(Complex64::new(u, -delta));
            dz.push(Complex64::new(w, 0.0));
        }
    }
    let descriptor = if upper_only {
        ContourShape::UpperHairpin { delta, m, cap: delta }
    } else {
        ContourShape::Hairpin { delta, m, cap: delta }
    };
    Ok(ContourRule { points, dz_weights: dz, descriptor })
}

/// Full contour sum from the upper half for integrands with `f(z̄) = conj f(z)`.
///
/// The lower half traverses the mirror image in the reverse sense, so its dz weights are
/// `-conj(dz)` and `∫_lower = -conj(∫_upper)`.
pub fn reflect_upper(upper_sum: Complex64) -> Complex64 {
    upper_sum - upper_sum.conj()
}

/// The standard μ contour shared by both crossover routes: offset 1, unit left cap,
/// truncation `m`, Gauss–Legendre panels growing geometrically along the legs.
pub fn mu_hairpin(m: f64, per_panel: usize, cap_points: usize, upper_only: bool) -> Result<ContourRule> {
    let mut breaks = vec![0.0];
    let mut width = 1.0;
    while *breaks.last().unwrap() < m {
        let next = (breaks.last().unwrap() + width).min(m);
        breaks.push(next);
        width *= 1.6;
    }
    let leg = composite_gauss_legendre(&breaks, per_panel)?;
    let cap_hi = if upper_only { PI } else { 1.5 * PI };
    let n_cap = if upper_only { cap_points } else { 2 * cap_points };
    let cap = gauss_legendre(n_cap)?.on_interval(0.5 * PI, cap_hi);
    hairpin_rule(1.0, m, &leg, &cap, upper_only)
}
