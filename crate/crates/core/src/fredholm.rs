//! Nyström discretization of Fredholm determinants.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{complex_det, CMatrix};
use crate::quadrature::{gauss_legendre, map_semiinfinite, ContourRule, QuadratureRule};
use crate::special::airy_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Hermitian,
    None,
}

type Evaluator<'a> = dyn Fn(f64, f64) -> Result<Complex64> + Sync + 'a;

/// A kernel `K(x, y)` on the real line.
pub struct KernelHandle<'a> {
    evaluator: Box<Evaluator<'a>>,
    pub symmetry: Symmetry,
    /// Rough exponential decay rate of the kernel at `+∞`, used only in diagnostics.
    pub decay_hint: f64,
}

impl<'a> KernelHandle<'a> {
    pub fn new(evaluator: impl Fn(f64, f64) -> Result<Complex64> + Sync + 'a, symmetry: Symmetry, decay_hint: f64) -> Self {
        KernelHandle { evaluator: Box::new(evaluator), symmetry, decay_hint }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<Complex64> {
        (self.evaluator)(x, y)
    }
}

/// Weighted kernel matrix together with the rule it was built on.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub matrix: CMatrix,
    pub nodes: Vec<Complex64>,
}

/// `M_ij = √(w_i w_j) K(x_i, x_j)`.
pub fn nystrom_real(kernel: &KernelHandle, rule: &QuadratureRule) -> Result<DiscretizedOperator> {
    let n = rule.len();
    let sq: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        let start = if kernel.symmetry == Symmetry::Hermitian { i } else { 0 };
        for j in start..n {
            let k = kernel
                .eval(rule.nodes[i], rule.nodes[j])
                .map_err(|e| Error::Kernel { index: i * n + j, reason: e.to_string() })?;
            let v = k * (sq[i] * sq[j]);
            m[(i, j)] = v;
            if kernel.symmetry == Symmetry::Hermitian && i != j {
                m[(j, i)] = v.conj();
            }
        }
    }
    Ok(DiscretizedOperator { matrix: m, nodes: rule.nodes.iter().map(|&x| Complex64::new(x, 0.0)).collect() })
}

/// `M_ij = K(z_i, z_j)·dz_j` for an operator on `L²(contour, dz)`.
pub fn nystrom_contour(
    kernel: impl Fn(Complex64, Complex64) -> Result<Complex64>,
    rule: &ContourRule,
) -> Result<DiscretizedOperator> {
    let n = rule.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let k = kernel(rule.points[i], rule.points[j])
                .map_err(|e| Error::Kernel { index: i * n + j, reason: e.to_string() })?;
            m[(i, j)] = k * rule.dz_weights[j];
        }
    }
    Ok(DiscretizedOperator { matrix: m, nodes: rule.points.clone() })
}

/// `det(I − M)`.
pub fn det1m(op: &DiscretizedOperator) -> Result<Complex64> {
    let d = complex_det(&op.matrix.identity_plus(Complex64::new(-1.0, 0.0)))?;
    if d.singular {
        return Err(Error::Singular);
    }
    Ok(d.value)
}

/// Airy kernel `(Ai(x)Ai'(y) − Ai'(x)Ai(y))/(x − y)`, diagonal `Ai'(x)² − x·Ai(x)²`.
pub fn airy_kernel(x: f64, y: f64) -> f64 {
    let a = airy_unchecked(x);
    let b = airy_unchecked(y);
    airy_kernel_from(x, a.ai, a.ai_prime, y, b.ai, b.ai_prime)
}

#[inline]
pub(crate) fn airy_kernel_from(x: f64, ax: f64, dx: f64, y: f64, ay: f64, dy: f64) -> f64 {
    if (x - y).abs() < 1e-9 {
        // Second-order expansion about the midpoint keeps the formula smooth at the diagonal.
        let m = 0.5 * (x + y);
        let a = 0.5 * (ax + ay);
        let d = 0.5 * (dx + dy);
        d * d - m * a * a
    } else {
        (ax * dy - dx * ay) / (x - y)
    }
}

pub fn airy_kernel_handle() -> KernelHandle<'static> {
    KernelHandle::new(|x, y| Ok(Complex64::new(airy_kernel(x, y), 0.0)), Symmetry::Hermitian, 0.0)
}

/// `K_σ(x, y) = ∫ σ(t) Ai(x+t) Ai(y+t) dt` by the quadrature `t_rule`.
///
/// Evaluation fails if either end of the rule carries a summand larger than `1e-12` of the
/// accumulated value, i.e. if the rule truncates a part of the integrand that matters.
pub fn composed_airy_kernel<'a>(
    sigma: impl Fn(f64) -> Complex64 + Sync + 'a,
    t_rule: &QuadratureRule,
) -> KernelHandle<'a> {
    let ts = t_rule.nodes.clone();
    let ws: Vec<Complex64> = t_rule.nodes.iter().zip(&t_rule.weights).map(|(&t, &w)| sigma(t) * w).collect();
    KernelHandle::new(
        move |x, y| {
            let n = ts.len();
            let mut acc = Complex64::new(0.0, 0.0);
            let mut ends = [0.0f64; 2];
            for k in 0..n {
                let term = ws[k] * airy_unchecked(x + ts[k]).ai * airy_unchecked(y + ts[k]).ai;
                if k == 0 {
                    ends[0] = term.norm();
                }
                if k + 1 == n {
                    ends[1] = term.norm();
                }
                acc += term;
            }
            let worst = ends[0].max(ends[1]);
            if worst > 1e-12 * acc.norm().max(1e-300) && worst > 1e-300 {
                return Err(invalid(format!("t-rule truncation: boundary summand {worst:.2e} at (x, y) = ({x}, {y})")));
            }
            Ok(acc)
        },
        Symmetry::None,
        0.0,
    )
}

/// Default node count for determinants on real half-lines.
pub const DEFAULT_REAL_NODES: usize = 80;
pub const DEFAULT_SCALE: f64 = 10.0;

/// `det(I − K_Ai)` on `L²(s, ∞)` with `n` mapped Gauss–Legendre nodes.
pub fn airy_determinant(s: f64, n: usize, scale: f64) -> Result<Complex64> {
    let rule = map_semiinfinite(&gauss_legendre(n)?, s, scale)?;
    det1m(&nystrom_real(&airy_kernel_handle(), &rule)?)
}
