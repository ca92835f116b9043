//! Dense complex matrices, products and determinants.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid("matrix data length does not match its shape"));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&mut self, c: Complex64) {
        self.data.iter_mut().for_each(|z| *z *= c);
    }

    /// `I + c·self`, for a square matrix.
    pub fn identity_plus(&self, c: Complex64) -> CMatrix {
        debug_assert!(self.is_square());
        let mut m = self.clone();
        m.scale(c);
        for i in 0..self.rows {
            m[(i, i)] += 1.0;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(invalid("matrix product shape mismatch"));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        zgemm_into(self.rows, self.cols, other.cols, &self.data, &other.data, &mut out.data);
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `c = a·b` for row-major `a` (m×k) and `b` (k×n).
pub(crate) fn zgemm_into(m: usize, k: usize, n: usize, a: &[Complex64], b: &[Complex64], c: &mut [Complex64]) {
    assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: Complex64 is repr(C) with layout [re, im]; slice bounds checked above.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            k as isize,
            1,
            b.as_ptr() as *const [f64; 2],
            n as isize,
            1,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            n as isize,
            1,
        );
    }
}

/// `c = a·b` for row-major real matrices.
pub(crate) fn dgemm_into(m: usize, k: usize, n: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: slice bounds checked above; strides describe dense row-major storage.
    unsafe {
        matrixmultiply::dgemm(
            m, k, n, 1.0, a.as_ptr(), k as isize, 1, b.as_ptr(), n as isize, 1, 0.0, c.as_mut_ptr(), n as isize, 1,
        );
    }
}

/// Determinant with its logarithm kept separately so large dimensions cannot overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    pub value: Complex64,
    pub log_abs: f64,
    pub phase: f64,
    pub singular: bool,
}

const SINGULAR_PIVOT: f64 = 1e-300;
const LU_BLOCK: usize = 48;

/// Determinant by LU factorization with partial pivoting.
pub fn complex_det(matrix: &CMatrix) -> Result<Determinant> {
    if !matrix.is_square() {
        return Err(invalid("determinant of a non-square matrix"));
    }
    if matrix.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(invalid("matrix has non-finite entries"));
    }
    let n = matrix.rows;
    let mut a = matrix.data.clone();
    let mut log_abs = 0.0;
    let mut phase = 0.0;
    let mut k0 = 0;
    while k0 < n {
        let k1 = (k0 + LU_BLOCK).min(n);
        // Panel factorization, updating only columns k0..k1.
        for k in k0..k1 {
            let (mut p, mut best) = (k, a[k * n + k].norm());
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < SINGULAR_PIVOT {
                return Ok(Determinant { value: Complex64::new(0.0, 0.0), log_abs: f64::NEG_INFINITY, phase: 0.0, singular: true });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                phase += std::f64::consts::PI;
            }
            let pivot = a[k * n + k];
            log_abs += best.ln();
            phase += pivot.arg();
            let inv = 1.0 / pivot;
            let (head, tail) = a.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n + k + 1..k * n + k1];
            for row in tail.chunks_exact_mut(n) {
                let l = row[k] * inv;
                row[k] = l;
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                for (x, &y) in row[k + 1..k1].iter_mut().zip(pivot_row) {
                    *x -= l * y;
                }
            }
        }
        if k1 < n {
            // U12 = L11⁻¹ A12.
            for k in k0..k1 {
                for i in k + 1..k1 {
                    let l = a[i * n + k];
                    for j in k1..n {
                        let y = a[k * n + j];
                        a[i * n + j] -= l * y;
                    }
                }
            }
            // A22 -= L21 U12.
            let m = n - k1;
            let kb = k1 - k0;
            let ptr = a.as_mut_ptr() as *mut [f64; 2];
            // SAFETY: L21 (rows k1.., cols k0..k1), U12 (rows k0..k1, cols k1..) and A22 (rows k1..,
            // cols k1..) are disjoint regions of the n×n buffer; strides are row-major.
            unsafe {
                matrixmultiply::zgemm(
                    matrixmultiply::CGemmOption::Standard,
                    matrixmultiply::CGemmOption::Standard,
                    m,
                    kb,
                    m,
                    [-1.0, 0.0],
                    ptr.add(k1 * n + k0),
                    n as isize,
                    1,
                    ptr.add(k0 * n + k1),
                    n as isize,
                    1,
                    [1.0, 0.0],
                    ptr.add(k1 * n + k1),
                    n as isize,
                    1,
                );
            }
        }
        k0 = k1;
    }
    let phase = phase.rem_euclid(2.0 * std::f64::consts::PI);
    let value = Complex64::from_polar(log_abs.exp(), phase);
    Ok(Determinant { value, log_abs, phase, singular: false })
}

/// `det(I − M)`; convenience for Fredholm use.
pub fn det_identity_minus(m: &CMatrix) -> Result<Determinant> {
    if !m.is_square() {
        return Err(Error::InvalidInput("operator matrix must be square".into()));
    }
    complex_det(&m.identity_plus(Complex64::new(-1.0, 0.0)))
}
