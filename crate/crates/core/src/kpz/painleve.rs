//! Hastings–McLeod solution of Painlevé II and the resulting `F_GUE`.

use std::sync::OnceLock;

use super::airy_pair;
use crate::error::{Error, Result};

/// Backward-integrated solution on a dense descending grid.
#[derive(Debug, Clone)]
pub struct PainleveSolution {
    pub x_grid: Vec<f64>,
    pub q_values: Vec<f64>,
    pub q_prime_values: Vec<f64>,
    /// `∫_x^∞ q²` and `∫_x^∞ y q(y)² dy`, carried along as extra ODE components.
    i1: Vec<f64>,
    i2: Vec<f64>,
}

pub const PAINLEVE_X0: f64 = 8.0;
pub const PAINLEVE_X_MIN: f64 = -12.0;
const LOCAL_TOL: f64 = 1e-12;
const MAX_STEP: f64 = 1e-3;

type State = [f64; 4];

fn rhs(x: f64, y: &State) -> State {
    let q = y[0];
    [y[1], (x + 2.0 * q * q) * q, -q * q, -x * q * q]
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn dopri_step(x: f64, y: &State, h: f64) -> (State, f64) {
    let mut k = [[0.0; 4]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for c in 0..4 {
                ys[c] += h * A[s][j] * kj[c];
            }
        }
        k[s] = rhs(x + C[s] * h, &ys);
    }
    let mut out = *y;
    let mut err: f64 = 0.0;
    for c in 0..4 {
        let mut hi = 0.0;
        let mut lo = 0.0;
        for s in 0..7 {
            hi += B[s] * k[s][c];
            lo += B_LOW[s] * k[s][c];
        }
        out[c] += h * hi;
        let scale = LOCAL_TOL * (1.0 + y[c].abs().max(out[c].abs()));
        err = err.max((h * (hi - lo)).abs() / scale);
    }
    (out, err)
}

/// `∫_x^∞ Ai²` and `∫_x^∞ y Ai(y)² dy` in closed form.
fn airy_square_tails(x: f64) -> Result<(f64, f64)> {
    let (a, d) = airy_pair(x)?;
    let i1 = d * d - x * a * a;
    let i2 = -(x * x * a * a - x * d * d + a * d) / 3.0;
    Ok((i1, i2))
}

/// Integrates `q'' = (x + 2q²)q` from `x0` down to `x_min` with Airy data at `x0`.
pub fn solve_hastings_mcleod(x0: f64, x_min: f64) -> Result<PainleveSolution> {
    let (q0, qp0) = airy_pair(x0)?;
    let (i1, i2) = airy_square_tails(x0)?;
    let mut y: State = [q0, qp0, i1, i2];
    let mut x = x0;
    let mut sol = PainleveSolution {
        x_grid: vec![x],
        q_values: vec![y[0]],
        q_prime_values: vec![y[1]],
        i1: vec![y[2]],
        i2: vec![y[3]],
    };
    let mut h = -MAX_STEP;
    while x > x_min {
        if x + h < x_min {
            h = x_min - x;
        }
        let (next, err) = dopri_step(x, &y, h);
        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            if h.abs() < 1e-12 {
                return Err(Error::BlowUp(x));
            }
            continue;
        }
        x += h;
        y = next;
        if !y[0].is_finite() || y[0].abs() > 1e6 {
            return Err(Error::BlowUp(x));
        }
        sol.x_grid.push(x);
        sol.q_values.push(y[0]);
        sol.q_prime_values.push(y[1]);
        sol.i1.push(y[2]);
        sol.i2.push(y[3]);
        let grow = if err > 0.0 { (0.9 * err.powf(-0.2)).min(5.0) } else { 5.0 };
        h = -(h.abs() * grow).min(MAX_STEP);
    }
    Ok(sol)
}

impl PainleveSolution {
    fn locate(&self, x: f64) -> Option<usize> {
        let g = &self.x_grid;
        if x > g[0] || x < *g.last().unwrap() {
            return None;
        }
        // Descending grid: find k with g[k] ≥ x ≥ g[k+1].
        let k = g.partition_point(|&v| v > x);
        Some(k.saturating_sub(1).min(g.len() - 2))
    }

    fn hermite(x: f64, x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64) -> f64 {
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * f0 + (t3 - 2.0 * t2 + t) * h * d0 + (-2.0 * t3 + 3.0 * t2) * f1 + (t3 - t2) * h * d1
    }

    /// `q(x)` by cubic Hermite interpolation of the stored solution.
    pub fn q(&self, x: f64) -> Option<f64> {
        let k = self.locate(x)?;
        let g = &self.x_grid;
        let (q0, q1) = (self.q_values[k], self.q_values[k + 1]);
        let (d0, d1) = (self.q_prime_values[k], self.q_prime_values[k + 1]);
        Some(Self::hermite(x, g[k], g[k + 1], q0, q1, d0, d1))
    }

    /// `∫_s^∞ (x − s) q(x)² dx`.
    pub fn tail_integral(&self, s: f64) -> Option<f64> {
        let k = self.locate(s)?;
        let g = &self.x_grid;
        let (x0, x1) = (g[k], g[k + 1]);
        let (q0, q1) = (self.q_values[k], self.q_values[k + 1]);
        let i1 = Self::hermite(s, x0, x1, self.i1[k], self.i1[k + 1], -q0 * q0, -q1 * q1);
        let i2 = Self::hermite(s, x0, x1, self.i2[k], self.i2[k + 1], -x0 * q0 * q0, -x1 * q1 * q1);
        Some(i2 - s * i1)
    }
}

fn cached_solution() -> Result<&'static PainleveSolution> {
    static SOL: OnceLock<std::result::Result<PainleveSolution, Error>> = OnceLock::new();
    SOL.get_or_init(|| solve_hastings_mcleod(PAINLEVE_X0, PAINLEVE_X_MIN)).as_ref().map_err(|e| e.clone())
}

/// `F_GUE(s) = exp(−∫_s^∞ (x−s) q(x)² dx)` from the Hastings–McLeod solution.
pub fn tw_gue_painleve(s: f64) -> Result<f64> {
    if !s.is_finite() || s < PAINLEVE_X_MIN {
        return Err(Error::OutOfRange(s));
    }
    if s >= PAINLEVE_X0 {
        // q coincides with Ai to far below double precision beyond x0.
        let (i1, i2) = airy_square_tails(s.min(crate::special::AIRY_RANGE))?;
        return Ok((-(i2 - s * i1)).exp());
    }
    let sol = cached_solution()?;
    let u = sol.tail_integral(s).ok_or(Error::OutOfRange(s))?;
    Ok((-u).exp())
}
