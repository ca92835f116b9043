//! Discrete directed polymers on the parity lattice `{(i, j): |j| ≤ i, i + j even}`.
//!
//! `Z^β(n, y) = Σ_π exp(β Σ_{i=0}^n w_{i,π(i)})` over simple random walk paths from `(0,0)` to
//! `(n,y)`; `Z̃ = 2^{−n} Z` obeys `Z̃(n,y) = ½(Z̃(n−1,y−1) + Z̃(n−1,y+1))·e^{βw_{n,y}}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use std::f64::consts::LN_2;

use crate::error::{invalid, Error, Result};

pub const ENUMERATION_MAX_N: usize = 22;
pub const INTERMEDIATE_MAX_N: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightDistribution {
    StandardNormal,
    /// `Exp(1) − 1`.
    CenteredExponential,
    PointMassZero,
}

impl WeightDistribution {
    pub fn mean(&self) -> f64 {
        0.0
    }

    pub fn std_dev(&self) -> f64 {
        match self {
            WeightDistribution::StandardNormal | WeightDistribution::CenteredExponential => 1.0,
            WeightDistribution::PointMassZero => 0.0,
        }
    }

    /// `log E[e^{βw}]`.
    pub fn log_mgf(&self, beta: f64) -> Result<f64> {
        match self {
            WeightDistribution::StandardNormal => Ok(0.5 * beta * beta),
            WeightDistribution::CenteredExponential if beta < 1.0 => Ok(-beta - (-beta).ln_1p()),
            WeightDistribution::CenteredExponential => {
                Err(invalid("E[exp(beta w)] is infinite for centered exponential weights with beta >= 1"))
            }
            WeightDistribution::PointMassZero => Ok(0.0),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            WeightDistribution::StandardNormal => rng.sample(StandardNormal),
            WeightDistribution::CenteredExponential => rng.sample::<f64, _>(Exp1) - 1.0,
            WeightDistribution::PointMassZero => 0.0,
        }
    }
}

/// Weights of one level, keyed by `(seed, replica, level)` and drawn left to right.
pub struct DisorderStream {
    pub distribution: WeightDistribution,
    rng: ChaCha8Rng,
}

impl DisorderStream {
    pub fn new(distribution: WeightDistribution, seed: u64, replica: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replica);
        DisorderStream { distribution, rng }
    }

    /// `w_{i,j}` for `j = −i, −i+2, …, i`.
    pub fn level(&mut self, i: usize) -> Vec<f64> {
        // 2^32 words per level is far beyond the ~4(i+1) a level consumes.
        self.rng.set_word_pos((i as u128) << 32);
        (0..=i).map(|_| self.distribution.draw(&mut self.rng)).collect()
    }
}

/// A materialized field on levels `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderField {
    pub n: usize,
    pub distribution: WeightDistribution,
    pub seed: u64,
    pub replica: u64,
    /// `levels[i][(j + i)/2] = w_{i,j}`.
    pub levels: Vec<Vec<f64>>,
}

impl DisorderField {
    pub fn new(n: usize, distribution: WeightDistribution, seed: u64) -> Self {
        DisorderField::replica(n, distribution, seed, 0)
    }

    pub fn replica(n: usize, distribution: WeightDistribution, seed: u64, replica: u64) -> Self {
        let mut stream = DisorderStream::new(distribution, seed, replica);
        let levels = (0..=n).map(|i| stream.level(i)).collect();
        DisorderField { n, distribution, seed, replica, levels }
    }

    /// A field with given weights, `levels[i]` of length `i + 1`.
    pub fn from_levels(levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() || levels.iter().enumerate().any(|(i, l)| l.len() != i + 1) {
            return Err(invalid("level i must hold i + 1 weights"));
        }
        Ok(DisorderField { n: levels.len() - 1, distribution: WeightDistribution::PointMassZero, seed: 0, replica: 0, levels })
    }

    pub fn weight(&self, i: usize, j: i64) -> Result<f64> {
        let k = site_index(i, j)?;
        self.levels.get(i).map(|l| l[k]).ok_or_else(|| invalid(format!("level {i} beyond the field")))
    }
}

/// `(j + i)/2`, rejecting wrong parity and `|j| > i`.
fn site_index(i: usize, j: i64) -> Result<usize> {
    let i = i as i64;
    if j.abs() > i || (i + j).rem_euclid(2) != 0 {
        return Err(invalid(format!("site ({i}, {j}) is off the parity lattice")));
    }
    Ok(((j + i) / 2) as usize)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Streaming log-sum-exp.
#[derive(Debug, Clone, Copy)]
struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    fn add(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v > self.max {
            self.sum = self.sum * (self.max - v).exp() + 1.0;
            self.max = v;
        } else {
            self.sum += (v - self.max).exp();
        }
    }

    fn value(&self) -> f64 {
        self.max + self.sum.ln()
    }
}

/// `log Z̃(n, ·)` on `j = −n, −n+2, …, n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionArray {
    pub level: usize,
    pub log_values: Vec<f64>,
}

impl PartitionArray {
    pub fn log_value(&self, y: i64) -> Result<f64> {
        Ok(self.log_values[site_index(self.level, y)?])
    }

    /// `log Z = log Z̃ + n log 2`.
    pub fn log_z(&self, y: i64) -> Result<f64> {
        Ok(self.log_value(y)? + self.level as f64 * LN_2)
    }

    /// `log Σ_y Z̃(n, y)`.
    pub fn log_total(&self) -> f64 {
        let mut s = LogSum::new();
        self.log_values.iter().for_each(|&v| s.add(v));
        s.value()
    }
}

fn transfer_step(prev: &[f64], w: &[f64], beta: f64, shift: f64) -> Vec<f64> {
    let i = prev.len();
    (0..=i)
        .map(|k| {
            let left = if k > 0 { prev[k - 1] } else { f64::NEG_INFINITY };
            let right = if k < i { prev[k] } else { f64::NEG_INFINITY };
            log_add(left, right) - LN_2 + beta * w[k] - shift
        })
        .collect()
}

/// Forward recursion in the log domain; `shift` is subtracted at every site (recentring).
fn transfer_with(levels: impl FnMut(usize) -> Vec<f64>, n: usize, beta: f64, shift: f64) -> PartitionArray {
    let mut levels = levels;
    let mut cur = vec![beta * levels(0)[0] - shift];
    for i in 1..=n {
        cur = transfer_step(&cur, &levels(i), beta, shift);
    }
    PartitionArray { level: n, log_values: cur }
}

pub fn partition_transfer(field: &DisorderField, n: usize, beta: f64) -> Result<PartitionArray> {
    if n > field.n {
        return Err(invalid(format!("field covers levels 0..={} only", field.n)));
    }
    Ok(transfer_with(|i| field.levels[i].clone(), n, beta, 0.0))
}

/// Exact `Z^β(n, y)` by summing over every path, log-sum-exp accumulated.
pub fn partition_enumerate(field: &DisorderField, n: usize, y: i64, beta: f64) -> Result<f64> {
    Ok(enumerate_paths(field, n, y, beta)?.0.value().exp())
}

/// Log-sum of the path weights and the maximal path sum.
fn enumerate_paths(field: &DisorderField, n: usize, y: i64, beta: f64) -> Result<(LogSum, f64)> {
    if n > ENUMERATION_MAX_N {
        return Err(Error::Resource(format!("enumeration limited to n <= {ENUMERATION_MAX_N}")));
    }
    if n > field.n {
        return Err(invalid("field too short"));
    }
    site_index(n, y)?;
    let mut sum = LogSum::new();
    let mut best = f64::NEG_INFINITY;
    for_each_path(n, y, |path| {
        let s: f64 = path.iter().enumerate().map(|(i, &j)| field.levels[i][((j + i as i64) / 2) as usize]).sum();
        sum.add(beta * s);
        best = best.max(s);
    });
    Ok((sum, best))
}

/// Calls `f` with the positions `π(0..=n)` of every path from `(0,0)` to `(n,y)`.
fn for_each_path(n: usize, y: i64, mut f: impl FnMut(&[i64])) {
    let ups = ((n as i64 + y) / 2) as u32;
    let mut path = vec![0i64; n + 1];
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() != ups {
            continue;
        }
        for i in 0..n {
            path[i + 1] = path[i] + if mask >> i & 1 == 1 { 1 } else { -1 };
        }
        f(&path);
    }
}

/// `P(π(m) = x)` under the polymer measure to `(n, y)`, for `x = −m, −m+2, …, m` (zero where unreachable).
pub fn endpoint_law(field: &DisorderField, n: usize, y: i64, m: usize, beta: f64) -> Result<Vec<f64>> {
    if m > n || n > field.n {
        return Err(invalid("need m <= n <= field length"));
    }
    site_index(n, y)?;
    let forward = partition_transfer(field, m, beta)?;
    // Backward log-partition from (i, x) to (n, y), excluding the weight at (i, x).
    let mut back: Vec<f64> = (0..=n).map(|k| if 2 * k as i64 - n as i64 == y { 0.0 } else { f64::NEG_INFINITY }).collect();
    for i in (m..n).rev() {
        let next = &field.levels[i + 1];
        back = (0..=i)
            .map(|k| {
                // (i, j) with j = 2k − i steps to (i+1, j∓1), indices k and k+1.
                log_add(back[k] + beta * next[k], back[k + 1] + beta * next[k + 1])
            })
            .collect();
    }
    let logs: Vec<f64> = forward.log_values.iter().zip(&back).map(|(f, b)| f + b).collect();
    let mut total = LogSum::new();
    logs.iter().for_each(|&v| total.add(v));
    let norm = total.value();
    Ok(logs.iter().map(|&v| (v - norm).exp()).collect())
}

/// The same law by direct path enumeration.
pub fn endpoint_law_enumerate(field: &DisorderField, n: usize, y: i64, m: usize, beta: f64) -> Result<Vec<f64>> {
    if m > n {
        return Err(invalid("need m <= n"));
    }
    let (total, _) = enumerate_paths(field, n, y, beta)?;
    let norm = total.value();
    let mut law = vec![0.0; m + 1];
    for_each_path(n, y, |path| {
        let s: f64 = path.iter().enumerate().map(|(i, &j)| field.levels[i][((j + i as i64) / 2) as usize]).sum();
        law[((path[m] + m as i64) / 2) as usize] += (beta * s - norm).exp();
    });
    Ok(law)
}

/// Maximal path sum to `(n, y)`.
pub fn last_passage(field: &DisorderField, n: usize, y: i64) -> Result<f64> {
    if n > field.n {
        return Err(invalid("field too short"));
    }
    site_index(n, y)?;
    let mut cur = vec![field.levels[0][0]];
    for i in 1..=n {
        let w = &field.levels[i];
        cur = (0..=i)
            .map(|k| {
                let left = if k > 0 { cur[k - 1] } else { f64::NEG_INFINITY };
                let right = if k < i { cur[k] } else { f64::NEG_INFINITY };
                left.max(right) + w[k]
            })
            .collect();
    }
    Ok(cur[site_index(n, y)?])
}

/// Maximal path sum by enumeration.
pub fn last_passage_enumerate(field: &DisorderField, n: usize, y: i64) -> Result<f64> {
    Ok(enumerate_paths(field, n, y, 1.0)?.1)
}

/// One weak-noise sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntermediateSample {
    pub n: usize,
    pub y: i64,
    pub beta: f64,
    /// `Z̃^β(n, y)`.
    pub value: f64,
    /// `E[Z̃^β(n, y)]`.
    pub mean: f64,
    pub centered: f64,
}

/// `Z̃^{εα}(n, y)` with `n = ε^{−4}T` and `y = ε^{−2}X` (moved by one to the parity of `n` if needed).
/// With `recenter`, each factor `e^{βw}` is divided by its mean.
pub fn intermediate_disorder_sample(
    alpha: f64,
    epsilon: f64,
    t_macro: f64,
    x_macro: f64,
    distribution: WeightDistribution,
    recenter: bool,
    seed: u64,
    replica: u64,
) -> Result<IntermediateSample> {
    if !(epsilon > 0.0 && t_macro > 0.0) {
        return Err(invalid("need epsilon > 0 and T > 0"));
    }
    let nf = t_macro / epsilon.powi(4);
    if nf > INTERMEDIATE_MAX_N {
        return Err(Error::Resource(format!("n = {nf:.3e} exceeds {INTERMEDIATE_MAX_N:e}")));
    }
    let n = nf.round().max(1.0) as usize;
    let mut y = (x_macro / (epsilon * epsilon)).round() as i64;
    if (n as i64 + y).rem_euclid(2) != 0 {
        y += if y >= 0 { 1 } else { -1 };
    }
    if y.abs() > n as i64 {
        return Err(invalid("endpoint outside the light cone"));
    }
    let beta = epsilon * alpha;
    let lm = distribution.log_mgf(beta)?;
    let shift = if recenter { lm } else { 0.0 };
    let mut stream = DisorderStream::new(distribution, seed, replica);
    let arr = transfer_with(|i| stream.level(i), n, beta, shift);
    let value = arr.log_value(y)?.exp();
    let log_binom = log_binomial(n, ((n as i64 + y) / 2) as usize) - n as f64 * LN_2;
    let mean = (log_binom + if recenter { 0.0 } else { (n + 1) as f64 * lm }).exp();
    Ok(IntermediateSample { n, y, beta, value, mean, centered: value - mean })
}

/// `W_n = Σ_y Z^β(n, y) / (2^n E[e^{βw}]^{n+1})`, point-to-line.
pub fn martingale_w(distribution: WeightDistribution, n: usize, beta: f64, seed: u64, replica: u64) -> Result<f64> {
    let lm = distribution.log_mgf(beta)?;
    let mut stream = DisorderStream::new(distribution, seed, replica);
    Ok(transfer_with(|i| stream.level(i), n, beta, lm).log_total().exp())
}

/// `W_n` of a materialized field.
pub fn martingale_w_field(field: &DisorderField, n: usize, beta: f64) -> Result<f64> {
    let lm = field.distribution.log_mgf(beta)?;
    if n > field.n {
        return Err(invalid("field too short"));
    }
    Ok(transfer_with(|i| field.levels[i].clone(), n, beta, lm).log_total().exp())
}

pub fn log_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}
