//! Tabulated CDFs and the CSV exchange format.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};

pub const FORMAT_LINE: &str = "# kpz-lab format v1";
pub const VALUE_SLACK: f64 = 1e-6;

/// A CDF sampled on an ascending grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    s_grid: Vec<f64>,
    values: Vec<f64>,
}

impl DistributionTable {
    /// Checks the grid, the range `[−1e-6, 1 + 1e-6]` and monotonicity within `1e-6`.
    pub fn new(s_grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&s_grid, &values)?;
        for (k, &v) in values.iter().enumerate() {
            if !(-VALUE_SLACK..=1.0 + VALUE_SLACK).contains(&v) {
                return Err(invalid(format!("CDF value {v} at s = {} is outside [0, 1]", s_grid[k])));
            }
        }
        for k in 1..values.len() {
            if values[k] < values[k - 1] - VALUE_SLACK {
                return Err(invalid(format!("CDF decreases between s = {} and s = {}", s_grid[k - 1], s_grid[k])));
            }
        }
        Ok(DistributionTable { s_grid, values })
    }

    /// Tabulates `f` on the grid; errors from `f` propagate.
    pub fn tabulate(grid: &[f64], f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Self> {
        let values: Result<Vec<f64>> = crate::par::map_indexed(grid.len(), |k| f(grid[k])).into_iter().collect();
        DistributionTable::new(grid.to_vec(), values?)
    }

    /// Right-continuous empirical CDF, one entry per distinct sample value.
    pub fn ecdf(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("ECDF of an empty sample"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite sample"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut s_grid = Vec::new();
        let mut values = Vec::new();
        for (k, &x) in sorted.iter().enumerate() {
            if k + 1 < sorted.len() && sorted[k + 1] == x {
                continue;
            }
            s_grid.push(x);
            values.push((k + 1) as f64 / n);
        }
        DistributionTable::new(s_grid, values)
    }

    pub fn s_grid(&self) -> &[f64] {
        &self.s_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.s_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_grid.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.s_grid[0], *self.s_grid.last().unwrap())
    }

    /// Linear interpolation, clamped to the end values outside the grid.
    pub fn interpolate(&self, s: f64) -> f64 {
        interpolate(&self.s_grid, &self.values, s)
    }

    pub fn to_csv(&self) -> String {
        csv_string(("s", "value"), &self.s_grid, &self.values)
    }
}

fn check_grid(s: &[f64], v: &[f64]) -> Result<()> {
    if s.is_empty() || s.len() != v.len() {
        return Err(invalid("table needs equally many (nonzero) grid points and values"));
    }
    if s.iter().chain(v).any(|x| !x.is_finite()) {
        return Err(invalid("table entries must be finite"));
    }
    if s.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("s-grid must be strictly ascending"));
    }
    Ok(())
}

fn interpolate(s: &[f64], v: &[f64], x: f64) -> f64 {
    if x <= s[0] {
        return v[0];
    }
    let last = s.len() - 1;
    if x >= s[last] {
        return v[last];
    }
    let k = s.partition_point(|&g| g <= x);
    let (s0, s1) = (s[k - 1], s[k]);
    v[k - 1] + (v[k] - v[k - 1]) * (x - s0) / (s1 - s0)
}

/// Ascending grid `s_min, s_min + step, …` up to `s_max` (inclusive within rounding).
pub fn uniform_grid(s_min: f64, s_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !s_min.is_finite() || !s_max.is_finite() {
        return Err(invalid("grid needs finite bounds and a positive step"));
    }
    if s_max < s_min {
        return Err(invalid("s-max must not be below s-min"));
    }
    let n = ((s_max - s_min) / step + 1e-9).floor() as usize + 1;
    if n > 10_000_000 {
        return Err(Error::Resource(format!("{n} grid points")));
    }
    Ok((0..n).map(|k| s_min + k as f64 * step).collect())
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".to_string() } else { t.to_string() }
}

/// Two-column CSV with the format comment line, `\n` line endings.
pub fn csv_string(header: (&str, &str), a: &[f64], b: &[f64]) -> String {
    let mut out = String::with_capacity(32 * a.len() + 64);
    out.push_str(FORMAT_LINE);
    out.push('\n');
    let _ = writeln!(out, "{},{}", header.0, header.1);
    for (x, y) in a.iter().zip(b) {
        let _ = writeln!(out, "{},{}", format_g12(*x), format_g12(*y));
    }
    out
}

/// CSV of samples, `index,value`.
pub fn samples_csv(samples: &[f64]) -> String {
    let index: Vec<f64> = (0..samples.len()).map(|k| k as f64).collect();
    csv_string(("index", "value"), &index, samples)
}

/// A parsed two-column file.
#[derive(Debug, Clone, PartialEq)]
pub enum CsvData {
    /// `s,value` or `s,ecdf`.
    Table { header: String, s: Vec<f64>, values: Vec<f64> },
    /// `index,value`.
    Samples(Vec<f64>),
}

pub fn parse_csv(text: &str) -> Result<CsvData> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(l) if l.trim() == FORMAT_LINE => {}
        _ => return Err(invalid(format!("missing '{FORMAT_LINE}' line"))),
    }
    let header = lines.next().ok_or_else(|| invalid("missing header line"))?.trim().to_string();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (k, line) in lines.enumerate() {
        let (x, y) = line.split_once(',').ok_or_else(|| invalid(format!("row {}: expected two fields", k + 1)))?;
        let parse = |f: &str| f.trim().parse::<f64>().map_err(|_| invalid(format!("row {}: bad number '{f}'", k + 1)));
        a.push(parse(x)?);
        b.push(parse(y)?);
    }
    match header.as_str() {
        "index,value" => Ok(CsvData::Samples(b)),
        "s,value" | "s,ecdf" => {
            check_grid(&a, &b)?;
            Ok(CsvData::Table { header, s: a, values: b })
        }
        other => Err(invalid(format!("unknown header '{other}'"))),
    }
}

/// Sup-norm distance on the overlap, evaluated on the coarser grid with the denser table interpolated.
pub fn sup_distance(sa: &[f64], va: &[f64], sb: &[f64], vb: &[f64]) -> Result<f64> {
    let lo = sa[0].max(sb[0]);
    let hi = sa.last().unwrap().min(*sb.last().unwrap());
    if lo > hi {
        return Err(invalid("tables have disjoint s-ranges"));
    }
    let ((sc, vc), (sd, vd)) = if sa.len() <= sb.len() { ((sa, va), (sb, vb)) } else { ((sb, vb), (sa, va)) };
    let d = sc
        .iter()
        .zip(vc)
        .filter(|(s, _)| (lo..=hi).contains(*s))
        .map(|(&s, &v)| (v - interpolate(sd, vd, s)).abs())
        .fold(0.0, f64::max);
    Ok(d)
}

/// Kolmogorov–Smirnov distance between the ECDF of `samples` and a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("KS distance of an empty sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut d: f64 = 0.0;
    let mut k = 0;
    while k < n {
        let x = sorted[k];
        let mut j = k;
        while j < n && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max((f - k as f64 / n as f64).abs()).max((j as f64 / n as f64 - f).abs());
        k = j;
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("KS distance of an empty sample"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / x.len() as f64 - j as f64 / y.len() as f64).abs());
    }
    Ok(d)
}

/// Kolmogorov–Smirnov distance between a right-continuous step CDF, given by its values at the
/// jump points, and a continuous CDF.
pub fn ks_distance_steps(s: &[f64], v: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    check_grid(s, v)?;
    let mut below = 0.0;
    let mut d: f64 = 0.0;
    for (&x, &p) in s.iter().zip(v) {
        let f = cdf(x);
        d = d.max((f - below).abs()).max((p - f).abs());
        below = p;
    }
    Ok(d)
}
