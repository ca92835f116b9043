use std::path::Path;

use kpz_lab::asep_exact::AsepParams;
use kpz_lab::asep_sim::{sample_heights, GeometryKind};
use kpz_lab::fredholm::DEFAULT_REAL_NODES;
use kpz_lab::kpz::{
    kpz_crossover_cdf, kpz_crossover_cdf_csc, kpz_edge_cdf, tw_gue_fredholm, tw_gue_painleve, CrossoverParams,
    CrossoverResolution, CscCalibration, CscResolution, EdgeResolution, EDGE_WINDOW,
};
use kpz_lab::par::map_indexed;
use kpz_lab::polymer::{
    intermediate_disorder_sample, last_passage, martingale_w, partition_transfer, DisorderField, WeightDistribution,
};
use kpz_lab::special::gaussian_cdf;
use kpz_lab::table::{
    csv_string, format_g12, ks_distance, ks_distance_steps, ks_two_sample, parse_csv, samples_csv, sup_distance,
    uniform_grid, CsvData, DistributionTable,
};

use crate::args::{CompareArgs, CrossoverRoute, DistArgs, DistKind, Disorder, GueMethod, Observable, SimKind, SimulateArgs};
use crate::error::{validation, CliError};

/// Largest grid a `dist` call tabulates.
pub const MAX_GRID: usize = 100_000;

pub fn dist(a: &DistArgs) -> Result<String, CliError> {
    let grid = uniform_grid(a.s_min, a.s_max, a.step)?;
    if grid.len() > MAX_GRID {
        return Err(CliError::Lab(kpz_lab::Error::Resource(format!("{} grid points (limit {MAX_GRID})", grid.len()))));
    }
    if a.nodes == Some(0) {
        return Err(validation("--nodes must be positive"));
    }
    let table = match a.kind {
        DistKind::Gaussian => DistributionTable::tabulate(&grid, |s| Ok(gaussian_cdf(s)))?,
        DistKind::TwGue => match a.method {
            GueMethod::Fredholm => {
                let n = a.nodes.unwrap_or(DEFAULT_REAL_NODES);
                DistributionTable::tabulate(&grid, |s| tw_gue_fredholm(s, n))?
            }
            GueMethod::Painleve => DistributionTable::tabulate(&grid, tw_gue_painleve)?,
        },
        DistKind::KpzCrossover => {
            let params = CrossoverParams::new(a.t)?;
            match a.route {
                CrossoverRoute::Theorem => {
                    let mut res = CrossoverResolution::for_time(a.t);
                    if let Some(n) = a.nodes {
                        res.n_x = n;
                    }
                    DistributionTable::tabulate(&grid, |s| kpz_crossover_cdf(&params, s, &res))?
                }
                CrossoverRoute::Csc => {
                    if a.nodes.is_some() {
                        return Err(validation("--nodes does not apply to the csc route"));
                    }
                    let (res, cal) = (CscResolution::default(), CscCalibration::default());
                    DistributionTable::tabulate(&grid, |s| kpz_crossover_cdf_csc(a.t, s, &res, &cal))?
                }
            }
        }
        DistKind::KpzEdge => {
            let (t_lo, t_hi, x_max) = EDGE_WINDOW;
            if !(t_lo..=t_hi).contains(&a.t) || a.x.abs() > x_max {
                return Err(validation(format!("edge CDF needs T in [{t_lo}, {t_hi}] and |X| <= {x_max}")));
            }
            let mut res = EdgeResolution::default();
            if let Some(n) = a.nodes {
                res.n_x = n;
            }
            DistributionTable::tabulate(&grid, |s| kpz_edge_cdf(a.t, a.x, s, &res))?
        }
    };
    Ok(table.to_csv())
}

fn weight_distribution(d: Disorder) -> WeightDistribution {
    match d {
        Disorder::Normal => WeightDistribution::StandardNormal,
        Disorder::Exponential => WeightDistribution::CenteredExponential,
        Disorder::Zero => WeightDistribution::PointMassZero,
    }
}

pub fn simulate(a: &SimulateArgs) -> Result<String, CliError> {
    if a.samples == 0 {
        return Err(validation("--samples must be at least 1"));
    }
    let samples = match a.kind {
        SimKind::Asep => simulate_asep(a)?,
        SimKind::Polymer => simulate_polymer(a)?,
    };
    if a.ecdf {
        let e = DistributionTable::ecdf(&samples)?;
        Ok(csv_string(("s", "ecdf"), e.s_grid(), e.values()))
    } else {
        Ok(samples_csv(&samples))
    }
}

fn simulate_asep(a: &SimulateArgs) -> Result<Vec<f64>, CliError> {
    let kind: GeometryKind = a.geometry.parse()?;
    let params = AsepParams::from_gamma(a.gamma)?;
    if a.x.fract() != 0.0 || !a.x.is_finite() {
        return Err(validation("--x must be an integer site for ASEP"));
    }
    let x = a.x as i64;
    if !(a.t >= 0.0 && a.t.is_finite()) {
        return Err(validation("--t must be a nonnegative time"));
    }
    match a.observable.unwrap_or(Observable::Height) {
        Observable::Height => {
            let rows = sample_heights(kind, &params, a.t, &[x], a.samples, a.seed)?;
            Ok(rows.iter().map(|r| r[0] as f64).collect())
        }
        Observable::Fluctuation => {
            let rows = sample_heights(kind, &params, a.t / a.gamma, &[x], a.samples, a.seed)?;
            let scale = if a.t > 0.0 { (a.t / 2.0).cbrt() } else { 1.0 };
            Ok(rows.iter().map(|r| -(r[0] as f64 - 0.5 * a.t) / scale).collect())
        }
        other => Err(validation(format!("observable {other:?} is not defined for ASEP"))),
    }
}

fn simulate_polymer(a: &SimulateArgs) -> Result<Vec<f64>, CliError> {
    let dist = weight_distribution(a.distribution);
    let n = a.samples;
    let values: Vec<kpz_lab::Result<f64>> = match a.observable.unwrap_or(Observable::Martingale) {
        Observable::Martingale => map_indexed(n, |r| martingale_w(dist, a.n, a.beta, a.seed, r as u64)),
        Observable::LogPartition => map_indexed(n, |r| {
            let field = DisorderField::replica(a.n, dist, a.seed, r as u64);
            partition_transfer(&field, a.n, a.beta)?.log_value(a.y)
        }),
        Observable::LastPassage => map_indexed(n, |r| {
            let field = DisorderField::replica(a.n, dist, a.seed, r as u64);
            last_passage(&field, a.n, a.y)
        }),
        Observable::Intermediate => map_indexed(n, |r| {
            let s = intermediate_disorder_sample(a.alpha, a.epsilon, a.t, a.x, dist, a.recenter, a.seed, r as u64)?;
            Ok(s.value / s.mean)
        }),
        other => return Err(validation(format!("observable {other:?} is not defined for polymers"))),
    };
    Ok(values.into_iter().collect::<kpz_lab::Result<Vec<f64>>>()?)
}

/// A parsed input as a CDF on a grid plus, for samples and ECDFs, the step description.
struct Input {
    s: Vec<f64>,
    values: Vec<f64>,
    samples: Option<Vec<f64>>,
    step: bool,
}

fn load(path: &Path) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let data = parse_csv(&text).map_err(|e| validation(format!("{}: {e}", path.display())))?;
    Ok(match data {
        CsvData::Samples(v) => {
            let e = DistributionTable::ecdf(&v)?;
            Input { s: e.s_grid().to_vec(), values: e.values().to_vec(), samples: Some(v), step: true }
        }
        CsvData::Table { header, s, values } => Input { step: header == "s,ecdf", s, values, samples: None },
    })
}

pub fn compare(a: &CompareArgs) -> Result<String, CliError> {
    let x = load(&a.file_a)?;
    let y = load(&a.file_b)?;
    let sup = sup_distance(&x.s, &x.values, &y.s, &y.values).map_err(|e| validation(e.to_string()))?;
    let lo = x.s[0].max(y.s[0]);
    let hi = x.s.last().unwrap().min(*y.s.last().unwrap());
    let mut out = format!("overlap: {} {}\nsup-distance: {}\n", format_g12(lo), format_g12(hi), format_g12(sup));
    let ks = match (x.step, y.step) {
        (true, false) => Some(step_ks(&x, &y)?),
        (false, true) => Some(step_ks(&y, &x)?),
        (true, true) => match (&x.samples, &y.samples) {
            (Some(p), Some(q)) => Some(ks_two_sample(p, q)?),
            _ => None,
        },
        (false, false) => None,
    };
    if let Some(k) = ks {
        out.push_str(&format!("ks-distance: {}\n", format_g12(k)));
    }
    Ok(out)
}

fn step_ks(step: &Input, table: &Input) -> Result<f64, CliError> {
    let t = DistributionTable::new(table.s.clone(), table.values.clone())?;
    Ok(match &step.samples {
        Some(v) => ks_distance(v, |s| t.interpolate(s))?,
        None => ks_distance_steps(&step.s, &step.values, |s| t.interpolate(s))?,
    })
}
