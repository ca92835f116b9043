use kpz_lab::polymer::{
    endpoint_law, endpoint_law_enumerate, intermediate_disorder_sample, last_passage, last_passage_enumerate, log_binomial,
    martingale_w, martingale_w_field, partition_enumerate, partition_transfer, DisorderField, WeightDistribution,
    ENUMERATION_MAX_N,
};
use proptest::prelude::*;

const NORMAL: WeightDistribution = WeightDistribution::StandardNormal;

fn binomial(n: usize, k: usize) -> f64 {
    log_binomial(n, k).exp()
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn disorder_field_reproducible_and_centered() {
    assert_eq!(DisorderField::new(30, NORMAL, 5), DisorderField::new(30, NORMAL, 5));
    assert_ne!(DisorderField::replica(30, NORMAL, 5, 0), DisorderField::replica(30, NORMAL, 5, 1));
    for dist in [NORMAL, WeightDistribution::CenteredExponential] {
        let f = DisorderField::new(140, dist, 2);
        let w: Vec<f64> = f.levels.iter().flatten().copied().collect();
        assert!(w.len() >= 10_000);
        let (mean, se) = mean_and_se(&w);
        assert!(mean.abs() < 4.0 * se, "{dist:?}: mean {mean}");
    }
}

#[test]
fn parity_lattice_enforced() {
    let f = DisorderField::new(6, NORMAL, 1);
    assert!(f.weight(3, 1).is_ok());
    assert!(f.weight(3, 0).is_err());
    assert!(f.weight(3, 5).is_err());
    let z = partition_transfer(&f, 6, 0.5).unwrap();
    assert!(z.log_value(1).is_err());
    assert!(z.log_value(8).is_err());
    assert!(partition_enumerate(&f, 6, 3, 0.5).is_err());
    assert!(DisorderField::from_levels(vec![vec![0.0], vec![0.0]]).is_err());
}

#[test]
fn small_path_counts() {
    let f = DisorderField::new(2, NORMAL, 3);
    assert_eq!(partition_enumerate(&f, 2, 0, 0.0).unwrap(), 2.0);
    assert!((partition_transfer(&f, 2, 0.0).unwrap().log_value(0).unwrap().exp() - 0.5).abs() < 1e-15);
    let beta = 0.7;
    let single = (beta * (f.weight(0, 0).unwrap() + f.weight(1, 1).unwrap())).exp();
    assert!((partition_enumerate(&f, 1, 1, beta).unwrap() - single).abs() < 1e-14 * single);
    assert!(partition_enumerate(&DisorderField::new(23, NORMAL, 1), ENUMERATION_MAX_N + 1, 1, 0.1).is_err());
}

#[test]
fn noiseless_transfer_is_binomial() {
    let f = DisorderField::new(30, NORMAL, 1);
    let z = partition_transfer(&f, 30, 0.0).unwrap();
    for k in 0..=30usize {
        let y = 2 * k as i64 - 30;
        let exact = binomial(30, k) / 2f64.powi(30);
        assert!((z.log_value(y).unwrap().exp() - exact).abs() < 1e-12 * exact);
    }
}

#[test]
fn transfer_matches_enumeration() {
    for r in 0..20u64 {
        let n = 8 + (r as usize % 9);
        let f = DisorderField::replica(n, NORMAL, 40, r);
        for beta in [0.0, 0.5, 2.0] {
            let z = partition_transfer(&f, n, beta).unwrap();
            for y in (-(n as i64)..=n as i64).step_by(2) {
                let e = partition_enumerate(&f, n, y, beta).unwrap();
                assert!((z.log_z(y).unwrap().exp() - e).abs() <= 1e-12 * e);
            }
        }
    }
    let f = DisorderField::new(12, WeightDistribution::CenteredExponential, 9);
    let z = partition_transfer(&f, 12, 0.8).unwrap();
    let e = partition_enumerate(&f, 12, 2, 0.8).unwrap();
    assert!((z.log_z(2).unwrap().exp() - e).abs() <= 1e-12 * e);
}

/// Number of SSRW paths from (0,0) through (i,z) to (n,y), times 2^{−n}.
fn through_weight(n: usize, y: i64, i: usize, z: i64) -> f64 {
    let (a, b) = (i as i64, (n - i) as i64);
    if (a + z) % 2 != 0 || z.abs() > a || (y - z).abs() > b {
        return 0.0;
    }
    binomial(i, ((a + z) / 2) as usize) * binomial(n - i, ((b + y - z) / 2) as usize) / 2f64.powi(n as i32)
}

#[test]
fn first_order_chaos_expansion() {
    let (n, y) = (16usize, 2i64);
    let f = DisorderField::new(n, NORMAL, 13);
    let remainder = |beta: f64| {
        let z = partition_transfer(&f, n, beta).unwrap().log_value(y).unwrap().exp();
        let mut linear = through_weight(n, y, 0, 0);
        for i in 0..=n {
            for z in (-(i as i64)..=i as i64).step_by(2) {
                let wt = (beta * f.weight(i, z).unwrap()).exp_m1();
                linear += through_weight(n, y, i, z) * wt;
            }
        }
        (z - linear).abs()
    };
    let (r2, r3) = (remainder(1e-2), remainder(1e-3));
    let slope = (r2 / r3).log10();
    assert!((slope - 2.0).abs() < 0.2, "remainder exponent {slope}");
    assert!(r3 <= 10.0 * 1e-6, "C·β² bound violated: {r3:e}");
}

#[test]
fn endpoint_law_properties() {
    let n = 14;
    let f = DisorderField::new(n, NORMAL, 6);
    for (y, m) in [(0i64, 7usize), (4, 3), (-2, 10)] {
        let law = endpoint_law(&f, n, y, m, 1.2).unwrap();
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{y} {m} {law:?}");
        let direct = endpoint_law_enumerate(&f, n, y, m, 1.2).unwrap();
        assert!(law.iter().zip(&direct).all(|(a, b)| (a - b).abs() < 1e-10));
        let free = endpoint_law(&f, n, y, m, 0.0).unwrap();
        let total = binomial(n, ((n as i64 + y) / 2) as usize);
        for (k, &p) in free.iter().enumerate() {
            let x = 2 * k as i64 - m as i64;
            let exact = through_weight(n, y, m, x) * 2f64.powi(n as i32) / total;
            assert!((p - exact).abs() < 1e-12);
        }
    }
    let ends = endpoint_law(&f, n, 4, n, 1.0).unwrap();
    assert!((ends[(n + 4) / 2] - 1.0).abs() < 1e-12);
    assert!((endpoint_law(&f, n, 4, 0, 1.0).unwrap()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn last_passage_oracles() {
    let zero = DisorderField::new(10, WeightDistribution::PointMassZero, 1);
    assert_eq!(last_passage(&zero, 10, 2).unwrap(), 0.0);
    let f = DisorderField::new(14, NORMAL, 8);
    for y in [-14i64, -4, 0, 6, 14] {
        assert_eq!(last_passage(&f, 14, y).unwrap(), last_passage_enumerate(&f, 14, y).unwrap());
    }
    let beta = 50.0;
    let free = partition_transfer(&f, 14, beta).unwrap().log_z(0).unwrap() / beta;
    let lpp = last_passage(&f, 14, 0).unwrap();
    assert!(free >= lpp - 1e-12 && free - lpp <= 14.0 * 2f64.ln() / beta);
}

#[test]
fn intermediate_disorder() {
    let s = intermediate_disorder_sample(0.0, 0.25, 1.0, 0.0, NORMAL, false, 1, 0).unwrap();
    assert_eq!(s.n, 256);
    assert!((s.value - s.mean).abs() < 1e-12 * s.mean);
    let exact = binomial(256, 128) / 2f64.powi(256);
    assert!((s.value - exact).abs() < 1e-12 * exact);

    let ratios = |alpha: f64| -> Vec<f64> {
        (0..500u64)
            .map(|r| {
                let s = intermediate_disorder_sample(alpha, 0.25, 1.0, 0.0, NORMAL, true, 77, r).unwrap();
                s.value / s.mean
            })
            .collect()
    };
    let (one, two) = (ratios(1.0), ratios(2.0));
    let (m1, se1) = mean_and_se(&one);
    assert!((m1 - 1.0).abs() < 3.0 * se1, "mean {m1} se {se1}");
    let var = |v: &[f64]| mean_and_se(v).1.powi(2) * v.len() as f64;
    assert!(var(&two) > var(&one));
    assert!(intermediate_disorder_sample(1.0, 0.01, 1.0, 0.0, NORMAL, true, 1, 0).is_err());
}

#[test]
fn martingale() {
    assert_eq!(martingale_w(NORMAL, 40, 0.0, 1, 0).unwrap(), 1.0);
    let w: Vec<f64> = (0..1000u64).map(|r| martingale_w(NORMAL, 50, 0.3, 5, r).unwrap()).collect();
    assert!(w.iter().all(|&x| x > 0.0));
    let (m, se) = mean_and_se(&w);
    assert!((m - 1.0).abs() < 3.0 * se);
    let f = DisorderField::replica(50, NORMAL, 5, 3);
    assert!((martingale_w_field(&f, 50, 0.3).unwrap() - w[3]).abs() < 1e-12 * w[3]);
    assert!(martingale_w(WeightDistribution::CenteredExponential, 10, 1.5, 1, 0).is_err());
}

#[test]
fn long_polymer_stays_in_log_domain() {
    let n = 10_000;
    let f = DisorderField::new(n, NORMAL, 4);
    let z = partition_transfer(&f, n, 1.0).unwrap();
    assert!(z.log_values.iter().all(|v| v.is_finite()));
    // log W_n = log Z̃ − (n+1)·β²/2 is far below the f64 range where W_n itself underflows.
    assert!(z.log_total() - (n + 1) as f64 * 0.5 < -745.0);
    // Linear-domain recursion over the first 100 levels as an independent check.
    let m = 100;
    let mut lin = vec![f.weight(0, 0).unwrap().exp()];
    for i in 1..=m {
        lin = (0..=i)
            .map(|k| {
                let left = if k > 0 { lin[k - 1] } else { 0.0 };
                let right = if k < i { lin[k] } else { 0.0 };
                0.5 * (left + right) * f.levels[i][k].exp()
            })
            .collect();
    }
    let head = partition_transfer(&f, m, 1.0).unwrap();
    for (k, &v) in lin.iter().enumerate() {
        let y = 2 * k as i64 - m as i64;
        assert!((head.log_value(y).unwrap() - v.ln()).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn transfer_enumeration_property(seed in 0u64..10_000, n in 1usize..13, beta in 0.0f64..3.0) {
        let f = DisorderField::new(n, NORMAL, seed);
        let z = partition_transfer(&f, n, beta).unwrap();
        let y = if n % 2 == 0 { 0 } else { 1 };
        let e = partition_enumerate(&f, n, y, beta).unwrap();
        prop_assert!((z.log_z(y).unwrap().exp() - e).abs() <= 1e-12 * e);
    }
}
