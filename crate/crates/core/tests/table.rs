use kpz_lab::table::{
    format_g12, ks_distance, ks_distance_steps, ks_two_sample, parse_csv, samples_csv, sup_distance, uniform_grid, CsvData,
    DistributionTable, FORMAT_LINE,
};
use proptest::prelude::*;

#[test]
fn grid_construction() {
    let g = uniform_grid(-3.0, 3.0, 1.0).unwrap();
    assert_eq!(g, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    assert_eq!(uniform_grid(-8.0, 6.0, 0.01).unwrap().len(), 1401);
    assert_eq!(uniform_grid(1.0, 1.0, 0.5).unwrap(), vec![1.0]);
    assert!(uniform_grid(0.0, 1.0, 0.0).is_err());
    assert!(uniform_grid(1.0, 0.0, 0.1).is_err());
    assert!(uniform_grid(0.0, 1e9, 1e-3).is_err());
}

#[test]
fn table_invariants() {
    assert!(DistributionTable::new(vec![0.0, 1.0], vec![0.2, 0.8]).is_ok());
    assert!(DistributionTable::new(vec![0.0, 1.0], vec![0.8, 0.2]).is_err());
    assert!(DistributionTable::new(vec![1.0, 0.0], vec![0.2, 0.8]).is_err());
    assert!(DistributionTable::new(vec![0.0, 1.0], vec![0.2, 1.1]).is_err());
    assert!(DistributionTable::new(vec![0.0], vec![]).is_err());
    assert!(DistributionTable::new(vec![0.0, f64::NAN], vec![0.1, 0.2]).is_err());
    let t = DistributionTable::new(vec![0.0, 2.0], vec![0.2, 0.6]).unwrap();
    assert_eq!(t.interpolate(1.0), 0.4);
    assert_eq!(t.interpolate(-5.0), 0.2);
    assert_eq!(t.interpolate(5.0), 0.6);
    assert_eq!(t.range(), (0.0, 2.0));
}

#[test]
fn g12_formatting() {
    assert_eq!(format_g12(0.5), "0.5");
    assert_eq!(format_g12(-3.0), "-3");
    assert_eq!(format_g12(1.0 / 3.0), "0.333333333333");
    assert_eq!(format_g12(1.5e-9), "1.5e-9");
    assert_eq!(format_g12(0.0), "0");
    assert_eq!(format_g12(-1e-20 * 0.0), "0");
}

#[test]
fn ecdf_is_right_continuous_counting() {
    let t = DistributionTable::ecdf(&[3.0, 1.0, 2.0, 2.0]).unwrap();
    assert_eq!(t.s_grid(), &[1.0, 2.0, 3.0]);
    assert_eq!(t.values(), &[0.25, 0.75, 1.0]);
    assert!(DistributionTable::ecdf(&[]).is_err());
    assert!(DistributionTable::ecdf(&[f64::INFINITY]).is_err());
}

#[test]
fn ks_distances() {
    let uniform = |x: f64| x.clamp(0.0, 1.0);
    let samples = [0.1, 0.4, 0.7];
    let d = ks_distance(&samples, uniform).unwrap();
    // Brute-force sup over both sides of every jump.
    let mut brute: f64 = 0.0;
    for (k, &x) in samples.iter().enumerate() {
        brute = brute.max((uniform(x) - k as f64 / 3.0).abs()).max(((k + 1) as f64 / 3.0 - uniform(x)).abs());
    }
    assert!((d - brute).abs() < 1e-15);
    let t = DistributionTable::ecdf(&samples).unwrap();
    assert!((ks_distance_steps(t.s_grid(), t.values(), uniform).unwrap() - d).abs() < 1e-15);
    assert_eq!(ks_two_sample(&samples, &samples).unwrap(), 0.0);
    assert_eq!(ks_two_sample(&[0.0, 1.0], &[2.0, 3.0]).unwrap(), 1.0);
    assert!(ks_distance(&[], uniform).is_err());
}

#[test]
fn sup_distance_on_overlap() {
    let sa: Vec<f64> = uniform_grid(0.0, 1.0, 0.5).unwrap();
    let va: Vec<f64> = sa.iter().map(|s| s * 0.5).collect();
    let sb: Vec<f64> = uniform_grid(0.0, 2.0, 0.1).unwrap();
    let vb: Vec<f64> = sb.iter().map(|s| s * 0.5 + 0.01).collect();
    let d = sup_distance(&sa, &va, &sb, &vb).unwrap();
    assert!((d - 0.01).abs() < 1e-12);
    assert_eq!(sup_distance(&sa, &va, &sa, &va).unwrap(), 0.0);
    assert!(sup_distance(&[0.0, 1.0], &[0.0, 1.0], &[2.0, 3.0], &[0.0, 1.0]).is_err());
}

#[test]
fn csv_round_trip() {
    let t = DistributionTable::new(vec![-1.0, 0.0, 1.0], vec![0.1, 0.5, 0.9]).unwrap();
    let text = t.to_csv();
    assert!(text.starts_with(FORMAT_LINE));
    assert!(text.contains("\ns,value\n0,0.5\n") || text.contains("\n0,0.5\n"));
    match parse_csv(&text).unwrap() {
        CsvData::Table { header, s, values } => {
            assert_eq!(header, "s,value");
            assert_eq!(s, t.s_grid());
            assert_eq!(values, t.values());
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(parse_csv(&samples_csv(&[2.0, -4.5])).unwrap(), CsvData::Samples(vec![2.0, -4.5]));
    assert!(parse_csv("s,value\n0,1\n").is_err());
    assert!(parse_csv(&format!("{FORMAT_LINE}\nfoo,bar\n")).is_err());
    assert!(parse_csv(&format!("{FORMAT_LINE}\ns,value\n0;1\n")).is_err());
}

proptest! {
    #[test]
    fn g12_round_trip_keeps_twelve_digits(x in -1e12f64..1e12, e in -30i32..30) {
        let v = x * 10f64.powi(e);
        let back: f64 = format_g12(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-12 * v.abs());
    }
}
