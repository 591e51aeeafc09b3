use std::f64::consts::PI;

use phantomnet::analysis::{
    self, comm_overhead_hbdrw, comm_overhead_hbdrw_tol, comm_overhead_psspr, comm_overhead_pusbrf,
    comm_overhead_pusbrf_tol, evaluate, failure_path_probability, make_tables, phantom_count_hbdrw,
    phantom_count_psspr, phantom_count_pusbrf, phantom_distance_baseline, phantom_distance_psspr_mc,
    ratio_hbdrw_over_pusbrf, ratio_pusbrf_over_psspr, AnalysisError, AnalysisInput, TABLE_PRESETS,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Composite Simpson on a fixed grid of `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn chord(big_h: f64, h: f64, a: f64) -> f64 {
    (big_h * big_h + h * h - 2.0 * h * big_h * a.cos()).sqrt()
}

fn eq12_oracle(h: f64, big_h: f64) -> f64 {
    h + simpson(|a| chord(big_h, h, a), 0.0, PI, 20_000) / PI
}

fn eq13_oracle(h: f64, big_h: f64) -> f64 {
    let g = ((h - 1.0) / h).acos();
    let a = simpson(|x| chord(big_h, h, x), 0.0, g, 20_000);
    let b = simpson(|x| chord(big_h, h, x), PI, PI + g, 20_000);
    h + (a + b) / (2.0 * g)
}

fn eq16_oracle(r_max: f64, big_h: f64, omega: u32) -> f64 {
    let theta = PI / omega as f64;
    let mut tail = 0.0;
    for i in 1..omega / 2 {
        tail += chord(big_h, r_max, i as f64 * theta);
    }
    r_max + r_max / 2.0 + 2.0 * (big_h - r_max + tail) / omega as f64
}

// Printed values of the phantom-ratio and phantom-count tables, by row.
const TABLE2: [(f64, f64); 6] = [
    (40.97, 33.33),
    (28.71, 20.00),
    (23.38, 14.29),
    (20.22, 11.11),
    (18.07, 14.29),
    (16.48, 14.78),
];
const TABLE4: [(f64, f64, f64); 6] = [
    (12.87, 31.42, 94.24),
    (18.04, 62.83, 282.74),
    (22.03, 94.25, 565.48),
    (25.40, 125.66, 942.48),
    (28.38, 157.08, 942.48),
    (31.07, 188.50, 706.86),
];

#[test]
fn ratio_examples() {
    assert!((ratio_hbdrw_over_pusbrf(5.0) - 40.97).abs() < 0.01);
    assert!((ratio_hbdrw_over_pusbrf(20.0) - 20.22).abs() < 0.01);
    assert!(ratio_hbdrw_over_pusbrf(1e12) < 1e-3);
    assert!((ratio_pusbrf_over_psspr(5, 4, 6) - 33.33).abs() < 0.01);
    assert!((ratio_pusbrf_over_psspr(15, 12, 18) - 14.29).abs() < 0.01);
    assert_eq!(ratio_pusbrf_over_psspr(9, 9, 9), 100.0);
}

#[test]
fn table2_matches_printed_values() {
    for (&(h, lo, hi), &(a, b)) in TABLE_PRESETS.iter().zip(TABLE2.iter()) {
        let oracle_a = 100.0 * 2.0 / PI * ((h as f64 - 1.0) / h as f64).acos();
        let oracle_b = 100.0 * h as f64 / (lo..=hi).map(f64::from).sum::<f64>();
        assert!((ratio_hbdrw_over_pusbrf(h as f64) - oracle_a).abs() < 1e-12);
        assert!((ratio_pusbrf_over_psspr(h, lo, hi) - oracle_b).abs() < 1e-12);
        assert!((oracle_a - a).abs() <= 0.01, "h={h}: {oracle_a} vs {a}");
        assert!((oracle_b - b).abs() <= 0.01, "h={h}: {oracle_b} vs {b}");
    }
}

#[test]
fn table4_matches_printed_values() {
    for (&(h, lo, hi), &(nh, np, ns)) in TABLE_PRESETS.iter().zip(TABLE4.iter()) {
        let hf = h as f64;
        let hx = h - lo;
        let oracle_s = 2.0 * PI * hf * (hx..=hi - lo).map(f64::from).sum::<f64>() / hx as f64;
        assert!((phantom_count_hbdrw(hf) - 4.0 * ((hf - 1.0) / hf).acos() * hf).abs() < 1e-9);
        assert!((phantom_count_pusbrf(hf) - 2.0 * PI * hf).abs() < 1e-9);
        assert!((phantom_count_psspr(lo, hi, hx).unwrap() - oracle_s).abs() < 1e-9);
        assert!((phantom_count_hbdrw(hf) - nh).abs() <= 0.01);
        assert!((phantom_count_pusbrf(hf) - np).abs() <= 0.01);
        assert!((oracle_s - ns).abs() <= 0.01, "h={h}: {oracle_s} vs {ns}");
        assert!(oracle_s >= phantom_count_pusbrf(hf) && phantom_count_pusbrf(hf) >= phantom_count_hbdrw(hf));
    }
}

#[test]
fn phantom_count_needs_positive_hx() {
    assert!(phantom_count_psspr(4, 6, 0).is_err());
}

#[test]
fn failure_probability_example() {
    let oracle = ((3.0f64 / 60.0).asin() + (3.0f64 / 15.0).asin()) / PI;
    let p = failure_path_probability(3.0, 60.0, 15.0).unwrap();
    assert!((p - oracle).abs() < 1e-15);
    assert!((p - 0.0800).abs() < 0.0005);
    assert_eq!(failure_path_probability(0.0, 60.0, 15.0).unwrap(), 0.0);
    assert!(matches!(failure_path_probability(16.0, 60.0, 15.0), Err(AnalysisError::Domain(_))));
    assert!(matches!(failure_path_probability(61.0, 60.0, 80.0), Err(AnalysisError::Domain(_))));
}

#[test]
fn baseline_distance_is_r_times_h() {
    assert_eq!(phantom_distance_baseline(1.0, 8, 2), 10.0);
    assert_eq!(phantom_distance_baseline(100.0, 8, 2), 1000.0);
}

#[test]
fn eq12_against_fixed_grid_oracle() {
    let e = comm_overhead_pusbrf(10.0, 60.0).unwrap();
    assert!((e - eq12_oracle(10.0, 60.0)).abs() < 1e-6);
    // The commonly quoted 70.82 for this case is not what the integral gives.
    assert!((e - 70.4174).abs() < 1e-3);
    assert!((comm_overhead_pusbrf(0.0, 60.0).unwrap() - 60.0).abs() < 1e-9);
}

#[test]
fn eq13_and_eq16_against_oracles() {
    for &(h, _, hi) in &TABLE_PRESETS {
        let hf = h as f64;
        assert!((comm_overhead_hbdrw(hf, 60.0).unwrap() - eq13_oracle(hf, 60.0)).abs() < 1e-6);
        assert!((comm_overhead_psspr(hi, 60.0, 6).unwrap() - eq16_oracle(hi as f64, 60.0, 6)).abs() < 1e-9);
    }
}

#[test]
fn psspr_cheaper_than_pusbrf_on_every_row() {
    for &(h, _, hi) in &TABLE_PRESETS {
        let e12 = comm_overhead_pusbrf(h as f64, 60.0).unwrap();
        let e16 = comm_overhead_psspr(hi, 60.0, 6).unwrap();
        assert!(e16 < e12, "h={h}: {e16} vs {e12}");
    }
}

#[test]
fn overhead_lower_bound() {
    for &(h, _, hi) in &TABLE_PRESETS {
        let hf = h as f64;
        for e in [
            comm_overhead_pusbrf(hf, 60.0).unwrap(),
            comm_overhead_hbdrw(hf, 60.0).unwrap(),
            comm_overhead_psspr(hi, 60.0, 6).unwrap(),
        ] {
            assert!(e >= 60.0 - hi as f64);
        }
    }
}

#[test]
fn quadrature_converges_when_tolerance_halves() {
    for &(h, _, _) in &TABLE_PRESETS {
        let hf = h as f64;
        let a = comm_overhead_pusbrf_tol(hf, 60.0, 1e-6).unwrap();
        let b = comm_overhead_pusbrf_tol(hf, 60.0, 5e-7).unwrap();
        assert!((a - b).abs() < 1e-5);
        let a = comm_overhead_hbdrw_tol(hf, 60.0, 1e-6).unwrap();
        let b = comm_overhead_hbdrw_tol(hf, 60.0, 5e-7).unwrap();
        assert!((a - b).abs() < 1e-5);
    }
}

fn mean_radius(lo: f64, hi: f64) -> f64 {
    2.0 / 3.0 * (hi.powi(3) - lo.powi(3)) / (hi * hi - lo * lo)
}

#[test]
fn monte_carlo_distance_matches_area_weighted_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let est = phantom_distance_psspr_mc(8, 12, 1_000_000, &mut rng).unwrap();
    let oracle = mean_radius(8.0, 12.0);
    assert!((est.mean - oracle).abs() / oracle < 0.005, "{} vs {oracle}", est.mean);
    assert!(est.std_error / est.mean < 0.005);
    let est = phantom_distance_psspr_mc(4, 6, 100_000, &mut rng).unwrap();
    assert!(est.mean > 4.0 && est.mean < 6.0);
}

#[test]
fn area_weighted_radius_oracle_by_quadrature() {
    let num = simpson(|r| r * r, 8.0, 12.0, 1000);
    let den = simpson(|r| r, 8.0, 12.0, 1000);
    assert!((num / den - mean_radius(8.0, 12.0)).abs() < 1e-9);
    assert!((mean_radius(8.0, 12.0) - 10.1333).abs() < 1e-4);
}

#[test]
fn tables_presets_and_rows() {
    let t = make_tables().unwrap();
    assert_eq!(t.table2.len(), 6);
    let row = t.table3.iter().find(|r| r.h == 25).unwrap();
    assert_eq!((row.r_min, row.r_max), (22, 28));
    let row = t.table4.iter().find(|r| r.h == 15).unwrap();
    assert!((row.n_hbdrw - 22.03).abs() <= 0.01);
    assert!((row.n_pusbrf - 94.25).abs() <= 0.01);
    assert!((row.n_psspr - 565.48).abs() <= 0.01);
    let row = t.table2.iter().find(|r| r.h == 30).unwrap();
    assert!((row.hbdrw_over_pusbrf - 16.48).abs() <= 0.01);
    assert!((row.pusbrf_over_psspr - 14.78).abs() <= 0.01);
    let csv = t.to_csv();
    assert!(csv.starts_with("table,h,rmin,rmax,col1,col2,col3\n"));
    assert!(csv.contains("282.74"));
    assert_eq!(csv.lines().count(), 1 + 18);
}

#[test]
fn evaluate_validates_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let good = AnalysisInput { r_min: 12, r_max: 18, h: 15, big_h: 60, r0_hops: 3.0, omega: 6 };
    let rep = evaluate(good, &mut rng).unwrap();
    assert!((rep.failure_probability.clone().unwrap() - 0.0800).abs() < 0.0005);
    assert!(rep.overhead_psspr < rep.overhead_pusbrf);
    for bad in [
        AnalysisInput { r_min: 18, ..good },
        AnalysisInput { omega: 5, ..good },
        AnalysisInput { h: 3, ..good },
        AnalysisInput { big_h: 0, ..good },
    ] {
        assert!(matches!(evaluate(bad, &mut rng), Err(AnalysisError::InvalidInput(_))));
    }
}

#[test]
fn quadrature_module_is_exact_on_cubics() {
    let v = analysis::quadrature::integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, 1e-10).unwrap();
    assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
}
