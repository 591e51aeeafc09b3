use std::path::PathBuf;

use phantomnet::harness::experiment::{deploy_for_seed, pick_source};
use phantomnet::harness::{
    emit_csv, load_config, run_experiment, write_csv, AggregateRow, ConfigError, ExperimentConfig,
    ExperimentError, Sweep, CSV_HEADER,
};
use phantomnet::ProtocolKind;

fn small(protocols: &[ProtocolKind], seeds: std::ops::RangeInclusive<u64>) -> ExperimentConfig {
    ExperimentConfig {
        protocols: protocols.to_vec(),
        sweep: Sweep::OverWalk { big_h: 15, hs: vec![5] },
        packets_per_run: 200,
        seeds: seeds.collect(),
        ..ExperimentConfig::default()
    }
}

#[test]
fn empty_config_gives_desk_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.cfg");
    std::fs::write(&path, "").unwrap();
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg, ExperimentConfig::default());
    assert_eq!(cfg.n_nodes, 2000);
    assert_eq!(cfg.field_side, 2700.0);
    assert_eq!(cfg.r, 100.0);
    assert_eq!(cfg.omega, 6);
}

#[test]
fn density_matches_the_reference_field() {
    let cfg = ExperimentConfig::default();
    let desk = cfg.n_nodes as f64 / cfg.field_side.powi(2);
    let reference = 10_000.0 / 6000.0f64.powi(2);
    assert!((desk - reference).abs() / reference < 0.02);
}

#[test]
fn config_errors_are_specific() {
    assert!(matches!(ExperimentConfig::parse("r0 = 50"), Err(ConfigError::Validation(_))));
    assert!(matches!(ExperimentConfig::parse("omega = 5"), Err(ConfigError::Validation(_))));
    assert!(matches!(ExperimentConfig::parse("packets_per_run = 0"), Err(ConfigError::Validation(_))));
    assert!(matches!(ExperimentConfig::parse("seeds ="), Err(ConfigError::Parse { line: 1, .. })));
    assert!(matches!(
        ExperimentConfig::parse("# header\nn_nodes = lots"),
        Err(ConfigError::Parse { line: 2, .. })
    ));
    assert!(matches!(ExperimentConfig::parse("colour = red"), Err(ConfigError::Parse { .. })));
    assert!(matches!(ExperimentConfig::parse("protocols = aodv"), Err(ConfigError::Parse { .. })));
    assert!(matches!(
        load_config(&PathBuf::from("/nonexistent/phantomnet.cfg")),
        Err(ConfigError::Io { .. })
    ));
}

#[test]
fn sweep_forms() {
    let cfg = ExperimentConfig::parse("sweep_h = 5, 10, 15, 20, 25, 30\nfixed_H = 60").unwrap();
    assert_eq!(cfg.sweep.points(), vec![(5, 60), (10, 60), (15, 60), (20, 60), (25, 60), (30, 60)]);
    let cfg = ExperimentConfig::parse("sweep_H = 10, 15, 20, 25\nfixed_h = 15").unwrap();
    assert_eq!(cfg.sweep, Sweep::OverDistance { h: 15, big_hs: vec![10, 15, 20, 25] });
    let cfg = ExperimentConfig::parse("seeds = 3..5, 9\nprotocols = psspr, shortest").unwrap();
    assert_eq!(cfg.seeds, vec![3, 4, 5, 9]);
    assert_eq!(cfg.protocols, vec![ProtocolKind::Psspr, ProtocolKind::ShortestPath]);
    assert!(ExperimentConfig::parse("sweep_h = 5\nsweep_H = 20").is_err());
}

#[test]
fn sources_sit_near_the_target_distance() {
    let cfg = ExperimentConfig::default();
    for seed in 1..=5 {
        let net = deploy_for_seed(&cfg, seed).unwrap();
        let src = pick_source(&net, seed, 20).unwrap();
        assert!((19..=21).contains(&net.hop(src)));
        assert_eq!(src, pick_source(&net, seed, 20).unwrap());
    }
    let net = deploy_for_seed(&cfg, 1).unwrap();
    assert!(matches!(pick_source(&net, 1, 500), Err(ExperimentError::NoSource { .. })));
}

#[test]
fn one_point_three_seeds_is_one_row() {
    let rows = run_experiment(&small(&[ProtocolKind::Psspr], 1..=3)).unwrap();
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!((row.protocol, row.h, row.big_h, row.n_runs), (ProtocolKind::Psspr, 5, 15, 3));
    assert!((0.0..=1.0).contains(&row.capture_rate));
    assert!((0.0..=1.0).contains(&row.failure_path_rate));
}

#[test]
fn shortest_path_is_captured_after_about_h_packets() {
    let cfg = ExperimentConfig { r0: 100.0, ..small(&[ProtocolKind::ShortestPath], 1..=10) };
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows[0].capture_rate, 1.0);
    assert!((rows[0].mean_safety_time - 15.0).abs() <= 2.0, "{}", rows[0].mean_safety_time);
}

#[test]
fn psspr_keeps_phantom_legs_out_of_the_visible_area() {
    // h = 15 gives radii 12..18 hops, so the inner radius is far beyond r0.
    let cfg = ExperimentConfig {
        sweep: Sweep::OverWalk { big_h: 20, hs: vec![15] },
        ..small(&[ProtocolKind::Psspr], 1..=5)
    };
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows[0].failure_path_rate, 0.0);
}

#[test]
fn rows_are_ordered_by_protocol_then_point() {
    let cfg = ExperimentConfig {
        sweep: Sweep::OverWalk { big_h: 15, hs: vec![4, 6] },
        ..small(&[ProtocolKind::Hbdrw, ProtocolKind::Pusbrf], 1..=2)
    };
    let rows = run_experiment(&cfg).unwrap();
    let keys: Vec<(ProtocolKind, u32)> = rows.iter().map(|r| (r.protocol, r.h)).collect();
    assert_eq!(
        keys,
        vec![
            (ProtocolKind::Hbdrw, 4),
            (ProtocolKind::Hbdrw, 6),
            (ProtocolKind::Pusbrf, 4),
            (ProtocolKind::Pusbrf, 6)
        ]
    );
}

#[test]
fn unreachable_targets_abort_the_experiment() {
    let cfg = ExperimentConfig {
        sweep: Sweep::OverWalk { big_h: 400, hs: vec![5] },
        ..small(&[ProtocolKind::Hbdrw], 1..=3)
    };
    assert!(matches!(run_experiment(&cfg), Err(ExperimentError::TooManyFailures { .. })));
}

fn parse_row(line: &str) -> Vec<f64> {
    line.split(',').skip(1).map(|v| v.parse().unwrap()).collect()
}

#[test]
fn csv_round_trips_at_fixed_precision() {
    let rows = vec![
        AggregateRow {
            protocol: ProtocolKind::Psspr,
            h: 10,
            big_h: 60,
            mean_safety_time: 123.456_789_4,
            mean_comm_overhead_hops: 2.0 / 3.0,
            capture_rate: 0.9,
            failure_path_rate: 1e-7,
            n_runs: 30,
        },
        AggregateRow { protocol: ProtocolKind::Hbdrw, h: 5, ..base_row() },
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    emit_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.ends_with('\n'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(
        CSV_HEADER,
        "protocol,h,H,mean_safety_time,mean_comm_overhead_hops,capture_rate,failure_path_rate,n_runs"
    );
    assert!(lines[1].starts_with("PSSPR,10,60,"));
    let v = parse_row(lines[1]);
    let want = [10.0, 60.0, 123.456_789_4, 2.0 / 3.0, 0.9, 1e-7, 30.0];
    for (a, b) in v.iter().zip(want) {
        assert!((a - b).abs() <= 1e-6);
    }
    assert!(matches!(write_csv(&[], Vec::new()), Err(ExperimentError::NoRows)));
}

fn base_row() -> AggregateRow {
    AggregateRow {
        protocol: ProtocolKind::ShortestPath,
        h: 1,
        big_h: 20,
        mean_safety_time: 19.0,
        mean_comm_overhead_hops: 20.0,
        capture_rate: 1.0,
        failure_path_rate: 0.0,
        n_runs: 30,
    }
}

#[test]
fn experiment_output_is_reproducible() {
    let cfg = small(&[ProtocolKind::Psspr, ProtocolKind::Hbdrw], 1..=4);
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_csv(&run_experiment(&cfg).unwrap(), &mut a).unwrap();
    write_csv(&run_experiment(&cfg).unwrap(), &mut b).unwrap();
    assert_eq!(a, b);
}
