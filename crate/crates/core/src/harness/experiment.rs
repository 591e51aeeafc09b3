//! Seed sweeps over protocols and `(h, H)` points.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::adversary::{run_session, RunMetrics};
use crate::analysis::tables::sector_radii_for;
use crate::harness::config::ExperimentConfig;
use crate::network::{Network, NetworkError, NodeId};
use crate::protocol::{Protocol, ProtocolKind};
use crate::routing::baselines::BaselineParams;
use crate::routing::psspr::SectorParams;
use crate::routing::RoutingError;
use crate::trace::RouteTrace;

/// Environment variable capping the worker threads of a sweep.
pub const THREADS_ENV: &str = "PHANTOMNET_THREADS";

/// Largest tolerated fraction of failed runs.
pub const MAX_FAILED_FRACTION: f64 = 0.10;

pub const CSV_HEADER: &str =
    "protocol,h,H,mean_safety_time,mean_comm_overhead_hops,capture_rate,failure_path_rate,n_runs";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error("no node with hop count in [{lo}, {hi}]")]
    NoSource { lo: u32, hi: u32 },
    #[error("{failed} of {total} runs failed; first failure: {first}")]
    TooManyFailures { failed: usize, total: usize, first: String },
    #[error("nothing to write")]
    NoRows,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub protocol: ProtocolKind,
    pub h: u32,
    pub big_h: u32,
    pub mean_safety_time: f64,
    pub mean_comm_overhead_hops: f64,
    pub capture_rate: f64,
    pub failure_path_rate: f64,
    pub n_runs: usize,
}

/// Builds the protocol for walk length `h`.
pub fn protocol_for(kind: ProtocolKind, h: u32, omega: u32) -> Result<Protocol, RoutingError> {
    Ok(match kind {
        ProtocolKind::Psspr => {
            let (lo, hi) = sector_radii_for(h);
            Protocol::Psspr(SectorParams::new(lo, hi, omega)?)
        }
        ProtocolKind::Hbdrw => Protocol::Hbdrw(BaselineParams::new(h)?),
        ProtocolKind::Pusbrf => Protocol::Pusbrf(BaselineParams::new(h)?),
        ProtocolKind::ShortestPath => Protocol::ShortestPath,
    })
}

/// Independent stream seed for a tuple of identifiers (splitmix64 fold).
pub fn stream_seed(parts: &[u64]) -> u64 {
    let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        x ^= p.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(x << 6).wrapping_add(x >> 2);
        let mut z = x;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        x = z ^ (z >> 31);
    }
    x
}

pub fn deploy_for_seed(cfg: &ExperimentConfig, seed: u64) -> Result<Network, NetworkError> {
    Network::deploy(cfg.n_nodes, cfg.field_side, cfg.r, cfg.r0, seed)
}

/// Source for target hop distance `big_h`: uniform among nodes with hop
/// count in `[H−1, H+1]`, drawn from a stream that depends only on
/// `(seed, H)` so every protocol and walk length shares it.
pub fn pick_source(net: &Network, seed: u64, big_h: u32) -> Result<NodeId, ExperimentError> {
    let (lo, hi) = (big_h.saturating_sub(1).max(1), big_h + 1);
    let candidates = net.nodes_with_hop_in(lo, hi);
    if candidates.is_empty() {
        return Err(ExperimentError::NoSource { lo, hi });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(&[seed, 0x5eed, big_h as u64]));
    Ok(candidates[rng.gen_range(0..candidates.len())])
}

fn kind_tag(kind: ProtocolKind) -> u64 {
    kind as u64 + 1
}

fn session_rng(seed: u64, kind: ProtocolKind, h: u32, big_h: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(&[seed, kind_tag(kind), h as u64, big_h as u64]))
}

/// Metrics of one (protocol, point, seed) run.
pub fn run_one(
    cfg: &ExperimentConfig,
    net: &Network,
    seed: u64,
    kind: ProtocolKind,
    h: u32,
    big_h: u32,
) -> Result<RunMetrics, ExperimentError> {
    let source = pick_source(net, seed, big_h)?;
    let router = protocol_for(kind, h, cfg.omega)?.prepare(net, source)?;
    let mut rng = session_rng(seed, kind, h, big_h);
    Ok(run_session(net, &router, source, cfg.packets_per_run, &mut rng)?)
}

fn thread_pool() -> Result<rayon::ThreadPool, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            builder = builder.num_threads(n);
        }
    }
    builder.build().map_err(|e| ExperimentError::ThreadPool(e.to_string()))
}

/// Runs every (protocol, sweep point, seed) combination and aggregates per
/// (protocol, sweep point). Networks are regenerated per seed. Output order
/// is config order and independent of thread scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<AggregateRow>, ExperimentError> {
    let points = cfg.sweep.points();
    let per_seed: Vec<Vec<Result<RunMetrics, String>>> = thread_pool()?.install(|| {
        cfg.seeds
            .par_iter()
            .map(|&seed| {
                let net = match deploy_for_seed(cfg, seed) {
                    Ok(net) => net,
                    Err(e) => return vec![Err(e.to_string()); cfg.protocols.len() * points.len()],
                };
                let mut out = Vec::with_capacity(cfg.protocols.len() * points.len());
                for &kind in &cfg.protocols {
                    for &(h, big_h) in &points {
                        out.push(run_one(cfg, &net, seed, kind, h, big_h).map_err(|e| e.to_string()));
                    }
                }
                out
            })
            .collect()
    });

    let total = per_seed.iter().map(Vec::len).sum::<usize>();
    let failures: Vec<&String> = per_seed.iter().flatten().filter_map(|r| r.as_ref().err()).collect();
    if failures.len() as f64 > MAX_FAILED_FRACTION * total as f64 {
        return Err(ExperimentError::TooManyFailures {
            failed: failures.len(),
            total,
            first: failures[0].clone(),
        });
    }

    let mut rows = Vec::new();
    for (pi, &kind) in cfg.protocols.iter().enumerate() {
        for (qi, &(h, big_h)) in points.iter().enumerate() {
            let idx = pi * points.len() + qi;
            let runs: Vec<&RunMetrics> = per_seed.iter().filter_map(|s| s[idx].as_ref().ok()).collect();
            rows.push(aggregate(kind, h, big_h, &runs));
        }
    }
    Ok(rows)
}

fn aggregate(protocol: ProtocolKind, h: u32, big_h: u32, runs: &[&RunMetrics]) -> AggregateRow {
    let n = runs.len();
    let mean = |f: &dyn Fn(&RunMetrics) -> f64| {
        if n == 0 {
            0.0
        } else {
            runs.iter().map(|m| f(m)).sum::<f64>() / n as f64
        }
    };
    let packets: u64 = runs.iter().map(|m| m.safety_time as u64).sum();
    let failures: u64 = runs.iter().map(|m| m.failure_paths as u64).sum();
    AggregateRow {
        protocol,
        h,
        big_h,
        mean_safety_time: mean(&|m| m.safety_time as f64),
        mean_comm_overhead_hops: mean(&|m| m.mean_hops_per_packet()),
        capture_rate: mean(&|m| f64::from(u8::from(m.captured))),
        failure_path_rate: if packets == 0 { 0.0 } else { failures as f64 / packets as f64 },
        n_runs: n,
    }
}

pub fn write_csv<W: Write>(rows: &[AggregateRow], mut out: W) -> Result<(), ExperimentError> {
    if rows.is_empty() {
        return Err(ExperimentError::NoRows);
    }
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{}",
            r.protocol, r.h, r.big_h, r.mean_safety_time, r.mean_comm_overhead_hops, r.capture_rate, r.failure_path_rate, r.n_runs
        )?;
    }
    Ok(())
}

pub fn emit_csv(rows: &[AggregateRow], path: &Path) -> Result<(), ExperimentError> {
    if rows.is_empty() {
        return Err(ExperimentError::NoRows);
    }
    let mut out = BufWriter::new(File::create(path)?);
    write_csv(rows, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Deploys the seed's network and routes a single packet, for debugging.
pub fn sample_trace(
    cfg: &ExperimentConfig,
    kind: ProtocolKind,
    seed: u64,
    h: u32,
    big_h: u32,
) -> Result<(Network, NodeId, RouteTrace), ExperimentError> {
    let net = deploy_for_seed(cfg, seed)?;
    let source = pick_source(&net, seed, big_h)?;
    let router = protocol_for(kind, h, cfg.omega)?.prepare(&net, source)?;
    let mut rng = session_rng(seed, kind, h, big_h);
    let trace = router.route(&net, &mut rng)?;
    Ok((net, source, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(p: ProtocolKind) -> AggregateRow {
        AggregateRow {
            protocol: p,
            h: 5,
            big_h: 20,
            mean_safety_time: 12.5,
            mean_comm_overhead_hops: 31.0 / 3.0,
            capture_rate: 1.0,
            failure_path_rate: 0.0,
            n_runs: 3,
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&[row(ProtocolKind::Psspr), row(ProtocolKind::Hbdrw)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "PSSPR,5,20,12.500000,10.333333,1.000000,0.000000,3");
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn empty_rows_rejected() {
        assert!(matches!(write_csv(&[], Vec::new()), Err(ExperimentError::NoRows)));
    }

    #[test]
    fn stream_seeds_differ() {
        assert_ne!(stream_seed(&[1, 2]), stream_seed(&[2, 1]));
        assert_eq!(stream_seed(&[7, 3]), stream_seed(&[7, 3]));
    }
}
