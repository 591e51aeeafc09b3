//! Closed-form security and overhead measures, plus the tables built from them.
//!
//! Distances are in hops (`r = 1`) unless a function takes `r` explicitly.

pub mod quadrature;
pub mod tables;

use std::f64::consts::PI;

use rand::Rng;
use thiserror::Error;

pub use tables::{make_tables, Table2Row, Table3Row, Table4Row, Tables, TABLE_PRESETS};

/// Absolute tolerance of every overhead integral.
pub const QUAD_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Half-angle `γ = arccos((h−1)/h)` of the directed random walk's arc.
pub fn walk_half_angle(h: f64) -> f64 {
    ((h - 1.0) / h).clamp(-1.0, 1.0).acos()
}

/// Random directed paths of HBDRW as a percentage of PUSBRF's.
pub fn ratio_hbdrw_over_pusbrf(h: f64) -> f64 {
    100.0 * 2.0 * walk_half_angle(h) / PI
}

/// Random directed paths of PUSBRF as a percentage of PSSPR's:
/// `h / (r_min + (r_min+1) + … + r_max)`.
pub fn ratio_pusbrf_over_psspr(h: u32, r_min: u32, r_max: u32) -> f64 {
    let total: u32 = (r_min..=r_max).sum();
    100.0 * h as f64 / total as f64
}

/// Probability that a phantom-to-sink path crosses the visible area:
/// `(asin(r0/H) + asin(r0/h)) / π`.
pub fn failure_path_probability(r0: f64, big_h: f64, h: f64) -> Result<f64, AnalysisError> {
    if !(r0 >= 0.0) {
        return Err(AnalysisError::Domain(format!("r0 = {r0} must be non-negative")));
    }
    if r0 > big_h || r0 > h {
        return Err(AnalysisError::Domain(format!(
            "visible radius {r0} exceeds H = {big_h} or h = {h}"
        )));
    }
    Ok(((r0 / big_h).asin() + (r0 / h).asin()) / PI)
}

/// Phantom nodes of HBDRW: arc `4γ` of radius `h`.
pub fn phantom_count_hbdrw(h: f64) -> f64 {
    4.0 * walk_half_angle(h) * h
}

/// Phantom nodes of PUSBRF: full circle of radius `h`.
pub fn phantom_count_pusbrf(h: f64) -> f64 {
    2.0 * PI * h
}

/// Phantom nodes of PSSPR with `h = r_min + hx`:
/// `2πh · (hx + (hx+1) + … + (r_max−r_min)) / hx`.
pub fn phantom_count_psspr(r_min: u32, r_max: u32, hx: u32) -> Result<f64, AnalysisError> {
    if hx == 0 {
        return Err(AnalysisError::InvalidInput("hx must be at least 1".into()));
    }
    let width = r_max.saturating_sub(r_min);
    let sum: u32 = (hx..=width).sum();
    let h = (r_min + hx) as f64;
    Ok(2.0 * PI * h * sum as f64 / hx as f64)
}

/// Mean phantom distance of HBDRW and PUSBRF, `r·(r_min + hx)`.
pub fn phantom_distance_baseline(r: f64, r_min: u32, hx: u32) -> f64 {
    r * (r_min + hx) as f64
}

/// The PSSPR phantom-distance expression taken literally:
/// `(r_min+r_max)/4 + ∫₀^{π/2} √(H² + s² − 2sH·cos α) / (π/4) dα`, `s = r_min + r_max`.
pub fn phantom_distance_psspr_printed(r_min: u32, r_max: u32, big_h: f64) -> Result<f64, AnalysisError> {
    let s = (r_min + r_max) as f64;
    let integral = quadrature::integrate(
        |a| (big_h * big_h + s * s - 2.0 * s * big_h * a.cos()).max(0.0).sqrt(),
        0.0,
        PI / 2.0,
        QUAD_TOL,
    )?;
    Ok(s / 4.0 + integral / (PI / 4.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Batch-means standard error of `mean`.
    pub std_error: f64,
    pub samples: usize,
}

const MC_BATCHES: usize = 100;

/// Mean distance (hops) from the source of points drawn uniformly over the
/// half annulus `[r_min, r_max]` facing the sink, by rejection sampling from
/// its bounding box.
pub fn phantom_distance_psspr_mc<R: Rng + ?Sized>(
    r_min: u32,
    r_max: u32,
    samples: usize,
    rng: &mut R,
) -> Result<MonteCarloEstimate, AnalysisError> {
    if r_min >= r_max {
        return Err(AnalysisError::InvalidInput("need r_min < r_max".into()));
    }
    if samples < MC_BATCHES {
        return Err(AnalysisError::InvalidInput(format!("need at least {MC_BATCHES} samples")));
    }
    let (lo, hi) = (r_min as f64, r_max as f64);
    let per_batch = samples / MC_BATCHES;
    let mut batch_means = Vec::with_capacity(MC_BATCHES);
    for _ in 0..MC_BATCHES {
        let mut acc = 0.0;
        let mut n = 0;
        while n < per_batch {
            // x toward the sink (≥ 0), y lateral.
            let x = rng.gen_range(0.0..hi);
            let y = rng.gen_range(-hi..hi);
            let d = x.hypot(y);
            if (lo..=hi).contains(&d) {
                acc += d;
                n += 1;
            }
        }
        batch_means.push(acc / per_batch as f64);
    }
    let k = batch_means.len() as f64;
    let mean = batch_means.iter().sum::<f64>() / k;
    let var = batch_means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / k).sqrt(),
        samples: per_batch * MC_BATCHES,
    })
}

fn chord(big_h: f64, h: f64, alpha: f64) -> f64 {
    (big_h * big_h + h * h - 2.0 * h * big_h * alpha.cos()).max(0.0).sqrt()
}

/// PUSBRF overhead: `h + (1/π)∫₀^π √(H² + h² − 2hH cos α) dα`, `h = r_min + hx`.
pub fn comm_overhead_pusbrf(h: f64, big_h: f64) -> Result<f64, AnalysisError> {
    comm_overhead_pusbrf_tol(h, big_h, QUAD_TOL)
}

pub fn comm_overhead_pusbrf_tol(h: f64, big_h: f64, tol: f64) -> Result<f64, AnalysisError> {
    let integral = quadrature::integrate(|a| chord(big_h, h, a), 0.0, PI, tol)?;
    Ok(h + integral / PI)
}

/// HBDRW overhead: `h` plus the mean chord over `[0, γ]` and `[π, π+γ]`,
/// each weighted `1/(2γ)`.
pub fn comm_overhead_hbdrw(h: f64, big_h: f64) -> Result<f64, AnalysisError> {
    comm_overhead_hbdrw_tol(h, big_h, QUAD_TOL)
}

pub fn comm_overhead_hbdrw_tol(h: f64, big_h: f64, tol: f64) -> Result<f64, AnalysisError> {
    if h <= 0.0 {
        return Err(AnalysisError::InvalidInput("h must be positive".into()));
    }
    let gamma = walk_half_angle(h);
    let toward = quadrature::integrate(|a| chord(big_h, h, a), 0.0, gamma, tol)?;
    let away = quadrature::integrate(|a| chord(big_h, h, a), PI, PI + gamma, tol)?;
    Ok(h + (toward + away) / (2.0 * gamma))
}

/// Mean same-hop length with β uniform on `[0°, 180°]`: `r_max / 2`.
pub fn mean_same_hop(r_max: u32) -> f64 {
    r_max as f64 / 2.0
}

/// PSSPR overhead: `r_max + h̄_m + (2/ω)[H − r_max + Σ_{i=1}^{ω/2−1} √(H² + r_max² − 2 r_max H cos(iθ))]`.
pub fn comm_overhead_psspr(r_max: u32, big_h: f64, omega: u32) -> Result<f64, AnalysisError> {
    if omega < 2 || omega % 2 != 0 {
        return Err(AnalysisError::InvalidInput(format!("omega = {omega} must be even and ≥ 2")));
    }
    let rm = r_max as f64;
    let theta = PI / omega as f64;
    let tail: f64 = (1..omega / 2).map(|i| chord(big_h, rm, i as f64 * theta)).sum();
    Ok(rm + mean_same_hop(r_max) + 2.0 * (big_h - rm + tail) / omega as f64)
}

/// Parameters of one analytic evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisInput {
    pub r_min: u32,
    pub r_max: u32,
    pub h: u32,
    pub big_h: u32,
    /// Visible radius in hops.
    pub r0_hops: f64,
    pub omega: u32,
}

impl AnalysisInput {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |m: String| Err(AnalysisError::InvalidInput(m));
        if self.r_min == 0 || self.r_min >= self.r_max {
            return bad(format!("need 0 < rmin < rmax, got {} and {}", self.r_min, self.r_max));
        }
        if self.h < self.r_min {
            return bad(format!("h = {} below rmin = {}", self.h, self.r_min));
        }
        if self.big_h == 0 {
            return bad("H must be positive".into());
        }
        if !(self.r0_hops > 0.0) {
            return bad("r0 must be positive".into());
        }
        if self.omega < 2 || self.omega % 2 != 0 {
            return bad(format!("omega = {} must be even and ≥ 2", self.omega));
        }
        Ok(())
    }

    pub fn hx(&self) -> u32 {
        self.h - self.r_min
    }
}

/// Every closed-form measure for one parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport {
    pub input: AnalysisInput,
    pub ratio_hbdrw_over_pusbrf: f64,
    pub ratio_pusbrf_over_psspr: f64,
    pub failure_probability: Result<f64, AnalysisError>,
    pub n_hbdrw: f64,
    pub n_pusbrf: f64,
    /// `None` when `hx = 0`.
    pub n_psspr: Option<f64>,
    pub distance_baseline: f64,
    pub distance_psspr_printed: f64,
    pub distance_psspr_mc: MonteCarloEstimate,
    pub overhead_pusbrf: f64,
    pub overhead_hbdrw: f64,
    pub overhead_psspr: f64,
}

pub fn evaluate<R: Rng + ?Sized>(input: AnalysisInput, rng: &mut R) -> Result<AnalysisReport, AnalysisError> {
    input.validate()?;
    let h = input.h as f64;
    let big_h = input.big_h as f64;
    Ok(AnalysisReport {
        input,
        ratio_hbdrw_over_pusbrf: ratio_hbdrw_over_pusbrf(h),
        ratio_pusbrf_over_psspr: ratio_pusbrf_over_psspr(input.h, input.r_min, input.r_max),
        failure_probability: failure_path_probability(input.r0_hops, big_h, h),
        n_hbdrw: phantom_count_hbdrw(h),
        n_pusbrf: phantom_count_pusbrf(h),
        n_psspr: phantom_count_psspr(input.r_min, input.r_max, input.hx()).ok(),
        distance_baseline: phantom_distance_baseline(1.0, input.r_min, input.hx()),
        distance_psspr_printed: phantom_distance_psspr_printed(input.r_min, input.r_max, big_h)?,
        distance_psspr_mc: phantom_distance_psspr_mc(input.r_min, input.r_max, 200_000, rng)?,
        overhead_pusbrf: comm_overhead_pusbrf(h, big_h)?,
        overhead_hbdrw: comm_overhead_hbdrw(h, big_h)?,
        overhead_psspr: comm_overhead_psspr(input.r_max, big_h, input.omega)?,
    })
}
