//! Experiment configuration: a flat `key = value` text format with `#`
//! comments and comma-separated arrays.
//!
//! ```text
//! n_nodes = 2000
//! field_side = 2700
//! protocols = psspr, hbdrw, pusbrf
//! sweep_h = 5, 10, 15, 20
//! fixed_H = 20
//! seeds = 1..30
//! ```

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::protocol::ProtocolKind;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid config: {0}")]
    Validation(String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
}

/// Which parameter varies across sweep points.
#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    /// Fixed source hop distance `H`, varying walk length `h`.
    OverWalk { big_h: u32, hs: Vec<u32> },
    /// Fixed walk length `h`, varying `H`.
    OverDistance { h: u32, big_hs: Vec<u32> },
}

impl Sweep {
    /// `(h, H)` pairs in sweep order.
    pub fn points(&self) -> Vec<(u32, u32)> {
        match self {
            Sweep::OverWalk { big_h, hs } => hs.iter().map(|&h| (h, *big_h)).collect(),
            Sweep::OverDistance { h, big_hs } => big_hs.iter().map(|&bh| (*h, bh)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n_nodes: usize,
    pub field_side: f64,
    pub r: f64,
    pub r0: f64,
    pub omega: u32,
    pub protocols: Vec<ProtocolKind>,
    pub sweep: Sweep,
    pub packets_per_run: u32,
    pub seeds: Vec<u64>,
    pub output_path: PathBuf,
}

impl Default for ExperimentConfig {
    /// Desk-scale field at the reference node density (2000 nodes on
    /// 2700 m × 2700 m ≈ 10000 on 6000 m × 6000 m), r = 100 m, r0 = 3r, ω = 6.
    fn default() -> Self {
        Self {
            n_nodes: 2000,
            field_side: 2700.0,
            r: 100.0,
            r0: 300.0,
            omega: 6,
            protocols: vec![ProtocolKind::Psspr, ProtocolKind::Hbdrw, ProtocolKind::Pusbrf],
            sweep: Sweep::OverWalk { big_h: 20, hs: vec![5, 10, 15, 20] },
            packets_per_run: 1000,
            seeds: (1..=30).collect(),
            output_path: PathBuf::from("results.csv"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Validation(m.to_string()));
        if self.n_nodes < 2 {
            return bad("n_nodes must be at least 2");
        }
        if !(self.field_side > 0.0) || !(self.r > 0.0) {
            return bad("field_side and r must be positive");
        }
        if !(self.r0 >= self.r) {
            return bad("r0 must be at least r");
        }
        if self.omega < 2 || self.omega % 2 != 0 {
            return bad("omega must be even and at least 2");
        }
        if self.packets_per_run == 0 {
            return bad("packets_per_run must be at least 1");
        }
        if self.protocols.is_empty() {
            return bad("protocols must not be empty");
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty");
        }
        let points = self.sweep.points();
        if points.is_empty() {
            return bad("sweep must have at least one point");
        }
        if points.iter().any(|&(h, bh)| h == 0 || bh == 0) {
            return bad("sweep values must be positive");
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut sweep_h: Option<Vec<u32>> = None;
        let mut sweep_big_h: Option<Vec<u32>> = None;
        let mut fixed_h: Option<u32> = None;
        let mut fixed_big_h: Option<u32> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Parse { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let value = value.trim();
            let field = |m: String| err(format!("{key}: {m}"));
            match key {
                "n_nodes" => cfg.n_nodes = scalar(value).map_err(field)?,
                "field_side" => cfg.field_side = scalar(value).map_err(field)?,
                "r" => cfg.r = scalar(value).map_err(field)?,
                "r0" => cfg.r0 = scalar(value).map_err(field)?,
                "omega" => cfg.omega = scalar(value).map_err(field)?,
                "packets_per_run" => cfg.packets_per_run = scalar(value).map_err(field)?,
                "protocols" => {
                    cfg.protocols = items(value)
                        .map(|s| s.parse::<ProtocolKind>().map_err(|e| e.to_string()))
                        .collect::<Result<_, _>>()
                        .map_err(field)?
                }
                "seeds" => cfg.seeds = list(value).map_err(field)?,
                "sweep_h" => sweep_h = Some(list(value).map_err(field)?),
                "sweep_H" => sweep_big_h = Some(list(value).map_err(field)?),
                "fixed_h" => fixed_h = Some(scalar(value).map_err(field)?),
                "fixed_H" => fixed_big_h = Some(scalar(value).map_err(field)?),
                "output_path" => cfg.output_path = PathBuf::from(value),
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }

        cfg.sweep = match (sweep_h, sweep_big_h) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Validation("set only one of sweep_h and sweep_H".into()))
            }
            (Some(hs), None) => {
                if fixed_h.is_some() {
                    return Err(ConfigError::Validation("fixed_h conflicts with sweep_h".into()));
                }
                let big_h = fixed_big_h.unwrap_or(match cfg.sweep {
                    Sweep::OverWalk { big_h, .. } => big_h,
                    Sweep::OverDistance { .. } => 20,
                });
                Sweep::OverWalk { big_h, hs }
            }
            (None, Some(big_hs)) => {
                if fixed_big_h.is_some() {
                    return Err(ConfigError::Validation("fixed_H conflicts with sweep_H".into()));
                }
                Sweep::OverDistance { h: fixed_h.unwrap_or(15), big_hs }
            }
            (None, None) => match (cfg.sweep.clone(), fixed_h, fixed_big_h) {
                (Sweep::OverWalk { hs, .. }, None, Some(big_h)) => Sweep::OverWalk { big_h, hs },
                (s, None, None) => s,
                _ => {
                    return Err(ConfigError::Validation(
                        "fixed_h needs sweep_H to go with it".into(),
                    ))
                }
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    ExperimentConfig::parse(&text)
}

fn scalar<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse `{value}`"))
}

fn items(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Comma-separated values; an item `a..b` expands to the inclusive range.
fn list<T>(value: &str) -> Result<Vec<T>, String>
where
    T: std::str::FromStr + Copy + TryFrom<u64>,
{
    let mut out = Vec::new();
    for item in items(value) {
        if let Some((a, b)) = item.split_once("..") {
            let a: u64 = scalar(a.trim())?;
            let b: u64 = scalar(b.trim().trim_start_matches('='))?;
            if a > b {
                return Err(format!("empty range `{item}`"));
            }
            for v in a..=b {
                out.push(T::try_from(v).map_err(|_| format!("`{v}` out of range"))?);
            }
        } else {
            out.push(scalar(item)?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}
