//! Machine-readable run outputs: stats JSON and analytics CSVs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hcst_core::analytics::{ReuseLevel, StageCdf};
use hcst_core::sim::StrategyResult;
use hcst_core::{CacheConfig, CacheStats};
use serde::{Deserialize, Serialize};

/// Counters of one solver in a multi-output run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub label: f64,
    pub iterations: u64,
    pub converged: bool,
    pub accesses: u64,
    pub hits: u64,
    pub misses: u64,
    pub admissions: u64,
    pub rejections: u64,
    pub switches: u64,
    pub hit_ratio: f64,
}

impl SolverStats {
    pub fn new(label: f64, iterations: u64, converged: bool, s: &CacheStats) -> Self {
        Self {
            label,
            iterations,
            converged,
            accesses: s.accesses,
            hits: s.hits,
            misses: s.misses,
            admissions: s.admissions,
            rejections: s.rejections,
            switches: s.switches,
            hit_ratio: s.hit_ratio(),
        }
    }
}

/// Stats document written by `train --stats`. Field order is the
/// serialization order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub policy: String,
    pub capacity: usize,
    pub lambda: f64,
    pub workers: usize,
    pub accesses: u64,
    pub hits: u64,
    pub misses: u64,
    pub admissions: u64,
    pub rejections: u64,
    pub switches: u64,
    pub hit_ratio: f64,
    pub stage_hit_ratios: Vec<f64>,
    /// Iterations between HCST checkpoints.
    pub checkpoint_interval: u64,
    pub q: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solvers: Vec<SolverStats>,
}

impl StatsReport {
    pub fn new(cfg: &CacheConfig, stats: &CacheStats, stages: usize) -> Self {
        Self {
            policy: cfg.policy.name().to_string(),
            capacity: cfg.capacity,
            lambda: cfg.lambda,
            workers: cfg.workers,
            accesses: stats.accesses,
            hits: stats.hits,
            misses: stats.misses,
            admissions: stats.admissions,
            rejections: stats.rejections,
            switches: stats.switches,
            hit_ratio: stats.hit_ratio(),
            stage_hit_ratios: stats.stage_hit_ratios(stages),
            checkpoint_interval: cfg.checkpoint_interval(),
            q: cfg.q,
            solvers: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }
}

/// `stage,level,cumulative_fraction`; stages without repeated accesses get
/// an empty fraction.
pub fn cdf_csv(cdf: &[StageCdf]) -> String {
    let mut out = String::from("stage,level,cumulative_fraction\n");
    for st in cdf {
        for (k, level) in ReuseLevel::ALL.iter().enumerate() {
            match st.cumulative {
                Some(c) => writeln!(out, "{},{},{}", st.stage, level, c[k]).unwrap(),
                None => writeln!(out, "{},{},", st.stage, level).unwrap(),
            }
        }
    }
    out
}

/// `difference,count`, ascending by difference.
pub fn difference_csv(hist: &BTreeMap<u64, u64>) -> String {
    let mut out = String::from("difference,count\n");
    for (d, c) in hist {
        writeln!(out, "{d},{c}").unwrap();
    }
    out
}

/// `policy,capacity,accesses,hits,hit_ratio,switches`.
pub fn comparison_csv(rows: &[StrategyResult]) -> String {
    let mut out = String::from("policy,capacity,accesses,hits,hit_ratio,switches\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.name,
            r.capacity,
            r.stats.accesses,
            r.stats.hits,
            r.stats.hit_ratio(),
            r.stats.switches
        )
        .unwrap();
    }
    out
}
