//! Access-pattern statistics over an [`AccessTrace`].
//!
//! Reuse intervals are measured in iterations between two consecutive
//! accesses to the same item. An interval is attributed to the stage of its
//! second access; first accesses have no interval and are ignored.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::cache::stats::stage_of;
use crate::trace::AccessTrace;
use crate::{Error, Result};

/// Reuse-interval level relative to the cache capacity `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReuseLevel {
    /// `R < s`
    Small,
    /// `s ≤ R < 2s`
    Medium,
    /// `2s ≤ R < 3s`
    Large,
    /// `R ≥ 3s`
    Huge,
}

impl ReuseLevel {
    pub const ALL: [ReuseLevel; 4] = [
        ReuseLevel::Small,
        ReuseLevel::Medium,
        ReuseLevel::Large,
        ReuseLevel::Huge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReuseLevel::Small => "small",
            ReuseLevel::Medium => "medium",
            ReuseLevel::Large => "large",
            ReuseLevel::Huge => "huge",
        }
    }
}

impl fmt::Display for ReuseLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_reuse_interval(r: u64, s: u64) -> Result<ReuseLevel> {
    if r == 0 || s == 0 {
        return Err(Error::InvalidParameter(format!(
            "reuse interval and capacity must be positive, got R={r}, s={s}"
        )));
    }
    Ok(if r < s {
        ReuseLevel::Small
    } else if r < 2 * s {
        ReuseLevel::Medium
    } else if r < 3 * s {
        ReuseLevel::Large
    } else {
        ReuseLevel::Huge
    })
}

/// Reuse-interval distribution of one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageCdf {
    /// 1-based stage number.
    pub stage: usize,
    /// Repeated accesses per level, in [`ReuseLevel::ALL`] order.
    pub counts: [u64; 4],
    /// Cumulative fraction at each level; `None` when the stage has no
    /// repeated access.
    pub cumulative: Option<[f64; 4]>,
}

impl StageCdf {
    pub fn repeated(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Per-stage cumulative distribution of reuse intervals over `k` equal
/// iteration ranges.
pub fn reuse_interval_cdf_by_stage(trace: &AccessTrace, k: usize, s: u64) -> Result<Vec<StageCdf>> {
    if k == 0 {
        return Err(Error::InvalidParameter("stage count must be >= 1".into()));
    }
    if trace.is_empty() {
        return Err(Error::InvalidTrace("trace is empty".into()));
    }
    trace.validate()?;
    let mut last: Vec<Option<u64>> = alloc::vec![None; trace.n];
    let mut counts = alloc::vec![[0u64; 4]; k];
    for ev in &trace.events {
        if let Some(prev) = last[ev.row_index] {
            let level = classify_reuse_interval(ev.iteration - prev, s)?;
            let stage = stage_of(ev.iteration, trace.total_iterations, k);
            counts[stage][level as usize] += 1;
        }
        last[ev.row_index] = Some(ev.iteration);
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let total: u64 = c.iter().sum();
            let cumulative = (total > 0).then(|| {
                let mut acc = 0;
                let mut out = [0.0; 4];
                for (o, &v) in out.iter_mut().zip(&c) {
                    acc += v;
                    *o = acc as f64 / total as f64;
                }
                out
            });
            StageCdf {
                stage: i + 1,
                counts: c,
                cumulative,
            }
        })
        .collect())
}

/// Access count of every item within each of `k` stages: `out[stage][item]`.
pub fn stage_frequencies(trace: &AccessTrace, k: usize) -> Vec<Vec<u64>> {
    let k = k.max(1);
    let mut out = alloc::vec![alloc::vec![0u64; trace.n]; k];
    for ev in &trace.events {
        out[stage_of(ev.iteration, trace.total_iterations, k)][ev.row_index] += 1;
    }
    out
}

/// Histogram of `|freq_{t+1}(i) − freq_t(i)|` over every item `i` and every
/// pair of consecutive stages. Items never accessed contribute zeros, so the
/// counts sum to `n·(k − 1)`.
pub fn frequency_difference_by_stage(trace: &AccessTrace, k: usize) -> Result<BTreeMap<u64, u64>> {
    if k < 2 {
        return Err(Error::InvalidParameter(
            "frequency differences need at least 2 stages".into(),
        ));
    }
    let per_stage = stage_frequencies(trace, k);
    let mut hist = BTreeMap::new();
    for pair in per_stage.windows(2) {
        for (a, b) in pair[0].iter().zip(&pair[1]) {
            *hist.entry(a.abs_diff(*b)).or_insert(0) += 1;
        }
    }
    Ok(hist)
}
