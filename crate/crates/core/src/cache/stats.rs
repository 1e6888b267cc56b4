use alloc::vec::Vec;

/// Hits and accesses recorded for one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationTally {
    pub iteration: u64,
    pub accesses: u64,
    pub hits: u64,
}

/// Cumulative cache counters.
///
/// `accesses = hits + misses` and `misses = admissions + rejections` hold
/// after every completed access/insert pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CacheStats {
    pub accesses: u64,
    pub hits: u64,
    pub misses: u64,
    pub admissions: u64,
    pub rejections: u64,
    pub switches: u64,
    pub per_iteration: Vec<IterationTally>,
}

impl CacheStats {
    pub fn hit_ratio(&self) -> f64 {
        ratio(self.hits, self.accesses)
    }

    /// Hit ratio over iterations strictly after `iteration`.
    pub fn hit_ratio_after(&self, iteration: u64) -> f64 {
        let (acc, hits) = self
            .per_iteration
            .iter()
            .filter(|t| t.iteration > iteration)
            .fold((0, 0), |(a, h), t| (a + t.accesses, h + t.hits));
        ratio(hits, acc)
    }

    /// Hit ratio per stage, splitting the recorded iterations into `k` equal
    /// ranges. Iterations are renumbered from 1 at the first recorded one;
    /// an iteration `t` of `T` falls in stage `ceil(t·k/T)`. Stages with no
    /// accesses report 0.
    pub fn stage_hit_ratios(&self, k: usize) -> Vec<f64> {
        let k = k.max(1);
        let (Some(first), Some(last)) = (self.per_iteration.first(), self.per_iteration.last()) else {
            return alloc::vec![0.0; k];
        };
        let base = first.iteration - 1;
        let total = last.iteration - base;
        let mut acc = alloc::vec![0u64; k];
        let mut hits = alloc::vec![0u64; k];
        for t in &self.per_iteration {
            let s = stage_of(t.iteration - base, total, k);
            acc[s] += t.accesses;
            hits[s] += t.hits;
        }
        acc.iter().zip(&hits).map(|(&a, &h)| ratio(h, a)).collect()
    }

    /// Counters accumulated since `before`, which must be an earlier
    /// snapshot of the same cache.
    pub fn delta_since(&self, before: &CacheStats) -> CacheStats {
        CacheStats {
            accesses: self.accesses - before.accesses,
            hits: self.hits - before.hits,
            misses: self.misses - before.misses,
            admissions: self.admissions - before.admissions,
            rejections: self.rejections - before.rejections,
            switches: self.switches - before.switches,
            per_iteration: self.per_iteration[before.per_iteration.len()..].to_vec(),
        }
    }

    /// Every conservation law holds.
    pub fn is_conserved(&self) -> bool {
        self.accesses == self.hits + self.misses
            && self.misses == self.admissions + self.rejections
            && self.per_iteration.iter().map(|t| t.accesses).sum::<u64>() == self.accesses
            && self.per_iteration.iter().map(|t| t.hits).sum::<u64>() == self.hits
    }
}

/// Zero-based stage of 1-based iteration `t` out of `total`, `k` stages.
pub(crate) fn stage_of(t: u64, total: u64, k: usize) -> usize {
    if total == 0 {
        return 0;
    }
    let s = (t * k as u64).div_ceil(total);
    (s.max(1) as usize - 1).min(k - 1)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}
