//! Trace replay.
//!
//! [`replay_trace`] drives a fresh [`KernelCache`] with the batches of a
//! recorded trace, exactly as the trainer does, but without row payloads.
//! [`belady_opt_replay`] is the offline optimum used as an upper bound.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::cache::{CacheConfig, CacheStats, IterationTally, KernelCache, Policy};
use crate::trace::AccessTrace;
use crate::{Error, Result};

/// Replay `trace` under `policy` with capacity `s`, checkpoint factor
/// `lambda` and `workers` replacement workers. Every iteration from 1 to
/// `total_iterations` closes with a checkpoint tick, including iterations
/// without accesses.
pub fn replay_trace(trace: &AccessTrace, policy: Policy, s: usize, lambda: f64, workers: usize) -> Result<CacheStats> {
    if s < 1 {
        return Err(Error::InvalidParameter("capacity must be >= 1".into()));
    }
    trace.validate()?;
    let cfg = CacheConfig::new(policy, s, trace.q)
        .with_lambda(lambda)
        .with_workers(workers)
        .with_trace(false);
    let mut cache = KernelCache::new(cfg, trace.n)?;
    let mut batches = trace.batches().peekable();
    let mut rows = Vec::new();
    for it in 1..=trace.total_iterations {
        if let Some((_, evs)) = batches.next_if(|(bi, _)| *bi == it) {
            rows.clear();
            rows.extend(evs.iter().map(|e| e.row_index));
            cache.access_batch(&rows, it)?;
            cache.insert_batch_elided();
        }
        cache.finish_iteration();
    }
    Ok(cache.stats().clone())
}

/// Belady's offline optimum with bypass: on a miss with a full cache, among
/// the cached rows and the incoming one, the row whose next use is farthest
/// away is dropped (rows never used again count as farthest; ties drop the
/// smaller row index). Dropping the incoming row means it is not admitted.
///
/// Admission-controlled policies such as EFU may also decline rows, so only
/// this variant bounds every policy from above.
///
/// Within a batch, hits are determined before any miss is admitted, as in
/// [`KernelCache`], and misses are considered in ascending row order.
pub fn belady_opt_replay(trace: &AccessTrace, s: usize) -> Result<CacheStats> {
    belady(trace, s, true)
}

/// Classic Belady MIN: every miss is admitted, evicting the cached row whose
/// next use is farthest away. Optimal among policies that always admit.
pub fn belady_min_replay(trace: &AccessTrace, s: usize) -> Result<CacheStats> {
    belady(trace, s, false)
}

fn belady(trace: &AccessTrace, s: usize, bypass: bool) -> Result<CacheStats> {
    trace.validate()?;
    // next_use[e] = iteration of the next access to the same row after event e
    let mut next_use = alloc::vec![u64::MAX; trace.len()];
    let mut upcoming = alloc::vec![u64::MAX; trace.n];
    for (e, ev) in trace.events.iter().enumerate().rev() {
        next_use[e] = upcoming[ev.row_index];
        upcoming[ev.row_index] = ev.iteration;
    }

    let mut stats = CacheStats::default();
    let mut cached: Vec<Option<u64>> = alloc::vec![None; trace.n];
    // (next use, Reverse(row)): the last element is the farthest next use,
    // smallest row among ties.
    let mut order: BTreeSet<(u64, Reverse<usize>)> = BTreeSet::new();
    let mut offset = 0;
    for (it, evs) in trace.batches() {
        let mut misses = Vec::new();
        let mut hits = 0;
        for (k, ev) in evs.iter().enumerate() {
            let nu = next_use[offset + k];
            match cached[ev.row_index] {
                Some(old) => {
                    order.remove(&(old, Reverse(ev.row_index)));
                    order.insert((nu, Reverse(ev.row_index)));
                    cached[ev.row_index] = Some(nu);
                    hits += 1;
                }
                None => misses.push((ev.row_index, nu)),
            }
        }
        offset += evs.len();
        misses.sort_unstable();
        for (row, nu) in misses {
            if s == 0 {
                stats.rejections += 1;
                continue;
            }
            if order.len() < s {
                order.insert((nu, Reverse(row)));
                cached[row] = Some(nu);
                stats.admissions += 1;
                continue;
            }
            let &(far, Reverse(victim)) = order.last().expect("cache is full");
            if bypass && (nu, Reverse(row)) > (far, Reverse(victim)) {
                stats.rejections += 1;
            } else {
                order.pop_last();
                cached[victim] = None;
                order.insert((nu, Reverse(row)));
                cached[row] = Some(nu);
                stats.admissions += 1;
            }
        }
        stats.accesses += evs.len() as u64;
        stats.hits += hits;
        stats.misses += evs.len() as u64 - hits;
        stats.per_iteration.push(IterationTally {
            iteration: it,
            accesses: evs.len() as u64,
            hits,
        });
    }
    Ok(stats)
}

/// One row of a strategy comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyResult {
    /// Policy name, or `opt` for the offline optimum.
    pub name: &'static str,
    pub capacity: usize,
    pub stats: CacheStats,
}

/// Replay `trace` under every caching policy and under the optimum.
pub fn compare_strategies(trace: &AccessTrace, s: usize, lambda: f64) -> Result<Vec<StrategyResult>> {
    compare_policies(trace, &Policy::ALL, s, lambda, 1)
}

/// Replay `trace` under `policies` followed by the optimum.
pub fn compare_policies(
    trace: &AccessTrace,
    policies: &[Policy],
    s: usize,
    lambda: f64,
    workers: usize,
) -> Result<Vec<StrategyResult>> {
    let mut out = Vec::with_capacity(policies.len() + 1);
    for &p in policies {
        if p == Policy::None {
            return Err(Error::InvalidParameter(format!("cannot replay policy '{p}'")));
        }
        out.push(StrategyResult {
            name: p.name(),
            capacity: s,
            stats: replay_trace(trace, p, s, lambda, workers)?,
        });
    }
    out.push(StrategyResult {
        name: "opt",
        capacity: s,
        stats: belady_opt_replay(trace, s)?,
    });
    Ok(out)
}
