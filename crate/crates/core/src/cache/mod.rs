//! Kernel-row cache.
//!
//! The cache holds at most `s` rows in a fixed slot array. Every access goes
//! through [`KernelCache::access_batch`], which updates the two per-item
//! counters (access frequency and time of last access) regardless of the
//! policy in force. Missed rows are then offered to
//! [`KernelCache::insert_batch`], which fills free slots first and otherwise
//! asks the active policy for a victim.
//!
//! Policies:
//!
//! - `lru`: evict the slot accessed longest ago.
//! - `lfu`: evict the least frequently accessed slot, always admitting.
//! - `lat`: evict the slot holding the smallest row index.
//! - `efu`: evict the least frequently accessed slot only if it is strictly
//!   less frequent than the incoming row; otherwise the row is not cached.
//! - `hcst`: start with EFU and, every `N_c` iterations, compare the hits
//!   actually obtained with an estimate for the other policy and switch
//!   between EFU and LRU.
//!
//! Frequency ties under LFU and EFU go to the least recently used slot.
//!
//! With `p > 1` workers, missed rows that do not fit in free slots are split
//! into `p` contiguous groups (ascending row index) and the slot array into
//! `p` contiguous segments; group `k` only searches and replaces within
//! segment `k`.

mod benefit;
pub(crate) mod stats;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

pub use benefit::{estimate_benefit, Benefit};
pub use stats::{CacheStats, IterationTally};

use crate::kernel::KernelRow;
use crate::trace::{AccessTrace, TraceEvent};
use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    None,
    Lru,
    Lfu,
    Lat,
    Efu,
    Hcst,
}

impl Policy {
    /// Every caching policy (excludes `None`).
    pub const ALL: [Policy; 5] = [Policy::Lru, Policy::Lfu, Policy::Lat, Policy::Efu, Policy::Hcst];

    pub fn name(self) -> &'static str {
        match self {
            Policy::None => "none",
            Policy::Lru => "lru",
            Policy::Lfu => "lfu",
            Policy::Lat => "lat",
            Policy::Efu => "efu",
            Policy::Hcst => "hcst",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Policy::None),
            "lru" => Ok(Policy::Lru),
            "lfu" => Ok(Policy::Lfu),
            "lat" => Ok(Policy::Lat),
            "efu" => Ok(Policy::Efu),
            "hcst" => Ok(Policy::Hcst),
            other => Err(Error::InvalidParameter(format!("unknown cache policy '{other}'"))),
        }
    }
}

/// Unit in which reuse intervals are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReuseUnit {
    /// Outer iterations between two accesses.
    #[default]
    Iterations,
    /// Positions in the global access sequence.
    Accesses,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheConfig {
    /// Maximum number of cached rows (`s`).
    pub capacity: usize,
    pub policy: Policy,
    /// Checkpoint spacing factor (`λ`).
    pub lambda: f64,
    /// Replacement workers (`p`).
    pub workers: usize,
    /// Rows requested per iteration.
    pub q: usize,
    pub reuse_unit: ReuseUnit,
    /// Keep an [`AccessTrace`] of every access.
    pub record_trace: bool,
}

impl Default for CacheConfig {
    fn default() -> Self {
        Self {
            capacity: 512,
            policy: Policy::Hcst,
            lambda: 2.0,
            workers: 1,
            q: 64,
            reuse_unit: ReuseUnit::Iterations,
            record_trace: true,
        }
    }
}

impl CacheConfig {
    pub fn new(policy: Policy, capacity: usize, q: usize) -> Self {
        Self {
            policy,
            capacity,
            q,
            ..Self::default()
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_reuse_unit(mut self, unit: ReuseUnit) -> Self {
        self.reuse_unit = unit;
        self
    }

    pub fn with_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }

    /// Iterations between HCST checkpoints: `round(λ·s/q)`, at least 1.
    pub fn checkpoint_interval(&self) -> u64 {
        let q = self.q.max(1) as f64;
        let nc = libm::round(self.lambda * self.capacity as f64 / q);
        if nc.is_finite() && nc >= 1.0 {
            nc as u64
        } else {
            1
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.policy != Policy::None && self.capacity == 0 {
            return Err(Error::InvalidParameter("cache capacity must be >= 1".into()));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        if self.q == 0 {
            return Err(Error::InvalidParameter("q must be >= 1".into()));
        }
        Ok(())
    }
}

/// Counters driving the HCST checkpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HcstCounters {
    /// Hits since the last checkpoint (`H_hit`).
    pub hits: u64,
    /// Accesses since the last checkpoint whose reuse interval is below the
    /// capacity (`H_s`).
    pub short_reuse: u64,
    /// Hits of the last completed EFU period (`H_saved`).
    pub saved_efu_hits: u64,
    pub iters_since_checkpoint: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchDecision {
    Stay,
    ToLru,
    ToEfu,
}

/// Outcome of [`KernelCache::access_batch`], both lists in request order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lookup {
    pub hits: Vec<usize>,
    pub misses: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Slot {
    row: usize,
    /// Sequence number of the most recent access.
    stamp: u64,
    data: Option<Vec<f64>>,
}

#[derive(Debug)]
struct Incoming {
    row: usize,
    stamp: u64,
    freq: u64,
    data: Option<Vec<f64>>,
}

#[derive(Debug, Default)]
struct WorkerTally {
    /// (slot, evicted row, admitted row)
    replaced: Vec<(usize, usize, usize)>,
    rejected: u64,
}

/// Kernel-row cache over a universe of `n` items.
#[derive(Debug, Clone)]
pub struct KernelCache {
    config: CacheConfig,
    n: usize,
    checkpoint_interval: u64,
    slots: Vec<Option<Slot>>,
    position: BTreeMap<usize, usize>,
    freq: Vec<u64>,
    last_access: Vec<Option<u64>>,
    active: Policy,
    hcst: HcstCounters,
    stats: CacheStats,
    pending: Vec<(usize, u64)>,
    last_iteration: u64,
    seq: u64,
    trace: Option<AccessTrace>,
}

impl KernelCache {
    pub fn new(config: CacheConfig, n: usize) -> Result<Self> {
        config.validate()?;
        let slots = if config.policy == Policy::None {
            0
        } else {
            config.capacity
        };
        let active = match config.policy {
            Policy::Hcst => Policy::Efu,
            p => p,
        };
        let trace = config.record_trace.then(|| AccessTrace::new(n, config.q));
        Ok(Self {
            checkpoint_interval: config.checkpoint_interval(),
            config,
            n,
            slots: (0..slots).map(|_| None).collect(),
            position: BTreeMap::new(),
            freq: alloc::vec![0; n],
            last_access: alloc::vec![None; n],
            active,
            hcst: HcstCounters::default(),
            stats: CacheStats::default(),
            pending: Vec::new(),
            last_iteration: 0,
            seq: 0,
            trace,
        })
    }

    pub fn config(&self) -> &CacheConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn checkpoint_interval(&self) -> u64 {
        self.checkpoint_interval
    }

    /// Policy currently used for replacement (EFU or LRU under HCST).
    pub fn active_policy(&self) -> Policy {
        self.active
    }

    pub fn hcst_counters(&self) -> &HcstCounters {
        &self.hcst
    }

    pub fn stats(&self) -> &CacheStats {
        &self.stats
    }

    pub fn trace(&self) -> Option<&AccessTrace> {
        self.trace.as_ref()
    }

    pub fn take_trace(&mut self) -> Option<AccessTrace> {
        let fresh = self
            .config
            .record_trace
            .then(|| AccessTrace::new(self.n, self.config.q));
        core::mem::replace(&mut self.trace, fresh)
    }

    pub fn frequency(&self, row: usize) -> u64 {
        self.freq[row]
    }

    pub fn last_access(&self, row: usize) -> Option<u64> {
        self.last_access[row]
    }

    pub fn last_iteration(&self) -> u64 {
        self.last_iteration
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    pub fn contains(&self, row: usize) -> bool {
        self.position.contains_key(&row)
    }

    /// Cached rows in ascending order.
    pub fn cached_rows(&self) -> Vec<usize> {
        self.position.keys().copied().collect()
    }

    /// Stored values of a cached row, if the cache holds a payload for it.
    pub fn cached_row(&self, row: usize) -> Option<&[f64]> {
        let &slot = self.position.get(&row)?;
        self.slots[slot].as_ref()?.data.as_deref()
    }

    /// Record accesses to `indices` during `iteration` and split them into
    /// hits and misses.
    pub fn access_batch(&mut self, indices: &[usize], iteration: u64) -> Result<Lookup> {
        if !self.pending.is_empty() {
            return Err(Error::Contract(format!(
                "{} misses from iteration {} were never offered to insert_batch",
                self.pending.len(),
                self.last_iteration
            )));
        }
        if iteration <= self.last_iteration {
            return Err(Error::Contract(format!(
                "iteration {iteration} does not follow {}",
                self.last_iteration
            )));
        }
        let mut seen = indices.to_vec();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Contract(format!("row {} requested twice in one batch", w[0])));
            }
        }
        if let Some(&bad) = seen.last().filter(|&&i| i >= self.n) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.n,
            });
        }

        self.last_iteration = iteration;
        let capacity = self.config.capacity as u64;
        let mut lookup = Lookup::default();
        for &row in indices {
            let seq = self.seq;
            self.seq += 1;
            self.freq[row] += 1;
            let now = match self.config.reuse_unit {
                ReuseUnit::Iterations => iteration,
                ReuseUnit::Accesses => seq,
            };
            if let Some(prev) = self.last_access[row] {
                if now - prev < capacity {
                    self.hcst.short_reuse += 1;
                }
            }
            self.last_access[row] = Some(now);

            match self.position.get(&row) {
                Some(&slot) => {
                    self.slots[slot].as_mut().expect("mapped slot is occupied").stamp = seq;
                    self.hcst.hits += 1;
                    lookup.hits.push(row);
                }
                None => {
                    self.pending.push((row, seq));
                    lookup.misses.push(row);
                }
            }
            if let Some(trace) = self.trace.as_mut() {
                trace.push(TraceEvent {
                    iteration,
                    row_index: row,
                    seq,
                });
            }
        }
        let hits = lookup.hits.len() as u64;
        self.stats.accesses += indices.len() as u64;
        self.stats.hits += hits;
        self.stats.misses += lookup.misses.len() as u64;
        self.stats.per_iteration.push(IterationTally {
            iteration,
            accesses: indices.len() as u64,
            hits,
        });
        Ok(lookup)
    }

    /// Offer freshly computed rows for every miss of the preceding
    /// [`access_batch`](Self::access_batch). Returns the number admitted.
    pub fn insert_batch(&mut self, rows: Vec<KernelRow>) -> Result<usize> {
        if rows.len() != self.pending.len() {
            return Err(Error::Contract(format!(
                "{} rows offered for {} misses",
                rows.len(),
                self.pending.len()
            )));
        }
        let mut payload: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for r in rows {
            if r.values.len() != self.n {
                return Err(Error::RowLength {
                    row: r.row_index,
                    len: r.values.len(),
                    expected: self.n,
                });
            }
            if !self.pending.iter().any(|&(p, _)| p == r.row_index) {
                return Err(Error::Contract(format!(
                    "row {} was not a miss of the last batch",
                    r.row_index
                )));
            }
            if payload.insert(r.row_index, r.values).is_some() {
                return Err(Error::Contract(format!("row {} offered twice", r.row_index)));
            }
        }
        Ok(self.admit(|row| payload.remove(&row)))
    }

    /// Like [`insert_batch`](Self::insert_batch) without row payloads; used
    /// for trace replay.
    pub fn insert_batch_elided(&mut self) -> usize {
        self.admit(|_| None)
    }

    fn admit(&mut self, mut payload: impl FnMut(usize) -> Option<Vec<f64>>) -> usize {
        let mut pending = core::mem::take(&mut self.pending);
        pending.sort_unstable_by_key(|&(row, _)| row);
        let mut incoming: Vec<Incoming> = pending
            .into_iter()
            .map(|(row, stamp)| Incoming {
                row,
                stamp,
                freq: self.freq[row],
                data: payload(row),
            })
            .collect();
        if incoming.is_empty() {
            return 0;
        }
        if self.config.policy == Policy::None {
            self.stats.rejections += incoming.len() as u64;
            return 0;
        }

        // Free slots are filled first, lowest slot and lowest row first.
        let mut admitted = 0usize;
        let mut rest = Vec::new();
        let free_slots: Vec<usize> = (0..self.slots.len()).filter(|&k| self.slots[k].is_none()).collect();
        let mut free = free_slots.into_iter();
        for inc in incoming.drain(..) {
            match free.next() {
                Some(k) => {
                    self.position.insert(inc.row, k);
                    self.slots[k] = Some(Slot {
                        row: inc.row,
                        stamp: inc.stamp,
                        data: inc.data,
                    });
                    admitted += 1;
                }
                None => rest.push(inc),
            }
        }
        if rest.is_empty() {
            self.stats.admissions += admitted as u64;
            return admitted;
        }

        let workers = self.config.workers.min(self.slots.len()).max(1);
        let segments = par::split_ranges(self.slots.len(), workers);
        let groups = par::split_ranges(rest.len(), workers);
        let mut tasks = Vec::with_capacity(workers);
        let mut slots_left: &mut [Option<Slot>] = &mut self.slots;
        let mut rest = rest.into_iter();
        for (seg, grp) in segments.iter().zip(&groups) {
            let (segment, tail) = core::mem::take(&mut slots_left).split_at_mut(seg.len());
            slots_left = tail;
            let group: Vec<Incoming> = rest.by_ref().take(grp.len()).collect();
            tasks.push((seg.start, segment, group));
        }
        let policy = self.active;
        let freq = &self.freq;
        let tallies = par::map_tasks(tasks, |(offset, segment, group)| {
            replace_in_segment(segment, offset, group, policy, freq)
        });

        let mut rejected = 0u64;
        for t in tallies {
            rejected += t.rejected;
            for &(slot, old, new) in &t.replaced {
                self.position.remove(&old);
                self.position.insert(new, slot);
            }
            admitted += t.replaced.len();
        }
        self.stats.admissions += admitted as u64;
        self.stats.rejections += rejected;
        admitted
    }

    /// Victim slot for an incoming row of frequency `incoming_freq` within
    /// `segment`, under `policy` (which must be a concrete policy, not
    /// `none` or `hcst`). `None` means the row is not admitted.
    pub fn evict_candidate(&self, policy: Policy, segment: Range<usize>, incoming_freq: u64) -> Result<Option<usize>> {
        if segment.is_empty() || segment.end > self.slots.len() {
            return Err(Error::InvalidParameter(format!(
                "segment {segment:?} is not a nonempty part of {} slots",
                self.slots.len()
            )));
        }
        let part = &self.slots[segment.clone()];
        if part.iter().any(Option::is_none) {
            return Err(Error::Contract("segment has free slots".into()));
        }
        match policy {
            Policy::Lru | Policy::Lfu | Policy::Lat | Policy::Efu => {
                Ok(pick_victim(part, policy, incoming_freq, &self.freq).map(|k| k + segment.start))
            }
            other => Err(Error::InvalidParameter(format!(
                "'{other}' does not select victims directly"
            ))),
        }
    }

    /// Close an outer iteration. Under HCST this runs a checkpoint every
    /// `N_c` iterations and returns its decision.
    pub fn finish_iteration(&mut self) -> Option<SwitchDecision> {
        if self.config.policy != Policy::Hcst {
            return None;
        }
        self.hcst.iters_since_checkpoint += 1;
        if self.hcst.iters_since_checkpoint >= self.checkpoint_interval {
            Some(self.checkpoint())
        } else {
            None
        }
    }

    /// Compare the measured hits of the active policy with the estimate for
    /// the other one and switch if the other looks better. Counters for the
    /// next period start from zero; cache contents are kept.
    pub fn hcst_checkpoint(&mut self) -> Result<SwitchDecision> {
        if self.config.policy != Policy::Hcst {
            return Err(Error::InvalidParameter(format!(
                "checkpoint requires policy hcst, cache uses {}",
                self.config.policy
            )));
        }
        Ok(self.checkpoint())
    }

    fn checkpoint(&mut self) -> SwitchDecision {
        let h = &mut self.hcst;
        let decision = match self.active {
            Policy::Efu if h.hits < h.short_reuse => {
                h.saved_efu_hits = h.hits;
                SwitchDecision::ToLru
            }
            Policy::Lru if h.hits < h.saved_efu_hits => SwitchDecision::ToEfu,
            _ => SwitchDecision::Stay,
        };
        match decision {
            SwitchDecision::ToLru => self.active = Policy::Lru,
            SwitchDecision::ToEfu => self.active = Policy::Efu,
            SwitchDecision::Stay => {}
        }
        if decision != SwitchDecision::Stay {
            self.stats.switches += 1;
        }
        h.hits = 0;
        h.short_reuse = 0;
        h.iters_since_checkpoint = 0;
        decision
    }

    /// Start a new solver on a shared cache: the HCST controller returns to
    /// EFU with zeroed counters; contents and per-item counters are kept.
    pub fn begin_solver(&mut self) {
        if self.config.policy == Policy::Hcst {
            self.active = Policy::Efu;
            self.hcst = HcstCounters::default();
        }
    }

    /// Check capacity, slot/map agreement and stats conservation.
    pub fn check_invariants(&self) -> Result<()> {
        if self.position.len() > self.config.capacity && self.config.policy != Policy::None {
            return Err(Error::Contract("capacity exceeded".into()));
        }
        let occupied = self.slots.iter().flatten().count();
        if occupied != self.position.len() {
            return Err(Error::Contract("slot map out of sync".into()));
        }
        for (&row, &slot) in &self.position {
            if self.slots[slot].as_ref().map(|s| s.row) != Some(row) {
                return Err(Error::Contract(format!("row {row} not in slot {slot}")));
            }
        }
        if self.pending.is_empty() && !self.stats.is_conserved() {
            return Err(Error::Contract("stats not conserved".into()));
        }
        Ok(())
    }
}

fn replace_in_segment(
    segment: &mut [Option<Slot>],
    offset: usize,
    group: Vec<Incoming>,
    policy: Policy,
    freq: &[u64],
) -> WorkerTally {
    let mut tally = WorkerTally::default();
    for inc in group {
        match pick_victim(segment, policy, inc.freq, freq) {
            Some(k) => {
                let old = segment[k].replace(Slot {
                    row: inc.row,
                    stamp: inc.stamp,
                    data: inc.data,
                });
                let old_row = old.expect("segment is full").row;
                tally.replaced.push((offset + k, old_row, inc.row));
            }
            None => tally.rejected += 1,
        }
    }
    tally
}

/// Victim within a full segment, relative to its start.
fn pick_victim(segment: &[Option<Slot>], policy: Policy, incoming_freq: u64, freq: &[u64]) -> Option<usize> {
    let slots = segment
        .iter()
        .enumerate()
        .filter_map(|(k, s)| s.as_ref().map(|s| (k, s)));
    match policy {
        Policy::Lru => slots.min_by_key(|(_, s)| s.stamp).map(|(k, _)| k),
        Policy::Lat => slots.min_by_key(|(_, s)| s.row).map(|(k, _)| k),
        Policy::Lfu => slots.min_by_key(|(_, s)| (freq[s.row], s.stamp)).map(|(k, _)| k),
        Policy::Efu => slots
            .min_by_key(|(_, s)| (freq[s.row], s.stamp))
            .filter(|(_, s)| freq[s.row] < incoming_freq)
            .map(|(k, _)| k),
        Policy::None | Policy::Hcst => None,
    }
}
