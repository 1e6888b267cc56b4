//! Strategy-independent record of kernel-row requests.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    /// Outer iteration, starting at 1.
    pub iteration: u64,
    pub row_index: usize,
    /// Global access sequence number, starting at 0.
    pub seq: u64,
}

/// An ordered list of accesses over `n` items in batches of at most `q`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AccessTrace {
    pub events: Vec<TraceEvent>,
    pub n: usize,
    pub q: usize,
    pub total_iterations: u64,
}

impl AccessTrace {
    pub fn new(n: usize, q: usize) -> Self {
        Self {
            events: Vec::new(),
            n,
            q,
            total_iterations: 0,
        }
    }

    /// Build a trace from `(iteration, row)` pairs, numbering `seq` in order.
    /// `total_iterations` is set to the last iteration seen.
    pub fn from_pairs(n: usize, q: usize, pairs: impl IntoIterator<Item = (u64, usize)>) -> Self {
        let events: Vec<TraceEvent> = pairs
            .into_iter()
            .enumerate()
            .map(|(seq, (iteration, row_index))| TraceEvent {
                iteration,
                row_index,
                seq: seq as u64,
            })
            .collect();
        let total_iterations = events.last().map_or(0, |e| e.iteration);
        Self {
            events,
            n,
            q,
            total_iterations,
        }
    }

    /// One access per iteration, iterations numbered from 1.
    pub fn sequential(n: usize, rows: impl IntoIterator<Item = usize>) -> Self {
        Self::from_pairs(n, 1, rows.into_iter().enumerate().map(|(i, r)| (i as u64 + 1, r)))
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn push(&mut self, ev: TraceEvent) {
        self.total_iterations = self.total_iterations.max(ev.iteration);
        self.events.push(ev);
    }

    /// Events grouped by iteration, in order.
    pub fn batches(&self) -> impl Iterator<Item = (u64, &[TraceEvent])> {
        self.events
            .chunk_by(|a, b| a.iteration == b.iteration)
            .map(|chunk| (chunk[0].iteration, chunk))
    }

    /// Check every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let mut prev: Option<&TraceEvent> = None;
        let mut in_batch: Vec<usize> = Vec::new();
        for ev in &self.events {
            if ev.row_index >= self.n {
                return Err(Error::InvalidTrace(format!(
                    "row {} outside universe of {} items",
                    ev.row_index, self.n
                )));
            }
            if ev.iteration == 0 || ev.iteration > self.total_iterations {
                return Err(Error::InvalidTrace(format!(
                    "iteration {} outside 1..={}",
                    ev.iteration, self.total_iterations
                )));
            }
            if let Some(p) = prev {
                if ev.seq <= p.seq {
                    return Err(Error::InvalidTrace(format!("seq {} not increasing", ev.seq)));
                }
                if ev.iteration < p.iteration {
                    return Err(Error::InvalidTrace(format!(
                        "iteration {} after {}",
                        ev.iteration, p.iteration
                    )));
                }
                if ev.iteration != p.iteration {
                    in_batch.clear();
                }
            }
            if in_batch.contains(&ev.row_index) {
                return Err(Error::InvalidTrace(format!(
                    "row {} repeated in iteration {}",
                    ev.row_index, ev.iteration
                )));
            }
            in_batch.push(ev.row_index);
            if in_batch.len() > self.q {
                return Err(Error::InvalidTrace(format!(
                    "more than q={} accesses in iteration {}",
                    self.q, ev.iteration
                )));
            }
            prev = Some(ev);
        }
        Ok(())
    }

    /// Access count per item.
    pub fn frequencies(&self) -> Vec<u64> {
        let mut freq = alloc::vec![0u64; self.n];
        for ev in &self.events {
            freq[ev.row_index] += 1;
        }
        freq
    }
}
