//! One-vs-all multi-output training over one shared cache.
//!
//! Solvers run one after another on the same [`KernelCache`]. Rows cached by
//! one solver stay available to the next, and access frequencies keep
//! accumulating across solvers.

use alloc::vec::Vec;

use super::{train_binary, SolverConfig, TrainOutput};
use crate::cache::{CacheStats, KernelCache};
use crate::dataset::{binarize, Dataset};
use crate::model::Classifier;
use crate::trace::AccessTrace;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SolverRun {
    /// Label trained as the `+1` side.
    pub label: f64,
    pub output: TrainOutput,
}

#[derive(Debug, Clone)]
pub struct MultiOutputRun {
    pub runs: Vec<SolverRun>,
    /// Subtasks that could not be trained, with the reason.
    pub skipped: Vec<(f64, Error)>,
    /// Counters accumulated over all solvers.
    pub stats: CacheStats,
    /// All solvers' accesses in order.
    pub trace: AccessTrace,
}

impl MultiOutputRun {
    pub fn classifier(&self) -> Classifier {
        Classifier::OneVsAll {
            labels: self.runs.iter().map(|r| r.label).collect(),
            models: self.runs.iter().map(|r| r.output.model.clone()).collect(),
        }
    }
}

/// One-vs-all over the distinct labels of `ds`, in order of first
/// appearance.
pub fn train_multioutput(ds: &Dataset, cfg: &SolverConfig, cache: &mut KernelCache) -> Result<MultiOutputRun> {
    let labels = ds.distinct_labels();
    if labels.len() < 2 {
        return Err(Error::DegenerateLabels);
    }
    let columns = labels
        .iter()
        .map(|&l| binarize(ds.labels(), l).map(|y| (l, y)))
        .collect::<Result<Vec<_>>>()?;
    train_label_columns(ds, &columns, cfg, cache)
}

/// Train one solver per `(label, y)` column, where each `y` is a `±1`
/// vector (multi-label tasks supply one column per label). Degenerate
/// columns are skipped and reported in [`MultiOutputRun::skipped`].
pub fn train_label_columns(
    ds: &Dataset,
    columns: &[(f64, Vec<f64>)],
    cfg: &SolverConfig,
    cache: &mut KernelCache,
) -> Result<MultiOutputRun> {
    let before = cache.stats().clone();
    let trace_start = cache.trace().map_or(0, AccessTrace::len);
    let mut runs = Vec::new();
    let mut skipped = Vec::new();
    for (label, y) in columns {
        match train_binary(ds, y, cfg, cache) {
            Ok(output) => runs.push(SolverRun { label: *label, output }),
            Err(Error::DegenerateLabels) => skipped.push((*label, Error::DegenerateLabels)),
            Err(e) => return Err(e),
        }
    }
    let trace = match cache.trace() {
        Some(t) => AccessTrace::from_pairs(
            ds.len(),
            cache.config().q,
            t.events[trace_start..].iter().map(|e| (e.iteration, e.row_index)),
        ),
        None => AccessTrace::new(ds.len(), cache.config().q),
    };
    Ok(MultiOutputRun {
        runs,
        skipped,
        stats: cache.stats().delta_since(&before),
        trace,
    })
}
