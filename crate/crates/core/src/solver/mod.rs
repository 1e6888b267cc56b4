//! Batched working-set SMO training.
//!
//! Each outer iteration introduces `q` new violators into the working set,
//! requests their kernel rows through the cache, keeps the rows of the `W − q`
//! most recently introduced members from earlier iterations in a local
//! buffer, and solves the working-set subproblem with pair steps. Cache
//! traffic is therefore exactly the `q` new rows per iteration.

mod multi;
pub mod smo;

use alloc::format;
use alloc::vec::Vec;

pub use multi::{train_label_columns, train_multioutput, MultiOutputRun, SolverRun};

use crate::cache::{CacheStats, KernelCache, Policy};
use crate::dataset::Dataset;
use crate::kernel::{KernelEngine, KernelParams};
use crate::model::SvmModel;
use crate::trace::AccessTrace;
use crate::{Error, Result};
use smo::WorkingSet;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub params: KernelParams,
    /// New violators introduced per outer iteration (even, at least 2).
    pub q: usize,
    /// Working-set size; `None` means `2q`.
    pub working_set: Option<usize>,
    pub eps: f64,
    /// Outer iteration cap; `None` means `1000·⌈n/q⌉`.
    pub max_outer: Option<u64>,
    pub max_inner: usize,
    /// Workers for kernel-row computation.
    pub workers: usize,
}

impl SolverConfig {
    pub fn new(params: KernelParams) -> Self {
        Self {
            params,
            q: 64,
            working_set: None,
            eps: 1e-3,
            max_outer: None,
            max_inner: 10_000,
            workers: 1,
        }
    }

    pub fn with_q(mut self, q: usize) -> Self {
        self.q = q;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn working_set_size(&self) -> usize {
        self.working_set.unwrap_or(2 * self.q)
    }

    pub fn max_outer_for(&self, n: usize) -> u64 {
        self.max_outer.unwrap_or(1000 * n.div_ceil(self.q.max(1)) as u64)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.q < 2 || !self.q.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "q must be even and >= 2, got {}",
                self.q
            )));
        }
        if self.working_set_size() < self.q {
            return Err(Error::InvalidParameter(
                "working set must hold at least q instances".into(),
            ));
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::InvalidParameter(format!("eps must be > 0, got {}", self.eps)));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Everything a binary training run produces.
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub model: SvmModel,
    pub alpha: Vec<f64>,
    /// Final optimality indicators.
    pub f: Vec<f64>,
    /// Accesses issued by this run (empty if the cache records no trace).
    pub trace: AccessTrace,
    /// Cache counters accumulated during this run.
    pub stats: CacheStats,
    pub iterations: u64,
    pub converged: bool,
    /// Every `(u, l)` pair step in order.
    pub pairs: Vec<(usize, usize)>,
    pub objective: f64,
}

fn check_binary_labels(y: &[f64], n: usize) -> Result<()> {
    if y.len() != n {
        return Err(Error::InvalidParameter(format!("{} labels for {n} instances", y.len())));
    }
    if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidParameter(format!(
            "binary label must be +1 or -1, got {bad}"
        )));
    }
    if !y.contains(&1.0) || !y.contains(&-1.0) {
        return Err(Error::DegenerateLabels);
    }
    Ok(())
}

/// Train a binary SVM on labels `y ∈ {+1, −1}` with every kernel-row request
/// routed through `cache`.
///
/// The cache may be shared with earlier runs; its contents and per-item
/// counters carry over while the HCST controller restarts in EFU.
pub fn train_binary(ds: &Dataset, y: &[f64], cfg: &SolverConfig, cache: &mut KernelCache) -> Result<TrainOutput> {
    let n = ds.len();
    check_binary_labels(y, n)?;
    cfg.validate()?;
    if cache.n() != n {
        return Err(Error::InvalidParameter(format!(
            "cache covers {} items, dataset has {n}",
            cache.n()
        )));
    }
    let engine = KernelEngine::new(ds, cfg.params)?.with_workers(cfg.workers);
    let c = cfg.params.c;
    let keep = cfg.working_set_size() - cfg.q;

    cache.begin_solver();
    let stats_before = cache.stats().clone();
    let trace_start = cache.trace().map_or(0, AccessTrace::len);

    let mut alpha = alloc::vec![0.0; n];
    let mut f: Vec<f64> = y.iter().map(|&v| -v).collect();
    let mut ws_indices: Vec<usize> = Vec::new();
    let mut ws_rows: Vec<Vec<f64>> = Vec::new();
    let mut pairs = Vec::new();
    let mut iterations = 0u64;
    let mut converged = false;
    let max_outer = cfg.max_outer_for(n);

    while iterations < max_outer {
        let (lo, hi) = smo::global_extremes(&f, &alpha, y, c);
        if let (Some(f_u), Some(f_max)) = (lo, hi) {
            if smo::is_converged(f_u, f_max, cfg.eps) {
                converged = true;
                break;
            }
        } else {
            converged = true;
            break;
        }

        // Keep the `keep` most recently introduced members.
        let drop = ws_indices.len().saturating_sub(keep);
        ws_indices.drain(..drop);
        ws_rows.drain(..drop);

        let fresh = smo::select_new_violators(&f, &alpha, y, c, cfg.q, &ws_indices);
        if fresh.is_empty() {
            break;
        }
        let iteration = cache.last_iteration() + 1;
        iterations += 1;

        let lookup = cache.access_batch(&fresh, iteration)?;
        let computed = engine.compute_rows(&lookup.misses)?;
        let mut rows_by_index: Vec<(usize, Vec<f64>)> = Vec::with_capacity(fresh.len());
        for &i in &lookup.hits {
            let row = match cache.cached_row(i) {
                Some(r) => r.to_vec(),
                None => engine.compute_row(i)?.values,
            };
            rows_by_index.push((i, row));
        }
        for r in &computed {
            rows_by_index.push((r.row_index, r.values.clone()));
        }
        if cache.config().policy == Policy::None {
            cache.insert_batch_elided();
        } else {
            cache.insert_batch(computed)?;
        }
        // Working-set order follows the selection order.
        for &i in &fresh {
            let k = rows_by_index
                .iter()
                .position(|(j, _)| *j == i)
                .expect("every selected row was fetched");
            let (_, row) = rows_by_index.swap_remove(k);
            ws_indices.push(i);
            ws_rows.push(row);
        }

        let ws = WorkingSet {
            indices: &ws_indices,
            rows: &ws_rows,
        };
        smo::solve_working_set(ws, &mut alpha, &mut f, y, c, cfg.eps, cfg.max_inner, &mut pairs);
        cache.finish_iteration();
    }

    let rho = smo::compute_rho(&f, &alpha, y, c);
    let model = SvmModel::from_solution(ds, cfg.params, &alpha, y, rho);
    let trace = match cache.trace() {
        Some(t) => AccessTrace::from_pairs(
            n,
            cache.config().q,
            t.events[trace_start..].iter().map(|e| (e.iteration, e.row_index)),
        ),
        None => AccessTrace::new(n, cache.config().q),
    };
    let objective = smo::objective_from_indicators(&alpha, y, &f);
    Ok(TrainOutput {
        model,
        alpha,
        f,
        trace,
        stats: cache.stats().delta_since(&stats_before),
        iterations,
        converged,
        pairs,
        objective,
    })
}
