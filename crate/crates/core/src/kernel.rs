//! Kernel rows.
//!
//! A kernel row for instance `i` holds `K(x_i, x_j)` for every `j` in the
//! dataset. Every entry is produced by the same scalar routine with a fixed
//! summation order, so a row is bit-identical no matter how a batch is split
//! across workers or whether it came out of the cache.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dataset::{Dataset, SparseInstance};
use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Linear,
    Gaussian,
    Sigmoid,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Gaussian => "gaussian",
            KernelKind::Sigmoid => "sigmoid",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    /// Accepts names and the LIBSVM numeric codes (0 linear, 2 rbf,
    /// 3 sigmoid).
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "0" => Ok(KernelKind::Linear),
            "gaussian" | "rbf" | "2" => Ok(KernelKind::Gaussian),
            "sigmoid" | "3" => Ok(KernelKind::Sigmoid),
            other => Err(Error::InvalidParameter(format!("unknown kernel '{other}'"))),
        }
    }
}

/// Kernel function parameters plus the regularization constant `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub kind: KernelKind,
    pub gamma: f64,
    pub coef0: f64,
    pub c: f64,
}

impl KernelParams {
    pub fn new(kind: KernelKind, gamma: f64, coef0: f64, c: f64) -> Result<Self> {
        let p = Self { kind, gamma, coef0, c };
        p.validate()?;
        Ok(p)
    }

    pub fn linear(c: f64) -> Result<Self> {
        Self::new(KernelKind::Linear, 1.0, 0.0, c)
    }

    pub fn gaussian(gamma: f64, c: f64) -> Result<Self> {
        Self::new(KernelKind::Gaussian, gamma, 0.0, c)
    }

    pub fn sigmoid(gamma: f64, coef0: f64, c: f64) -> Result<Self> {
        Self::new(KernelKind::Sigmoid, gamma, coef0, c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("C must be > 0, got {}", self.c)));
        }
        if self.kind != KernelKind::Linear && !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if !self.coef0.is_finite() {
            return Err(Error::InvalidParameter("coef0 must be finite".into()));
        }
        Ok(())
    }

    /// `K(a, b)` given both squared norms (only the Gaussian kernel uses them).
    #[inline]
    pub fn eval(&self, a: &SparseInstance, a_sq: f64, b: &SparseInstance, b_sq: f64) -> f64 {
        let dot = a.dot(b);
        match self.kind {
            KernelKind::Linear => dot,
            KernelKind::Gaussian => libm::exp(-self.gamma * (a_sq + b_sq - 2.0 * dot)),
            KernelKind::Sigmoid => libm::tanh(self.gamma * dot + self.coef0),
        }
    }
}

/// One row of the kernel matrix: `values[j] = K(x_row, x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelRow {
    pub row_index: usize,
    pub values: Vec<f64>,
}

/// `||x_i||²` for every instance.
pub fn precompute_self_dots(ds: &Dataset) -> Vec<f64> {
    ds.instances().iter().map(|x| x.dot(x)).collect()
}

/// Computes kernel rows against a fixed dataset.
#[derive(Debug, Clone)]
pub struct KernelEngine<'a> {
    ds: &'a Dataset,
    params: KernelParams,
    self_dots: Vec<f64>,
    workers: usize,
}

impl<'a> KernelEngine<'a> {
    pub fn new(ds: &'a Dataset, params: KernelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            ds,
            params,
            self_dots: precompute_self_dots(ds),
            workers: 1,
        })
    }

    /// Number of workers used by [`compute_rows`](Self::compute_rows).
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.ds
    }

    pub fn self_dots(&self) -> &[f64] {
        &self.self_dots
    }

    pub fn n(&self) -> usize {
        self.ds.len()
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.params.eval(
            self.ds.instance(i),
            self.self_dots[i],
            self.ds.instance(j),
            self.self_dots[j],
        )
    }

    pub fn compute_row(&self, i: usize) -> Result<KernelRow> {
        self.check(i)?;
        Ok(self.row_unchecked(i))
    }

    fn row_unchecked(&self, i: usize) -> KernelRow {
        let xi = self.ds.instance(i);
        let sq = self.self_dots[i];
        let values = self
            .ds
            .instances()
            .iter()
            .zip(&self.self_dots)
            .map(|(xj, &sqj)| self.params.eval(xi, sq, xj, sqj))
            .collect();
        KernelRow { row_index: i, values }
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n(),
            });
        }
        Ok(())
    }

    /// One row per requested index, in request order. With more than one
    /// worker the indices are split into contiguous chunks.
    pub fn compute_rows(&self, indices: &[usize]) -> Result<Vec<KernelRow>> {
        for &i in indices {
            self.check(i)?;
        }
        let workers = self.workers.min(indices.len()).max(1);
        if workers == 1 {
            return Ok(indices.iter().map(|&i| self.row_unchecked(i)).collect());
        }
        let chunks: Vec<&[usize]> = par::split_ranges(indices.len(), workers)
            .into_iter()
            .map(|r| &indices[r])
            .collect();
        let parts = par::map_tasks(chunks, |chunk| {
            chunk.iter().map(|&i| self.row_unchecked(i)).collect::<Vec<_>>()
        });
        Ok(parts.into_iter().flatten().collect())
    }
}
