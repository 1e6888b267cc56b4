//! Sparse training instances and label views.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A sparse feature vector. Indices are 1-based (LIBSVM convention) and
/// strictly increasing; values are finite.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseInstance {
    features: Vec<(u32, f64)>,
}

impl SparseInstance {
    pub fn new(features: Vec<(u32, f64)>) -> Result<Self> {
        let mut prev = 0u32;
        for &(idx, val) in &features {
            if idx == 0 {
                return Err(Error::InvalidInstance("feature index must be >= 1".into()));
            }
            if idx <= prev {
                return Err(Error::InvalidInstance(format!(
                    "non-increasing index {idx} after {prev}"
                )));
            }
            if !val.is_finite() {
                return Err(Error::InvalidInstance(format!("non-finite value at index {idx}")));
            }
            prev = idx;
        }
        Ok(Self { features })
    }

    pub fn features(&self) -> &[(u32, f64)] {
        &self.features
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Largest feature index, or 0 for an empty instance.
    pub fn max_index(&self) -> u32 {
        self.features.last().map_or(0, |&(i, _)| i)
    }

    /// Sparse dot product. Products are summed in ascending feature index,
    /// so `a.dot(b)` and `b.dot(a)` are bit-identical.
    pub fn dot(&self, other: &SparseInstance) -> f64 {
        let (a, b) = (&self.features, &other.features);
        let (mut i, mut j) = (0, 0);
        let mut sum = 0.0;
        while i < a.len() && j < b.len() {
            let (ia, va) = a[i];
            let (ib, vb) = b[j];
            if ia == ib {
                sum += va * vb;
                i += 1;
                j += 1;
            } else if ia < ib {
                i += 1;
            } else {
                j += 1;
            }
        }
        sum
    }
}

/// A labelled collection of sparse instances.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    instances: Vec<SparseInstance>,
    labels: Vec<f64>,
    dim: usize,
}

impl Dataset {
    /// Build a dataset; the dimension is the largest feature index seen.
    pub fn new(instances: Vec<SparseInstance>, labels: Vec<f64>) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if instances.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} instances but {} labels",
                instances.len(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|l| !l.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite label {bad}")));
        }
        let dim = instances.iter().map(|x| x.max_index() as usize).max().unwrap_or(0);
        Ok(Self { instances, labels, dim })
    }

    /// Raise the declared dimension. Lowering it below the observed maximum
    /// index is rejected.
    pub fn with_dim(mut self, dim: usize) -> Result<Self> {
        if dim < self.dim {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} is below the largest feature index {}",
                self.dim
            )));
        }
        self.dim = dim;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn instances(&self) -> &[SparseInstance] {
        &self.instances
    }

    pub fn instance(&self, i: usize) -> &SparseInstance {
        &self.instances[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Distinct labels in order of first appearance.
    pub fn distinct_labels(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &l in &self.labels {
            if !out.contains(&l) {
                out.push(l);
            }
        }
        out
    }
}

/// One-vs-all view: `+1` where the label equals `target`, `-1` elsewhere.
/// Labels are compared exactly.
pub fn binarize_labels(ds: &Dataset, target: f64) -> Result<Vec<f64>> {
    binarize(ds.labels(), target)
}

pub(crate) fn binarize(labels: &[f64], target: f64) -> Result<Vec<f64>> {
    if !labels.contains(&target) {
        return Err(Error::LabelNotPresent(target));
    }
    Ok(labels.iter().map(|&l| if l == target { 1.0 } else { -1.0 }).collect())
}
