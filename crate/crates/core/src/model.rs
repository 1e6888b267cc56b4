//! Trained models and prediction.

use alloc::vec::Vec;

use crate::dataset::{Dataset, SparseInstance};
use crate::kernel::KernelParams;

/// A binary SVM: `decision(x) = Σ coef_k K(sv_k, x) − rho`, positive side
/// labelled `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub params: KernelParams,
    pub rho: f64,
    /// Identifies each support vector; the training-set index for freshly
    /// trained models.
    pub sv_indices: Vec<usize>,
    /// `α_i y_i` per support vector, never zero.
    pub sv_coef: Vec<f64>,
    pub support_vectors: Vec<SparseInstance>,
}

impl SvmModel {
    pub fn from_solution(ds: &Dataset, params: KernelParams, alpha: &[f64], y: &[f64], rho: f64) -> Self {
        let mut model = SvmModel {
            params,
            rho,
            sv_indices: Vec::new(),
            sv_coef: Vec::new(),
            support_vectors: Vec::new(),
        };
        for (i, (&a, &yi)) in alpha.iter().zip(y).enumerate() {
            let coef = a * yi;
            if coef != 0.0 {
                model.sv_indices.push(i);
                model.sv_coef.push(coef);
                model.support_vectors.push(ds.instance(i).clone());
            }
        }
        model
    }

    pub fn n_sv(&self) -> usize {
        self.sv_coef.len()
    }

    pub fn decision_value(&self, x: &SparseInstance) -> f64 {
        let x_sq = x.dot(x);
        let sum: f64 = self
            .support_vectors
            .iter()
            .zip(&self.sv_coef)
            .map(|(sv, &coef)| coef * self.params.eval(sv, sv.dot(sv), x, x_sq))
            .sum();
        sum - self.rho
    }

    /// `+1` or `-1`; a decision value of exactly 0 maps to `+1`.
    pub fn predict_sign(&self, x: &SparseInstance) -> f64 {
        if self.decision_value(x) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// A trained classifier mapping instances to original dataset labels.
#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    /// `labels[0]` is the `+1` side, `labels[1]` the `-1` side.
    Binary { model: SvmModel, labels: [f64; 2] },
    /// One model per label, each trained label-vs-rest.
    OneVsAll { labels: Vec<f64>, models: Vec<SvmModel> },
}

impl Classifier {
    pub fn labels(&self) -> Vec<f64> {
        match self {
            Classifier::Binary { labels, .. } => labels.to_vec(),
            Classifier::OneVsAll { labels, .. } => labels.clone(),
        }
    }

    pub fn models(&self) -> &[SvmModel] {
        match self {
            Classifier::Binary { model, .. } => core::slice::from_ref(model),
            Classifier::OneVsAll { models, .. } => models,
        }
    }

    pub fn params(&self) -> KernelParams {
        self.models()[0].params
    }

    /// Predicted label; for one-vs-all the label of the model with the
    /// largest decision value (first such model on ties).
    pub fn predict(&self, x: &SparseInstance) -> f64 {
        match self {
            Classifier::Binary { model, labels } => {
                if model.predict_sign(x) > 0.0 {
                    labels[0]
                } else {
                    labels[1]
                }
            }
            Classifier::OneVsAll { labels, models } => {
                let mut best = 0;
                let mut best_val = f64::NEG_INFINITY;
                for (k, m) in models.iter().enumerate() {
                    let v = m.decision_value(x);
                    if v > best_val {
                        best = k;
                        best_val = v;
                    }
                }
                labels[best]
            }
        }
    }

    pub fn predict_all(&self, xs: &[SparseInstance]) -> Vec<f64> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}
