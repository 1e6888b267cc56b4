#![allow(dead_code)]

use hcst_core::kernel::KernelEngine;
use hcst_core::{Dataset, KernelParams, SparseInstance};

/// Dense dataset from rows; feature `k` of a row becomes index `k + 1`, zeros
/// are left out.
pub fn dense_dataset(rows: &[Vec<f64>], labels: &[f64]) -> Dataset {
    let instances = rows
        .iter()
        .map(|r| {
            let feats = r
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(k, &v)| (k as u32 + 1, v))
                .collect();
            SparseInstance::new(feats).unwrap()
        })
        .collect();
    Dataset::new(instances, labels.to_vec()).unwrap()
}

pub fn kernel_matrix(ds: &Dataset, params: KernelParams) -> Vec<Vec<f64>> {
    let engine = KernelEngine::new(ds, params).unwrap();
    (0..ds.len()).map(|i| engine.compute_row(i).unwrap().values).collect()
}

/// `Σα − ½ Σ α_i α_j y_i y_j K_ij`, evaluated directly.
pub fn dual_objective(k: &[Vec<f64>], y: &[f64], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * k[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Euclidean projection onto `{0 ≤ α ≤ C, yᵀα = 0}`: `α = clip(v − μy)`
/// with `μ` found by bisection on the monotone map `μ ↦ yᵀα(μ)`.
pub fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |mu: f64| -> Vec<f64> { v.iter().zip(y).map(|(&vi, &yi)| (vi - mu * yi).clamp(0.0, c)).collect() };
    let g = |mu: f64| -> f64 { at(mu).iter().zip(y).map(|(a, yi)| a * yi).sum() };
    let span = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Accelerated projected gradient ascent on the dual, iterated until the
/// step falls below `tol`. Returns the maximizer.
pub fn dual_oracle(k: &[Vec<f64>], y: &[f64], c: f64, tol: f64) -> Vec<f64> {
    let n = y.len();
    // Q_ij = y_i y_j K_ij; Gershgorin bound on its largest eigenvalue
    let lip = (0..n)
        .map(|i| (0..n).map(|j| k[i][j].abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let grad = |a: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| 1.0 - y[i] * (0..n).map(|j| y[j] * k[i][j] * a[j]).sum::<f64>())
            .collect()
    };
    let mut x = vec![0.0; n];
    let mut z = x.clone();
    let mut t = 1.0f64;
    for _ in 0..2_000_000 {
        let g = grad(&z);
        let step: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi + gi / lip).collect();
        let next = project(&step, y, c);
        let moved = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        // restart momentum when the objective would decrease
        let restart = dual_objective(k, y, &next) < dual_objective(k, y, &x);
        let beta = if restart { 0.0 } else { (t - 1.0) / t_next };
        z = next.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
        x = next;
        t = if restart { 1.0 } else { t_next };
        if moved < tol && !restart {
            break;
        }
    }
    x
}

/// Small deterministic generator for test data that needs no external crate.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// `n` points in `d` dimensions with alternating labels `+1, −1, …`, the
/// positive class shifted by `shift` along the first axis.
pub fn random_balanced(rng: &mut SplitMix, n: usize, d: usize, shift: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y = if i % 2 == 0 { 1.0 } else { -1.0 };
        let mut r: Vec<f64> = (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect();
        r[0] += y * shift;
        rows.push(r);
        labels.push(y);
    }
    (rows, labels)
}
