//! Seeded synthetic access traces.
//!
//! Every generator emits one access per iteration (`q = 1`), so reuse
//! intervals in iterations equal distances in the access sequence.

use hcst_core::{AccessTrace, Error as CoreError};
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;

use crate::Error;

fn zipf(items: usize, exponent: f64) -> Result<Zipf<f64>, Error> {
    if items == 0 {
        return Err(CoreError::InvalidParameter("item count must be >= 1".into()).into());
    }
    Zipf::new(items as f64, exponent)
        .map_err(|e| CoreError::InvalidParameter(format!("zipf exponent {exponent}: {e}")).into())
}

/// `accesses` i.i.d. draws from Zipf(`exponent`) over `items` items; item
/// `k` (0-based) has rank `k + 1`.
pub fn zipf_trace(items: usize, accesses: usize, exponent: f64, seed: u64) -> Result<AccessTrace, Error> {
    let dist = zipf(items, exponent)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..accesses).map(|_| dist.sample(&mut rng) as usize - 1);
    Ok(AccessTrace::sequential(items, rows))
}

/// Probability mass of the `top` most popular items under Zipf(`exponent`)
/// over `items` items.
pub fn zipf_top_mass(items: usize, exponent: f64, top: usize) -> f64 {
    let weights: Vec<f64> = (1..=items).map(|k| (k as f64).powf(-exponent)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter().take(top).sum::<f64>() / total
}

/// Layout of a two-phase trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhase {
    pub items: usize,
    /// Cache capacity the loop is sized against.
    pub capacity: usize,
    /// Length of the frequency-skewed phase.
    pub phase_a: usize,
    /// Passes over the loop in the second phase.
    pub cycles: usize,
    pub exponent: f64,
    pub seed: u64,
}

impl TwoPhase {
    /// Items in the loop: `0.8 · capacity`, at least 1.
    pub fn loop_len(&self) -> usize {
        ((self.capacity as f64 * 0.8).round() as usize).max(1)
    }
}

/// Phase A draws i.i.d. from Zipf over all items; phase B cycles over the
/// `0.8·s` least popular items, so every reuse interval there is below
/// the capacity.
pub fn two_phase_trace(cfg: TwoPhase) -> Result<AccessTrace, Error> {
    let len = cfg.loop_len();
    if len > cfg.items {
        return Err(
            CoreError::InvalidParameter(format!("loop of {len} items does not fit in {} items", cfg.items)).into(),
        );
    }
    let dist = zipf(cfg.items, cfg.exponent)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let first = cfg.items - len;
    let mut rows: Vec<usize> = (0..cfg.phase_a).map(|_| dist.sample(&mut rng) as usize - 1).collect();
    rows.extend((0..cfg.cycles).flat_map(|_| first..cfg.items));
    Ok(AccessTrace::sequential(cfg.items, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zipf_is_seeded_and_in_range() {
        let a = zipf_trace(100, 1000, 1.2, 7).unwrap();
        assert_eq!(a, zipf_trace(100, 1000, 1.2, 7).unwrap());
        assert_ne!(a, zipf_trace(100, 1000, 1.2, 8).unwrap());
        assert_eq!(a.len(), 1000);
        assert_eq!(a.total_iterations, 1000);
        a.validate().unwrap();
        let f = a.frequencies();
        assert!(f[0] > f[50]);
    }

    #[test]
    fn top_mass() {
        assert!((zipf_top_mass(10, 1.0, 10) - 1.0).abs() < 1e-15);
        // harmonic numbers: H_1 / H_2 = 1 / 1.5
        assert!((zipf_top_mass(2, 1.0, 1) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn two_phase_layout() {
        let cfg = TwoPhase {
            items: 100,
            capacity: 10,
            phase_a: 50,
            cycles: 3,
            exponent: 1.2,
            seed: 1,
        };
        let t = two_phase_trace(cfg).unwrap();
        assert_eq!(t.len(), 50 + 3 * 8);
        let tail: Vec<usize> = t.events[50..58].iter().map(|e| e.row_index).collect();
        assert_eq!(tail, (92..100).collect::<Vec<_>>());
        t.validate().unwrap();
        assert!(two_phase_trace(TwoPhase { items: 5, ..cfg }).is_err());
    }
}
