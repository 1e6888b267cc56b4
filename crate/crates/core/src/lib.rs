//! Kernel-row caching for batched SMO SVM training.
//!
//! The crate is `no_std` (with `alloc`). It contains everything that is pure
//! computation:
//!
//! - [`dataset`]: sparse instances and one-vs-all label views.
//! - [`kernel`]: linear, Gaussian and sigmoid kernel rows.
//! - [`cache`]: the kernel-row cache with LRU, LFU, LAT, EFU and the
//!   adaptive HCST controller that switches between EFU and LRU.
//! - [`solver`]: the batched working-set SMO trainer and one-vs-all
//!   multi-output training over a shared cache.
//! - [`trace`] and [`analytics`]: strategy-independent access traces and
//!   reuse-interval / frequency statistics over them.
//! - [`sim`]: trace replay under any policy and under Belady's offline
//!   optimum.
//!
//! Enabling the `std` feature lets row computation and cache replacement fan
//! out over OS threads. Results are identical with and without it.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod analytics;
pub mod cache;
pub mod dataset;
mod error;
pub mod kernel;
pub mod model;
mod par;
pub mod sim;
pub mod solver;
pub mod trace;

pub use cache::{
    estimate_benefit, Benefit, CacheConfig, CacheStats, HcstCounters, KernelCache, Policy, ReuseUnit, SwitchDecision,
};
pub use dataset::{binarize_labels, Dataset, SparseInstance};
pub use error::{Error, Result};
pub use kernel::{KernelEngine, KernelKind, KernelParams, KernelRow};
pub use model::{Classifier, SvmModel};
pub use solver::{train_binary, train_multioutput, SolverConfig, TrainOutput};
pub use trace::{AccessTrace, TraceEvent};
