use alloc::format;

use crate::{Error, Result};

/// Analytic time budget of caching, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Benefit {
    /// Kernel computation avoided by hits.
    pub saved: f64,
    /// Copying admitted rows into the cache.
    pub cost: f64,
    /// `saved - cost`; negative when caching does not pay off.
    pub net: f64,
}

/// Benefit of caching with `hits` hits and `admitted` row copies on a
/// dataset of `n` instances in `d` dimensions, given a compute rate of
/// `flops` floating point operations per second and a copy bandwidth of
/// `bandwidth` bytes per second (4-byte kernel values).
///
/// One row costs `(2d - 1)·n` flops to compute and `4n` bytes to copy.
pub fn estimate_benefit(hits: u64, admitted: u64, n: u64, d: u64, flops: f64, bandwidth: f64) -> Result<Benefit> {
    if flops.is_nan() || flops <= 0.0 || bandwidth.is_nan() || bandwidth <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "flops and bandwidth must be > 0, got {flops} and {bandwidth}"
        )));
    }
    let row_flops = (2.0 * d as f64 - 1.0) * n as f64;
    let saved = hits as f64 * row_flops / flops;
    let cost = 4.0 * admitted as f64 * n as f64 / bandwidth;
    Ok(Benefit {
        saved,
        cost,
        net: saved - cost,
    })
}
