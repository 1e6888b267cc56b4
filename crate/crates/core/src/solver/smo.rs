//! SMO building blocks.
//!
//! Notation: `f[i] = Σ_j α_j y_j K(x_i, x_j) − y_i` is the optimality
//! indicator of instance `i`. An instance is in the *upper* set when
//! `y_i α_i` can still grow and in the *lower* set when it can still shrink.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Candidates whose curvature is at or below this are never paired.
pub const MIN_CURVATURE: f64 = 1e-12;

#[inline]
pub fn in_upper(y: f64, alpha: f64, c: f64) -> bool {
    (y > 0.0 && alpha < c) || (y < 0.0 && alpha > 0.0)
}

#[inline]
pub fn in_lower(y: f64, alpha: f64, c: f64) -> bool {
    (y > 0.0 && alpha > 0.0) || (y < 0.0 && alpha < c)
}

/// Rows of the working set: `rows[k]` is the kernel row of `indices[k]`.
#[derive(Debug, Clone, Copy)]
pub struct WorkingSet<'a> {
    pub indices: &'a [usize],
    pub rows: &'a [Vec<f64>],
}

/// Result of [`select_extreme_pair`]. `u` and `l` are positions in the
/// working set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremePair {
    pub u: usize,
    /// `None` when no lower candidate has `f > f_u` (local optimum).
    pub l: Option<usize>,
    pub f_u: f64,
    /// Largest `f` over the lower candidates, `-inf` if there are none.
    pub f_max: f64,
    /// Curvature `K_uu + K_ll − 2K_ul` of the chosen pair.
    pub eta: f64,
}

/// Pick `u = argmin f` over upper candidates and
/// `l = argmax (f_u − f_i)²/η_i` over lower candidates with `f_i > f_u`.
/// Returns `None` if no candidate is in the upper set. Ties go to the
/// earlier position.
pub fn select_extreme_pair(ws: WorkingSet<'_>, f: &[f64], alpha: &[f64], y: &[f64], c: f64) -> Option<ExtremePair> {
    let mut u: Option<usize> = None;
    for (k, &i) in ws.indices.iter().enumerate() {
        if in_upper(y[i], alpha[i], c) && u.is_none_or(|b| f[i] < f[ws.indices[b]]) {
            u = Some(k);
        }
    }
    let u = u?;
    let iu = ws.indices[u];
    let f_u = f[iu];
    let row_u = &ws.rows[u];
    let k_uu = row_u[iu];

    let mut f_max = f64::NEG_INFINITY;
    let mut best: Option<(usize, f64, f64)> = None;
    for (k, &i) in ws.indices.iter().enumerate() {
        if !in_lower(y[i], alpha[i], c) {
            continue;
        }
        f_max = f_max.max(f[i]);
        if f[i] <= f_u {
            continue;
        }
        let eta = k_uu + ws.rows[k][i] - 2.0 * row_u[i];
        if eta <= MIN_CURVATURE {
            continue;
        }
        let d = f_u - f[i];
        let gain = d * d / eta;
        if best.is_none_or(|(_, g, _)| gain > g) {
            best = Some((k, gain, eta));
        }
    }
    Some(ExtremePair {
        u,
        l: best.map(|b| b.0),
        f_u,
        f_max,
        eta: best.map_or(0.0, |b| b.2),
    })
}

/// New `(α_u, α_l)` after one pair step, clipped into `[0, C]` with
/// `y_u α_u + y_l α_l` preserved.
#[allow(clippy::too_many_arguments)]
pub fn update_alpha_pair(
    alpha_u: f64,
    alpha_l: f64,
    y_u: f64,
    y_l: f64,
    f_u: f64,
    f_l: f64,
    eta: f64,
    c: f64,
) -> Result<(f64, f64)> {
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::NonPositiveCurvature);
    }
    let new_l = (alpha_l + y_l * (f_u - f_l) / eta).clamp(0.0, c);
    let mut new_u = alpha_u + y_l * y_u * (alpha_l - new_l);
    let mut new_l = new_l;
    if !(0.0..=c).contains(&new_u) {
        new_u = new_u.clamp(0.0, c);
        new_l = (alpha_l + y_u * y_l * (alpha_u - new_u)).clamp(0.0, c);
    }
    Ok((new_u, new_l))
}

/// `f_i += Δα_u y_u K(u, i) + Δα_l y_l K(l, i)` for every `i`.
pub fn update_indicators(f: &mut [f64], step_u: f64, row_u: &[f64], step_l: f64, row_l: &[f64]) {
    for ((fi, &ku), &kl) in f.iter_mut().zip(row_u).zip(row_l) {
        *fi += step_u * ku + step_l * kl;
    }
}

/// The optimality condition `f_u ≥ f_max` relaxed by `eps`.
#[inline]
pub fn is_converged(f_u: f64, f_max: f64, eps: f64) -> bool {
    f_u >= f_max - eps
}

/// `(min f over upper, max f over lower)` across all instances.
pub fn global_extremes(f: &[f64], alpha: &[f64], y: &[f64], c: f64) -> (Option<f64>, Option<f64>) {
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = None;
    for i in 0..f.len() {
        if in_upper(y[i], alpha[i], c) {
            lo = Some(lo.map_or(f[i], |v: f64| v.min(f[i])));
        }
        if in_lower(y[i], alpha[i], c) {
            hi = Some(hi.map_or(f[i], |v: f64| v.max(f[i])));
        }
    }
    (lo, hi)
}

/// Up to `q/2` upper instances with the smallest `f` followed by up to `q/2`
/// lower instances with the largest `f`, skipping `exclude`. Ties go to the
/// smaller index; an instance picked on the upper side is not picked again.
pub fn select_new_violators(f: &[f64], alpha: &[f64], y: &[f64], c: f64, q: usize, exclude: &[usize]) -> Vec<usize> {
    let n = f.len();
    let mut taken = alloc::vec![false; n];
    for &i in exclude {
        taken[i] = true;
    }
    let half = q / 2;

    let mut upper: Vec<usize> = (0..n).filter(|&i| !taken[i] && in_upper(y[i], alpha[i], c)).collect();
    upper.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    let mut out: Vec<usize> = upper.into_iter().take(half).collect();
    for &i in &out {
        taken[i] = true;
    }

    let mut lower: Vec<usize> = (0..n).filter(|&i| !taken[i] && in_lower(y[i], alpha[i], c)).collect();
    lower.sort_by(|&a, &b| f[b].total_cmp(&f[a]).then(a.cmp(&b)));
    out.extend(lower.into_iter().take(half));
    out
}

/// Outcome of [`solve_working_set`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InnerOutcome {
    pub updates: usize,
    /// `false` when `max_inner` steps were taken without converging.
    pub converged: bool,
}

/// Repeat pair steps restricted to the working set until it satisfies the
/// optimality condition within `eps`. `f` is kept current for all
/// instances. Each `(u, l)` pair (instance indices) is appended to `pairs`.
#[allow(clippy::too_many_arguments)]
pub fn solve_working_set(
    ws: WorkingSet<'_>,
    alpha: &mut [f64],
    f: &mut [f64],
    y: &[f64],
    c: f64,
    eps: f64,
    max_inner: usize,
    pairs: &mut Vec<(usize, usize)>,
) -> InnerOutcome {
    let mut updates = 0;
    while updates < max_inner {
        let Some(pair) = select_extreme_pair(ws, f, alpha, y, c) else {
            return InnerOutcome {
                updates,
                converged: true,
            };
        };
        if is_converged(pair.f_u, pair.f_max, eps) {
            return InnerOutcome {
                updates,
                converged: true,
            };
        }
        let Some(l) = pair.l else {
            return InnerOutcome {
                updates,
                converged: true,
            };
        };
        let (iu, il) = (ws.indices[pair.u], ws.indices[l]);
        let (new_u, new_l) = update_alpha_pair(alpha[iu], alpha[il], y[iu], y[il], f[iu], f[il], pair.eta, c)
            .expect("candidates with non-positive curvature are skipped");
        let step_u = (new_u - alpha[iu]) * y[iu];
        let step_l = (new_l - alpha[il]) * y[il];
        alpha[iu] = new_u;
        alpha[il] = new_l;
        update_indicators(f, step_u, &ws.rows[pair.u], step_l, &ws.rows[l]);
        pairs.push((iu, il));
        updates += 1;
    }
    InnerOutcome {
        updates,
        converged: false,
    }
}

/// Bias at the converged state: midpoint of `min f` over upper and `max f`
/// over lower.
pub fn compute_rho(f: &[f64], alpha: &[f64], y: &[f64], c: f64) -> f64 {
    match global_extremes(f, alpha, y, c) {
        (Some(a), Some(b)) => (a + b) / 2.0,
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0.0,
    }
}

/// Dual objective `Σα − ½ αᵀQα`, recovered from the indicators through
/// `(Qα)_i = y_i (f_i + y_i)`.
pub fn objective_from_indicators(alpha: &[f64], y: &[f64], f: &[f64]) -> f64 {
    alpha
        .iter()
        .zip(y)
        .zip(f)
        .map(|((&a, &yi), &fi)| a - 0.5 * a * yi * (fi + yi))
        .sum()
}
