//! Regular-grid fitting of partial frequencies and least-deviating-series
//! fundamental estimation.
//!
//! The grid model is `f_k ~= n_k * d + s` over integer harmonic indices:
//! `d` is the common spacing, `s` the shift. `s` is reported modulo `d`
//! (a shift larger than the spacing is indistinguishable from a smaller
//! one with all indices moved up by one).

use crate::error::{Error, Result};
use crate::midi::cents_between;
use crate::spectrum::PartialFrame;
use crate::stats::{median, safe_cents, weighted_median};

/// Fits with an RMS residual above this are rejected as "no regular grid".
pub const GRID_FAIL_RMS_CENTS: f64 = 50.0;

/// Highest harmonic index considered by the least-deviating-series search.
/// Caps the subharmonic degeneracy where an arbitrarily small f0 places a
/// harmonic within half a spacing of every partial.
pub const MAX_HARMONIC_INDEX: f64 = 32.0;

/// Candidate fundamentals whose cost is within this of the minimum count as
/// ties; the largest such f0 wins (GCD semantics for exact-subharmonic fits).
const F0_TIE_CENTS: f64 = 0.05;

/// A fitted regular grid `f ~= n * d + s`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GridFit {
    /// Common spacing in Hz.
    pub d_hz: f64,
    /// Shift in Hz, normalized into `[0, d)`.
    pub s_hz: f64,
    /// RMS deviation of the partials from the fitted grid, in cents.
    pub rms_cents: f64,
}

/// Result of the least-deviating harmonic series search.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct F0Estimate {
    pub f0_hz: f64,
    /// Power-weighted RMS cent deviation of the partials from the series.
    pub deviation_cents: f64,
}

/// Circular distance between two shifts on a grid of spacing `d`.
pub fn shift_distance(a: f64, b: f64, d: f64) -> f64 {
    let diff = (a - b).rem_euclid(d);
    diff.min(d - diff)
}

/// Least-squares grid fit to a frame's partials, seeded by the energy-
/// weighted median of the consecutive differences.
///
/// Requires at least three partials; errors with `NoRegularGrid` when the
/// fit residual exceeds [`GRID_FAIL_RMS_CENTS`].
pub fn estimate_shift(frame: &PartialFrame) -> Result<GridFit> {
    if frame.partials.len() < 3 {
        return Err(Error::TooFewPartials {
            need: 3,
            got: frame.partials.len(),
        });
    }
    let freqs: Vec<f64> = frame.partials.iter().map(|p| p.freq_hz).collect();
    let diffs = frame.diffs();
    let weights: Vec<f64> = frame
        .partials
        .windows(2)
        .map(|p| p[0].power + p[1].power)
        .collect();
    let seed = weighted_median(&diffs, &weights).or_else(|| median(&diffs));

    let fit = fit_grid(&freqs, seed).ok_or(Error::NoRegularGrid {
        rms_cents: f64::INFINITY,
        max_cents: GRID_FAIL_RMS_CENTS,
    })?;
    if fit.rms_cents > GRID_FAIL_RMS_CENTS {
        return Err(Error::NoRegularGrid {
            rms_cents: fit.rms_cents,
            max_cents: GRID_FAIL_RMS_CENTS,
        });
    }
    Ok(fit)
}

/// Core grid fit used by both [`estimate_shift`] and the partial tracker.
///
/// Indices are assigned greedily from the seeded spacing (consecutive
/// differences decide the index step), then `(d, s)` is least-squares
/// fitted and the assignment refined once.
pub fn fit_grid(freqs: &[f64], seed_d: Option<f64>) -> Option<GridFit> {
    if freqs.len() < 3 {
        return None;
    }
    let seed = seed_d.filter(|d| *d > 0.0).or_else(|| {
        let diffs: Vec<f64> = freqs.windows(2).map(|w| w[1] - w[0]).collect();
        median(&diffs).filter(|d| *d > 0.0)
    })?;

    let indices = assign_indices(freqs, seed, 0.0);
    let (mut d, mut s) = regress(freqs, &indices)?;
    // one re-assignment pass from the fitted grid
    if d > 0.0 {
        let refined = assign_indices(freqs, d, s);
        if let Some((d2, s2)) = regress(freqs, &refined) {
            if d2 > 0.0 {
                let better = grid_rms(freqs, &refined, d2, s2)
                    <= grid_rms(freqs, &indices, d, s);
                if better {
                    d = d2;
                    s = s2;
                    return Some(normalize(freqs, &refined, d, s));
                }
            }
        }
        return Some(normalize(freqs, &indices, d, s));
    }
    None
}

/// Greedy index assignment: the first index comes from the lowest partial's
/// position on the grid, subsequent steps from the consecutive differences.
fn assign_indices(freqs: &[f64], d: f64, s: f64) -> Vec<f64> {
    let mut indices = Vec::with_capacity(freqs.len());
    let first = (((freqs[0] - s) / d).round()).max(1.0);
    indices.push(first);
    for w in freqs.windows(2) {
        let step = (((w[1] - w[0]) / d).round()).max(1.0);
        let prev = *indices.last().unwrap();
        indices.push(prev + step);
    }
    indices
}

/// Least-squares line through `(n_k, f_k)`.
fn regress(freqs: &[f64], indices: &[f64]) -> Option<(f64, f64)> {
    let n = freqs.len() as f64;
    let mean_n = indices.iter().sum::<f64>() / n;
    let mean_f = freqs.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (&i, &f) in indices.iter().zip(freqs) {
        cov += (i - mean_n) * (f - mean_f);
        var += (i - mean_n) * (i - mean_n);
    }
    if var <= 0.0 {
        return None;
    }
    let d = cov / var;
    let s = mean_f - d * mean_n;
    Some((d, s))
}

fn grid_rms(freqs: &[f64], indices: &[f64], d: f64, s: f64) -> f64 {
    let sum_sq: f64 = freqs
        .iter()
        .zip(indices)
        .map(|(&f, &n)| {
            let predicted = n * d + s;
            let dev = safe_cents(predicted, f);
            if dev.is_finite() {
                dev * dev
            } else {
                1e12
            }
        })
        .sum();
    (sum_sq / freqs.len() as f64).sqrt()
}

fn normalize(freqs: &[f64], indices: &[f64], d: f64, s: f64) -> GridFit {
    let rms_cents = grid_rms(freqs, indices, d, s);
    let s_hz = if d > 0.0 { s.rem_euclid(d) } else { s };
    GridFit {
        d_hz: d,
        s_hz,
        rms_cents,
    }
}

/// Grid positions `n*d + s` and the deviation of each observed frequency
/// from its nearest position, used for gating peaks against a fitted grid.
pub fn deviation_from_grid(freq: f64, d: f64, s: f64) -> f64 {
    if d <= 0.0 {
        return f64::INFINITY;
    }
    let n = (((freq - s) / d).round()).max(1.0);
    let predicted = n * d + s;
    safe_cents(predicted, freq).abs()
}

/// Fundamental of the least-deviating harmonic series.
///
/// Searches candidate fundamentals in `[f_lowest/8, f_lowest*1.5]`,
/// minimizing the power-weighted RMS cent deviation of each partial from
/// its nearest harmonic (indices capped at [`MAX_HARMONIC_INDEX`]). Exact
/// subharmonic ties resolve to the largest fundamental.
pub fn estimate_f0_least_deviating(frame: &PartialFrame) -> Result<F0Estimate> {
    if frame.partials.len() < 2 {
        return Err(Error::TooFewPartials {
            need: 2,
            got: frame.partials.len(),
        });
    }
    let freqs: Vec<f64> = frame.partials.iter().map(|p| p.freq_hz).collect();
    let powers: Vec<f64> = frame.partials.iter().map(|p| p.power).collect();
    let total_power: f64 = powers.iter().sum();
    let powers: Vec<f64> = if total_power > 0.0 {
        powers
    } else {
        vec![1.0; freqs.len()]
    };

    let f_low = freqs[0];
    let lo = f_low / 8.0;
    let hi = f_low * 1.5;

    let cost = |f0: f64| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (&f, &w) in freqs.iter().zip(&powers) {
            let n = (f / f0).round().clamp(1.0, MAX_HARMONIC_INDEX);
            let dev = cents_between(n * f0, f);
            num += w * dev * dev;
            den += w;
        }
        (num / den).sqrt()
    };

    // coarse scan at ~0.4-cent resolution
    let step = 2f64.powf(0.4 / 1200.0);
    let mut best_f0 = lo;
    let mut best_cost = f64::INFINITY;
    let mut f0 = lo;
    while f0 <= hi {
        let c = cost(f0);
        if c < best_cost {
            best_cost = c;
            best_f0 = f0;
        }
        f0 *= step;
    }

    let (mut f_star, mut c_star) = refine_minimum(&cost, best_f0 / step, best_f0 * step);

    // exact-subharmonic ties: prefer the largest fundamental that fits as well
    let mut k = 2.0;
    while k * f_star <= hi {
        let center = k * f_star;
        let (f_k, c_k) = refine_minimum(&cost, center * 0.99, center * 1.01);
        if c_k <= c_star + F0_TIE_CENTS && f_k > f_star {
            f_star = f_k;
            c_star = c_k;
            k = 2.0;
            continue;
        }
        k += 1.0;
    }

    Ok(F0Estimate {
        f0_hz: f_star,
        deviation_cents: c_star,
    })
}

/// Golden-section minimization over `[lo, hi]`.
fn refine_minimum(cost: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    const PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - PHI * (b - a);
    let mut d = a + PHI * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - PHI * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + PHI * (b - a);
            fd = cost(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, cost(mid))
}
