//! Stiff-string inharmonicity: partials at `f_n = n * f0 * sqrt(1 + B n^2)`.
//!
//! The model is fitted to the consecutive differences between partials:
//! `d_n = f_{n+1} - f_n = f0 * ((n+1) * sqrt(1 + B (n+1)^2) - n * sqrt(1 + B n^2))`.
//! For a fixed `B` the best `f0` is closed-form, so the fit reduces to a
//! one-dimensional search over `B >= 0`.

use crate::error::{Error, Result};
use crate::spectrum::PartialFrame;
use crate::stats::median;

/// Upper bound of the coefficient search. Real strings sit well below this
/// (piano bass strings are on the order of 1e-4).
const B_MAX: f64 = 0.02;

/// A fit whose residual exceeds this fraction of the median difference has
/// not converged on anything meaningful.
const DIVERGENCE_FRACTION: f64 = 0.2;

/// Difference between consecutive model partials `n+1` and `n` (`n >= 1`).
pub fn piano_difference_model(n: u32, f0: f64, b: f64) -> f64 {
    assert!(n >= 1, "harmonic index starts at 1");
    let n = n as f64;
    let next = n + 1.0;
    f0 * (next * (1.0 + b * next * next).sqrt() - n * (1.0 + b * n * n).sqrt())
}

/// Result of fitting the stiff-string model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct InharmonicityFit {
    /// Dimensionless inharmonicity coefficient, `>= 0`.
    pub b: f64,
    pub f0_hz: f64,
    /// RMS of the difference residuals in Hz.
    pub residual_rms_hz: f64,
}

/// Least-squares fit of `(f0, B)` to a frame's consecutive differences.
///
/// Partials are taken as consecutive harmonics 1..N of the model (the
/// expected input is a cleanly tracked single tone). Requires at least six
/// partials.
pub fn fit_inharmonicity_coefficient(frame: &PartialFrame) -> Result<InharmonicityFit> {
    if frame.partials.len() < 6 {
        return Err(Error::TooFewPartials {
            need: 6,
            got: frame.partials.len(),
        });
    }
    let diffs = frame.diffs();

    // model spacing per unit f0 for each difference index
    let shape = |b: f64| -> Vec<f64> {
        (1..=diffs.len() as u32)
            .map(|n| piano_difference_model(n, 1.0, b))
            .collect()
    };

    // closed-form f0 given B, and the resulting sum of squared residuals
    let evaluate = |b: f64| -> (f64, f64) {
        let g = shape(b);
        let num: f64 = diffs.iter().zip(&g).map(|(d, g)| d * g).sum();
        let den: f64 = g.iter().map(|g| g * g).sum();
        let f0 = (num / den).max(0.0);
        let sse: f64 = diffs
            .iter()
            .zip(&g)
            .map(|(d, g)| {
                let r = d - f0 * g;
                r * r
            })
            .sum();
        (sse, f0)
    };

    // coarse scan: exact zero plus a geometric ladder up to B_MAX
    let mut candidates = vec![0.0];
    let mut b = 1e-7;
    while b <= B_MAX {
        candidates.push(b);
        b *= 1.12;
    }
    let mut best_idx = 0;
    let mut best_sse = f64::INFINITY;
    for (i, &b) in candidates.iter().enumerate() {
        let (sse, _) = evaluate(b);
        if sse < best_sse {
            best_sse = sse;
            best_idx = i;
        }
    }

    // golden-section refinement around the best candidate
    let lo = if best_idx == 0 {
        0.0
    } else {
        candidates[best_idx - 1]
    };
    let hi = candidates[(best_idx + 1).min(candidates.len() - 1)].max(lo + 1e-12);
    const PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut z) = (lo, hi);
    let mut c = z - PHI * (z - a);
    let mut d = a + PHI * (z - a);
    let (mut fc, mut fd) = (evaluate(c).0, evaluate(d).0);
    for _ in 0..80 {
        if fc < fd {
            z = d;
            d = c;
            fd = fc;
            c = z - PHI * (z - a);
            fc = evaluate(c).0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + PHI * (z - a);
            fd = evaluate(d).0;
        }
    }
    let b_fit = (0.5 * (a + z)).max(0.0);
    let (sse, f0) = evaluate(b_fit);
    let residual_rms_hz = (sse / diffs.len() as f64).sqrt();

    let scale = median(&diffs).unwrap_or(0.0).abs();
    if !residual_rms_hz.is_finite() || f0 <= 0.0 || residual_rms_hz > DIVERGENCE_FRACTION * scale {
        return Err(Error::FitDiverged { residual_rms_hz });
    }

    Ok(InharmonicityFit {
        b: b_fit,
        f0_hz: f0,
        residual_rms_hz,
    })
}
