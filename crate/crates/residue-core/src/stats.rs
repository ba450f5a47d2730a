//! Consecutive-partial difference statistics and weighted robust estimators.
//!
//! The central statistic is the energy-weighted median of the frequency
//! differences between consecutive partials; each difference is weighted by
//! the sum of the two adjacent partials' powers.

use crate::error::{Error, Result};
use crate::midi::cents_between;
use crate::spectrum::PartialFrame;

/// Default threshold (cents) above which the first difference counts as an
/// outlier relative to the remaining ("overtone") differences.
pub const DEFAULT_OUTLIER_CENTS: f64 = 40.0;

/// Lower weighted median: the smallest value at which the cumulative weight
/// reaches half the total. `None` on empty input or non-positive total weight.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Option<f64> {
    assert_eq!(values.len(), weights.len());
    if values.is_empty() {
        return None;
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut cum = 0.0;
    for &i in &order {
        cum += weights[i];
        if cum >= total / 2.0 {
            return Some(values[i]);
        }
    }
    Some(values[order[order.len() - 1]])
}

pub fn weighted_mean(values: &[f64], weights: &[f64]) -> Option<f64> {
    assert_eq!(values.len(), weights.len());
    let total: f64 = weights.iter().sum();
    if values.is_empty() || !(total > 0.0) {
        return None;
    }
    Some(
        values
            .iter()
            .zip(weights)
            .map(|(v, w)| v * w)
            .sum::<f64>()
            / total,
    )
}

/// Plain (unweighted) lower median.
pub fn median(values: &[f64]) -> Option<f64> {
    let weights = vec![1.0; values.len()];
    weighted_median(values, &weights)
}

/// Statistics over the consecutive frequency differences of one frame.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DiffStats {
    /// `f[i+1] - f[i]` in Hz.
    pub diffs: Vec<f64>,
    /// Per-difference weight: sum of the two adjacent partials' powers.
    pub weights: Vec<f64>,
    pub weighted_median_hz: f64,
    pub weighted_mean_hz: f64,
    /// Median absolute deviation of the differences from the weighted
    /// median, expressed in cents.
    pub mad_cents: f64,
    /// True when the first difference deviates from the median of the
    /// remaining differences by more than the outlier threshold.
    pub first_diff_outlier: bool,
    /// Signed deviation of the first difference from the overtone median,
    /// in cents.
    pub first_diff_outlier_cents: f64,
}

/// Difference statistics with the default outlier threshold.
pub fn diff_stats(frame: &PartialFrame) -> Result<DiffStats> {
    diff_stats_with_outlier_threshold(frame, DEFAULT_OUTLIER_CENTS)
}

/// Difference statistics; `outlier_cents` controls the first-difference
/// outlier flag. Requires at least two partials.
pub fn diff_stats_with_outlier_threshold(
    frame: &PartialFrame,
    outlier_cents: f64,
) -> Result<DiffStats> {
    if frame.partials.len() < 2 {
        return Err(Error::TooFewPartials {
            need: 2,
            got: frame.partials.len(),
        });
    }
    let diffs = frame.diffs();
    let weights: Vec<f64> = frame
        .partials
        .windows(2)
        .map(|p| p[0].power + p[1].power)
        .collect();

    let wmedian = weighted_median(&diffs, &weights)
        .ok_or_else(|| Error::InvalidArg("partial powers sum to zero".into()))?;
    let wmean = weighted_mean(&diffs, &weights).expect("non-empty with positive weight");

    let abs_devs: Vec<f64> = diffs
        .iter()
        .map(|&d| safe_cents(wmedian, d).abs())
        .collect();
    let mad_cents = median(&abs_devs).unwrap_or(0.0);

    let (first_diff_outlier, first_diff_outlier_cents) = if diffs.len() >= 2 {
        let overtone_median = weighted_median(&diffs[1..], &weights[1..])
            .expect("non-empty overtone diffs");
        let dev = safe_cents(overtone_median, diffs[0]);
        (dev.abs() > outlier_cents, dev)
    } else {
        (false, 0.0)
    };

    Ok(DiffStats {
        diffs,
        weights,
        weighted_median_hz: wmedian,
        weighted_mean_hz: wmean,
        mad_cents,
        first_diff_outlier,
        first_diff_outlier_cents,
    })
}

/// Cents between two spacings, tolerating non-positive values (returns a
/// large sentinel so such spacings never look "close").
pub(crate) fn safe_cents(reference: f64, value: f64) -> f64 {
    if reference > 0.0 && value > 0.0 {
        cents_between(reference, value)
    } else if value == reference {
        0.0
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Partial;

    pub(crate) fn frame_from(freqs: &[f64], powers: &[f64]) -> PartialFrame {
        let partials: Vec<Partial> = freqs
            .iter()
            .zip(powers)
            .map(|(&f, &p)| Partial::new(f, p).unwrap())
            .collect();
        PartialFrame::new(0.0, partials, 27)
    }

    #[test]
    fn weighted_median_lower_convention() {
        assert_eq!(weighted_median(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]), Some(2.0));
        assert_eq!(weighted_median(&[1.0, 2.0], &[1.0, 1.0]), Some(1.0));
        assert_eq!(weighted_median(&[3.0, 1.0, 2.0], &[1.0, 5.0, 1.0]), Some(1.0));
        assert_eq!(weighted_median(&[1.0, 2.0], &[0.0, 1.0]), Some(2.0));
        assert_eq!(weighted_median(&[], &[]), None);
        assert_eq!(weighted_median(&[1.0], &[0.0]), None);
    }

    #[test]
    fn harmonic_tone_median_is_f0() {
        let frame = frame_from(&[100.0, 200.0, 300.0, 400.0], &[1.0, 1.0, 1.0, 1.0]);
        let stats = diff_stats(&frame).unwrap();
        assert_eq!(stats.weighted_median_hz, 100.0);
        assert_eq!(stats.weighted_mean_hz, 100.0);
        assert_eq!(stats.mad_cents, 0.0);
        assert!(!stats.first_diff_outlier);
    }

    #[test]
    fn shifted_residue_layout_flags_first_diff() {
        // overtones on a 100 Hz grid shifted by +10 Hz
        let frame = frame_from(&[100.0, 210.0, 310.0, 410.0], &[1.0; 4]);
        let stats = diff_stats(&frame).unwrap();
        assert_eq!(stats.diffs, vec![110.0, 100.0, 100.0]);
        assert_eq!(stats.weighted_median_hz, 100.0);
        assert!(stats.first_diff_outlier);
        assert!(stats.first_diff_outlier_cents > 0.0);
    }

    #[test]
    fn stretched_layout_has_no_outlier() {
        let frame = frame_from(&[100.0, 210.0, 320.0, 430.0], &[1.0; 4]);
        let stats = diff_stats(&frame).unwrap();
        assert_eq!(stats.weighted_median_hz, 110.0);
        assert!(!stats.first_diff_outlier);
        assert_eq!(stats.first_diff_outlier_cents, 0.0);
    }

    #[test]
    fn median_invariant_under_power_scaling() {
        let freqs = [95.0, 203.0, 305.0, 399.0, 512.0];
        let powers = [0.5, 0.1, 0.9, 0.2, 0.4];
        let scaled: Vec<f64> = powers.iter().map(|p| p * 123.0).collect();
        let a = diff_stats(&frame_from(&freqs, &powers)).unwrap();
        let b = diff_stats(&frame_from(&freqs, &scaled)).unwrap();
        assert_eq!(a.weighted_median_hz, b.weighted_median_hz);
        assert!((a.weighted_mean_hz - b.weighted_mean_hz).abs() < 1e-9);
        assert_eq!(a.mad_cents, b.mad_cents);
    }

    #[test]
    fn weight_is_sum_of_adjacent_powers() {
        let frame = frame_from(&[100.0, 200.0, 300.0], &[0.25, 0.5, 0.125]);
        let stats = diff_stats(&frame).unwrap();
        assert_eq!(stats.weights, vec![0.75, 0.625]);
    }

    #[test]
    fn single_partial_errors() {
        let frame = frame_from(&[100.0], &[1.0]);
        assert!(matches!(
            diff_stats(&frame),
            Err(Error::TooFewPartials { need: 2, got: 1 })
        ));
    }
}
