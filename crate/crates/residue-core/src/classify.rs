//! Three-type inharmonicity classifier over a frame's partials.
//!
//! Types, in decreasing order of constraint:
//! - harmonic: every spacing matches the lowest partial's frequency;
//! - type 1 (shifted residue): the overtone spacings agree with each other
//!   but the gap between the two lowest partials is an outlier;
//! - type 2 (stretched / compressed / shifted): all spacings agree with each
//!   other but not with the lowest partial;
//! - type 3 (noisy harmonic): spacings scatter moderately around a center
//!   close to the lowest partial.
//!
//! When the spacing center sits an octave above the lowest partial the even
//! harmonics are assumed missing; the spacing is halved for comparisons
//! against the lowest partial (scatter checks stay in raw diff space, where
//! the observed spacings actually live).

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::estimate_shift;
use crate::spectrum::PartialFrame;
use crate::stats::{diff_stats_with_outlier_threshold, safe_cents, weighted_median};

/// Classifier thresholds, all in cents. Loadable from a `key = value` file.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Thresholds {
    /// Agreement window for "spacings match" checks.
    pub tight_cents: f64,
    /// First-difference deviation that marks a shifted residue.
    pub outlier_cents: f64,
    /// Maximum diff dispersion still considered deterministic.
    pub jitter_cents: f64,
    /// Maximum diff dispersion for the noisy-harmonic verdict.
    pub noisy_max_cents: f64,
    /// Window around the lowest partial for the noisy-harmonic verdict.
    pub loose_cents: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            tight_cents: 20.0,
            outlier_cents: 40.0,
            jitter_cents: 8.0,
            noisy_max_cents: 60.0,
            loose_cents: 45.0,
        }
    }
}

impl Thresholds {
    /// Parse a `key = value` config body. Unknown keys are rejected.
    pub fn from_config_str(body: &str) -> Result<Self> {
        let mut t = Thresholds::default();
        for (lineno, line) in body.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!(
                    "thresholds config line {}: expected `key = value`",
                    lineno + 1
                )));
            };
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Parse(format!(
                    "thresholds config line {}: bad number `{}`",
                    lineno + 1,
                    value.trim()
                ))
            })?;
            match key.trim() {
                "tight_cents" => t.tight_cents = value,
                "outlier_cents" => t.outlier_cents = value,
                "jitter_cents" => t.jitter_cents = value,
                "noisy_max_cents" => t.noisy_max_cents = value,
                "loose_cents" => t.loose_cents = value,
                other => {
                    return Err(Error::Parse(format!(
                        "thresholds config line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.tight_cents,
            self.outlier_cents,
            self.jitter_cents,
            self.noisy_max_cents,
            self.loose_cents,
        ];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidArg(
                "thresholds must be positive and finite".into(),
            ));
        }
        Ok(())
    }
}

/// Stretched (spacing above the lowest partial) or compressed (below).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Type2Variant {
    Stretched,
    Compressed,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ToneKind {
    Harmonic,
    Type1ShiftedResidue,
    Type2Regular { variant: Type2Variant },
    Type3NoisyHarmonic,
    Unclassified,
}

impl ToneKind {
    /// Stable short name, used in reports and the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            ToneKind::Harmonic => "harmonic",
            ToneKind::Type1ShiftedResidue => "type1_shifted_residue",
            ToneKind::Type2Regular { .. } => "type2_regular",
            ToneKind::Type3NoisyHarmonic => "type3_noisy_harmonic",
            ToneKind::Unclassified => "unclassified",
        }
    }
}

/// Typology verdict with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ToneClassification {
    #[serde(flatten)]
    pub kind: ToneKind,
    /// Spacing center in Hz (the grid spacing `d` for type 2).
    pub spacing_hz: f64,
    /// Shift in Hz: signed overtone shift for type 1, grid shift in
    /// `[0, d)` for type 2, zero otherwise.
    pub shift_hz: f64,
    /// Diff dispersion (median absolute deviation) in cents.
    pub jitter_cents: f64,
    /// True when the spacing center sat an octave above the lowest partial
    /// and was halved (missing even harmonics).
    pub octave_adjusted: bool,
}

/// Classify a frame (at least four partials required).
pub fn classify_tone(frame: &PartialFrame, thresholds: &Thresholds) -> Result<ToneClassification> {
    if frame.partials.len() < 4 {
        return Err(Error::TooFewPartials {
            need: 4,
            got: frame.partials.len(),
        });
    }
    thresholds.validate()?;

    let stats = diff_stats_with_outlier_threshold(frame, thresholds.outlier_cents)?;
    let diffs = &stats.diffs;
    let jitter = stats.mad_cents;
    let f1 = frame.partials[0].freq_hz;
    let f2 = frame.partials[1].freq_hz;

    // center of the overtone spacings (raw diff space)
    let c_raw = weighted_median(&diffs[1..], &stats.weights[1..])
        .ok_or_else(|| Error::InvalidArg("partial powers sum to zero".into()))?;

    // missing even harmonics put the spacing an octave above the fundamental
    let octave_adjusted = safe_cents(2.0 * f1, c_raw).abs() <= thresholds.tight_cents;
    let center = if octave_adjusted { c_raw / 2.0 } else { c_raw };

    let all_tight = diffs
        .iter()
        .all(|&d| safe_cents(c_raw, d).abs() <= thresholds.tight_cents);
    let overtones_tight = diffs[1..]
        .iter()
        .all(|&d| safe_cents(c_raw, d).abs() <= thresholds.tight_cents);
    let anchor_cents = safe_cents(f1, center).abs();

    let kind = if all_tight && anchor_cents <= thresholds.tight_cents && jitter <= thresholds.jitter_cents
    {
        ToneKind::Harmonic
    } else if overtones_tight && stats.first_diff_outlier_cents.abs() > thresholds.outlier_cents {
        ToneKind::Type1ShiftedResidue
    } else if all_tight && anchor_cents > thresholds.tight_cents {
        let variant = if center > f1 {
            Type2Variant::Stretched
        } else {
            Type2Variant::Compressed
        };
        ToneKind::Type2Regular { variant }
    } else if jitter > thresholds.jitter_cents
        && jitter <= thresholds.noisy_max_cents
        && anchor_cents <= thresholds.loose_cents
    {
        ToneKind::Type3NoisyHarmonic
    } else {
        ToneKind::Unclassified
    };

    let (spacing_hz, shift_hz) = match kind {
        ToneKind::Type1ShiftedResidue => {
            // the first overtone sits on grid index 2 (3 with the even
            // harmonics missing); its offset from there is the shift
            let first_overtone_index = if octave_adjusted { 3.0 } else { 2.0 };
            (center, f2 - first_overtone_index * center)
        }
        ToneKind::Type2Regular { .. } => match estimate_shift(frame) {
            Ok(fit) => (fit.d_hz, fit.s_hz),
            Err(_) => (center, 0.0),
        },
        _ => (center, 0.0),
    };

    Ok(ToneClassification {
        kind,
        spacing_hz,
        shift_hz,
        jitter_cents: jitter,
        octave_adjusted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Partial;

    fn frame(freqs: &[f64]) -> PartialFrame {
        let partials = freqs
            .iter()
            .map(|&f| Partial::new(f, 1.0).unwrap())
            .collect();
        PartialFrame::new(0.0, partials, 27)
    }

    fn classify(freqs: &[f64]) -> ToneClassification {
        classify_tone(&frame(freqs), &Thresholds::default()).unwrap()
    }

    #[test]
    fn harmonic_layout() {
        let c = classify(&[100.0, 200.0, 300.0, 400.0]);
        assert_eq!(c.kind, ToneKind::Harmonic);
        assert!((c.spacing_hz - 100.0).abs() < 1e-9);
        assert!(!c.octave_adjusted);
    }

    #[test]
    fn shifted_residue_layout() {
        let c = classify(&[100.0, 210.0, 310.0, 410.0]);
        assert_eq!(c.kind, ToneKind::Type1ShiftedResidue);
        assert!((c.spacing_hz - 100.0).abs() < 1e-9);
        assert!((c.shift_hz - 10.0).abs() < 1e-9, "shift {}", c.shift_hz);
    }

    #[test]
    fn shift_sign_is_preserved_for_downward_shifts() {
        let c = classify(&[100.0, 190.0, 290.0, 390.0]);
        assert_eq!(c.kind, ToneKind::Type1ShiftedResidue);
        assert!((c.shift_hz + 10.0).abs() < 1e-9, "shift {}", c.shift_hz);
    }

    #[test]
    fn stretched_layout() {
        let c = classify(&[100.0, 210.0, 320.0, 430.0]);
        assert_eq!(
            c.kind,
            ToneKind::Type2Regular {
                variant: Type2Variant::Stretched
            }
        );
        assert!((c.spacing_hz - 110.0).abs() < 0.5);
    }

    #[test]
    fn compressed_layout() {
        let c = classify(&[100.0, 190.0, 280.0, 370.0, 460.0]);
        assert_eq!(
            c.kind,
            ToneKind::Type2Regular {
                variant: Type2Variant::Compressed
            }
        );
        assert!((c.spacing_hz - 90.0).abs() < 0.5);
    }

    #[test]
    fn shifted_whole_tone_reads_as_type2() {
        // harmonic series with every partial moved up by a constant
        let freqs: Vec<f64> = (1..=6).map(|n| n as f64 * 110.0 + 7.0).collect();
        let c = classify(&freqs);
        match c.kind {
            ToneKind::Type2Regular { .. } => {}
            other => panic!("expected type2, got {other:?}"),
        }
        assert!((c.spacing_hz - 110.0).abs() < 0.5);
        assert!(crate::grid::shift_distance(c.shift_hz, 7.0, c.spacing_hz) < 0.5);
    }

    #[test]
    fn noisy_harmonic_layout() {
        let c = classify(&[100.0, 201.5, 299.0, 402.0, 498.0]);
        assert_eq!(c.kind, ToneKind::Type3NoisyHarmonic);
        assert!(c.jitter_cents > 8.0 && c.jitter_cents <= 60.0);
    }

    #[test]
    fn odd_only_harmonic_is_octave_adjusted() {
        let c = classify(&[100.0, 300.0, 500.0, 700.0, 900.0]);
        assert_eq!(c.kind, ToneKind::Harmonic);
        assert!(c.octave_adjusted);
        assert!((c.spacing_hz - 100.0).abs() < 1e-9);
    }

    #[test]
    fn odd_only_shifted_residue_uses_grid_index_three() {
        // overtones at odd harmonics of 100, all shifted +10
        let c = classify(&[100.0, 310.0, 510.0, 710.0, 910.0]);
        assert_eq!(c.kind, ToneKind::Type1ShiftedResidue);
        assert!(c.octave_adjusted);
        assert!((c.shift_hz - 10.0).abs() < 1e-9, "shift {}", c.shift_hz);
    }

    #[test]
    fn random_scatter_is_unclassified() {
        let c = classify(&[100.0, 163.0, 380.0, 710.0, 830.0]);
        assert_eq!(c.kind, ToneKind::Unclassified);
    }

    #[test]
    fn deterministic_and_total() {
        let layouts: &[&[f64]] = &[
            &[100.0, 200.0, 300.0, 400.0],
            &[100.0, 210.0, 310.0, 410.0],
            &[100.0, 210.0, 320.0, 430.0],
            &[100.0, 201.5, 299.0, 402.0, 498.0],
            &[100.0, 163.0, 380.0, 710.0, 830.0],
        ];
        for freqs in layouts {
            let a = classify(freqs);
            let b = classify(freqs);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn too_few_partials() {
        let result = classify_tone(&frame(&[100.0, 200.0, 300.0]), &Thresholds::default());
        assert!(matches!(result, Err(Error::TooFewPartials { need: 4, .. })));
    }

    #[test]
    fn transposition_keeps_class_constant_shift_changes_it() {
        let harmonic: Vec<f64> = (1..=6).map(|n| n as f64 * 110.0).collect();
        assert_eq!(classify(&harmonic).kind, ToneKind::Harmonic);

        // transposition: multiply by a semitone ratio -> still harmonic
        let ratio = 2f64.powf(1.0 / 12.0);
        let transposed: Vec<f64> = harmonic.iter().map(|f| f * ratio).collect();
        assert_eq!(classify(&transposed).kind, ToneKind::Harmonic);

        // constant Hz shift well above the tight tolerance -> type 2
        let shifted: Vec<f64> = harmonic.iter().map(|f| f + 10.0).collect();
        match classify(&shifted).kind {
            ToneKind::Type2Regular { .. } => {}
            other => panic!("expected type2 after constant shift, got {other:?}"),
        }
    }

    #[test]
    fn thresholds_config_parsing() {
        let t = Thresholds::from_config_str(
            "# comment\n tight_cents = 25\noutlier_cents=50\njitter_cents = 6\n\nnoisy_max_cents = 70\nloose_cents = 40\n",
        )
        .unwrap();
        assert_eq!(t.tight_cents, 25.0);
        assert_eq!(t.outlier_cents, 50.0);
        assert_eq!(t.jitter_cents, 6.0);
        assert_eq!(t.noisy_max_cents, 70.0);
        assert_eq!(t.loose_cents, 40.0);

        assert!(Thresholds::from_config_str("bogus_key = 1\n").is_err());
        assert!(Thresholds::from_config_str("tight_cents = shrug\n").is_err());
        assert!(Thresholds::from_config_str("tight_cents = -3\n").is_err());
    }
}
