//! End-to-end analysis pipeline and its JSON report.
//!
//! The report carries one record per analyzed frame plus a global summary,
//! with every analysis default echoed into the metadata. The JSON shape is
//! pinned by `schema/analysis_report.schema.json`.

use crate::audio::{AudioBuffer, FrameSpec, WindowKind};
use crate::classify::{classify_tone, Thresholds, ToneKind, Type2Variant};
use crate::error::Result;
use crate::grid::estimate_f0_least_deviating;
use crate::loudness::LoudnessContour;
use crate::midi::{hz_to_midi, note_name};
use crate::spectrum::stft;
use crate::stats::{diff_stats_with_outlier_threshold, median};
use crate::tracking::{track_partials, TrackingConfig};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Width of the histogram bins for the summary's distribution peak, cents.
const DISTRIBUTION_BIN_CENTS: f64 = 2.0;

/// Everything `analyze` needs besides the audio.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub frame: FrameSpec,
    /// Loudness weighting applied before peak picking, if any.
    pub contour: Option<LoudnessContour>,
    /// Human-readable provenance of the weighting, echoed in the metadata.
    pub weighting_label: String,
    pub thresholds: Thresholds,
    pub tracking: TrackingConfig,
    /// Input name echoed in the metadata.
    pub input_name: String,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            frame: FrameSpec::default(),
            contour: None,
            weighting_label: "none".into(),
            thresholds: Thresholds::default(),
            tracking: TrackingConfig::default(),
            input_name: "buffer".into(),
        }
    }
}

impl AnalysisOptions {
    /// Enable the built-in equal-loudness weighting at `phon`.
    pub fn with_iso_weighting(mut self, phon: f64) -> Result<Self> {
        self.contour = Some(LoudnessContour::iso_226(phon)?);
        self.weighting_label = format!("iso226-{phon}phon");
        Ok(self)
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ReportMeta {
    pub schema_version: u32,
    pub input: String,
    pub sample_rate: u32,
    pub duration_s: f64,
    pub window_size: usize,
    pub hop_size: usize,
    pub window_kind: WindowKind,
    pub weighting: String,
    pub floor_db: f64,
    pub max_partials: usize,
    pub tol_cents: f64,
    pub max_delta_cents: f64,
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PartialRecord {
    pub freq_hz: f64,
    pub midi: f64,
    pub cents_dev: f64,
    pub power: f64,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ClassificationRecord {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub spacing_hz: f64,
    pub shift_hz: f64,
    pub jitter_cents: f64,
    pub octave_adjusted: bool,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FrameRecord {
    pub time_s: f64,
    pub reliable: bool,
    pub partials: Vec<PartialRecord>,
    pub diff_median_hz: Option<f64>,
    pub diff_median_midi: Option<f64>,
    pub diff_mean_hz: Option<f64>,
    pub diff_mad_cents: Option<f64>,
    pub f0_least_dev_hz: Option<f64>,
    pub f0_deviation_cents: Option<f64>,
    pub classification: Option<ClassificationRecord>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DistributionPeak {
    /// Fractional MIDI value at the histogram peak.
    pub midi: f64,
    /// Nearest note name, e.g. `"A1"`.
    pub note: String,
    /// Offset from that note in cents.
    pub cents: f64,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Summary {
    /// Most frequent frame classification, or `"no tonal content"`.
    pub modal_classification: String,
    pub analyzed_frames: usize,
    pub reliable_frames: usize,
    /// Median over the per-frame difference medians, Hz.
    pub median_of_medians_hz: Option<f64>,
    /// Peak of the distribution of per-frame difference medians.
    pub distribution_peak: Option<DistributionPeak>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct AnalysisReport {
    pub meta: ReportMeta,
    pub frames: Vec<FrameRecord>,
    pub summary: Summary,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Run the full measurement chain on a buffer.
pub fn analyze(buffer: &AudioBuffer, options: &AnalysisOptions) -> Result<AnalysisReport> {
    let spectra = stft(buffer, &options.frame, options.contour.as_ref())?;
    let tracked = track_partials(&spectra, &options.tracking);

    let mut frames = Vec::with_capacity(tracked.len());
    for frame in &tracked {
        let partials: Vec<PartialRecord> = frame
            .partials
            .iter()
            .map(|p| PartialRecord {
                freq_hz: p.freq_hz,
                midi: p.midi,
                cents_dev: p.cents_dev,
                power: p.power,
            })
            .collect();

        let stats = if frame.partials.len() >= 2 {
            diff_stats_with_outlier_threshold(frame, options.thresholds.outlier_cents).ok()
        } else {
            None
        };
        let f0 = if frame.partials.len() >= 2 {
            estimate_f0_least_deviating(frame).ok()
        } else {
            None
        };
        let classification = if frame.partials.len() >= 4 {
            classify_tone(frame, &options.thresholds)
                .ok()
                .map(|c| ClassificationRecord {
                    kind: c.kind.name().to_string(),
                    variant: match c.kind {
                        ToneKind::Type2Regular { variant } => Some(
                            match variant {
                                Type2Variant::Stretched => "stretched",
                                Type2Variant::Compressed => "compressed",
                            }
                            .to_string(),
                        ),
                        _ => None,
                    },
                    spacing_hz: c.spacing_hz,
                    shift_hz: c.shift_hz,
                    jitter_cents: c.jitter_cents,
                    octave_adjusted: c.octave_adjusted,
                })
        } else {
            None
        };

        frames.push(FrameRecord {
            time_s: frame.time_s,
            reliable: frame.reliable,
            partials,
            diff_median_hz: stats.as_ref().map(|s| s.weighted_median_hz),
            diff_median_midi: stats
                .as_ref()
                .and_then(|s| hz_to_midi(s.weighted_median_hz).ok()),
            diff_mean_hz: stats.as_ref().map(|s| s.weighted_mean_hz),
            diff_mad_cents: stats.as_ref().map(|s| s.mad_cents),
            f0_least_dev_hz: f0.map(|e| e.f0_hz),
            f0_deviation_cents: f0.map(|e| e.deviation_cents),
            classification,
        });
    }

    let summary = summarize(&frames);
    Ok(AnalysisReport {
        meta: ReportMeta {
            schema_version: REPORT_SCHEMA_VERSION,
            input: options.input_name.clone(),
            sample_rate: buffer.sample_rate,
            duration_s: buffer.duration_s(),
            window_size: options.frame.window_size,
            hop_size: options.frame.hop_size,
            window_kind: options.frame.window_kind,
            weighting: options.weighting_label.clone(),
            floor_db: options.tracking.floor_db,
            max_partials: options.tracking.max_partials,
            tol_cents: options.tracking.tol_cents,
            max_delta_cents: options.tracking.max_delta_cents,
            thresholds: options.thresholds,
        },
        frames,
        summary,
    })
}

fn summarize(frames: &[FrameRecord]) -> Summary {
    let medians_midi: Vec<f64> = frames
        .iter()
        .filter(|f| f.reliable)
        .filter_map(|f| f.diff_median_midi)
        .collect();
    let medians_hz: Vec<f64> = frames
        .iter()
        .filter(|f| f.reliable)
        .filter_map(|f| f.diff_median_hz)
        .collect();

    // modal classification; lexicographic tie-break keeps it deterministic
    let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
    for f in frames {
        if let Some(c) = &f.classification {
            *counts.entry(c.kind.as_str()).or_default() += 1;
        }
    }
    let modal = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(k, _)| k.to_string());

    let modal_classification = if medians_hz.is_empty() {
        "no tonal content".to_string()
    } else {
        modal.unwrap_or_else(|| "unclassified".to_string())
    };

    Summary {
        modal_classification,
        analyzed_frames: frames.len(),
        reliable_frames: frames.iter().filter(|f| f.reliable).count(),
        median_of_medians_hz: median(&medians_hz),
        distribution_peak: distribution_peak(&medians_midi),
    }
}

/// Histogram peak of the per-frame medians, in MIDI space.
fn distribution_peak(medians_midi: &[f64]) -> Option<DistributionPeak> {
    if medians_midi.is_empty() {
        return None;
    }
    let lo = medians_midi.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = medians_midi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bin = DISTRIBUTION_BIN_CENTS / 100.0;
    let n_bins = (((hi - lo) / bin).ceil() as usize + 1).min(100_000);
    let mut counts = vec![0usize; n_bins];
    for &m in medians_midi {
        let idx = (((m - lo) / bin).floor() as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let best = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)?;
    let midi = lo + (best as f64 + 0.5) * bin;
    let note = midi.round();
    Some(DistributionPeak {
        midi,
        note: note_name(note),
        cents: (midi - note) * 100.0,
    })
}

/// Per-frame CSV rows for a report. Optional fields are empty when absent.
pub fn report_to_csv(report: &AnalysisReport) -> String {
    let mut out = String::from(
        "time_s,reliable,n_partials,diff_median_hz,diff_median_midi,diff_mad_cents,f0_least_dev_hz,kind,spacing_hz,shift_hz,jitter_cents,octave_adjusted\n",
    );
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
    for f in &report.frames {
        let (kind, spacing, shift, jitter, octave) = match &f.classification {
            Some(c) => (
                c.kind.clone(),
                format!("{:.4}", c.spacing_hz),
                format!("{:.4}", c.shift_hz),
                format!("{:.4}", c.jitter_cents),
                c.octave_adjusted.to_string(),
            ),
            None => Default::default(),
        };
        out.push_str(&format!(
            "{:.4},{},{},{},{},{},{},{},{},{},{},{}\n",
            f.time_s,
            f.reliable,
            f.partials.len(),
            opt(f.diff_median_hz),
            opt(f.diff_median_midi),
            opt(f.diff_mad_cents),
            opt(f.f0_least_dev_hz),
            kind,
            spacing,
            shift,
            jitter,
            octave
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{render, ToneModel, ToneSpec};

    fn quick_options() -> AnalysisOptions {
        AnalysisOptions {
            input_name: "test".into(),
            ..Default::default()
        }
    }

    fn tone_spec(model: ToneModel, f0: f64, n: usize) -> ToneSpec {
        ToneSpec {
            model,
            f0_hz: f0,
            n_partials: n,
            amplitude_profile: Default::default(),
            odd_only: false,
            duration_s: 0.6,
            level: 0.9,
            seed: 9,
        }
    }

    #[test]
    fn harmonic_tone_reports_harmonic_modal_class() {
        let buffer = render(&tone_spec(ToneModel::Harmonic, 110.0, 10), 44_100).unwrap();
        let report = analyze(&buffer, &quick_options()).unwrap();
        assert_eq!(report.summary.modal_classification, "harmonic");
        assert!(report.summary.reliable_frames > 0);
        let m = report.summary.median_of_medians_hz.unwrap();
        assert!((m - 110.0).abs() < 1.0, "median of medians {m}");
        assert_eq!(report.frames.len(), report.summary.analyzed_frames);
    }

    #[test]
    fn grid_tone_distribution_peak_lands_on_spacing() {
        // spacing 55 Hz = MIDI 33 (A1)
        let spec = tone_spec(
            ToneModel::RegularGrid {
                d_hz: 55.0,
                s_hz: 7.0,
            },
            55.0,
            20,
        );
        let buffer = render(&spec, 44_100).unwrap();
        let report = analyze(&buffer, &quick_options()).unwrap();
        let peak = report.summary.distribution_peak.expect("peak");
        assert!(
            (peak.midi - 33.0).abs() * 100.0 <= 10.0,
            "peak at {} ({}{:+.1}c)",
            peak.midi,
            peak.note,
            peak.cents
        );
        assert_eq!(peak.note, "A1");
    }

    #[test]
    fn silence_reports_no_tonal_content() {
        let buffer = AudioBuffer::new(vec![0.0; 16_384], 44_100).unwrap();
        let report = analyze(&buffer, &quick_options()).unwrap();
        assert_eq!(report.summary.modal_classification, "no tonal content");
        assert!(report.summary.median_of_medians_hz.is_none());
        assert!(report.summary.distribution_peak.is_none());
        assert!(report.frames.iter().all(|f| !f.reliable));
    }

    #[test]
    fn report_json_round_trips() {
        let buffer = render(&tone_spec(ToneModel::Harmonic, 220.0, 6), 44_100).unwrap();
        let report = analyze(&buffer, &quick_options()).unwrap();
        let json = report.to_json();
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.frames.len(), report.frames.len());
        assert_eq!(back.meta.window_size, 4096);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn csv_has_one_row_per_frame() {
        let buffer = render(&tone_spec(ToneModel::Harmonic, 220.0, 6), 44_100).unwrap();
        let report = analyze(&buffer, &quick_options()).unwrap();
        let csv = report_to_csv(&report);
        assert_eq!(csv.lines().count(), report.frames.len() + 1);
        assert!(csv.starts_with("time_s,reliable,n_partials,"));
    }

    #[test]
    fn weighted_analysis_is_labelled() {
        let options = quick_options().with_iso_weighting(50.0).unwrap();
        let buffer = render(&tone_spec(ToneModel::Harmonic, 220.0, 6), 44_100).unwrap();
        let report = analyze(&buffer, &options).unwrap();
        assert_eq!(report.meta.weighting, "iso226-50phon");
    }
}
