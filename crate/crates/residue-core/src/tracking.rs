//! Regularity-constrained partial tracking.
//!
//! Each frame's picked peaks are gated against a fitted regular grid
//! `f ~= n * d + s`: peaks that deviate from their nearest grid position by
//! more than a tolerance are discarded as spurious. The grid evolves
//! smoothly across frames (the per-frame change of `d` is bounded), seeded
//! from the previous frame's fit.
//!
//! The lowest-frequency peak is exempt from gating: in shifted-residue
//! tones the fundamental sits a whole spacing off the overtone grid, and it
//! anchors the typology downstream.

use crate::grid::{deviation_from_grid, fit_grid};
use crate::spectrum::{pick_peaks, Partial, PartialFrame, Spectrum};
use crate::stats::weighted_median;

/// Parameters of the tracker.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrackingConfig {
    /// Peak floor relative to the frame maximum, dB.
    pub floor_db: f64,
    /// Cap on partials per frame.
    pub max_partials: usize,
    /// Gate: maximum deviation from the fitted grid, cents.
    pub tol_cents: f64,
    /// Bound on the per-frame change of the grid spacing, cents.
    pub max_delta_cents: f64,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        Self {
            floor_db: 60.0,
            max_partials: 27,
            tol_cents: 35.0,
            max_delta_cents: 50.0,
        }
    }
}

/// Track partials across frames with the regularity constraint.
///
/// Frames with fewer than three surviving peaks are flagged unreliable and
/// do not update the evolving grid.
pub fn track_partials(spectra: &[Spectrum], config: &TrackingConfig) -> Vec<PartialFrame> {
    let mut prev_grid: Option<(f64, f64)> = None;
    let mut out = Vec::with_capacity(spectra.len());

    for spectrum in spectra {
        // a few extra candidates so gating has something to discard
        let peaks = pick_peaks(spectrum, config.floor_db, config.max_partials + 8);
        let frame = gate_frame(spectrum.frame_time, peaks, config, &mut prev_grid);
        out.push(frame);
    }
    out
}

fn gate_frame(
    time_s: f64,
    peaks: Vec<Partial>,
    config: &TrackingConfig,
    prev_grid: &mut Option<(f64, f64)>,
) -> PartialFrame {
    if peaks.len() < 3 {
        let mut frame = PartialFrame::new(time_s, truncate_by_power(peaks, config.max_partials), config.max_partials);
        frame.reliable = false;
        return frame;
    }

    // seed: previous grid's spacing, else the weighted median spacing
    let diffs: Vec<f64> = peaks.windows(2).map(|p| p[1].freq_hz - p[0].freq_hz).collect();
    let weights: Vec<f64> = peaks.windows(2).map(|p| p[0].power + p[1].power).collect();
    let seed = prev_grid
        .map(|(d, _)| d)
        .or_else(|| weighted_median(&diffs, &weights));

    // the lowest peak anchors the frame and is never gated; the grid is
    // fitted on the remaining peaks
    let upper: Vec<f64> = peaks[1..].iter().map(|p| p.freq_hz).collect();
    let fit = fit_grid(&upper, seed);

    let Some(mut fit) = fit else {
        let mut frame = PartialFrame::new(time_s, truncate_by_power(peaks, config.max_partials), config.max_partials);
        frame.reliable = false;
        return frame;
    };

    // bound the spacing drift relative to the previous frame
    if let Some((prev_d, _)) = *prev_grid {
        let limit = 2f64.powf(config.max_delta_cents / 1200.0);
        let clamped = fit.d_hz.clamp(prev_d / limit, prev_d * limit);
        if clamped != fit.d_hz {
            // re-derive the shift for the clamped spacing
            let mean_residual = upper
                .iter()
                .map(|&f| {
                    let n = (((f - fit.s_hz) / clamped).round()).max(1.0);
                    f - n * clamped
                })
                .sum::<f64>()
                / upper.len() as f64;
            fit.d_hz = clamped;
            fit.s_hz = mean_residual.rem_euclid(clamped);
        }
    }

    let mut kept: Vec<Partial> = Vec::with_capacity(peaks.len());
    for (i, peak) in peaks.iter().enumerate() {
        if i == 0 || deviation_from_grid(peak.freq_hz, fit.d_hz, fit.s_hz) <= config.tol_cents {
            kept.push(peak.clone());
        }
    }

    let reliable = kept.len() >= 3;
    if reliable {
        *prev_grid = Some((fit.d_hz, fit.s_hz));
    }
    let mut frame = PartialFrame::new(time_s, truncate_by_power(kept, config.max_partials), config.max_partials);
    frame.reliable = reliable;
    frame
}

/// Keep the `cap` most powerful partials, frequency-ordered.
fn truncate_by_power(mut partials: Vec<Partial>, cap: usize) -> Vec<Partial> {
    if partials.len() > cap {
        partials.sort_by(|a, b| b.power.total_cmp(&a.power));
        partials.truncate(cap);
        partials.sort_by(|a, b| a.freq_hz.total_cmp(&b.freq_hz));
    }
    partials
}
