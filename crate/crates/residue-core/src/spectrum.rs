//! STFT power spectra and spectral peak picking with sub-bin refinement.
//!
//! Peaks are refined by parabolic interpolation over dB-scaled neighbor
//! bins (the standard sinusoidal-modeling estimator). The FFT is taken over
//! 2x zero-padded windows: with a bare 4096-sample Hann window the dB
//! parabola is biased by up to ~3 cents below 100 Hz, with 2x padding the
//! worst case drops to ~0.4 cents.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::{frames, AudioBuffer, FrameSpec};
use crate::error::Result;
use crate::loudness::LoudnessContour;
use crate::midi::{cent_deviation, hz_to_midi};

/// Minimum separation enforced between picked peaks, suppressing window
/// sidelobes that survive the power floor.
pub const MIN_PEAK_SEPARATION_CENTS: f64 = 25.0;

/// Bins below this frequency are never reported as peaks.
const MIN_PEAK_FREQUENCY_HZ: f64 = 20.0;

/// Zero-padding factor applied to analysis windows before the FFT.
const FFT_PAD: usize = 2;

// Hann sidelobe envelope: first sidelobe -31.5 dB at ~2.5 window bins from
// the peak, then an 18 dB/octave rolloff. Candidates at or below this
// envelope (with margin) relative to a stronger peak are window artifacts,
// not partials.
const SIDELOBE_REACH_BINS: f64 = 25.0;
const SIDELOBE_MARGIN_DB: f64 = 6.0;

fn hann_sidelobe_db(offset_bins: f64) -> f64 {
    let n = offset_bins.max(2.5);
    31.5 + 30.0 * (n / 2.5).log10()
}

/// One frame's power spectrum.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// `(frequency_hz, power)` at the FFT bin centers, strictly increasing.
    pub bins: Vec<(f64, f64)>,
    /// Center time of the frame in seconds.
    pub frame_time: f64,
}

impl Spectrum {
    /// Frequency spacing between adjacent bins.
    pub fn bin_hz(&self) -> f64 {
        self.bins[1].0 - self.bins[0].0
    }
}

/// One spectral component of a complex tone.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Partial {
    pub freq_hz: f64,
    /// Linear power.
    pub power: f64,
    /// Fractional MIDI note number.
    pub midi: f64,
    /// Deviation from the nearest equal-tempered note in cents.
    pub cents_dev: f64,
}

impl Partial {
    pub fn new(freq_hz: f64, power: f64) -> Result<Self> {
        let midi = hz_to_midi(freq_hz)?;
        let cents_dev = cent_deviation(freq_hz)?;
        Ok(Self {
            freq_hz,
            power,
            midi,
            cents_dev,
        })
    }
}

/// Time-stamped, frequency-ordered set of partials from one frame.
#[derive(Debug, Clone)]
pub struct PartialFrame {
    pub time_s: f64,
    /// Partials sorted by ascending frequency.
    pub partials: Vec<Partial>,
    /// Cap that was applied when the frame was extracted.
    pub max_partials: usize,
    /// False when the frame had too few peaks for grid-constrained tracking.
    pub reliable: bool,
}

impl PartialFrame {
    pub fn new(time_s: f64, mut partials: Vec<Partial>, max_partials: usize) -> Self {
        partials.sort_by(|a, b| a.freq_hz.total_cmp(&b.freq_hz));
        Self {
            time_s,
            partials,
            max_partials,
            reliable: true,
        }
    }

    /// Consecutive frequency differences `f[i+1] - f[i]`.
    pub fn diffs(&self) -> Vec<f64> {
        self.partials
            .windows(2)
            .map(|p| p[1].freq_hz - p[0].freq_hz)
            .collect()
    }
}

/// Short-time power spectra of `buffer`, optionally loudness-weighted.
pub fn stft(
    buffer: &AudioBuffer,
    spec: &FrameSpec,
    weighting: Option<&LoudnessContour>,
) -> Result<Vec<Spectrum>> {
    let framed = frames(buffer, spec)?;
    let fft_size = spec.window_size * FFT_PAD;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(fft_size);

    // amplitude normalization: a full-scale sine peaks at power ~= amplitude^2
    let window_sum: f64 = spec
        .window_kind
        .coefficients(spec.window_size)
        .iter()
        .sum();
    let norm = (2.0 / window_sum).powi(2);

    let sr = buffer.sample_rate as f64;
    let half = fft_size / 2;
    let mut out = Vec::with_capacity(framed.len());
    let mut buf = vec![Complex::default(); fft_size];
    for frame in &framed {
        for slot in buf.iter_mut() {
            *slot = Complex::default();
        }
        for (slot, &s) in buf.iter_mut().zip(&frame.samples) {
            slot.re = s;
        }
        fft.process(&mut buf);
        let bins: Vec<(f64, f64)> = (0..=half)
            .map(|k| {
                let f = k as f64 * sr / fft_size as f64;
                let p = buf[k].norm_sqr() * norm;
                let p = match weighting {
                    Some(contour) => p * contour.weight(f),
                    None => p,
                };
                (f, p)
            })
            .collect();
        out.push(Spectrum {
            bins,
            frame_time: frame.time_s,
        });
    }
    Ok(out)
}

/// Spectral peaks above `floor_db` below the frame maximum, refined by
/// parabolic interpolation on dB values.
///
/// At most `max_peaks` partials are returned (the most powerful survive),
/// no two closer than [`MIN_PEAK_SEPARATION_CENTS`], sorted by frequency.
pub fn pick_peaks(spectrum: &Spectrum, floor_db: f64, max_peaks: usize) -> Vec<Partial> {
    let bins = &spectrum.bins;
    if bins.len() < 3 || max_peaks == 0 {
        return Vec::new();
    }
    let p_max = bins.iter().map(|b| b.1).fold(0.0f64, f64::max);
    if p_max <= 0.0 {
        return Vec::new();
    }
    let threshold = p_max * 10f64.powf(-floor_db.max(0.0) / 10.0);
    let bin_hz = spectrum.bin_hz();

    let mut candidates: Vec<Partial> = Vec::new();
    for k in 1..bins.len() - 1 {
        let (f, p) = bins[k];
        if f < MIN_PEAK_FREQUENCY_HZ || p < threshold || p <= 0.0 {
            continue;
        }
        if !(p >= bins[k - 1].1 && p > bins[k + 1].1) {
            continue;
        }
        // parabola through the dB values of the three bins around the max
        let eps = p_max * 1e-300;
        let a = 10.0 * (bins[k - 1].1 + eps).log10();
        let b = 10.0 * (p + eps).log10();
        let c = 10.0 * (bins[k + 1].1 + eps).log10();
        let denom = a - 2.0 * b + c;
        let d = if denom.abs() > 1e-12 {
            (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        let refined_db = b - 0.25 * (a - c) * d;
        let freq = f + d * bin_hz;
        if freq <= 0.0 {
            continue;
        }
        let power = 10f64.powf(refined_db / 10.0);
        if let Ok(partial) = Partial::new(freq, power) {
            candidates.push(partial);
        }
    }

    // strongest first; keep peaks that clear the minimum separation and do
    // not look like a sidelobe of an already-kept stronger peak
    candidates.sort_by(|x, y| y.power.total_cmp(&x.power));
    let window_bin_hz = bin_hz * FFT_PAD as f64;
    let mut kept: Vec<Partial> = Vec::new();
    for cand in candidates {
        if kept.len() >= max_peaks {
            break;
        }
        let admissible = kept.iter().all(|k| {
            let cents = (1200.0 * (cand.freq_hz / k.freq_hz).log2()).abs();
            if cents < MIN_PEAK_SEPARATION_CENTS {
                return false;
            }
            let offset_bins = (cand.freq_hz - k.freq_hz).abs() / window_bin_hz;
            if offset_bins <= SIDELOBE_REACH_BINS {
                let rel_db = 10.0 * (cand.power / k.power).log10();
                if rel_db <= -hann_sidelobe_db(offset_bins) + SIDELOBE_MARGIN_DB {
                    return false;
                }
            }
            true
        });
        if admissible {
            kept.push(cand);
        }
    }
    kept.sort_by(|x, y| x.freq_hz.total_cmp(&y.freq_hz));
    kept
}
