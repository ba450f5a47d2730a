//! Reference pitch estimators and the inharmonicity sweep harness.
//!
//! The temporal estimator is the highest normalized-autocorrelation peak
//! excluding zero lag; the spectral estimators are the frequency
//! differences between partials. The sweep harness renders the tone set
//! whose overtone multiplier runs from 220 Hz to 246.94 Hz and tabulates
//! every estimator per member, which makes the two families' divergence on
//! inharmonic tones directly measurable.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::{AudioBuffer, FrameSpec};
use crate::error::{Error, Result};
use crate::spectrum::{pick_peaks, stft, PartialFrame};
use crate::stats::{weighted_mean, weighted_median};
use crate::synth::{render, sweep_set};

/// Candidate peaks within this fraction of the maximum refined height count
/// as ties; the smallest lag wins. Periodic signals tie at every multiple
/// of the period, and the sampled (un-refined) heights are biased by how
/// close each multiple lands to the lag grid.
const TIE_TOLERANCE: f64 = 5e-3;

/// Pitch from the highest normalized autocorrelation peak excluding zero
/// lag, searched over lags corresponding to `[fmin, fmax]`.
///
/// The autocorrelation is normalized by the lag-0 energy and the per-lag
/// overlap count. Candidate peaks are refined by parabolic interpolation
/// (position and height); near-ties resolve to the smallest lag.
pub fn autocorr_pitch(buffer: &AudioBuffer, fmin: f64, fmax: f64) -> Result<f64> {
    if !(fmin > 0.0 && fmax > fmin) {
        return Err(Error::InvalidArg(format!(
            "need 0 < fmin < fmax, got fmin={fmin} fmax={fmax}"
        )));
    }
    let sr = buffer.sample_rate as f64;
    let n = buffer.len();
    let min_len = (2.0 * sr / fmin).ceil() as usize;
    if n < min_len {
        return Err(Error::BufferTooShort { len: n, need: min_len });
    }

    let acf = normalized_autocorrelation(&buffer.samples);

    let lag_lo = ((sr / fmax).floor() as usize).max(2);
    let lag_hi = ((sr / fmin).ceil() as usize).min(n - 2);
    if lag_lo >= lag_hi {
        return Err(Error::InvalidArg(
            "search band leaves no autocorrelation lags".into(),
        ));
    }

    // local maxima, parabolic-refined
    let mut candidates: Vec<(f64, f64)> = Vec::new(); // (height, lag)
    for k in lag_lo..=lag_hi {
        if acf[k] >= acf[k - 1] && acf[k] > acf[k + 1] {
            let (a, b, c) = (acf[k - 1], acf[k], acf[k + 1]);
            let denom = a - 2.0 * b + c;
            let d = if denom.abs() > 1e-300 {
                (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
            } else {
                0.0
            };
            let height = b - 0.25 * (a - c) * d;
            candidates.push((height, k as f64 + d));
        }
    }

    let best = candidates
        .iter()
        .map(|c| c.0)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(best > 0.0) {
        return Err(Error::InvalidArg(
            "no positive autocorrelation peak in the search band".into(),
        ));
    }
    let lag = candidates
        .iter()
        .filter(|(h, _)| *h >= best - TIE_TOLERANCE * best.abs())
        .map(|(_, lag)| *lag)
        .fold(f64::INFINITY, f64::min);

    Ok(sr / lag)
}

/// `r[k] = (sum_i x_i x_{i+k} / (n - k)) / (sum_i x_i^2 / n)`, computed via
/// FFT; `r[0] == 1`.
fn normalized_autocorrelation(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);

    let mut buf: Vec<Complex<f64>> = samples
        .iter()
        .map(|&s| Complex::new(s, 0.0))
        .chain(std::iter::repeat(Complex::default()))
        .take(size)
        .collect();
    fft.process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex::new(v.norm_sqr(), 0.0);
    }
    ifft.process(&mut buf);

    // rustfft leaves the inverse unscaled
    let scale = 1.0 / size as f64;
    let energy = buf[0].re * scale / n as f64;
    if energy <= 0.0 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|k| (buf[k].re * scale / (n - k) as f64) / energy)
        .collect()
}

/// One sweep member's estimator readings.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepRow {
    /// Overtone multiplier of the member.
    pub g_hz: f64,
    /// Lowest detected partial.
    pub f0_partial_hz: f64,
    /// Highest autocorrelation peak, as a frequency.
    pub autocorr_hz: f64,
    /// Energy-weighted median of the overtone spacings.
    pub diff_median_hz: f64,
    /// Energy-weighted mean of the overtone spacings.
    pub diff_mean_hz: f64,
    /// Spacing between the two lowest partials.
    pub first_pair_diff_hz: f64,
    /// False when analysis failed for this member (values are NaN).
    pub valid: bool,
}

/// Sweep harness configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n_steps: usize,
    /// Partials per member (fundamental plus overtones).
    pub n_partials: usize,
    pub sample_rate: u32,
    pub frame: FrameSpec,
    /// Autocorrelation search band.
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    /// Peak floor for the spectral analysis, dB below the frame maximum.
    pub floor_db: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_steps: 21,
            n_partials: 21,
            sample_rate: 44_100,
            frame: FrameSpec::default(),
            fmin_hz: 60.0,
            fmax_hz: 500.0,
            floor_db: 60.0,
        }
    }
}

/// Render every sweep member and fill a [`SweepRow`] from one steady-state
/// frame (peaks are taken raw, without the tracking grid gate: the
/// fundamental of an inharmonic member is legitimately off the overtone
/// grid). Per-member analysis failures flag the row invalid instead of
/// aborting the sweep.
pub fn run_sweep_experiment(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let members = sweep_set(config.n_steps, config.n_partials)?;
    let mut rows = Vec::with_capacity(members.len());
    for (g, spec) in &members {
        match analyze_member(*g, spec, config) {
            Ok(row) => rows.push(row),
            Err(_) => rows.push(SweepRow {
                g_hz: *g,
                f0_partial_hz: f64::NAN,
                autocorr_hz: f64::NAN,
                diff_median_hz: f64::NAN,
                diff_mean_hz: f64::NAN,
                first_pair_diff_hz: f64::NAN,
                valid: false,
            }),
        }
    }
    Ok(rows)
}

fn analyze_member(g: f64, spec: &crate::synth::ToneSpec, config: &SweepConfig) -> Result<SweepRow> {
    let buffer = render(spec, config.sample_rate)?;
    let autocorr_hz = autocorr_pitch(&buffer, config.fmin_hz, config.fmax_hz)?;

    let spectra = stft(&buffer, &config.frame, None)?;
    let mid = &spectra[spectra.len() / 2];
    let partials = pick_peaks(mid, config.floor_db, config.n_partials + 5);
    if partials.len() < 3 {
        return Err(Error::TooFewPartials {
            need: 3,
            got: partials.len(),
        });
    }
    let frame = PartialFrame::new(mid.frame_time, partials, config.n_partials + 5);

    let diffs = frame.diffs();
    let weights: Vec<f64> = frame
        .partials
        .windows(2)
        .map(|p| p[0].power + p[1].power)
        .collect();
    let overtone_diffs = &diffs[1..];
    let overtone_weights = &weights[1..];

    Ok(SweepRow {
        g_hz: g,
        f0_partial_hz: frame.partials[0].freq_hz,
        autocorr_hz,
        diff_median_hz: weighted_median(overtone_diffs, overtone_weights)
            .ok_or_else(|| Error::InvalidArg("zero overtone weight".into()))?,
        diff_mean_hz: weighted_mean(overtone_diffs, overtone_weights)
            .ok_or_else(|| Error::InvalidArg("zero overtone weight".into()))?,
        first_pair_diff_hz: diffs[0],
        valid: true,
    })
}

/// Fixed-header CSV for a sweep run. Invalid rows carry `NaN` values.
pub fn sweep_rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out =
        String::from("g_hz,f0_partial_hz,autocorr_hz,diff_median_hz,diff_mean_hz,first_pair_diff_hz\n");
    for row in rows {
        out.push_str(&format!(
            "{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            row.g_hz,
            row.f0_partial_hz,
            row.autocorr_hz,
            row.diff_median_hz,
            row.diff_mean_hz,
            row.first_pair_diff_hz
        ));
    }
    out
}
