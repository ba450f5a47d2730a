//! STFT-domain attenuation/amplification of selected partials.
//!
//! Each target contributes a Gaussian gain bump in (log-frequency, dB)
//! space; the per-bin mask is applied to every frame and the audio is
//! rebuilt by windowed overlap-add. Filtering always uses a Hann window at
//! hop = window/4 (unity-gain reconstruction), independent of the caller's
//! analysis hop.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::{AudioBuffer, FrameSpec, WindowKind};
use crate::error::{Error, Result};

/// One filter target.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FilterTarget {
    pub center_hz: f64,
    /// Peak gain at the center, dB (negative attenuates).
    pub gain_db: f64,
}

/// A set of targets and their shared bandwidth.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FilterSpec {
    pub targets: Vec<FilterTarget>,
    /// Width (cents) at which a target's dB contribution has fallen to
    /// half its peak value.
    pub bandwidth_cents: f64,
}

impl FilterSpec {
    pub fn new(targets: Vec<FilterTarget>, bandwidth_cents: f64) -> Result<Self> {
        if !(5.0..=200.0).contains(&bandwidth_cents) {
            return Err(Error::InvalidArg(format!(
                "bandwidth must be in 5..=200 cents, got {bandwidth_cents}"
            )));
        }
        if targets.iter().any(|t| !(t.center_hz > 0.0)) {
            return Err(Error::InvalidArg("target centers must be positive".into()));
        }
        Ok(Self {
            targets,
            bandwidth_cents,
        })
    }
}

/// Filter `buffer` through the spec. Output length equals input length.
pub fn apply_partial_filter(
    buffer: &AudioBuffer,
    spec: &FilterSpec,
    frame: &FrameSpec,
) -> Result<AudioBuffer> {
    let nyquist = buffer.sample_rate as f64 / 2.0;
    for (i, t) in spec.targets.iter().enumerate() {
        if t.center_hz >= nyquist {
            return Err(Error::AboveNyquist {
                index: i + 1,
                freq_hz: t.center_hz,
                nyquist,
            });
        }
    }
    if buffer.is_empty() {
        return Err(Error::EmptyAudio);
    }

    let n = frame.window_size;
    let hop = n / 4;
    let window = WindowKind::Hann.coefficients(n);
    // sum of squared Hann at 75% overlap
    let ola_norm = 1.5;

    // per-bin amplitude gains, shared by all frames
    let sr = buffer.sample_rate as f64;
    let half = n / 2;
    let mut gains = vec![1.0f64; half + 1];
    let sigma = spec.bandwidth_cents / (2.0 * (2.0 * (2f64).ln()).sqrt());
    for (k, gain) in gains.iter_mut().enumerate() {
        let f = k as f64 * sr / n as f64;
        if f < 1.0 {
            continue;
        }
        let mut best_db = 0.0f64;
        for t in &spec.targets {
            let cents = 1200.0 * (f / t.center_hz).log2();
            let w = (-0.5 * (cents / sigma).powi(2)).exp();
            let db = t.gain_db * w;
            if db.abs() > best_db.abs() {
                best_db = db;
            }
        }
        *gain = 10f64.powf(best_db / 20.0);
    }

    // pad a full window of silence on both sides so every input sample sees
    // complete overlap, then trim
    let padded_len = buffer.len() + 2 * n;
    let mut padded = vec![0.0f64; padded_len];
    padded[n..n + buffer.len()].copy_from_slice(&buffer.samples);

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut out = vec![0.0f64; padded_len];
    let mut buf = vec![Complex::default(); n];
    let mut start = 0usize;
    while start + n <= padded_len {
        for i in 0..n {
            buf[i] = Complex::new(padded[start + i] * window[i], 0.0);
        }
        fft.process(&mut buf);
        for k in 0..=half {
            buf[k] *= gains[k];
            if k > 0 && k < half {
                buf[n - k] *= gains[k];
            }
        }
        ifft.process(&mut buf);
        let scale = 1.0 / n as f64;
        for i in 0..n {
            out[start + i] += buf[i].re * scale * window[i];
        }
        start += hop;
    }

    let samples: Vec<f64> = out[n..n + buffer.len()]
        .iter()
        .map(|s| s / ola_norm)
        .collect();
    AudioBuffer::new(samples, buffer.sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{pick_peaks, stft, Partial};

    /// The probe layout: the four nominated partials plus bystanders.
    fn probe_tone() -> AudioBuffer {
        let freqs = [
            200.0, 363.4, 540.0, 727.5, 900.0, 1128.4, 1300.0, 1454.7, 1700.0,
        ];
        let sr = 44_100u32;
        let n = sr as usize;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / sr as f64;
                freqs
                    .iter()
                    .map(|&f| 0.1 * (std::f64::consts::TAU * f * t).sin())
                    .sum()
            })
            .collect();
        AudioBuffer::new(samples, sr).unwrap()
    }

    fn rms_error_db(a: &AudioBuffer, b: &AudioBuffer) -> f64 {
        let err: f64 = a
            .samples
            .iter()
            .zip(&b.samples)
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        let energy: f64 = a.samples.iter().map(|x| x * x).sum();
        10.0 * (err / energy).log10()
    }

    fn partial_powers(buffer: &AudioBuffer, freqs: &[f64]) -> Vec<f64> {
        let spectra = stft(buffer, &FrameSpec::default(), None).unwrap();
        let mid = &spectra[spectra.len() / 2];
        let peaks = pick_peaks(mid, 90.0, 40);
        freqs
            .iter()
            .map(|&f| {
                peaks
                    .iter()
                    .filter(|p| (p.freq_hz - f).abs() < 15.0)
                    .map(|p: &Partial| p.power)
                    .fold(0.0f64, f64::max)
            })
            .collect()
    }

    #[test]
    fn unity_filter_reconstructs_below_minus_80_db() {
        let tone = probe_tone();
        let spec = FilterSpec::new(
            vec![FilterTarget {
                center_hz: 363.4,
                gain_db: 0.0,
            }],
            50.0,
        )
        .unwrap();
        let out = apply_partial_filter(&tone, &spec, &FrameSpec::default()).unwrap();
        assert_eq!(out.len(), tone.len());
        let err = rms_error_db(&tone, &out);
        assert!(err <= -80.0, "reconstruction error {err:.1} dB");
    }

    #[test]
    fn four_target_attenuation_hits_targets_only() {
        let tone = probe_tone();
        let targets = [363.4, 727.5, 1128.4, 1454.7];
        let bystanders = [200.0, 540.0, 900.0, 1300.0, 1700.0];
        let spec = FilterSpec::new(
            targets
                .iter()
                .map(|&f| FilterTarget {
                    center_hz: f,
                    gain_db: -40.0,
                })
                .collect(),
            50.0,
        )
        .unwrap();
        let out = apply_partial_filter(&tone, &spec, &FrameSpec::default()).unwrap();

        let before_t = partial_powers(&tone, &targets);
        let after_t = partial_powers(&out, &targets);
        for ((f, b), a) in targets.iter().zip(&before_t).zip(&after_t) {
            let drop_db = 10.0 * (b / a.max(1e-300)).log10();
            assert!(drop_db >= 35.0, "target {f}: dropped only {drop_db:.1} dB");
        }

        let before_b = partial_powers(&tone, &bystanders);
        let after_b = partial_powers(&out, &bystanders);
        for ((f, b), a) in bystanders.iter().zip(&before_b).zip(&after_b) {
            let change_db = (10.0 * (a / b).log10()).abs();
            assert!(change_db <= 1.0, "bystander {f}: moved {change_db:.2} dB");
        }
    }

    #[test]
    fn single_target_amplification_is_calibrated() {
        let tone = probe_tone();
        let spec = FilterSpec::new(
            vec![FilterTarget {
                center_hz: 363.4,
                gain_db: 12.0,
            }],
            50.0,
        )
        .unwrap();
        let out = apply_partial_filter(&tone, &spec, &FrameSpec::default()).unwrap();
        let before = partial_powers(&tone, &[363.4])[0];
        let after = partial_powers(&out, &[363.4])[0];
        let rise_db = 10.0 * (after / before).log10();
        assert!((rise_db - 12.0).abs() <= 1.0, "rise {rise_db:.2} dB");
    }

    #[test]
    fn gain_then_inverse_gain_restores_audio() {
        let tone = probe_tone();
        let fwd = FilterSpec::new(
            vec![FilterTarget {
                center_hz: 727.5,
                gain_db: 18.0,
            }],
            60.0,
        )
        .unwrap();
        let rev = FilterSpec::new(
            vec![FilterTarget {
                center_hz: 727.5,
                gain_db: -18.0,
            }],
            60.0,
        )
        .unwrap();
        let frame = FrameSpec::default();
        let there = apply_partial_filter(&tone, &fwd, &frame).unwrap();
        let back = apply_partial_filter(&there, &rev, &frame).unwrap();
        let err = rms_error_db(&tone, &back);
        assert!(err <= -40.0, "round-trip error {err:.1} dB");
    }

    #[test]
    fn nyquist_target_is_rejected() {
        let tone = probe_tone();
        let spec = FilterSpec::new(
            vec![FilterTarget {
                center_hz: 30_000.0,
                gain_db: -10.0,
            }],
            50.0,
        )
        .unwrap();
        assert!(matches!(
            apply_partial_filter(&tone, &spec, &FrameSpec::default()),
            Err(Error::AboveNyquist { .. })
        ));
    }

    #[test]
    fn bandwidth_bounds_are_enforced() {
        assert!(FilterSpec::new(vec![], 4.0).is_err());
        assert!(FilterSpec::new(vec![], 250.0).is_err());
        assert!(FilterSpec::new(
            vec![FilterTarget {
                center_hz: -5.0,
                gain_db: 0.0
            }],
            50.0
        )
        .is_err());
    }
}
