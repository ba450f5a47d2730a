//! Additive synthesis of every analyzed tone family, used both by the CLI
//! and as the ground-truth generator in tests.
//!
//! A [`ToneSpec`] is a generative description: model family and parameters,
//! partial count, amplitude profile, duration, level, and a seed for the
//! random phases (and the diff jitter of the noisy family). Rendering is
//! deterministic: the same spec and sample rate give bit-identical buffers.
//!
//! `ToneSpec` serializes to/from JSON, e.g.:
//!
//! ```json
//! {
//!   "model": { "type": "regular_grid", "d_hz": 55.0, "s_hz": 7.0 },
//!   "f0_hz": 55.0,
//!   "n_partials": 20,
//!   "amplitude_profile": "equal",
//!   "odd_only": false,
//!   "duration_s": 1.0,
//!   "level": 0.9,
//!   "seed": 0
//! }
//! ```

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::stats::median;

/// Start of the inharmonicity sweep: the harmonic member's fundamental.
pub const SWEEP_START_HZ: f64 = 220.0;
/// End of the sweep: overtones become multiples of this (a whole tone up).
pub const SWEEP_END_HZ: f64 = 246.94;
/// Amplitude decay exponent for sweep members (`a_n = n^-1.6`). A decaying
/// profile keeps the fundamental-versus-comb balance that produces the
/// compromise autocorrelation peak between the two; with equal amplitudes
/// the comb swamps the fundamental and autocorrelation just returns the
/// overtone spacing.
pub const SWEEP_AMPLITUDE_EXPONENT: f64 = 1.6;

/// Tone family and its frequency-layout parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ToneModel {
    /// Partials at `n * f0`.
    Harmonic,
    /// `f0` plus overtones at `n * f0 + shift` (n >= 2).
    ShiftedResidue { shift_hz: f64 },
    /// Partials at `n * d + s` (n >= 1); covers stretched, compressed and
    /// shifted tones.
    RegularGrid { d_hz: f64, s_hz: f64 },
    /// Harmonic positions with consecutive spacings jittered so their
    /// median absolute deviation is `jitter_cents`.
    NoisyHarmonic { jitter_cents: f64 },
    /// Stiff-string partials `n * f0 * sqrt(1 + b n^2)`.
    Piano { b: f64 },
    /// `f0` plus overtones at `n * g` (n >= 2).
    SweepMember { g_hz: f64 },
}

/// Per-partial amplitudes.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeProfile {
    #[default]
    Equal,
    /// `1/n` on the harmonic index.
    Reciprocal,
    /// Explicit list, one amplitude per partial.
    Custom(Vec<f64>),
}

/// Generative description of a synthetic tone.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ToneSpec {
    pub model: ToneModel,
    /// Fundamental (or lowest-partial) frequency in Hz.
    pub f0_hz: f64,
    pub n_partials: usize,
    #[serde(default)]
    pub amplitude_profile: AmplitudeProfile,
    /// Keep only odd harmonic indices.
    #[serde(default)]
    pub odd_only: bool,
    #[serde(default = "default_duration")]
    pub duration_s: f64,
    /// Peak amplitude after normalization, in (0, 1].
    #[serde(default = "default_level")]
    pub level: f64,
    /// Seed for random phases and the noisy family's jitter.
    #[serde(default)]
    pub seed: u64,
}

fn default_duration() -> f64 {
    1.0
}

fn default_level() -> f64 {
    0.9
}

impl ToneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_partials == 0 {
            return Err(Error::InvalidArg("n_partials must be at least 1".into()));
        }
        if !(self.f0_hz > 0.0) {
            return Err(Error::InvalidArg("f0_hz must be positive".into()));
        }
        if !(self.level > 0.0 && self.level <= 1.0) {
            return Err(Error::InvalidArg("level must be in (0, 1]".into()));
        }
        if !(self.duration_s > 0.0) {
            return Err(Error::InvalidArg("duration_s must be positive".into()));
        }
        match &self.model {
            ToneModel::NoisyHarmonic { jitter_cents } if *jitter_cents < 0.0 => {
                return Err(Error::InvalidArg("jitter_cents must be >= 0".into()))
            }
            ToneModel::Piano { b } if *b < 0.0 => {
                return Err(Error::InvalidArg("piano b must be >= 0".into()))
            }
            ToneModel::RegularGrid { d_hz, .. } if *d_hz <= 0.0 => {
                return Err(Error::InvalidArg("grid d_hz must be positive".into()))
            }
            ToneModel::SweepMember { g_hz } if *g_hz <= 0.0 => {
                return Err(Error::InvalidArg("sweep g_hz must be positive".into()))
            }
            _ => {}
        }
        if let AmplitudeProfile::Custom(list) = &self.amplitude_profile {
            if list.len() != self.n_partials {
                return Err(Error::InvalidArg(format!(
                    "custom amplitude list has {} entries for {} partials",
                    list.len(),
                    self.n_partials
                )));
            }
            if list.iter().any(|a| !a.is_finite() || *a < 0.0) {
                return Err(Error::InvalidArg(
                    "custom amplitudes must be finite and non-negative".into(),
                ));
            }
        }
        Ok(())
    }

    /// Harmonic indices of the generated partials (1-based; odd subset when
    /// `odd_only`).
    fn indices(&self) -> Vec<u32> {
        if self.odd_only {
            (0..self.n_partials as u32).map(|k| 2 * k + 1).collect()
        } else {
            (1..=self.n_partials as u32).collect()
        }
    }

    fn amplitude(&self, position: usize, index: u32) -> f64 {
        match &self.amplitude_profile {
            AmplitudeProfile::Equal => 1.0,
            AmplitudeProfile::Reciprocal => 1.0 / index as f64,
            AmplitudeProfile::Custom(list) => list[position],
        }
    }
}

/// The `(frequency_hz, amplitude)` table a spec generates at `sample_rate`.
///
/// Errors if any partial reaches the Nyquist frequency, naming the first
/// offending partial.
pub fn partial_table(spec: &ToneSpec, sample_rate: u32) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    let indices = spec.indices();
    let f0 = spec.f0_hz;

    let freqs: Vec<f64> = match &spec.model {
        ToneModel::Harmonic => indices.iter().map(|&n| n as f64 * f0).collect(),
        ToneModel::ShiftedResidue { shift_hz } => indices
            .iter()
            .map(|&n| {
                if n == 1 {
                    f0
                } else {
                    n as f64 * f0 + shift_hz
                }
            })
            .collect(),
        ToneModel::RegularGrid { d_hz, s_hz } => {
            indices.iter().map(|&n| n as f64 * d_hz + s_hz).collect()
        }
        ToneModel::Piano { b } => indices
            .iter()
            .map(|&n| {
                let nf = n as f64;
                nf * f0 * (1.0 + b * nf * nf).sqrt()
            })
            .collect(),
        ToneModel::SweepMember { g_hz } => indices
            .iter()
            .map(|&n| if n == 1 { f0 } else { n as f64 * g_hz })
            .collect(),
        ToneModel::NoisyHarmonic { jitter_cents } => {
            noisy_positions(&indices, f0, *jitter_cents, spec.seed)
        }
    };

    if freqs.iter().any(|f| !(*f > 0.0)) {
        return Err(Error::InvalidArg(
            "tone parameters produce a non-positive partial frequency".into(),
        ));
    }

    let nyquist = sample_rate as f64 / 2.0;
    for (i, &f) in freqs.iter().enumerate() {
        if f >= nyquist {
            return Err(Error::AboveNyquist {
                index: i + 1,
                freq_hz: f,
                nyquist,
            });
        }
    }

    Ok(freqs
        .iter()
        .enumerate()
        .map(|(pos, &f)| (f, spec.amplitude(pos, indices[pos])))
        .collect())
}

/// Harmonic positions with jittered consecutive spacings.
///
/// The spacings between kept partials are scaled by `2^(eta/1200)` with
/// centered draws normalized so their median absolute deviation equals
/// `jitter_cents`; the dispersion a downstream difference analysis measures
/// then matches the requested jitter.
fn noisy_positions(indices: &[u32], f0: f64, jitter_cents: f64, seed: u64) -> Vec<f64> {
    let mut freqs = Vec::with_capacity(indices.len());
    freqs.push(indices[0] as f64 * f0);
    if indices.len() == 1 {
        return freqs;
    }
    let mut eta: Vec<f64> = if jitter_cents > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (1..indices.len())
            .map(|_| rng.gen_range(-2.0 * jitter_cents..=2.0 * jitter_cents))
            .collect()
    } else {
        vec![0.0; indices.len() - 1]
    };
    if jitter_cents > 0.0 {
        let center = median(&eta).unwrap_or(0.0);
        for e in eta.iter_mut() {
            *e -= center;
        }
        let abs: Vec<f64> = eta.iter().map(|e| e.abs()).collect();
        let mad = median(&abs).unwrap_or(0.0);
        if mad > 1e-9 {
            let scale = jitter_cents / mad;
            for e in eta.iter_mut() {
                *e *= scale;
            }
        }
    }
    for (k, w) in indices.windows(2).enumerate() {
        let ideal = (w[1] - w[0]) as f64 * f0;
        let spacing = ideal * 2f64.powf(eta[k] / 1200.0);
        let prev = *freqs.last().unwrap();
        freqs.push(prev + spacing);
    }
    freqs
}

/// Render a spec to audio: seeded random phases, 10 ms raised-cosine fades,
/// peak normalized to `spec.level`.
pub fn render(spec: &ToneSpec, sample_rate: u32) -> Result<AudioBuffer> {
    let table = partial_table(spec, sample_rate)?;
    let n = (spec.duration_s * sample_rate as f64).round() as usize;
    if n == 0 {
        return Err(Error::InvalidArg("duration renders zero samples".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let phases: Vec<f64> = table
        .iter()
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();

    let sr = sample_rate as f64;
    let mut samples = vec![0.0f64; n];
    for ((f, a), phase) in table.iter().zip(&phases) {
        if *a == 0.0 {
            continue;
        }
        let w = std::f64::consts::TAU * f / sr;
        for (i, s) in samples.iter_mut().enumerate() {
            *s += a * (w * i as f64 + phase).sin();
        }
    }

    // 10 ms raised-cosine fade in/out
    let fade = ((0.010 * sr) as usize).min(n / 2).max(1);
    for i in 0..fade {
        let g = 0.5 - 0.5 * (std::f64::consts::PI * i as f64 / fade as f64).cos();
        samples[i] *= g;
        samples[n - 1 - i] *= g;
    }

    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > 0.0 {
        let gain = spec.level / peak;
        for s in samples.iter_mut() {
            *s *= gain;
        }
    }

    AudioBuffer::new(samples, sample_rate)
}

/// The tone set of the inharmonicity sweep: `n_steps` members whose
/// overtone multiplier runs linearly from 220 Hz to 246.94 Hz inclusive.
/// The first member is fully harmonic; every member keeps the 220 Hz
/// fundamental.
pub fn sweep_set(n_steps: usize, n_partials: usize) -> Result<Vec<(f64, ToneSpec)>> {
    if n_steps < 2 {
        return Err(Error::InvalidArg("sweep needs at least 2 steps".into()));
    }
    if n_partials == 0 {
        return Err(Error::InvalidArg("sweep needs at least 1 partial".into()));
    }
    let amplitudes: Vec<f64> = (1..=n_partials)
        .map(|n| (n as f64).powf(-SWEEP_AMPLITUDE_EXPONENT))
        .collect();
    Ok((0..n_steps)
        .map(|k| {
            let t = k as f64 / (n_steps - 1) as f64;
            let g = SWEEP_START_HZ + t * (SWEEP_END_HZ - SWEEP_START_HZ);
            let spec = ToneSpec {
                model: ToneModel::SweepMember { g_hz: g },
                f0_hz: SWEEP_START_HZ,
                n_partials,
                amplitude_profile: AmplitudeProfile::Custom(amplitudes.clone()),
                odd_only: false,
                duration_s: 1.0,
                level: 0.9,
                seed: k as u64,
            };
            (g, spec)
        })
        .collect())
}
