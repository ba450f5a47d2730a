//! Measurement chain for inharmonic complex tones.
//!
//! The crate analyzes tones whose partials do not sit on a harmonic series:
//! it extracts partials from loudness-weighted power spectra with a
//! regularity-constrained tracker, computes statistics over the frequency
//! differences between consecutive partials, classifies tones into a
//! three-type inharmonicity typology, fits the stiff-string inharmonicity
//! coefficient, and estimates fundamentals both as the least-deviating
//! harmonic series and from the autocorrelation peak. An additive
//! synthesizer generates every analyzed tone family, so each analysis is
//! testable against tones of known construction.
//!
//! Modules:
//! - [`audio`]: WAV I/O, mono conversion, analysis framing;
//! - [`loudness`]: equal-loudness-contour weighting of power spectra;
//! - [`spectrum`]: STFT and spectral peak picking;
//! - [`tracking`]: regularity-constrained partial tracking;
//! - [`stats`], [`grid`], [`classify`], [`piano`]: per-frame metrics,
//!   grid/shift estimation, typology, inharmonicity fitting;
//! - [`midi`]: frequency/MIDI/cents conversions;
//! - [`synth`]: additive synthesis of the tone families;
//! - [`estimators`]: autocorrelation pitch and the sweep experiment;
//! - [`filter`]: STFT-domain partial attenuation/amplification;
//! - [`plot`]: deterministic SVG figures;
//! - [`report`]: the end-to-end pipeline and its JSON report.

pub mod audio;
pub mod classify;
pub mod error;
pub mod estimators;
pub mod filter;
pub mod grid;
pub mod loudness;
pub mod midi;
pub mod piano;
pub mod plot;
pub mod report;
pub mod spectrum;
pub mod stats;
pub mod synth;
pub mod tracking;

pub use audio::{load_wav, save_wav, AudioBuffer, FrameSpec, WindowKind};
pub use classify::{classify_tone, Thresholds, ToneClassification, ToneKind, Type2Variant};
pub use error::{Error, Result};
pub use estimators::{autocorr_pitch, run_sweep_experiment, SweepConfig, SweepRow};
pub use filter::{apply_partial_filter, FilterSpec, FilterTarget};
pub use grid::{estimate_f0_least_deviating, estimate_shift, F0Estimate, GridFit};
pub use loudness::{weight_power_spectrum, LoudnessContour};
pub use midi::{hz_to_midi, midi_to_hz};
pub use piano::{fit_inharmonicity_coefficient, piano_difference_model, InharmonicityFit};
pub use report::{analyze, AnalysisOptions, AnalysisReport};
pub use spectrum::{pick_peaks, stft, Partial, PartialFrame, Spectrum};
pub use stats::{diff_stats, DiffStats};
pub use synth::{partial_table, render, sweep_set, AmplitudeProfile, ToneModel, ToneSpec};
pub use tracking::{track_partials, TrackingConfig};
