//! Frequency / MIDI / cents conversions (12-TET, A4 = 440 Hz).

use crate::error::{Error, Result};

/// Fractional MIDI note number for a frequency. A4 (440 Hz) maps to 69.0.
pub fn hz_to_midi(f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::InvalidArg(format!(
            "frequency must be positive, got {f}"
        )));
    }
    Ok(69.0 + 12.0 * (f / 440.0).log2())
}

/// Frequency of a fractional MIDI note number. 69.0 maps to 440 Hz.
pub fn midi_to_hz(m: f64) -> f64 {
    440.0 * 2f64.powf((m - 69.0) / 12.0)
}

/// Signed interval from `reference` to `f`, in cents.
pub fn cents_between(reference: f64, f: f64) -> f64 {
    1200.0 * (f / reference).log2()
}

/// Deviation from the nearest equal-tempered note, in cents (`-50..=50`).
pub fn cent_deviation(f: f64) -> Result<f64> {
    let midi = hz_to_midi(f)?;
    Ok((midi - midi.round()) * 100.0)
}

/// Note name with octave for the nearest equal-tempered note, e.g. `"A1"`.
pub fn note_name(midi: f64) -> String {
    const NAMES: [&str; 12] = [
        "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
    ];
    let m = midi.round() as i64;
    let idx = (m.rem_euclid(12)) as usize;
    let octave = m.div_euclid(12) - 1;
    format!("{}{}", NAMES[idx], octave)
}
