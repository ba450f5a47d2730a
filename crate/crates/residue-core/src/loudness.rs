//! Equal-loudness-contour weighting of power spectra.
//!
//! A [`LoudnessContour`] holds the sound pressure level required for equal
//! loudness at a fixed phon level, sampled at anchor frequencies. Power
//! spectra are weighted by `w(f) = 10^((phon - SPL(f)) / 10)`, normalized so
//! `w(1 kHz) = 1`: spectral regions that need more SPL to sound equally loud
//! are attenuated, which makes weighted spectra reflect perceptual salience.
//!
//! The built-in contour evaluates the ISO 226 parametric model (alpha_f,
//! L_u, T_f tables with the standard's SPL formula) at the 29 standard
//! frequencies from 20 Hz to 12.5 kHz. An arbitrary contour can be loaded
//! from a CSV of `frequency_hz,spl_db` rows instead.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

/// The 29 standard third-octave anchor frequencies, 20 Hz to 12.5 kHz.
pub const ISO_226_FREQUENCIES: [f64; 29] = [
    20.0, 25.0, 31.5, 40.0, 50.0, 63.0, 80.0, 100.0, 125.0, 160.0, 200.0, 250.0, 315.0, 400.0,
    500.0, 630.0, 800.0, 1000.0, 1250.0, 1600.0, 2000.0, 2500.0, 3150.0, 4000.0, 5000.0, 6300.0,
    8000.0, 10000.0, 12500.0,
];

// Exponent for loudness perception, alpha_f.
const ALPHA_F: [f64; 29] = [
    0.532, 0.506, 0.480, 0.455, 0.432, 0.409, 0.387, 0.367, 0.349, 0.330, 0.315, 0.301, 0.288,
    0.276, 0.267, 0.259, 0.253, 0.250, 0.246, 0.244, 0.243, 0.243, 0.243, 0.242, 0.242, 0.245,
    0.254, 0.271, 0.301,
];

// Magnitude of the linear transfer function normalized at 1 kHz, L_u (dB).
const L_U: [f64; 29] = [
    -31.6, -27.2, -23.0, -19.1, -15.9, -13.0, -10.3, -8.1, -6.2, -4.5, -3.1, -2.0, -1.1, -0.4,
    0.0, 0.3, 0.5, 0.0, -2.7, -4.1, -1.0, 1.7, 2.5, 1.2, -2.1, -7.1, -11.2, -10.7, -3.1,
];

// Threshold of hearing, T_f (dB).
const T_F: [f64; 29] = [
    78.5, 68.7, 59.5, 51.1, 44.0, 37.5, 31.5, 26.5, 22.1, 17.9, 14.4, 11.4, 8.6, 6.2, 4.4, 3.0,
    2.2, 2.4, 3.5, 1.7, -1.3, -4.2, -6.0, -5.4, -1.5, 6.0, 12.6, 13.9, 12.3,
];

/// SPL (dB) needed at frequency index `i` for loudness `phon`, per the
/// ISO 226 parametric formula.
fn iso_spl(i: usize, phon: f64) -> f64 {
    let af = ALPHA_F[i];
    let lu = L_U[i];
    let tf = T_F[i];
    let a_f = 4.47e-3 * (10f64.powf(0.025 * phon) - 1.15)
        + (0.4 * 10f64.powf((tf + lu) / 10.0 - 9.0)).powf(af);
    10.0 / af * a_f.log10() - lu + 94.0
}

/// Equal-loudness contour at a fixed phon level.
#[derive(Debug, Clone)]
pub struct LoudnessContour {
    /// `(frequency_hz, spl_db)` pairs, strictly increasing in frequency.
    anchors: Vec<(f64, f64)>,
    phon_level: f64,
    /// Precomputed `w(1000)` before normalization.
    weight_at_1k: f64,
}

impl LoudnessContour {
    /// The ISO 226 contour at `phon` (0..=90).
    ///
    /// The 1 kHz anchor is pinned to exactly the phon level (the phon is
    /// defined by the SPL at 1 kHz; the parametric fit is ~0.01 dB off).
    pub fn iso_226(phon: f64) -> Result<Self> {
        if !(0.0..=90.0).contains(&phon) {
            return Err(Error::InvalidArg(format!(
                "phon level must be in 0..=90, got {phon}"
            )));
        }
        let anchors = ISO_226_FREQUENCIES
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let spl = if f == 1000.0 { phon } else { iso_spl(i, phon) };
                (f, spl)
            })
            .collect();
        Self::from_anchors(anchors, phon)
    }

    /// Contour from explicit `(frequency_hz, spl_db)` anchors.
    pub fn from_anchors(anchors: Vec<(f64, f64)>, phon_level: f64) -> Result<Self> {
        if anchors.len() < 2 {
            return Err(Error::InvalidArg(
                "contour needs at least two anchor points".into(),
            ));
        }
        if !anchors.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::InvalidArg(
                "contour frequencies must be strictly increasing".into(),
            ));
        }
        if anchors[0].0 > 20.0 || anchors.last().unwrap().0 < 12_500.0 {
            return Err(Error::InvalidArg(
                "contour must cover at least 20 Hz to 12.5 kHz".into(),
            ));
        }
        if !(0.0..=90.0).contains(&phon_level) {
            return Err(Error::InvalidArg(format!(
                "phon level must be in 0..=90, got {phon_level}"
            )));
        }
        let mut contour = Self {
            anchors,
            phon_level,
            weight_at_1k: 1.0,
        };
        contour.weight_at_1k = contour.raw_weight(1000.0);
        Ok(contour)
    }

    /// Contour from a CSV of `frequency_hz,spl_db` rows (header optional,
    /// `#` comments ignored).
    pub fn from_csv<P: AsRef<Path>>(path: P, phon_level: f64) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut anchors = Vec::new();
        for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split(',').map(str::trim);
            let (fa, fb) = (fields.next(), fields.next());
            let (Some(fa), Some(fb)) = (fa, fb) else {
                return Err(Error::Parse(format!(
                    "contour CSV line {}: expected `hz,db`",
                    lineno + 1
                )));
            };
            if lineno == 0 && fa.parse::<f64>().is_err() {
                continue; // header row
            }
            let hz: f64 = fa
                .parse()
                .map_err(|_| Error::Parse(format!("contour CSV line {}: bad Hz", lineno + 1)))?;
            let db: f64 = fb
                .parse()
                .map_err(|_| Error::Parse(format!("contour CSV line {}: bad dB", lineno + 1)))?;
            anchors.push((hz, db));
        }
        Self::from_anchors(anchors, phon_level)
    }

    pub fn phon_level(&self) -> f64 {
        self.phon_level
    }

    /// Interpolated SPL for equal loudness at `f` Hz.
    ///
    /// Linear in (log-frequency, dB) space between anchors; frequencies
    /// outside the anchor range clamp to the boundary value.
    pub fn spl_at(&self, f: f64) -> f64 {
        let first = self.anchors[0];
        let last = *self.anchors.last().unwrap();
        if f <= first.0 {
            return first.1;
        }
        if f >= last.0 {
            return last.1;
        }
        let idx = self.anchors.partition_point(|&(hz, _)| hz < f);
        let (f0, s0) = self.anchors[idx - 1];
        let (f1, s1) = self.anchors[idx];
        let t = (f.ln() - f0.ln()) / (f1.ln() - f0.ln());
        s0 + t * (s1 - s0)
    }

    fn raw_weight(&self, f: f64) -> f64 {
        10f64.powf((self.phon_level - self.spl_at(f)) / 10.0)
    }

    /// Power weight at `f`, normalized so `weight(1000) == 1`.
    pub fn weight(&self, f: f64) -> f64 {
        self.raw_weight(f) / self.weight_at_1k
    }
}

/// Multiply each `(frequency, power)` bin by the contour's power weight.
pub fn weight_power_spectrum(
    power: &[(f64, f64)],
    contour: &LoudnessContour,
) -> Vec<(f64, f64)> {
    power
        .iter()
        .map(|&(f, p)| (f, p * contour.weight(f)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_khz_is_exactly_the_phon_level() {
        let c = LoudnessContour::iso_226(50.0).unwrap();
        assert_eq!(c.spl_at(1000.0), 50.0);
        assert_eq!(c.weight(1000.0), 1.0);
    }

    #[test]
    fn low_frequencies_need_more_spl() {
        let c = LoudnessContour::iso_226(50.0).unwrap();
        assert!(c.spl_at(100.0) > c.spl_at(1000.0));
        assert!(c.spl_at(50.0) > c.spl_at(100.0));
    }

    #[test]
    fn interpolation_stays_between_anchor_values() {
        let c = LoudnessContour::iso_226(50.0).unwrap();
        for w in ISO_226_FREQUENCIES.windows(2) {
            let mid = (w[0] * w[1]).sqrt();
            let (a, b) = (c.spl_at(w[0]), c.spl_at(w[1]));
            let s = c.spl_at(mid);
            assert!(s >= a.min(b) - 1e-12 && s <= a.max(b) + 1e-12);
        }
    }

    #[test]
    fn out_of_range_clamps_to_boundary() {
        let c = LoudnessContour::iso_226(50.0).unwrap();
        assert_eq!(c.spl_at(5.0), c.spl_at(20.0));
        assert_eq!(c.spl_at(20_000.0), c.spl_at(12_500.0));
    }

    #[test]
    fn weights_are_positive_everywhere() {
        let c = LoudnessContour::iso_226(50.0).unwrap();
        let mut f = 20.0;
        while f < 12_500.0 {
            assert!(c.weight(f) > 0.0);
            f *= 1.07;
        }
    }

    #[test]
    fn weighting_attenuates_50_hz_leaves_1_khz() {
        let c = LoudnessContour::iso_226(50.0).unwrap();
        let spectrum = vec![(50.0, 1.0), (1000.0, 1.0)];
        let weighted = weight_power_spectrum(&spectrum, &c);
        assert!(weighted[0].1 < 1.0);
        assert_eq!(weighted[1].1, 1.0);
    }

    #[test]
    fn weighting_is_homogeneous_and_zero_preserving() {
        let c = LoudnessContour::iso_226(50.0).unwrap();
        let spectrum: Vec<(f64, f64)> = (1..200).map(|i| (i as f64 * 50.0, i as f64)).collect();
        let scaled: Vec<(f64, f64)> = spectrum.iter().map(|&(f, p)| (f, 3.5 * p)).collect();
        let w1 = weight_power_spectrum(&spectrum, &c);
        let w2 = weight_power_spectrum(&scaled, &c);
        for (a, b) in w1.iter().zip(&w2) {
            assert!((b.1 - 3.5 * a.1).abs() <= 1e-12 * b.1.abs().max(1.0));
        }
        let zeros = vec![(100.0, 0.0), (440.0, 0.0)];
        assert!(weight_power_spectrum(&zeros, &c).iter().all(|&(_, p)| p == 0.0));
    }

    #[test]
    fn csv_round_trip_matches_builtin() {
        let c = LoudnessContour::iso_226(50.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("contour.csv");
        let mut body = String::from("frequency_hz,spl_db\n");
        for &f in ISO_226_FREQUENCIES.iter() {
            body.push_str(&format!("{},{}\n", f, c.spl_at(f)));
        }
        std::fs::write(&path, body).unwrap();
        let c2 = LoudnessContour::from_csv(&path, 50.0).unwrap();
        for f in [20.0, 55.0, 220.0, 997.0, 1000.0, 5_000.0, 12_500.0] {
            assert!((c.spl_at(f) - c2.spl_at(f)).abs() < 1e-9);
            assert!((c.weight(f) - c2.weight(f)).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_contours() {
        assert!(LoudnessContour::from_anchors(vec![(100.0, 60.0)], 50.0).is_err());
        assert!(
            LoudnessContour::from_anchors(vec![(100.0, 60.0), (90.0, 55.0), (13_000.0, 40.0)], 50.0)
                .is_err()
        );
        assert!(LoudnessContour::from_anchors(vec![(30.0, 60.0), (1_000.0, 50.0)], 50.0).is_err());
        assert!(LoudnessContour::iso_226(95.0).is_err());
    }
}
