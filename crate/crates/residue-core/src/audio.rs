//! WAV input/output and framing of audio into windowed analysis blocks.
//!
//! Files are decoded to a mono [`AudioBuffer`] with samples in `-1.0..1.0`.
//! Stereo input is averaged to mono; output is always 24-bit PCM mono.

use std::path::Path;

use crate::error::{Error, Result};

/// Mono audio held as `f64` samples in `-1.0..1.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    /// Build a buffer, rejecting non-finite samples and a zero sample rate.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidArg("sample rate must be positive".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArg("samples must be finite".into()));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Window taper applied to each analysis frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    #[default]
    Hann,
    Hamming,
    Rectangular,
}

impl WindowKind {
    /// Window coefficients of length `n` (periodic form, for overlap-add use).
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        use std::f64::consts::PI;
        match self {
            WindowKind::Rectangular => vec![1.0; n],
            WindowKind::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
            WindowKind::Hamming => (0..n)
                .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
        }
    }
}

impl std::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hann" => Ok(WindowKind::Hann),
            "hamming" => Ok(WindowKind::Hamming),
            "rectangular" | "rect" => Ok(WindowKind::Rectangular),
            other => Err(Error::InvalidArg(format!("unknown window kind: {other}"))),
        }
    }
}

impl std::fmt::Display for WindowKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            WindowKind::Hann => "hann",
            WindowKind::Hamming => "hamming",
            WindowKind::Rectangular => "rectangular",
        };
        f.write_str(s)
    }
}

/// Analysis framing: window length, hop, and taper.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FrameSpec {
    pub window_size: usize,
    pub hop_size: usize,
    pub window_kind: WindowKind,
}

impl FrameSpec {
    /// Validated constructor: `0 < hop <= window` and `window` a power of two.
    pub fn new(window_size: usize, hop_size: usize, window_kind: WindowKind) -> Result<Self> {
        if !window_size.is_power_of_two() {
            return Err(Error::InvalidArg(format!(
                "window size must be a power of two, got {window_size}"
            )));
        }
        if hop_size == 0 || hop_size > window_size {
            return Err(Error::InvalidArg(format!(
                "hop size must satisfy 0 < hop <= window, got hop={hop_size} window={window_size}"
            )));
        }
        Ok(Self {
            window_size,
            hop_size,
            window_kind,
        })
    }
}

impl Default for FrameSpec {
    /// 4096-sample Hann window with a 1024-sample hop: ~10.8 Hz bin spacing
    /// at 44.1 kHz, enough to separate partials 55 Hz apart.
    fn default() -> Self {
        Self {
            window_size: 4096,
            hop_size: 1024,
            window_kind: WindowKind::Hann,
        }
    }
}

const PCM24_SCALE: f64 = 8_388_608.0; // 2^23

/// Load a WAV file (PCM 16/24-bit or 32-bit float, 1-2 channels) as mono.
pub fn load_wav<P: AsRef<Path>>(path: P) -> Result<AudioBuffer> {
    let mut reader = hound::WavReader::open(path.as_ref()).map_err(wav_err)?;
    let spec = reader.spec();
    if spec.channels == 0 || spec.channels > 2 {
        return Err(Error::UnsupportedAudio(format!(
            "{} channels (only mono and stereo are supported)",
            spec.channels
        )));
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32_768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (hound::SampleFormat::Int, 24) => reader
            .samples::<i32>()
            .map(|s| s.map(|v| v as f64 / PCM24_SCALE))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (fmt, bits) => {
            return Err(Error::UnsupportedAudio(format!(
                "{bits}-bit {fmt:?} (supported: 16/24-bit PCM, 32-bit float)"
            )))
        }
    };

    if interleaved.is_empty() {
        return Err(Error::EmptyAudio);
    }

    let samples = if spec.channels == 2 {
        interleaved
            .chunks_exact(2)
            .map(|lr| 0.5 * (lr[0] + lr[1]))
            .collect()
    } else {
        interleaved
    };

    AudioBuffer::new(samples, spec.sample_rate)
}

/// Write a buffer as a 24-bit PCM mono WAV file.
pub fn save_wav<P: AsRef<Path>>(buffer: &AudioBuffer, path: P) -> Result<()> {
    if buffer.is_empty() {
        return Err(Error::EmptyAudio);
    }
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: buffer.sample_rate,
        bits_per_sample: 24,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path.as_ref(), spec).map_err(wav_err)?;
    for &s in &buffer.samples {
        // full scale +1.0 maps to the maximum positive 24-bit code
        let v = (s.clamp(-1.0, 1.0) * PCM24_SCALE).round() as i64;
        let v = v.clamp(-(PCM24_SCALE as i64), PCM24_SCALE as i64 - 1) as i32;
        writer.write_sample(v).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)?;
    Ok(())
}

fn wav_err(e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::Io(io),
        other => Error::Wav(other.to_string()),
    }
}

/// Number of frames produced for a buffer of `len` samples.
pub fn frame_count(len: usize, window_size: usize, hop_size: usize) -> usize {
    if len < window_size {
        0
    } else {
        (len - window_size) / hop_size + 1
    }
}

/// One analysis frame: its center time and windowed samples.
#[derive(Debug, Clone)]
pub struct Frame {
    pub time_s: f64,
    pub samples: Vec<f64>,
}

/// Slice a buffer into overlapping, windowed frames.
///
/// Frame `k` starts at sample `k * hop`; the time stamp is the window
/// center in seconds. Errors if the buffer is shorter than one window.
pub fn frames(buffer: &AudioBuffer, spec: &FrameSpec) -> Result<Vec<Frame>> {
    if buffer.len() < spec.window_size {
        return Err(Error::BufferTooShort {
            len: buffer.len(),
            need: spec.window_size,
        });
    }
    let window = spec.window_kind.coefficients(spec.window_size);
    let n = frame_count(buffer.len(), spec.window_size, spec.hop_size);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let start = k * spec.hop_size;
        let block = &buffer.samples[start..start + spec.window_size];
        let samples: Vec<f64> = block.iter().zip(&window).map(|(s, w)| s * w).collect();
        let time_s = (start as f64 + spec.window_size as f64 / 2.0) / buffer.sample_rate as f64;
        out.push(Frame { time_s, samples });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(freq: f64, amp: f64, sr: u32, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / sr as f64).sin())
            .collect()
    }

    #[test]
    fn stereo_identical_channels_average_losslessly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stereo.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 44_100,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mono = sine(220.0, 0.5, 44_100, 44_100);
        let mut writer = hound::WavWriter::create(&path, spec).unwrap();
        for &s in &mono {
            let v = (s * 32_768.0).round().clamp(-32_768.0, 32_767.0) as i16;
            writer.write_sample(v).unwrap();
            writer.write_sample(v).unwrap();
        }
        writer.finalize().unwrap();

        let loaded = load_wav(&path).unwrap();
        assert_eq!(loaded.sample_rate, 44_100);
        assert_eq!(loaded.len(), 44_100);
        let peak = loaded.samples.iter().cloned().fold(0.0f64, |a, s| a.max(s.abs()));
        assert!((peak - 0.5).abs() < 1e-3, "peak {peak}");
        for (a, b) in loaded.samples.iter().zip(&mono) {
            assert!((a - b).abs() < 1.0 / 32_768.0 + 1e-12);
        }
    }

    #[test]
    fn pcm16_value_16384_is_half_scale() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("half.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 48_000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(&path, spec).unwrap();
        writer.write_sample(16_384i16).unwrap();
        writer.finalize().unwrap();

        let loaded = load_wav(&path).unwrap();
        assert!((loaded.samples[0] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn save_load_round_trip_within_one_lsb() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.wav");
        let buffer = AudioBuffer::new(sine(440.0, 0.8, 44_100, 4_410), 44_100).unwrap();
        save_wav(&buffer, &path).unwrap();
        let reloaded = load_wav(&path).unwrap();
        assert_eq!(reloaded.len(), buffer.len());
        let lsb = 1.0 / PCM24_SCALE;
        for (a, b) in reloaded.samples.iter().zip(&buffer.samples) {
            assert!((a - b).abs() <= lsb, "diff {}", (a - b).abs());
        }
        // second generation is bit-stable
        let path2 = dir.path().join("rt2.wav");
        save_wav(&reloaded, &path2).unwrap();
        let third = load_wav(&path2).unwrap();
        assert_eq!(third.samples, reloaded.samples);
    }

    #[test]
    fn full_scale_sample_saves_without_clipping_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("full.wav");
        let buffer = AudioBuffer::new(vec![1.0, -1.0, 0.0], 44_100).unwrap();
        save_wav(&buffer, &path).unwrap();
        let loaded = load_wav(&path).unwrap();
        assert!(loaded.samples[0] > 1.0 - 2.0 / PCM24_SCALE);
        assert!((loaded.samples[1] + 1.0).abs() < 2.0 / PCM24_SCALE);
    }

    #[test]
    fn empty_buffer_save_errors() {
        let dir = tempfile::tempdir().unwrap();
        let buffer = AudioBuffer {
            samples: vec![],
            sample_rate: 44_100,
        };
        assert!(matches!(
            save_wav(&buffer, dir.path().join("e.wav")),
            Err(Error::EmptyAudio)
        ));
    }

    #[test]
    fn missing_file_errors() {
        assert!(load_wav("/nonexistent/definitely/missing.wav").is_err());
    }

    #[test]
    fn frame_count_formula() {
        assert_eq!(frame_count(44_100, 4_096, 1_024), 40);
        assert_eq!(frame_count(4_096, 4_096, 1_024), 1);
        assert_eq!(frame_count(4_095, 4_096, 1_024), 0);
        // exhaustive-ish check of the formula
        for len in [4_096usize, 5_000, 8_192, 44_100, 100_000] {
            for hop in [256usize, 1_000, 1_024, 4_096] {
                let n = frame_count(len, 4_096, hop);
                assert!((n - 1) * hop + 4_096 <= len);
                assert!(n * hop + 4_096 > len);
            }
        }
    }

    #[test]
    fn rectangular_window_frame_equals_raw_slice() {
        let buffer = AudioBuffer::new(sine(100.0, 0.3, 8_000, 2_048), 8_000).unwrap();
        let spec = FrameSpec::new(1_024, 512, WindowKind::Rectangular).unwrap();
        let fs = frames(&buffer, &spec).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(fs[1].samples, buffer.samples[512..512 + 1_024].to_vec());
    }

    #[test]
    fn frame_times_increase_by_hop() {
        let buffer = AudioBuffer::new(vec![0.0; 10_000], 10_000).unwrap();
        let spec = FrameSpec::new(1_024, 256, WindowKind::Hann).unwrap();
        let fs = frames(&buffer, &spec).unwrap();
        for pair in fs.windows(2) {
            let dt = pair[1].time_s - pair[0].time_s;
            assert!((dt - 256.0 / 10_000.0).abs() < 1e-12);
        }
        assert!((fs[0].time_s - 512.0 / 10_000.0).abs() < 1e-12);
    }

    #[test]
    fn short_buffer_errors() {
        let buffer = AudioBuffer::new(vec![0.0; 100], 44_100).unwrap();
        assert!(frames(&buffer, &FrameSpec::default()).is_err());
    }

    #[test]
    fn frame_spec_validation() {
        assert!(FrameSpec::new(4_000, 1_024, WindowKind::Hann).is_err()); // not power of two
        assert!(FrameSpec::new(4_096, 0, WindowKind::Hann).is_err());
        assert!(FrameSpec::new(4_096, 8_192, WindowKind::Hann).is_err());
    }
}
