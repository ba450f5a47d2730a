//! `residue` - analysis and synthesis of inharmonic complex tones.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use residue_core::audio::{load_wav, save_wav, FrameSpec, WindowKind};
use residue_core::classify::Thresholds;
use residue_core::error::Error;
use residue_core::estimators::{run_sweep_experiment, sweep_rows_to_csv, SweepConfig};
use residue_core::filter::{apply_partial_filter, FilterSpec, FilterTarget};
use residue_core::grid::estimate_shift;
use residue_core::loudness::LoudnessContour;
use residue_core::piano::fit_inharmonicity_coefficient;
use residue_core::plot::{AxisMode, PlotRequest, ShiftDiagramNote};
use residue_core::report::{analyze, report_to_csv, AnalysisOptions};
use residue_core::spectrum::{pick_peaks, stft, Partial, PartialFrame};
use residue_core::synth::{render, ToneSpec};
use residue_core::tracking::TrackingConfig;

/// Environment variable naming a default thresholds config file.
const THRESHOLDS_ENV: &str = "RESIDUE_THRESHOLDS";

#[derive(Parser)]
#[command(
    name = "residue",
    version,
    about = "Analyze and synthesize inharmonic complex tones",
    long_about = "Measurement chain for inharmonic complex tones: loudness-weighted \
spectral analysis, regularity-constrained partial tracking, consecutive-difference \
statistics, tone typology, inharmonicity fitting, and an additive synthesizer for \
every analyzed tone family.\n\nExit codes: 0 success, 1 I/O failure, 2 usage error, \
3 analysis failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FrameArgs {
    /// Analysis window size in samples (power of two)
    #[arg(long, default_value_t = 4096)]
    window: usize,
    /// Hop between frames in samples
    #[arg(long, default_value_t = 1024)]
    hop: usize,
    /// Window taper: hann, hamming or rectangular
    #[arg(long, default_value = "hann")]
    window_kind: String,
}

impl FrameArgs {
    fn build(&self) -> Result<FrameSpec, Error> {
        let kind: WindowKind = self.window_kind.parse()?;
        FrameSpec::new(self.window, self.hop, kind)
    }
}

#[derive(Args, Clone)]
struct WeightingArgs {
    /// Disable equal-loudness weighting
    #[arg(long)]
    no_weighting: bool,
    /// Phon level of the built-in equal-loudness contour
    #[arg(long, default_value_t = 50.0)]
    phon: f64,
    /// Override the contour with a CSV of `frequency_hz,spl_db` rows
    #[arg(long, value_name = "FILE")]
    contour_csv: Option<PathBuf>,
}

impl WeightingArgs {
    fn build(&self) -> Result<(Option<LoudnessContour>, String), Error> {
        if self.no_weighting {
            return Ok((None, "none".into()));
        }
        match &self.contour_csv {
            Some(path) => Ok((
                Some(LoudnessContour::from_csv(path, self.phon)?),
                format!("csv:{}", path.display()),
            )),
            None => Ok((
                Some(LoudnessContour::iso_226(self.phon)?),
                format!("iso226-{}phon", self.phon),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a WAV file into a JSON report (plus optional CSV and SVGs)
    Analyze {
        /// Input WAV file
        input: PathBuf,
        #[command(flatten)]
        frame: FrameArgs,
        #[command(flatten)]
        weighting: WeightingArgs,
        /// Thresholds config file (`key = value`); falls back to
        /// $RESIDUE_THRESHOLDS, then to built-in defaults
        #[arg(long, value_name = "FILE")]
        thresholds: Option<PathBuf>,
        /// Maximum partials tracked per frame
        #[arg(long, default_value_t = 27)]
        max_partials: usize,
        /// Peak floor, dB below the frame maximum
        #[arg(long, default_value_t = 60.0)]
        floor_db: f64,
        /// Tracking gate: maximum deviation from the fitted grid, cents
        #[arg(long, default_value_t = 35.0)]
        tol_cents: f64,
        /// Report output path (`-` for stdout)
        #[arg(long, default_value = "-")]
        out: String,
        /// Also write per-frame CSV here
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Also write SVG figures with this path prefix
        #[arg(long, value_name = "PREFIX")]
        svg: Option<String>,
    },
    /// Render a tone spec (JSON) to a WAV file
    Synth {
        /// Tone spec JSON file (`-` for stdin)
        #[arg(long, value_name = "FILE")]
        spec: String,
        /// Output WAV path
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[arg(long, default_value_t = 44_100)]
        sample_rate: u32,
    },
    /// Run the inharmonicity sweep experiment and write its CSV
    Sweep {
        /// Number of sweep steps
        #[arg(long, default_value_t = 21)]
        steps: usize,
        /// Partials per member (fundamental plus overtones)
        #[arg(long, default_value_t = 21)]
        partials: usize,
        #[arg(long, default_value_t = 44_100)]
        sample_rate: u32,
        /// CSV output path (`-` for stdout)
        #[arg(long, default_value = "-")]
        out: String,
        /// Also write the sweep-curves SVG here
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
    /// Fit the stiff-string inharmonicity coefficient of a WAV file
    FitB {
        /// Input WAV file
        input: PathBuf,
        #[command(flatten)]
        frame: FrameArgs,
        /// Peak floor, dB below the frame maximum
        #[arg(long, default_value_t = 60.0)]
        floor_db: f64,
        /// Maximum partials used for the fit
        #[arg(long, default_value_t = 24)]
        max_partials: usize,
        /// Output path (`-` for stdout)
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Attenuate or amplify partials of a WAV file
    Filter {
        /// Input WAV file
        input: PathBuf,
        /// Target as `<hz>:<db>`; repeatable
        #[arg(long = "target", value_name = "HZ:DB", required = true)]
        targets: Vec<String>,
        /// Half-response width of each target, cents
        #[arg(long, default_value_t = 50.0)]
        bandwidth_cents: f64,
        #[command(flatten)]
        frame: FrameArgs,
        /// Output WAV path
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Render an SVG figure from a report or sweep CSV
    Plot {
        /// Figure kind: spectrogram_overlay, spectrum_frame,
        /// diff_distribution, sweep_curves or shift_diagram
        #[arg(long)]
        kind: String,
        /// Analysis report JSON (for report-backed kinds)
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Sweep CSV (for sweep_curves)
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Frame index for spectrum_frame / diff_distribution
        #[arg(long, default_value_t = 0)]
        frame_index: usize,
        /// Frequency axis: hz or midi
        #[arg(long, default_value = "hz")]
        axis: String,
        /// Output SVG path
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Exit codes: 1 I/O, 2 usage, 3 analysis failure.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Wav(_) => 1,
        Error::InvalidArg(_) | Error::Parse(_) | Error::UnsupportedAudio(_) => 2,
        Error::EmptyAudio
        | Error::BufferTooShort { .. }
        | Error::TooFewPartials { .. }
        | Error::NoRegularGrid { .. }
        | Error::AboveNyquist { .. }
        | Error::FitDiverged { .. } => 3,
    }
}

fn write_output(target: &str, body: &str) -> Result<(), Error> {
    if target == "-" {
        print!("{body}");
        Ok(())
    } else {
        std::fs::write(target, body)?;
        Ok(())
    }
}

fn load_thresholds(flag: Option<&Path>) -> Result<Thresholds, Error> {
    if let Some(path) = flag {
        return Thresholds::from_file(path);
    }
    if let Ok(path) = std::env::var(THRESHOLDS_ENV) {
        if !path.is_empty() {
            return Thresholds::from_file(path);
        }
    }
    Ok(Thresholds::default())
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Analyze {
            input,
            frame,
            weighting,
            thresholds,
            max_partials,
            floor_db,
            tol_cents,
            out,
            csv,
            svg,
        } => {
            let buffer = load_wav(&input)?;
            let (contour, label) = weighting.build()?;
            let options = AnalysisOptions {
                frame: frame.build()?,
                contour,
                weighting_label: label,
                thresholds: load_thresholds(thresholds.as_deref())?,
                tracking: TrackingConfig {
                    floor_db,
                    max_partials,
                    tol_cents,
                    ..TrackingConfig::default()
                },
                input_name: input.display().to_string(),
            };
            let report = analyze(&buffer, &options)?;
            write_output(&out, &report.to_json())?;
            if let Some(path) = csv {
                std::fs::write(path, report_to_csv(&report))?;
            }
            if let Some(prefix) = svg {
                write_analysis_svgs(&buffer, &options, &prefix)?;
            }
            Ok(())
        }
        Command::Synth {
            spec,
            out,
            sample_rate,
        } => {
            let body = if spec == "-" {
                use std::io::Read;
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                s
            } else {
                std::fs::read_to_string(&spec)?
            };
            let tone: ToneSpec =
                serde_json::from_str(&body).map_err(|e| Error::Parse(format!("tone spec: {e}")))?;
            let buffer = render(&tone, sample_rate)?;
            save_wav(&buffer, &out)
        }
        Command::Sweep {
            steps,
            partials,
            sample_rate,
            out,
            svg,
        } => {
            let config = SweepConfig {
                n_steps: steps,
                n_partials: partials,
                sample_rate,
                ..SweepConfig::default()
            };
            let rows = run_sweep_experiment(&config)?;
            write_output(&out, &sweep_rows_to_csv(&rows))?;
            if let Some(path) = svg {
                let doc = residue_core::plot::render_plot(&PlotRequest::SweepCurves { rows })?;
                std::fs::write(path, doc)?;
            }
            Ok(())
        }
        Command::FitB {
            input,
            frame,
            floor_db,
            max_partials,
            out,
        } => {
            let buffer = load_wav(&input)?;
            let spectra = stft(&buffer, &frame.build()?, None)?;
            let mid = &spectra[spectra.len() / 2];
            let partials = pick_peaks(mid, floor_db, max_partials);
            let frame = PartialFrame::new(mid.frame_time, partials, max_partials);
            let fit = fit_inharmonicity_coefficient(&frame)?;
            let body = serde_json::to_string_pretty(&fit).expect("fit serializes") + "\n";
            write_output(&out, &body)
        }
        Command::Filter {
            input,
            targets,
            bandwidth_cents,
            frame,
            out,
        } => {
            let buffer = load_wav(&input)?;
            let parsed: Result<Vec<FilterTarget>, Error> =
                targets.iter().map(|t| parse_target(t)).collect();
            let spec = FilterSpec::new(parsed?, bandwidth_cents)?;
            let filtered = apply_partial_filter(&buffer, &spec, &frame.build()?)?;
            save_wav(&filtered, &out)
        }
        Command::Plot {
            kind,
            report,
            csv,
            frame_index,
            axis,
            out,
        } => {
            let axis = match axis.as_str() {
                "hz" => AxisMode::Hz,
                "midi" => AxisMode::Midi,
                other => {
                    return Err(Error::InvalidArg(format!(
                        "axis must be hz or midi, got {other}"
                    )))
                }
            };
            let request = build_plot_request(&kind, report.as_deref(), csv.as_deref(), frame_index, axis)?;
            let doc = residue_core::plot::render_plot(&request)?;
            std::fs::write(out, doc)?;
            Ok(())
        }
    }
}

fn parse_target(s: &str) -> Result<FilterTarget, Error> {
    let (hz, db) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidArg(format!("target `{s}` is not <hz>:<db>")))?;
    Ok(FilterTarget {
        center_hz: hz
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArg(format!("bad target frequency `{hz}`")))?,
        gain_db: db
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArg(format!("bad target gain `{db}`")))?,
    })
}

/// Re-derive plotting inputs from an analysis report.
fn report_frames(report: &residue_core::report::AnalysisReport) -> Vec<PartialFrame> {
    report
        .frames
        .iter()
        .map(|f| {
            let partials: Vec<Partial> = f
                .partials
                .iter()
                .filter_map(|p| Partial::new(p.freq_hz, p.power).ok())
                .collect();
            let mut frame = PartialFrame::new(f.time_s, partials, report.meta.max_partials);
            frame.reliable = f.reliable;
            frame
        })
        .collect()
}

fn build_plot_request(
    kind: &str,
    report_path: Option<&Path>,
    csv_path: Option<&Path>,
    frame_index: usize,
    axis: AxisMode,
) -> Result<PlotRequest, Error> {
    let load_report = |path: Option<&Path>| -> Result<residue_core::report::AnalysisReport, Error> {
        let path =
            path.ok_or_else(|| Error::InvalidArg(format!("--report is required for {kind}")))?;
        let body = std::fs::read_to_string(path)?;
        serde_json::from_str(&body).map_err(|e| Error::Parse(format!("report: {e}")))
    };

    match kind {
        "sweep_curves" => {
            let path = csv_path
                .ok_or_else(|| Error::InvalidArg("--csv is required for sweep_curves".into()))?;
            let rows = parse_sweep_csv(&std::fs::read_to_string(path)?)?;
            Ok(PlotRequest::SweepCurves { rows })
        }
        "spectrogram_overlay" => {
            let report = load_report(report_path)?;
            let frames = report_frames(&report);
            let medians = report.frames.iter().map(|f| f.diff_median_hz).collect();
            Ok(PlotRequest::SpectrogramOverlay {
                frames,
                diff_medians_hz: medians,
                axis,
            })
        }
        "spectrum_frame" | "diff_distribution" => {
            let report = load_report(report_path)?;
            if frame_index >= report.frames.len() {
                return Err(Error::InvalidArg(format!(
                    "frame index {frame_index} out of range ({} frames)",
                    report.frames.len()
                )));
            }
            let frames = report_frames(&report);
            let frame = &frames[frame_index];
            if kind == "diff_distribution" {
                Ok(PlotRequest::DiffDistribution {
                    diffs_hz: frame.diffs(),
                    lowest_partial_hz: frame.partials.first().map(|p| p.freq_hz),
                    axis,
                })
            } else {
                // reconstruct a displayable spectrum from the partials: the
                // report intentionally does not carry raw bins
                let bins = synthetic_bins(frame);
                Ok(PlotRequest::SpectrumFrame {
                    spectrum: residue_core::spectrum::Spectrum {
                        bins,
                        frame_time: frame.time_s,
                    },
                    partials: frame.partials.clone(),
                    axis,
                })
            }
        }
        "shift_diagram" => {
            let report = load_report(report_path)?;
            let frames = report_frames(&report);
            let notes: Vec<ShiftDiagramNote> = frames
                .iter()
                .enumerate()
                .filter(|(_, f)| f.reliable && f.partials.len() >= 3)
                .map(|(i, f)| {
                    let fit = estimate_shift(f).ok();
                    ShiftDiagramNote {
                        label: format!("{i}"),
                        peak_freqs_hz: f.partials.iter().map(|p| p.freq_hz).collect(),
                        d_hz: fit.map(|g| g.d_hz).unwrap_or(0.0),
                        s_hz: fit.map(|g| g.s_hz).unwrap_or(0.0),
                    }
                })
                .collect();
            Ok(PlotRequest::ShiftDiagram { notes })
        }
        other => Err(Error::InvalidArg(format!(
            "unknown plot kind `{other}` (expected spectrogram_overlay, spectrum_frame, diff_distribution, sweep_curves or shift_diagram)"
        ))),
    }
}

/// Narrow Gaussian bumps at each partial, standing in for raw bins when
/// plotting from a report.
fn synthetic_bins(frame: &PartialFrame) -> Vec<(f64, f64)> {
    let f_max = frame
        .partials
        .last()
        .map(|p| p.freq_hz * 1.3)
        .unwrap_or(5_000.0);
    let n = 2_048;
    (0..n)
        .map(|k| {
            let f = 20.0 + (f_max - 20.0) * k as f64 / (n - 1) as f64;
            let p = frame
                .partials
                .iter()
                .map(|p| {
                    let d = (f - p.freq_hz) / (0.004 * p.freq_hz + 2.0);
                    p.power * (-0.5 * d * d).exp()
                })
                .fold(0.0f64, f64::max);
            (f, p.max(1e-12))
        })
        .collect()
}

fn parse_sweep_csv(body: &str) -> Result<Vec<residue_core::estimators::SweepRow>, Error> {
    let mut rows = Vec::new();
    for (i, line) in body.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!(
                "sweep CSV line {}: expected 6 fields",
                i + 1
            )));
        }
        let parse = |s: &str| -> Result<f64, Error> {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("sweep CSV line {}: bad number `{s}`", i + 1)))
        };
        let values: Result<Vec<f64>, Error> = fields.iter().map(|f| parse(f)).collect();
        let v = values?;
        rows.push(residue_core::estimators::SweepRow {
            g_hz: v[0],
            f0_partial_hz: v[1],
            autocorr_hz: v[2],
            diff_median_hz: v[3],
            diff_mean_hz: v[4],
            first_pair_diff_hz: v[5],
            valid: v.iter().all(|x| x.is_finite()),
        });
    }
    Ok(rows)
}

fn write_analysis_svgs(
    buffer: &residue_core::AudioBuffer,
    options: &AnalysisOptions,
    prefix: &str,
) -> Result<(), Error> {
    use residue_core::plot::render_plot;
    let spectra = stft(buffer, &options.frame, options.contour.as_ref())?;
    let frames = residue_core::tracking::track_partials(&spectra, &options.tracking);
    let medians: Vec<Option<f64>> = frames
        .iter()
        .map(|f| {
            residue_core::stats::diff_stats(f)
                .ok()
                .map(|s| s.weighted_median_hz)
        })
        .collect();

    let overlay = render_plot(&PlotRequest::SpectrogramOverlay {
        frames: frames.clone(),
        diff_medians_hz: medians,
        axis: AxisMode::Hz,
    });
    if let Ok(doc) = overlay {
        std::fs::write(format!("{prefix}_spectrogram.svg"), doc)?;
    }

    // mid-file frame for the single-frame figures
    let mid = frames.len() / 2;
    if let (Some(spectrum), Some(frame)) = (spectra.get(mid), frames.get(mid)) {
        if let Ok(doc) = render_plot(&PlotRequest::SpectrumFrame {
            spectrum: spectrum.clone(),
            partials: frame.partials.clone(),
            axis: AxisMode::Hz,
        }) {
            std::fs::write(format!("{prefix}_spectrum.svg"), doc)?;
        }
        if frame.partials.len() >= 2 {
            if let Ok(doc) = render_plot(&PlotRequest::DiffDistribution {
                diffs_hz: frame.diffs(),
                lowest_partial_hz: frame.partials.first().map(|p| p.freq_hz),
                axis: AxisMode::Midi,
            }) {
                std::fs::write(format!("{prefix}_diffs.svg"), doc)?;
            }
        }
    }
    Ok(())
}
