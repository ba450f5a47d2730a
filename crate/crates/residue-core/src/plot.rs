//! Deterministic SVG figures for analysis results.
//!
//! All plots render into a fixed 1200x400 viewport and contain no
//! timestamps or random identifiers: identical inputs give bytewise
//! identical documents. Color semantics: partials yellow, median-difference
//! track blue, lowest-partial markers blue.

use crate::error::{Error, Result};
use crate::estimators::SweepRow;
use crate::midi::hz_to_midi;
use crate::spectrum::{PartialFrame, Spectrum};

pub const WIDTH: f64 = 1200.0;
pub const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 40.0;

const YELLOW: &str = "#f0c030";
const BLUE: &str = "#2b6cb0";
const GRAY: &str = "#999999";
const CURVE_COLORS: [&str; 5] = ["#444444", "#c53030", "#2b6cb0", "#7bb0e0", "#3a9d5d"];

/// Frequency axis mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisMode {
    Hz,
    Midi,
}

/// One note column of a shift diagram: detected peaks plus the grid that
/// explains them.
#[derive(Debug, Clone)]
pub struct ShiftDiagramNote {
    pub label: String,
    pub peak_freqs_hz: Vec<f64>,
    pub d_hz: f64,
    pub s_hz: f64,
}

/// A renderable figure.
#[derive(Debug, Clone)]
pub enum PlotRequest {
    /// Per-frame partial scatter with the median-difference track.
    SpectrogramOverlay {
        frames: Vec<PartialFrame>,
        diff_medians_hz: Vec<Option<f64>>,
        axis: AxisMode,
    },
    /// One frame's power spectrum with peak markers and a marker at the
    /// lowest partial.
    SpectrumFrame {
        spectrum: Spectrum,
        partials: Vec<crate::spectrum::Partial>,
        axis: AxisMode,
    },
    /// Histogram of consecutive-partial differences.
    DiffDistribution {
        diffs_hz: Vec<f64>,
        lowest_partial_hz: Option<f64>,
        axis: AxisMode,
    },
    /// One polyline per estimator across the sweep.
    SweepCurves { rows: Vec<SweepRow> },
    /// Detected peaks vs. fitted grid positions, one column per note.
    ShiftDiagram { notes: Vec<ShiftDiagramNote> },
}

/// Render a figure to a standalone SVG document.
pub fn render_plot(request: &PlotRequest) -> Result<String> {
    match request {
        PlotRequest::SpectrogramOverlay {
            frames,
            diff_medians_hz,
            axis,
        } => spectrogram_overlay(frames, diff_medians_hz, *axis),
        PlotRequest::SpectrumFrame {
            spectrum,
            partials,
            axis,
        } => spectrum_frame(spectrum, partials, *axis),
        PlotRequest::DiffDistribution {
            diffs_hz,
            lowest_partial_hz,
            axis,
        } => diff_distribution(diffs_hz, *lowest_partial_hz, *axis),
        PlotRequest::SweepCurves { rows } => sweep_curves(rows),
        PlotRequest::ShiftDiagram { notes } => shift_diagram(notes),
    }
}

struct Canvas {
    body: String,
}

impl Canvas {
    fn new() -> Self {
        let mut body = String::with_capacity(16 * 1024);
        body.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        body.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
        ));
        Self { body }
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64, dashed: bool) {
        let dash = if dashed { " stroke-dasharray=\"4 3\"" } else { "" };
        self.body.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{stroke}\" stroke-width=\"{width}\"{dash}/>\n",
            x1, y1, x2, y2
        ));
    }

    fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        self.body.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r}\" fill=\"{fill}\"/>\n",
            cx, cy
        ));
    }

    fn text(&mut self, x: f64, y: f64, size: f64, content: &str) {
        self.body.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"{size}\" fill=\"#333333\">{}</text>\n",
            x, y, escape(content)
        ));
    }

    fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64) {
        if points.len() < 2 {
            return;
        }
        let pts: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", x, y))
            .collect();
        self.body.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        self.body.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>\n",
            x, y, w, h
        ));
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Linear data-to-pixel mapping.
#[derive(Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Scale {
    fn x(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            px_lo: MARGIN_LEFT,
            px_hi: WIDTH - MARGIN_RIGHT,
        }
    }

    fn y(lo: f64, hi: f64) -> Self {
        // pixel axis points down
        Self {
            lo,
            hi,
            px_lo: HEIGHT - MARGIN_BOTTOM,
            px_hi: MARGIN_TOP,
        }
    }

    fn map(&self, v: f64) -> f64 {
        if (self.hi - self.lo).abs() < 1e-300 {
            return 0.5 * (self.px_lo + self.px_hi);
        }
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

fn freq_coord(f_hz: f64, axis: AxisMode) -> f64 {
    match axis {
        AxisMode::Hz => f_hz,
        AxisMode::Midi => hz_to_midi(f_hz).unwrap_or(f64::NAN),
    }
}

fn axis_label(axis: AxisMode) -> &'static str {
    match axis {
        AxisMode::Hz => "frequency (Hz)",
        AxisMode::Midi => "frequency (MIDI)",
    }
}

/// Horizontal gridlines/labels. In MIDI mode the gridlines land on integer
/// notes (multiples of 12), so a 440 Hz datum aligns with the 69 line.
fn draw_y_axis(canvas: &mut Canvas, scale: &Scale, axis: AxisMode) {
    canvas.line(MARGIN_LEFT, scale.px_lo, MARGIN_LEFT, scale.px_hi, GRAY, 1.0, false);
    match axis {
        AxisMode::Midi => {
            let lo = scale.lo.ceil() as i64;
            let hi = scale.hi.floor() as i64;
            for m in lo..=hi {
                if m % 12 == 9 || m % 12 == 0 {
                    // A and C notes
                    let y = scale.map(m as f64);
                    canvas.line(MARGIN_LEFT, y, WIDTH - MARGIN_RIGHT, y, "#dddddd", 0.5, false);
                    canvas.text(4.0, y + 3.0, 10.0, &format!("{m}"));
                }
            }
        }
        AxisMode::Hz => {
            for i in 0..=4 {
                let v = scale.lo + (scale.hi - scale.lo) * i as f64 / 4.0;
                let y = scale.map(v);
                canvas.line(MARGIN_LEFT, y, WIDTH - MARGIN_RIGHT, y, "#dddddd", 0.5, false);
                canvas.text(4.0, y + 3.0, 10.0, &format!("{v:.0}"));
            }
        }
    }
}

fn spectrogram_overlay(
    frames: &[PartialFrame],
    diff_medians_hz: &[Option<f64>],
    axis: AxisMode,
) -> Result<String> {
    if frames.is_empty() {
        return Err(Error::InvalidArg("no frames to plot".into()));
    }
    let t_lo = frames.first().unwrap().time_s;
    let t_hi = frames.last().unwrap().time_s.max(t_lo + 1e-9);
    let mut f_hi = 0.0f64;
    let mut f_lo = f64::INFINITY;
    for frame in frames {
        for p in &frame.partials {
            f_hi = f_hi.max(freq_coord(p.freq_hz, axis));
            f_lo = f_lo.min(freq_coord(p.freq_hz, axis));
        }
    }
    if !f_hi.is_finite() || !f_lo.is_finite() || f_hi == 0.0 {
        f_lo = freq_coord(50.0, axis);
        f_hi = freq_coord(5_000.0, axis);
    }
    let pad = 0.05 * (f_hi - f_lo).max(1.0);
    let sx = Scale::x(t_lo, t_hi);
    let sy = Scale::y((f_lo - pad).max(0.0), f_hi + pad);

    let mut canvas = Canvas::new();
    draw_y_axis(&mut canvas, &sy, axis);
    canvas.text(WIDTH / 2.0 - 40.0, HEIGHT - 8.0, 11.0, "time (s)");
    canvas.text(8.0, 12.0, 11.0, axis_label(axis));

    for frame in frames {
        let x = sx.map(frame.time_s);
        for p in &frame.partials {
            let fc = freq_coord(p.freq_hz, axis);
            if fc.is_finite() {
                canvas.circle(x, sy.map(fc), 1.6, YELLOW);
            }
        }
    }

    let mut track: Vec<(f64, f64)> = Vec::new();
    for (frame, median) in frames.iter().zip(diff_medians_hz) {
        if let Some(m) = median {
            let fc = freq_coord(*m, axis);
            if fc.is_finite() {
                track.push((sx.map(frame.time_s), sy.map(fc)));
            }
        }
    }
    canvas.polyline(&track, BLUE, 1.5);

    Ok(canvas.finish())
}

fn spectrum_frame(
    spectrum: &Spectrum,
    partials: &[crate::spectrum::Partial],
    axis: AxisMode,
) -> Result<String> {
    if spectrum.bins.len() < 2 {
        return Err(Error::InvalidArg("empty spectrum".into()));
    }
    let p_max = spectrum.bins.iter().map(|b| b.1).fold(0.0f64, f64::max);
    if p_max <= 0.0 {
        return Err(Error::InvalidArg("all-zero spectrum".into()));
    }
    let db = |p: f64| 10.0 * ((p / p_max).max(1e-12)).log10();

    let f_lo = freq_coord(spectrum.bins[1].0.max(20.0), axis);
    let f_hi = freq_coord(spectrum.bins.last().unwrap().0, axis);
    let sx = Scale::x(f_lo, f_hi);
    let sy = Scale::y(-90.0, 5.0);

    let mut canvas = Canvas::new();
    canvas.text(WIDTH / 2.0 - 50.0, HEIGHT - 8.0, 11.0, axis_label(axis));
    canvas.text(8.0, 12.0, 11.0, "power (dB)");

    // MIDI gridlines double as the note scale
    if axis == AxisMode::Midi {
        let lo = f_lo.ceil() as i64;
        let hi = f_hi.floor() as i64;
        for m in lo..=hi {
            if m % 12 == 9 {
                let x = sx.map(m as f64);
                canvas.line(x, sy.px_hi, x, sy.px_lo, "#eeeeee", 0.5, false);
                canvas.text(x - 8.0, HEIGHT - 24.0, 9.0, &format!("{m}"));
            }
        }
    }

    let points: Vec<(f64, f64)> = spectrum
        .bins
        .iter()
        .skip(1)
        .filter_map(|&(f, p)| {
            let fc = freq_coord(f, axis);
            fc.is_finite().then(|| (sx.map(fc), sy.map(db(p))))
        })
        .collect();
    canvas.polyline(&points, "#555555", 0.8);

    if let Some(lowest) = partials.first() {
        let x = sx.map(freq_coord(lowest.freq_hz, axis));
        canvas.line(x, sy.px_hi, x, sy.px_lo, BLUE, 1.5, false);
    }
    for p in partials {
        let fc = freq_coord(p.freq_hz, axis);
        if fc.is_finite() {
            canvas.circle(sx.map(fc), sy.map(db(p.power)), 3.0, YELLOW);
        }
    }

    Ok(canvas.finish())
}

fn diff_distribution(
    diffs_hz: &[f64],
    lowest_partial_hz: Option<f64>,
    axis: AxisMode,
) -> Result<String> {
    if diffs_hz.is_empty() {
        return Err(Error::InvalidArg("no differences to plot".into()));
    }
    let coords: Vec<f64> = diffs_hz
        .iter()
        .map(|&d| freq_coord(d, axis))
        .filter(|c| c.is_finite())
        .collect();
    if coords.is_empty() {
        return Err(Error::InvalidArg("no plottable differences".into()));
    }
    let mut lo = coords.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = coords.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if let Some(f1) = lowest_partial_hz {
        let c = freq_coord(f1, axis);
        lo = lo.min(c);
        hi = hi.max(c);
    }
    let span = (hi - lo).max(match axis {
        AxisMode::Hz => 10.0,
        AxisMode::Midi => 2.0,
    });
    lo -= 0.1 * span;
    hi += 0.1 * span;

    const BINS: usize = 60;
    let mut counts = [0usize; BINS];
    for &c in &coords {
        let idx = (((c - lo) / (hi - lo)) * BINS as f64).floor() as usize;
        counts[idx.min(BINS - 1)] += 1;
    }
    let max_count = *counts.iter().max().unwrap() as f64;

    let sx = Scale::x(lo, hi);
    let sy = Scale::y(0.0, max_count.max(1.0));
    let mut canvas = Canvas::new();
    canvas.text(WIDTH / 2.0 - 80.0, HEIGHT - 8.0, 11.0, axis_label(axis));
    canvas.text(8.0, 12.0, 11.0, "count");

    let bar_w = (sx.px_hi - sx.px_lo) / BINS as f64;
    for (i, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let x = sx.px_lo + i as f64 * bar_w;
        let y = sy.map(count as f64);
        canvas.rect(x, y, bar_w.max(1.0), sy.px_lo - y, YELLOW);
    }

    if let Some(f1) = lowest_partial_hz {
        let x = sx.map(freq_coord(f1, axis));
        canvas.line(x, sy.px_hi, x, sy.px_lo, BLUE, 1.5, false);
    }

    Ok(canvas.finish())
}

fn sweep_curves(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidArg("no sweep rows to plot".into()));
    }
    let labels = [
        "f0_partial_hz",
        "autocorr_hz",
        "diff_median_hz",
        "diff_mean_hz",
        "first_pair_diff_hz",
    ];
    let series = |row: &SweepRow| -> [f64; 5] {
        [
            row.f0_partial_hz,
            row.autocorr_hz,
            row.diff_median_hz,
            row.diff_mean_hz,
            row.first_pair_diff_hz,
        ]
    };

    let g_lo = rows.first().unwrap().g_hz;
    let g_hi = rows.last().unwrap().g_hz.max(g_lo + 1e-9);
    let mut v_lo = f64::INFINITY;
    let mut v_hi = f64::NEG_INFINITY;
    for row in rows.iter().filter(|r| r.valid) {
        for v in series(row) {
            if v.is_finite() {
                v_lo = v_lo.min(v);
                v_hi = v_hi.max(v);
            }
        }
    }
    if !v_lo.is_finite() {
        return Err(Error::InvalidArg("no valid sweep rows".into()));
    }
    let pad = 0.05 * (v_hi - v_lo).max(1.0);
    let sx = Scale::x(g_lo, g_hi);
    let sy = Scale::y(v_lo - pad, v_hi + pad);

    let mut canvas = Canvas::new();
    draw_y_axis(&mut canvas, &sy, AxisMode::Hz);
    canvas.text(WIDTH / 2.0 - 90.0, HEIGHT - 8.0, 11.0, "overtone multiplier g (Hz)");

    for (i, label) in labels.iter().enumerate() {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.valid)
            .filter_map(|r| {
                let v = series(r)[i];
                v.is_finite().then(|| (sx.map(r.g_hz), sy.map(v)))
            })
            .collect();
        canvas.polyline(&points, CURVE_COLORS[i], 1.5);
        // legend
        let y = MARGIN_TOP + 14.0 * i as f64 + 10.0;
        canvas.line(MARGIN_LEFT + 8.0, y - 4.0, MARGIN_LEFT + 28.0, y - 4.0, CURVE_COLORS[i], 2.0, false);
        canvas.text(MARGIN_LEFT + 34.0, y, 10.0, label);
    }

    Ok(canvas.finish())
}

fn shift_diagram(notes: &[ShiftDiagramNote]) -> Result<String> {
    if notes.is_empty() || notes.iter().all(|n| n.peak_freqs_hz.is_empty()) {
        return Err(Error::InvalidArg("no notes to plot".into()));
    }
    let f_hi = notes
        .iter()
        .flat_map(|n| n.peak_freqs_hz.iter().cloned())
        .fold(0.0f64, f64::max);
    let sx = Scale::x(-0.5, notes.len() as f64 - 0.5);
    let sy = Scale::y(0.0, f_hi * 1.05);

    let mut canvas = Canvas::new();
    draw_y_axis(&mut canvas, &sy, AxisMode::Hz);
    canvas.text(WIDTH / 2.0 - 20.0, HEIGHT - 8.0, 11.0, "note");

    let half_w = 0.35 * (sx.map(1.0) - sx.map(0.0));
    for (i, note) in notes.iter().enumerate() {
        let x = sx.map(i as f64);
        canvas.text(x - 10.0, HEIGHT - 24.0, 10.0, &note.label);

        // dotted grid positions up to the top of the plot
        if note.d_hz > 0.0 {
            let mut n = 1.0;
            while n * note.d_hz + note.s_hz < f_hi * 1.05 {
                let y = sy.map(n * note.d_hz + note.s_hz);
                canvas.line(x - half_w, y, x + half_w, y, GRAY, 0.8, true);
                n += 1.0;
            }
            // mean-difference marker
            let y = sy.map(note.d_hz);
            canvas.line(x - half_w, y, x + half_w, y, BLUE, 1.8, false);
        }

        for &f in &note.peak_freqs_hz {
            let y = sy.map(f);
            canvas.line(x - half_w, y, x + half_w, y, "#111111", 1.2, false);
        }
    }

    Ok(canvas.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Partial;

    fn sample_rows() -> Vec<SweepRow> {
        (0..5)
            .map(|i| {
                let g = 220.0 + i as f64 * 6.735;
                SweepRow {
                    g_hz: g,
                    f0_partial_hz: 220.0,
                    autocorr_hz: (220.0 + g) / 2.0,
                    diff_median_hz: g,
                    diff_mean_hz: g,
                    first_pair_diff_hz: 2.0 * g - 220.0,
                    valid: true,
                }
            })
            .collect()
    }

    #[test]
    fn sweep_plot_has_five_curves_with_csv_labels() {
        let svg = render_plot(&PlotRequest::SweepCurves { rows: sample_rows() }).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 5);
        for label in [
            "f0_partial_hz",
            "autocorr_hz",
            "diff_median_hz",
            "diff_mean_hz",
            "first_pair_diff_hz",
        ] {
            assert!(svg.contains(label), "missing legend label {label}");
        }
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn plots_are_bytewise_deterministic() {
        let req = PlotRequest::SweepCurves { rows: sample_rows() };
        assert_eq!(render_plot(&req).unwrap(), render_plot(&req).unwrap());
    }

    #[test]
    fn spectrum_frame_marks_lowest_partial() {
        let bins: Vec<(f64, f64)> = (0..2048)
            .map(|k| {
                let f = k as f64 * 10.766;
                let p = if (f - 110.0).abs() < 6.0 { 1.0 } else { 1e-6 };
                (f, p)
            })
            .collect();
        let spectrum = Spectrum {
            bins,
            frame_time: 0.5,
        };
        let partials = vec![
            Partial::new(110.0, 1.0).unwrap(),
            Partial::new(220.0, 0.5).unwrap(),
        ];
        let svg = render_plot(&PlotRequest::SpectrumFrame {
            spectrum,
            partials,
            axis: AxisMode::Hz,
        })
        .unwrap();
        // the blue marker line sits at the lowest partial's x position
        let f_lo = 10.766f64.max(20.0);
        let f_hi = 2047.0 * 10.766;
        let expected_x = MARGIN_LEFT + (110.0 - f_lo) / (f_hi - f_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
        let marker = format!("<line x1=\"{:.2}\"", expected_x);
        assert!(
            svg.contains(&marker),
            "missing lowest-partial marker at x={expected_x:.2}"
        );
        assert!(svg.contains(BLUE));
    }

    #[test]
    fn midi_axis_places_440_on_gridline_69() {
        let make = || {
            let bins: Vec<(f64, f64)> = (0..2048)
                .map(|k| {
                    let f = (k as f64 + 1.0) * 10.766;
                    let p = if (f - 440.0).abs() < 6.0 { 1.0 } else { 1e-6 };
                    (f, p)
                })
                .collect();
            PlotRequest::SpectrumFrame {
                spectrum: Spectrum {
                    bins,
                    frame_time: 0.0,
                },
                partials: vec![Partial::new(440.0, 1.0).unwrap()],
                axis: AxisMode::Midi,
            }
        };
        let svg = render_plot(&make()).unwrap();
        assert!(svg.contains(">69<"), "missing 69 gridline label");

        // both the 69 gridline and the 440 Hz lowest-partial marker map to
        // the same x coordinate
        let f_lo = hz_to_midi(2.0 * 10.766).unwrap();
        let f_hi = hz_to_midi(2048.0 * 10.766).unwrap();
        let x = MARGIN_LEFT + (69.0 - f_lo) / (f_hi - f_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
        let needle = format!("x1=\"{x:.2}\"");
        assert_eq!(
            svg.matches(&needle).count(),
            2,
            "expected gridline + marker at x={x:.2}"
        );

        assert_eq!(svg, render_plot(&make()).unwrap());
    }

    #[test]
    fn diff_distribution_of_harmonic_tone_masses_one_bin() {
        let diffs = vec![110.0; 20];
        let svg = render_plot(&PlotRequest::DiffDistribution {
            diffs_hz: diffs,
            lowest_partial_hz: Some(110.0),
            axis: AxisMode::Hz,
        })
        .unwrap();
        assert_eq!(svg.matches("<rect").count(), 2, "background + one histogram bar");
    }

    #[test]
    fn empty_data_is_rejected() {
        assert!(render_plot(&PlotRequest::DiffDistribution {
            diffs_hz: vec![],
            lowest_partial_hz: None,
            axis: AxisMode::Hz,
        })
        .is_err());
        assert!(render_plot(&PlotRequest::SweepCurves { rows: vec![] }).is_err());
        assert!(render_plot(&PlotRequest::ShiftDiagram { notes: vec![] }).is_err());
    }

    #[test]
    fn shift_diagram_draws_grid_and_peaks() {
        let notes = vec![ShiftDiagramNote {
            label: "1".into(),
            peak_freqs_hz: vec![62.0, 117.0, 172.0, 227.0],
            d_hz: 55.0,
            s_hz: 7.0,
        }];
        let svg = render_plot(&PlotRequest::ShiftDiagram { notes }).unwrap();
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains(BLUE));
    }
}
