//! Deterministic SVG rendering for summary curves and landscape grids.
//!
//! Pure string assembly: same CSV in, same bytes out.

use std::fmt::Write as _;
use std::path::Path;

use crate::{HarnessError, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

fn csv_err(path: &Path, message: String) -> HarnessError {
    HarnessError::Csv { path: path.display().to_string(), message }
}

fn palette(index: usize) -> &'static str {
    const COLORS: [&str; 6] = ["#1b6ca8", "#d1495b", "#3a7d44", "#8e44ad", "#e09f3e", "#2f2f2f"];
    COLORS[index % COLORS.len()]
}

/// Two-stop color ramp from dark blue to yellow for heatmap cells.
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(22.0, 250.0), lerp(36.0, 220.0), lerp(104.0, 60.0))
}

#[derive(Debug, Clone)]
struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

fn parse_f64(path: &Path, line: usize, field: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|e| csv_err(path, format!("line {line}: {field}: {e}")))
}

/// Reads a long-format curve CSV (name, x, y in the first three columns)
/// into per-name series, preserving first-appearance order.
fn read_series(path: &Path) -> Result<Vec<Series>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e.to_string()))?;
    let mut series: Vec<Series> = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| csv_err(path, format!("line {line}: {e}")))?;
        if row.len() < 3 {
            return Err(csv_err(path, format!("line {line}: expected 3 columns, got {}", row.len())));
        }
        let x = parse_f64(path, line, "x", &row[1])?;
        let y = parse_f64(path, line, "y", &row[2])?;
        match series.iter_mut().find(|s| s.name == row[0]) {
            Some(s) => s.points.push((x, y)),
            None => series.push(Series { name: row[0].to_string(), points: vec![(x, y)] }),
        }
    }
    if series.is_empty() {
        return Err(csv_err(path, "no data rows".into()));
    }
    Ok(series)
}

fn bounds(series: &[Series]) -> ((f64, f64), (f64, f64)) {
    let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            xs = (xs.0.min(x), xs.1.max(x));
            ys = (ys.0.min(y), ys.1.max(y));
        }
    }
    if xs.0 == xs.1 {
        xs = (xs.0 - 0.5, xs.1 + 0.5);
    }
    if ys.0 == ys.1 {
        ys = (ys.0 - 0.5, ys.1 + 0.5);
    }
    (xs, ys)
}

/// Line chart: one polyline per series plus a legend.
pub fn render_lines(path: &Path) -> Result<String> {
    let series = read_series(path)?;
    let ((x0, x1), (y0, y1)) = bounds(&series);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    );
    // axes
    let _ = write!(
        svg,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">{:.3}</text>\n\
         <text x=\"{}\" y=\"{}\" font-size=\"12\">{:.3}</text>\n\
         <text x=\"{}\" y=\"{}\" font-size=\"12\">{:.0}</text>\n\
         <text x=\"{}\" y=\"{}\" font-size=\"12\">{:.0}</text>\n",
        8.0,
        HEIGHT - MARGIN,
        y0,
        8.0,
        MARGIN + 4.0,
        y1,
        MARGIN,
        HEIGHT - MARGIN + 16.0,
        x0,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0,
        x1
    );
    for (k, s) in series.iter().enumerate() {
        let pts: Vec<String> =
            s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = write!(
            svg,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            palette(k),
            pts.join(" ")
        );
        let ly = MARGIN + 16.0 * k as f64;
        let _ = write!(
            svg,
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
            WIDTH - MARGIN - 140.0,
            ly,
            palette(k),
            WIDTH - MARGIN - 126.0,
            ly + 9.0,
            s.name
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

struct Grid {
    quantity: &'static str,
    // (theta_i, theta_j, value)
    cells: Vec<(f64, f64, f64)>,
}

/// Four heatmap panels with independent color scales, each annotated
/// with the observed min and max.
pub fn render_heatmaps(path: &Path) -> Result<String> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e.to_string()))?;
    const QUANTITIES: [&str; 4] = ["expectation", "est_fidelity", "fid_approx", "fid_opt"];
    let mut grids: Vec<Grid> =
        QUANTITIES.iter().map(|&q| Grid { quantity: q, cells: Vec::new() }).collect();
    for (k, row) in reader.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| csv_err(path, format!("line {line}: {e}")))?;
        if row.len() < 6 {
            return Err(csv_err(path, format!("line {line}: expected 6 columns, got {}", row.len())));
        }
        let ti = parse_f64(path, line, "theta_i", &row[0])?;
        let tj = parse_f64(path, line, "theta_j", &row[1])?;
        for (g, col) in grids.iter_mut().zip(2..6) {
            g.cells.push((ti, tj, parse_f64(path, line, g.quantity, &row[col])?));
        }
    }
    if grids[0].cells.is_empty() {
        return Err(csv_err(path, "no data rows".into()));
    }
    let mut tis: Vec<f64> = grids[0].cells.iter().map(|c| c.0).collect();
    tis.sort_by(f64::total_cmp);
    tis.dedup();
    let side = tis.len();
    let panel = 260.0;
    let pad = 64.0;
    let total_w = 2.0 * panel + 3.0 * pad;
    let total_h = 2.0 * panel + 3.0 * pad;
    let cell = panel / side as f64;
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w}\" height=\"{total_h}\" \
         viewBox=\"0 0 {total_w} {total_h}\">\n<rect width=\"{total_w}\" height=\"{total_h}\" fill=\"white\"/>\n"
    );
    for (p, g) in grids.iter().enumerate() {
        let ox = pad + (p % 2) as f64 * (panel + pad);
        let oy = pad + (p / 2) as f64 * (panel + pad);
        let lo = g.cells.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        let hi = g.cells.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        for &(ti, tj, v) in &g.cells {
            let ci = tis.partition_point(|&t| t < ti - 1e-12);
            let cj = tis.partition_point(|&t| t < tj - 1e-12);
            let _ = write!(
                svg,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>\n",
                ox + ci as f64 * cell,
                oy + panel - (cj + 1) as f64 * cell,
                cell + 0.5,
                cell + 0.5,
                ramp((v - lo) / span)
            );
        }
        let _ = write!(
            svg,
            "<text x=\"{ox}\" y=\"{:.2}\" font-size=\"13\">{}</text>\n\
             <text x=\"{ox}\" y=\"{:.2}\" font-size=\"11\">min {:.4}  max {:.4}</text>\n",
            oy - 8.0,
            g.quantity,
            oy + panel + 14.0,
            lo,
            hi
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders a CSV to SVG, dispatching on the header.
pub fn plot(input: &Path, out: &Path) -> Result<()> {
    let mut reader = csv::Reader::from_path(input).map_err(|e| csv_err(input, e.to_string()))?;
    let headers = reader.headers().map_err(|e| csv_err(input, e.to_string()))?.clone();
    let svg = if headers.iter().any(|h| h == "theta_i") {
        render_heatmaps(input)?
    } else if headers.iter().any(|h| h == "variant") {
        render_lines(input)?
    } else {
        return Err(csv_err(input, format!("unrecognized header: {headers:?}")));
    };
    crate::write_atomic(out, svg.as_bytes())
}
