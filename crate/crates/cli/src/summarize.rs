//! Median best-so-far curves over a sweep's trace files.

use std::collections::BTreeMap;
use std::path::Path;

use crate::experiment::{load_manifest, Variant, ALL_VARIANTS};
use crate::{HarnessError, Result};

/// Report-axis window of the median curves.
pub const AXIS_RANGE: std::ops::RangeInclusive<usize> = 20..=100;

/// One parsed trace: the VQE-phase (axis, exact ratio) pairs in
/// evaluation order.
#[derive(Debug, Clone)]
pub struct ParsedTrace {
    pub instance: u64,
    pub variant: Variant,
    pub vqe_points: Vec<(usize, f64)>,
}

impl ParsedTrace {
    /// Best-so-far exact ratio at report axis `i`: the maximum over VQE
    /// evaluations at axis <= i. During a warm-started run's rescaled
    /// ACAE prefix there are no VQE evaluations yet; the first VQE
    /// evaluation's ratio stands in.
    pub fn best_so_far_at(&self, i: usize) -> Option<f64> {
        let first = self.vqe_points.first()?;
        let mut best = first.1;
        let mut seen = false;
        for &(axis, ratio) in &self.vqe_points {
            if axis > i {
                break;
            }
            if !seen {
                best = ratio;
                seen = true;
            } else if ratio > best {
                best = ratio;
            }
        }
        Some(best)
    }
}

fn csv_err(path: &Path, message: String) -> HarnessError {
    HarnessError::Csv { path: path.display().to_string(), message }
}

/// Reads one trace CSV, keeping only the VQE-phase rows.
pub fn parse_trace(path: &Path, instance: u64, variant: Variant) -> Result<ParsedTrace> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| csv_err(path, e.to_string()))?;
    let headers = reader.headers().map_err(|e| csv_err(path, e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| csv_err(path, format!("missing column '{name}'")))
    };
    let (c_phase, c_axis, c_ratio) = (col("phase")?, col("axis_iteration")?, col("ratio_exact")?);
    let mut vqe_points = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_err(path, format!("line {}: {e}", line + 2)))?;
        if &row[c_phase] != "VQE" {
            continue;
        }
        let axis: usize = row[c_axis]
            .parse()
            .map_err(|e| csv_err(path, format!("line {}: axis_iteration: {e}", line + 2)))?;
        let ratio: f64 = row[c_ratio]
            .parse()
            .map_err(|e| csv_err(path, format!("line {}: ratio_exact: {e}", line + 2)))?;
        vqe_points.push((axis, ratio));
    }
    Ok(ParsedTrace { instance, variant, vqe_points })
}

/// Loads every successful run referenced by the directory's manifest,
/// refusing directories whose manifests disagree on the config hash.
pub fn load_traces(dirs: &[&Path]) -> Result<Vec<ParsedTrace>> {
    let mut hash: Option<String> = None;
    let mut traces = Vec::new();
    for dir in dirs {
        let manifest = load_manifest(dir)?;
        match &hash {
            None => hash = Some(manifest.config_hash.clone()),
            Some(h) if *h != manifest.config_hash => {
                return Err(HarnessError::Usage(format!(
                    "mixed configs: {} has hash {}, expected {h}",
                    dir.display(),
                    manifest.config_hash
                )));
            }
            Some(_) => {}
        }
        for run in &manifest.runs {
            if let Some(name) = &run.trace {
                traces.push(parse_trace(&dir.join(name), run.instance, run.variant)?);
            }
        }
    }
    if traces.is_empty() {
        return Err(HarnessError::Usage("no traces found".into()));
    }
    // permutation invariance: impose a canonical order regardless of
    // manifest or directory ordering
    traces.sort_by_key(|t| (t.variant.label(), t.instance));
    Ok(traces)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Per variant, per axis iteration in [`AXIS_RANGE`]: median over
/// instances of the best-so-far exact ratio.
pub fn median_curves(traces: &[ParsedTrace]) -> BTreeMap<&'static str, Vec<(usize, f64)>> {
    let mut curves = BTreeMap::new();
    for variant in ALL_VARIANTS {
        let of_variant: Vec<&ParsedTrace> =
            traces.iter().filter(|t| t.variant == variant).collect();
        if of_variant.is_empty() {
            continue;
        }
        let mut curve = Vec::new();
        for i in AXIS_RANGE {
            let mut values: Vec<f64> =
                of_variant.iter().filter_map(|t| t.best_so_far_at(i)).collect();
            if values.is_empty() {
                continue;
            }
            values.sort_by(f64::total_cmp);
            curve.push((i, median(&values)));
        }
        curves.insert(variant.label(), curve);
    }
    curves
}

/// Serializes the curves as long-format CSV: variant, axis_iteration,
/// median_best_ratio.
pub fn curves_to_csv(curves: &BTreeMap<&'static str, Vec<(usize, f64)>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| HarnessError::Csv { path: "<summary>".into(), message: e.to_string() };
    w.write_record(["variant", "axis_iteration", "median_best_ratio"]).map_err(err)?;
    // canonical variant order, not BTreeMap's alphabetical order
    for variant in ALL_VARIANTS {
        if let Some(curve) = curves.get(variant.label()) {
            for (i, v) in curve {
                w.write_record([variant.label(), &i.to_string(), &v.to_string()]).map_err(err)?;
            }
        }
    }
    w.into_inner()
        .map_err(|e| HarnessError::Csv { path: "<summary>".into(), message: e.to_string() })
}

/// End-to-end: read manifests and traces, write the summary CSV.
pub fn summarize(dirs: &[&Path], out: &Path) -> Result<()> {
    let traces = load_traces(dirs)?;
    let curves = median_curves(&traces);
    crate::write_atomic(out, &curves_to_csv(&curves)?)
}
