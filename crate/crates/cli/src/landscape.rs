//! Two-dimensional parameter-landscape slices.

use rayon::prelude::*;
use std::f64::consts::PI;
use std::path::Path;

use wsvqe::ansatz::{prepare, AnsatzSpec};
use wsvqe::clifford::random_clifford;
use wsvqe::pauli::estimate_expectation_grouped;
use wsvqe::pipeline::{MeasurementPlan, ProblemInstance, ShotBudget};
use wsvqe::shadows::{estimate_fidelity, take_snapshots};
use wsvqe::seed;

use crate::{HarnessError, Result};

/// A slice request: which two parameters sweep the grid, everything else
/// frozen. With `frozen: None` the remaining parameters are drawn once,
/// uniformly from [-pi, pi].
#[derive(Debug, Clone)]
pub struct LandscapeRequest {
    pub axis_i: usize,
    pub axis_j: usize,
    /// Grid spacing; the grid covers [-pi, pi] inclusive.
    pub step: f64,
    pub frozen: Option<Vec<f64>>,
    pub budget: ShotBudget,
    pub seed: u64,
    pub reps: usize,
}

impl LandscapeRequest {
    pub fn new(axis_i: usize, axis_j: usize, seed: u64) -> Self {
        Self {
            axis_i,
            axis_j,
            step: PI / 20.0,
            frozen: None,
            budget: ShotBudget::default(),
            seed,
            reps: 2,
        }
    }
}

/// One grid point's quantities.
#[derive(Debug, Clone)]
pub struct LandscapePoint {
    pub theta_i: f64,
    pub theta_j: f64,
    pub expectation: f64,
    pub est_fidelity: f64,
    pub fid_approx: f64,
    pub fid_opt: f64,
}

/// Inclusive grid values over [-pi, pi] at the requested spacing.
pub fn grid_values(step: f64) -> Vec<f64> {
    let count = (2.0 * PI / step).round() as usize + 1;
    (0..count).map(|k| -PI + k as f64 * step).collect()
}

/// Evaluates the full grid. Deterministic for a given seed: the frozen
/// parameters come from one substream, each grid point's shots from its
/// own.
pub fn evaluate(instance: &ProblemInstance, req: &LandscapeRequest) -> Result<Vec<LandscapePoint>> {
    let spec = AnsatzSpec::new(instance.n_qubits(), req.reps);
    let dim = spec.param_count();
    if req.axis_i == req.axis_j || req.axis_i >= dim || req.axis_j >= dim {
        return Err(HarnessError::Usage(format!(
            "axis indices must be distinct and < {dim}, got {} and {}",
            req.axis_i, req.axis_j
        )));
    }
    if !(req.step > 0.0 && req.step <= 2.0 * PI) {
        return Err(HarnessError::Usage(format!("bad grid step {}", req.step)));
    }
    let frozen: Vec<f64> = match &req.frozen {
        Some(values) => {
            if values.len() != dim {
                return Err(HarnessError::Usage(format!(
                    "frozen parameter vector must have length {dim}, got {}",
                    values.len()
                )));
            }
            values.clone()
        }
        None => {
            use rand::Rng;
            let mut rng = seed::derive(req.seed, &[0]);
            (0..dim).map(|_| rng.random_range(-PI..PI)).collect()
        }
    };
    let plan = MeasurementPlan::for_matrix(&instance.h)?;
    let grid = grid_values(req.step);
    let mut points: Vec<(usize, f64, f64)> = Vec::with_capacity(grid.len() * grid.len());
    for &ti in &grid {
        for &tj in &grid {
            points.push((points.len(), ti, tj));
        }
    }

    points
        .par_iter()
        .map(|&(idx, ti, tj)| {
            let mut params = frozen.clone();
            params[req.axis_i] = ti;
            params[req.axis_j] = tj;
            let state = prepare(&spec, &params)?;
            let mut rng = seed::derive(req.seed, &[1, idx as u64]);
            let est =
                estimate_expectation_grouped(&state, &plan.groups, req.budget.n_shots, &mut rng)?;
            let unitaries: Vec<_> = (0..req.budget.n_snaps)
                .map(|_| random_clifford(spec.n_qubits, &mut rng))
                .collect::<wsvqe::Result<_>>()?;
            let shadow = take_snapshots(&state, &unitaries, &mut rng)?;
            let est_fidelity = estimate_fidelity(&shadow, &instance.approx_vector)?;
            let fid_approx = state.fidelity_exact(&instance.approx_vector)?;
            let fid_opt = state.fidelity_exact(&instance.reference.vector)?;
            Ok(LandscapePoint {
                theta_i: ti,
                theta_j: tj,
                expectation: est.value,
                est_fidelity,
                fid_approx,
                fid_opt,
            })
        })
        .collect::<Result<Vec<_>>>()
}

pub fn points_to_csv(points: &[LandscapePoint]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| HarnessError::Csv { path: "<landscape>".into(), message: e.to_string() };
    w.write_record(["theta_i", "theta_j", "expectation", "est_fidelity", "fid_approx", "fid_opt"])
        .map_err(err)?;
    for p in points {
        w.write_record([
            p.theta_i.to_string(),
            p.theta_j.to_string(),
            p.expectation.to_string(),
            p.est_fidelity.to_string(),
            p.fid_approx.to_string(),
            p.fid_opt.to_string(),
        ])
        .map_err(err)?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::Csv { path: "<landscape>".into(), message: e.to_string() })
}

/// End-to-end: evaluate the grid and write the CSV.
pub fn landscape(instance: &ProblemInstance, req: &LandscapeRequest, out: &Path) -> Result<()> {
    let points = evaluate(instance, req)?;
    crate::write_atomic(out, &points_to_csv(&points)?)
}
