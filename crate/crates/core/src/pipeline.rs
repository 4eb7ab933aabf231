//! The three algorithms: shot-based VQE, ACAE pretraining, and the
//! warm-started composition, all with exact shot accounting.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::ansatz::{prepare, AnsatzSpec};
use crate::clifford::{random_clifford, CliffordTableau};
use crate::numerics::{ComplexMatrix, ComplexVector, EigenPair};
use crate::optimizer::{minimize, OptimizerConfig};
use crate::pauli::{decompose, estimate_expectation_grouped, group_qwc, MeasurementGroup};
use crate::shadows::{estimate_fidelity, take_snapshots};
use crate::{seed, Result};

/// Initial trust-region radius for plain VQE runs.
pub const RHOBEG_VQE: f64 = 3.0 * PI / 8.0;
/// Initial trust-region radius for ACAE pretraining.
pub const RHOBEG_ACAE: f64 = PI / 4.0;
/// Halved VQE radius used by the static warm-started variant.
pub const RHOBEG_WS_STATIC: f64 = 3.0 * PI / 16.0;
/// Default final radius; small enough to never fire before the iteration
/// caps used in the experiments.
pub const RHOEND_DEFAULT: f64 = 1e-4;

/// Clamp window applied to the final ACAE fidelity before the dynamic
/// radius division, capping the radius at twice the VQE baseline.
pub const DYNAMIC_F_CLAMP: (f64, f64) = (0.125, 1.0);

/// How the VQE phase's initial step size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RhobegVariant {
    /// `3/8 pi`, the plain VQE baseline.
    VqeBase,
    /// `1/4 pi`, the ACAE pretraining radius.
    AcaeBase,
    /// `3/16 pi`, half the VQE baseline.
    WsStatic,
    /// `(1 / clamp(f_final)) * 1/4 * rhobeg_VQE`.
    WsDynamic,
}

impl RhobegVariant {
    /// Resolves the radius; `f_final` is only consulted by the dynamic
    /// variant.
    pub fn resolve(&self, f_final: f64) -> f64 {
        match self {
            RhobegVariant::VqeBase => RHOBEG_VQE,
            RhobegVariant::AcaeBase => RHOBEG_ACAE,
            RhobegVariant::WsStatic => RHOBEG_WS_STATIC,
            RhobegVariant::WsDynamic => {
                let f = f_final.clamp(DYNAMIC_F_CLAMP.0, DYNAMIC_F_CLAMP.1);
                (1.0 / f) * 0.25 * RHOBEG_VQE
            }
        }
    }
}

/// Per-circuit shot count and snapshot count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotBudget {
    pub n_shots: usize,
    pub n_snaps: usize,
}

impl Default for ShotBudget {
    fn default() -> Self {
        Self { n_shots: 200, n_snaps: 400 }
    }
}

/// One problem instance: the Hermitian, its exact reference eigenpair,
/// and the classical approximate eigenvector.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub id: u64,
    pub h: ComplexMatrix,
    pub reference: EigenPair,
    pub approx_vector: ComplexVector,
    pub approx_ratio_classical: f64,
}

impl ProblemInstance {
    pub fn n_qubits(&self) -> usize {
        self.h.rows().trailing_zeros() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Acae,
    Vqe,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::Acae => write!(f, "ACAE"),
            Phase::Vqe => write!(f, "VQE"),
        }
    }
}

/// One objective evaluation in a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    pub phase: Phase,
    /// 1-based evaluation index within the phase.
    pub eval_index: usize,
    /// Report-axis position in equivalent VQE iterations.
    pub axis_iteration: usize,
    pub cumulative_shots: usize,
    /// The value the optimizer saw: shot expectation for VQE, estimated
    /// fidelity for ACAE.
    pub objective: f64,
    pub exact_expectation: Option<f64>,
    pub ratio_objective: Option<f64>,
    pub ratio_exact: Option<f64>,
    pub params: Vec<f64>,
}

/// Full per-evaluation record of one optimization run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    /// Final estimated ACAE fidelity, for warm-started runs.
    pub f_final: Option<f64>,
    /// Measurement circuits per VQE evaluation for this instance.
    pub circuits_per_vqe_eval: usize,
}

impl RunTrace {
    /// Best (lowest) shot objective over VQE records.
    pub fn best_vqe_objective(&self) -> Option<f64> {
        self.records
            .iter()
            .filter(|r| r.phase == Phase::Vqe)
            .map(|r| r.objective)
            .min_by(f64::total_cmp)
    }
}

/// Pauli measurement setup for an instance, shared across evaluations.
pub struct MeasurementPlan {
    pub groups: Vec<MeasurementGroup>,
    pub term_count: usize,
    pub circuits_per_eval: usize,
}

impl MeasurementPlan {
    pub fn for_matrix(h: &ComplexMatrix) -> Result<Self> {
        let terms = decompose(h)?;
        let term_count = terms.len();
        let groups = group_qwc(&terms);
        let circuits_per_eval = groups.iter().filter(|g| g.has_non_identity_term()).count();
        Ok(Self { groups, term_count, circuits_per_eval })
    }
}

/// Smallest VQE-iteration count whose shot total covers the ACAE total.
pub fn rescale_iterations(acae_total_shots: usize, vqe_shots_per_iteration: usize) -> usize {
    assert!(vqe_shots_per_iteration >= 1);
    acae_total_shots.div_ceil(vqe_shots_per_iteration)
}

/// Runs a plain VQE from `x0`, recording every evaluation.
pub fn run_vqe(
    instance: &ProblemInstance,
    spec: &AnsatzSpec,
    x0: &[f64],
    budget: &ShotBudget,
    cfg: &OptimizerConfig,
    rng: &mut impl Rng,
) -> Result<RunTrace> {
    let plan = MeasurementPlan::for_matrix(&instance.h)?;
    run_vqe_with_offsets(instance, &plan, spec, x0, budget, cfg, 1, 0, rng)
        .map(|records| RunTrace {
            records,
            f_final: None,
            circuits_per_vqe_eval: plan.circuits_per_eval,
        })
}

#[allow(clippy::too_many_arguments)]
fn run_vqe_with_offsets(
    instance: &ProblemInstance,
    plan: &MeasurementPlan,
    spec: &AnsatzSpec,
    x0: &[f64],
    budget: &ShotBudget,
    cfg: &OptimizerConfig,
    axis_of_first_eval: usize,
    shots_offset: usize,
    rng: &mut impl Rng,
) -> Result<Vec<TraceRecord>> {
    let lambda_ref = instance.reference.value;
    let mut records: Vec<TraceRecord> = Vec::new();
    let mut shot_rng = seed::child(rng);
    let mut failure: Option<crate::Error> = None;
    let outcome = minimize(
        |params| {
            if failure.is_some() {
                return f64::NAN;
            }
            let step = (|| -> Result<(f64, usize, f64)> {
                let state = prepare(spec, params)?;
                let est =
                    estimate_expectation_grouped(&state, &plan.groups, budget.n_shots, &mut shot_rng)?;
                let exact = crate::pauli::exact_expectation(&state, &instance.h)?;
                Ok((est.value, est.total_shots, exact))
            })();
            match step {
                Ok((value, shots, exact)) => {
                    let eval_index = records.len() + 1;
                    let prev = records.last().map_or(shots_offset, |r| r.cumulative_shots);
                    records.push(TraceRecord {
                        phase: Phase::Vqe,
                        eval_index,
                        axis_iteration: axis_of_first_eval + eval_index - 1,
                        cumulative_shots: prev + shots,
                        objective: value,
                        exact_expectation: Some(exact),
                        ratio_objective: Some(value / lambda_ref),
                        ratio_exact: Some(exact / lambda_ref),
                        params: params.to_vec(),
                    });
                    value
                }
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            }
        },
        x0,
        cfg,
    );
    match (outcome, failure) {
        (_, Some(e)) => Err(e),
        (Err(e), None) => Err(e),
        (Ok(_), None) => Ok(records),
    }
}

/// ACAE pretraining toward a unit-norm target vector.
///
/// Maximizes the shadow fidelity estimate by minimizing its negation;
/// each evaluation consumes exactly `n_snaps` single-shot snapshots.
/// With `reuse_unitaries`, the Clifford set is drawn once and reused for
/// every evaluation; otherwise it is redrawn per evaluation.
#[allow(clippy::too_many_arguments)]
pub fn run_acae(
    target: &ComplexVector,
    spec: &AnsatzSpec,
    x0: &[f64],
    budget: &ShotBudget,
    cfg: &OptimizerConfig,
    reuse_unitaries: bool,
    rng: &mut impl Rng,
) -> Result<(Vec<f64>, f64, RunTrace)> {
    let n = spec.n_qubits;
    let mut unitary_rng = seed::child(rng);
    let mut shot_rng = seed::child(rng);
    let reused: Option<Vec<CliffordTableau>> = if reuse_unitaries {
        Some(
            (0..budget.n_snaps)
                .map(|_| random_clifford(n, &mut unitary_rng))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    let mut records: Vec<TraceRecord> = Vec::new();
    let mut failure: Option<crate::Error> = None;
    let outcome = minimize(
        |params| {
            if failure.is_some() {
                return f64::NAN;
            }
            let step = (|| -> Result<f64> {
                let state = prepare(spec, params)?;
                let fresh;
                let unitaries = match &reused {
                    Some(u) => u.as_slice(),
                    None => {
                        fresh = (0..budget.n_snaps)
                            .map(|_| random_clifford(n, &mut unitary_rng))
                            .collect::<Result<Vec<_>>>()?;
                        fresh.as_slice()
                    }
                };
                let shadow = take_snapshots(&state, unitaries, &mut shot_rng)?;
                estimate_fidelity(&shadow, target)
            })();
            match step {
                Ok(fidelity) => {
                    let eval_index = records.len() + 1;
                    let prev = records.last().map_or(0, |r| r.cumulative_shots);
                    records.push(TraceRecord {
                        phase: Phase::Acae,
                        eval_index,
                        axis_iteration: 0, // filled in by the caller once the rescale is known
                        cumulative_shots: prev + budget.n_snaps,
                        objective: fidelity,
                        exact_expectation: None,
                        ratio_objective: None,
                        ratio_exact: None,
                        params: params.to_vec(),
                    });
                    -fidelity
                }
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            }
        },
        x0,
        cfg,
    );
    let result = match (outcome, failure) {
        (_, Some(e)) => return Err(e),
        (Err(e), None) => return Err(e),
        (Ok(r), None) => r,
    };
    let f_final = -result.best_value;
    let trace = RunTrace { records, f_final: Some(f_final), circuits_per_vqe_eval: 0 };
    Ok((result.best_params, f_final, trace))
}

/// Evaluation budgets for the two phases of a warm-started run.
#[derive(Debug, Clone, Copy)]
pub struct WsBudget {
    pub acae_max_evals: usize,
    pub vqe_max_evals: usize,
}

/// Two-step warm-started VQE: ACAE pretraining toward the classical
/// approximate eigenvector, then VQE from the pretrained parameters with
/// the variant-resolved initial step size.
#[allow(clippy::too_many_arguments)]
pub fn run_ws_vqe(
    instance: &ProblemInstance,
    spec: &AnsatzSpec,
    variant: RhobegVariant,
    budget: &ShotBudget,
    ws: &WsBudget,
    reuse_unitaries: bool,
    rng: &mut impl Rng,
) -> Result<RunTrace> {
    let plan = MeasurementPlan::for_matrix(&instance.h)?;
    let dim = spec.param_count();
    let x0: Vec<f64> = (0..dim).map(|_| rng.random_range(-PI..PI)).collect();

    let acae_cfg = OptimizerConfig {
        rhobeg: RHOBEG_ACAE,
        rhoend: RHOEND_DEFAULT,
        max_evals: ws.acae_max_evals.max(1),
    };
    let (warm_params, f_final, acae_trace) = run_acae(
        &instance.approx_vector,
        spec,
        &x0,
        budget,
        &acae_cfg,
        reuse_unitaries,
        rng,
    )?;

    let vqe_shots_per_iteration = plan.circuits_per_eval * budget.n_shots;
    let acae_total_shots = acae_trace.records.last().map_or(0, |r| r.cumulative_shots);
    let axis_of_first_vqe = rescale_iterations(acae_total_shots, vqe_shots_per_iteration.max(1)).max(1);

    let mut records = acae_trace.records;
    let lambda_ref = instance.reference.value;
    for r in &mut records {
        // report axis: rescale the ACAE shot prefix to equivalent VQE iterations
        r.axis_iteration =
            rescale_iterations(r.cumulative_shots, vqe_shots_per_iteration.max(1)).min(axis_of_first_vqe);
        let state = prepare(spec, &r.params)?;
        let exact = crate::pauli::exact_expectation(&state, &instance.h)?;
        r.exact_expectation = Some(exact);
        r.ratio_exact = Some(exact / lambda_ref);
    }

    let vqe_cfg = OptimizerConfig {
        rhobeg: variant.resolve(f_final),
        rhoend: RHOEND_DEFAULT,
        max_evals: ws.vqe_max_evals.max(1),
    };
    let vqe_records = run_vqe_with_offsets(
        instance,
        &plan,
        spec,
        &warm_params,
        budget,
        &vqe_cfg,
        axis_of_first_vqe,
        acae_total_shots,
        rng,
    )?;
    records.extend(vqe_records);
    Ok(RunTrace {
        records,
        f_final: Some(f_final),
        circuits_per_vqe_eval: plan.circuits_per_eval,
    })
}

/// Builds a [`ProblemInstance`] from a Hermitian matrix: exact reference
/// pair, Gershgorin-seeded inverse power vector, and the classical
/// approximation ratio.
pub fn instance_from_matrix(id: u64, h: ComplexMatrix, rng: &mut impl Rng) -> Result<ProblemInstance> {
    let reference = crate::numerics::eig_hermitian_min(&h)?;
    let mu = crate::numerics::gershgorin_lower_bound(&h)?;
    let approx_vector = crate::numerics::inverse_power(&h, mu, 3, rng)?;
    let approx_value = crate::numerics::rayleigh_quotient(&h, &approx_vector)?;
    let approx_ratio_classical = approx_value / reference.value;
    Ok(ProblemInstance { id, h, reference, approx_vector, approx_ratio_classical })
}
