//! Sweep execution: every instance against every variant, in parallel,
//! with independent RNG streams and a manifest of everything written.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use wsvqe::ansatz::AnsatzSpec;
use wsvqe::optimizer::OptimizerConfig;
use wsvqe::pipeline::{
    run_vqe, run_ws_vqe, ProblemInstance, RhobegVariant, RunTrace, ShotBudget, WsBudget,
    RHOBEG_VQE, RHOBEG_WS_STATIC, RHOEND_DEFAULT,
};
use wsvqe::seed;

use crate::{io_err, write_atomic, HarnessError, Result};

/// The five experiment arms: plain VQE with two initial radii, and the
/// warm-started pipeline with three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    VqeBase,
    VqeStatic,
    WsBase,
    WsStatic,
    WsDynamic,
}

pub const ALL_VARIANTS: [Variant; 5] =
    [Variant::VqeBase, Variant::VqeStatic, Variant::WsBase, Variant::WsStatic, Variant::WsDynamic];

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::VqeBase => "vqe_base",
            Variant::VqeStatic => "vqe_static",
            Variant::WsBase => "ws_base",
            Variant::WsStatic => "ws_static",
            Variant::WsDynamic => "ws_dynamic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        ALL_VARIANTS
            .into_iter()
            .find(|v| v.label() == s)
            .ok_or_else(|| HarnessError::Usage(format!("unknown variant '{s}'")))
    }

    /// Stream tag shared by all variants of a class. Arms that differ
    /// only in the initial radius run on identical random numbers
    /// (same x0, same pretraining, same shot noise), so per-instance
    /// comparisons isolate the radius effect instead of resampling
    /// noise.
    fn stream_class(&self) -> u64 {
        if self.is_warm_started() {
            1
        } else {
            0
        }
    }

    fn is_warm_started(&self) -> bool {
        matches!(self, Variant::WsBase | Variant::WsStatic | Variant::WsDynamic)
    }

    fn rhobeg_variant(&self) -> RhobegVariant {
        match self {
            Variant::VqeBase | Variant::WsBase => RhobegVariant::VqeBase,
            Variant::VqeStatic | Variant::WsStatic => RhobegVariant::WsStatic,
            Variant::WsDynamic => RhobegVariant::WsDynamic,
        }
    }
}

/// Everything a sweep depends on; hashed into the manifest so summaries
/// can refuse to mix incompatible trace sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub reps: usize,
    pub budget: ShotBudget,
    pub variants: Vec<Variant>,
    pub acae_max_evals: usize,
    pub vqe_max_evals: usize,
    pub reuse_unitaries: bool,
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.variants.is_empty()
            || self.acae_max_evals < 1
            || self.vqe_max_evals < 1
            || self.jobs < 1
            || self.budget.n_shots < 1
            || self.budget.n_snaps < 1
        {
            return Err(HarnessError::Usage("all counts must be >= 1".into()));
        }
        Ok(())
    }

    pub fn hash(&self) -> String {
        let body = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&body);
        format!("{digest:x}")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: u64,
    pub variant: Variant,
    pub trace: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub tool_version: String,
    pub runs: Vec<RunRecord>,
}

pub fn trace_file_name(instance: u64, variant: Variant) -> String {
    format!("trace_{instance:04}_{}.csv", variant.label())
}

/// Executes one run; the RNG stream is derived from
/// (master seed, instance id, variant, repetition 0).
pub fn execute_run(
    cfg: &ExperimentConfig,
    instance: &ProblemInstance,
    variant: Variant,
) -> Result<RunTrace> {
    let spec = AnsatzSpec::new(instance.n_qubits(), cfg.reps);
    let mut rng = seed::derive(cfg.master_seed, &[instance.id, variant.stream_class(), 0]);
    let trace = if variant.is_warm_started() {
        let ws = WsBudget { acae_max_evals: cfg.acae_max_evals, vqe_max_evals: cfg.vqe_max_evals };
        run_ws_vqe(
            instance,
            &spec,
            variant.rhobeg_variant(),
            &cfg.budget,
            &ws,
            cfg.reuse_unitaries,
            &mut rng,
        )?
    } else {
        let rhobeg = match variant {
            Variant::VqeBase => RHOBEG_VQE,
            Variant::VqeStatic => RHOBEG_WS_STATIC,
            _ => unreachable!(),
        };
        let dim = spec.param_count();
        use rand::Rng;
        let x0: Vec<f64> =
            (0..dim).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
        let opt = OptimizerConfig { rhobeg, rhoend: RHOEND_DEFAULT, max_evals: cfg.vqe_max_evals };
        run_vqe(instance, &spec, &x0, &cfg.budget, &opt, &mut rng)?
    };
    Ok(trace)
}

/// Serializes a trace as CSV: the fixed columns, then one column per
/// parameter.
pub fn trace_to_csv(trace: &RunTrace) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let param_count = trace.records.first().map_or(0, |r| r.params.len());
    let mut header = vec![
        "phase".to_string(),
        "eval_index".to_string(),
        "axis_iteration".to_string(),
        "cumulative_shots".to_string(),
        "objective".to_string(),
        "exact_expectation".to_string(),
        "ratio_objective".to_string(),
        "ratio_exact".to_string(),
    ];
    header.extend((0..param_count).map(|i| format!("p{i}")));
    let csv_err = |e: csv::Error| HarnessError::Csv { path: "<trace>".into(), message: e.to_string() };
    w.write_record(&header).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for r in &trace.records {
        let mut row = vec![
            r.phase.to_string(),
            r.eval_index.to_string(),
            r.axis_iteration.to_string(),
            r.cumulative_shots.to_string(),
            r.objective.to_string(),
            opt(r.exact_expectation),
            opt(r.ratio_objective),
            opt(r.ratio_exact),
        ];
        row.extend(r.params.iter().map(|p| p.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::Csv { path: "<trace>".into(), message: e.to_string() })
}

/// Runs the full sweep. Individual run failures are recorded in the
/// manifest and do not abort the sweep; the manifest is always written.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    instances: &[ProblemInstance],
    out_dir: &Path,
) -> Result<Manifest> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| HarnessError::Usage(format!("thread pool: {e}")))?;

    let jobs: Vec<(&ProblemInstance, Variant)> = instances
        .iter()
        .flat_map(|inst| cfg.variants.iter().map(move |&v| (inst, v)))
        .collect();
    let runs: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|(inst, variant)| {
                let outcome = execute_run(cfg, inst, *variant).and_then(|trace| {
                    let name = trace_file_name(inst.id, *variant);
                    let body = trace_to_csv(&trace)?;
                    write_atomic(&out_dir.join(&name), &body)?;
                    Ok(name)
                });
                match outcome {
                    Ok(name) => RunRecord {
                        instance: inst.id,
                        variant: *variant,
                        trace: Some(name),
                        error: None,
                    },
                    Err(e) => RunRecord {
                        instance: inst.id,
                        variant: *variant,
                        trace: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });

    let manifest = Manifest {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        runs,
    };
    let body = serde_json::to_vec_pretty(&manifest).map_err(|e| HarnessError::Json {
        path: out_dir.join("manifest.json").display().to_string(),
        source: e,
    })?;
    write_atomic(&out_dir.join("manifest.json"), &body)?;
    if manifest.runs.iter().any(|r| r.error.is_some()) {
        let failed = manifest.runs.iter().filter(|r| r.error.is_some()).count();
        return Err(HarnessError::Core(wsvqe::Error::Invalid(format!(
            "{failed} of {} runs failed; see manifest.json",
            manifest.runs.len()
        ))));
    }
    Ok(manifest)
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join("manifest.json");
    let body = std::fs::read(&path).map_err(|e| io_err(&path, e))?;
    serde_json::from_slice(&body).map_err(|e| HarnessError::Json {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn manifest_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|s| s.to_str())
                .is_some_and(|s| s.starts_with("manifest") && s.ends_with(".json"))
        })
        .collect();
    found.sort();
    Ok(found)
}
