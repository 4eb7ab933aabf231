//! Problem-instance generation and the on-disk instance format.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use wsvqe::numerics::EigenPair;
use wsvqe::pipeline::ProblemInstance;
use wsvqe::{seed, ComplexMatrix, ComplexVector};

use crate::{io_err, write_atomic, HarnessError, Result};

/// Minimum magnitude of the reference eigenvalue. Instances whose lowest
/// eigenvalue is not clearly negative are resampled: approximation
/// ratios value/lambda_ref lose their meaning near zero.
const LAMBDA_REF_CEILING: f64 = -1e-6;

/// Instance-generation knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenConfig {
    pub count: usize,
    /// Matrix dimension; must be a power of two.
    pub dim: usize,
    /// Probability that a sampled upper-triangle entry is zero.
    pub sparsity: f64,
    /// Entries are uniform in [-bound, bound] per component.
    pub entry_bound: f64,
    pub master_seed: u64,
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count < 1 || self.dim < 2 || !self.dim.is_power_of_two() {
            return Err(HarnessError::Usage(
                "need count >= 1 and a power-of-two dim >= 2".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.sparsity) || !(self.entry_bound > 0.0) {
            return Err(HarnessError::Usage(
                "need sparsity in [0,1] and entry_bound > 0".into(),
            ));
        }
        Ok(())
    }
}

/// On-disk instance: the Hermitian split into real/imaginary parts, the
/// exact reference eigenpair, the classical approximate eigenvector
/// q_(3), and the classical approximation ratio.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub id: u64,
    pub n: usize,
    pub h_re: Vec<Vec<f64>>,
    pub h_im: Vec<Vec<f64>>,
    pub lambda_ref: f64,
    pub v_opt_re: Vec<f64>,
    pub v_opt_im: Vec<f64>,
    pub q3_re: Vec<f64>,
    pub q3_im: Vec<f64>,
    pub r_classical: f64,
}

impl InstanceFile {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let dim = inst.h.rows();
        let h_re = (0..dim).map(|i| (0..dim).map(|j| inst.h[(i, j)].re).collect()).collect();
        let h_im = (0..dim).map(|i| (0..dim).map(|j| inst.h[(i, j)].im).collect()).collect();
        Self {
            id: inst.id,
            n: inst.n_qubits(),
            h_re,
            h_im,
            lambda_ref: inst.reference.value,
            v_opt_re: inst.reference.vector.entries().iter().map(|z| z.re).collect(),
            v_opt_im: inst.reference.vector.entries().iter().map(|z| z.im).collect(),
            q3_re: inst.approx_vector.entries().iter().map(|z| z.re).collect(),
            q3_im: inst.approx_vector.entries().iter().map(|z| z.im).collect(),
            r_classical: inst.approx_ratio_classical,
        }
    }

    pub fn to_instance(&self) -> Result<ProblemInstance> {
        let dim = 1usize << self.n;
        let zip = |re: &[f64], im: &[f64]| -> Vec<Complex64> {
            re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect()
        };
        if self.h_re.len() != dim
            || self.h_im.len() != dim
            || self.v_opt_re.len() != dim
            || self.q3_re.len() != dim
        {
            return Err(HarnessError::Usage(format!(
                "instance {}: field lengths inconsistent with n={}",
                self.id, self.n
            )));
        }
        let rows: Vec<Vec<Complex64>> = self
            .h_re
            .iter()
            .zip(&self.h_im)
            .map(|(re, im)| zip(re, im))
            .collect();
        let h = ComplexMatrix::from_rows(&rows)?;
        Ok(ProblemInstance {
            id: self.id,
            h,
            reference: EigenPair {
                value: self.lambda_ref,
                vector: ComplexVector::new(zip(&self.v_opt_re, &self.v_opt_im)),
            },
            approx_vector: ComplexVector::new(zip(&self.q3_re, &self.q3_im)),
            approx_ratio_classical: self.r_classical,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_vec_pretty(self).map_err(|e| HarnessError::Json {
            path: path.display().to_string(),
            source: e,
        })?;
        write_atomic(path, &body)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read(path).map_err(|e| io_err(path, e))?;
        serde_json::from_slice(&body).map_err(|e| HarnessError::Json {
            path: path.display().to_string(),
            source: e,
        })
    }
}

/// Samples one Hermitian: upper triangle (including the real diagonal)
/// entry-by-entry, zero with probability `sparsity`, otherwise uniform
/// components in [-bound, bound]; lower triangle mirrored conjugate.
pub fn random_hermitian(cfg: &GenConfig, rng: &mut impl Rng) -> ComplexMatrix {
    let d = cfg.dim;
    let b = cfg.entry_bound;
    let mut rows = vec![vec![Complex64::ZERO; d]; d];
    for i in 0..d {
        for j in i..d {
            if rng.random::<f64>() < cfg.sparsity {
                continue;
            }
            let re = rng.random_range(-b..=b);
            let im = if i == j { 0.0 } else { rng.random_range(-b..=b) };
            rows[i][j] = Complex64::new(re, im);
            rows[j][i] = rows[i][j].conj();
        }
    }
    ComplexMatrix::from_rows(&rows).expect("square by construction")
}

/// Generates one instance, resampling until the reference eigenvalue is
/// clearly negative.
pub fn generate_instance(cfg: &GenConfig, id: u64) -> Result<ProblemInstance> {
    for attempt in 0..64u64 {
        let mut rng = seed::derive(cfg.master_seed, &[0x67656e, id, attempt]);
        let h = random_hermitian(cfg, &mut rng);
        let inst = wsvqe::pipeline::instance_from_matrix(id, h, &mut rng)?;
        if inst.reference.value <= LAMBDA_REF_CEILING {
            return Ok(inst);
        }
    }
    Err(HarnessError::Core(wsvqe::Error::Invalid(format!(
        "instance {id}: no sample with a negative reference eigenvalue in 64 attempts"
    ))))
}

pub fn instance_path(dir: &Path, id: u64) -> PathBuf {
    dir.join(format!("instance_{id:04}.json"))
}

/// Generates `cfg.count` instances into `dir`; returns the file paths.
pub fn gen_instances(cfg: &GenConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut paths = Vec::with_capacity(cfg.count);
    for id in 0..cfg.count as u64 {
        let inst = generate_instance(cfg, id)?;
        let path = instance_path(dir, id);
        InstanceFile::from_instance(&inst).save(&path)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Loads every `instance_*.json` in `dir`, sorted by id.
pub fn load_instances(dir: &Path) -> Result<Vec<ProblemInstance>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|s| s.to_str())
                .is_some_and(|s| s.starts_with("instance_") && s.ends_with(".json"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(HarnessError::Usage(format!("no instance_*.json files in {}", dir.display())));
    }
    files.iter().map(|p| InstanceFile::load(p)?.to_instance()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> GenConfig {
        GenConfig { count: 4, dim: 8, sparsity: 0.5, entry_bound: 5.0, master_seed: 7 }
    }

    #[test]
    fn generated_matrices_are_exactly_hermitian() {
        let cfg = small_cfg();
        for id in 0..20 {
            let inst = generate_instance(&cfg, id).unwrap();
            assert_eq!(inst.h.hermitian_deviation(), 0.0);
            assert!(inst.reference.value < 0.0);
        }
    }

    #[test]
    fn sparsity_matches_binomial_expectation() {
        let cfg = small_cfg();
        // 36 sampled upper-triangle slots per 8x8 instance
        let trials = 500usize;
        let mut nonzero = 0usize;
        for id in 0..trials as u64 {
            let mut rng = seed::derive(11, &[id]);
            let h = random_hermitian(&cfg, &mut rng);
            for i in 0..8 {
                for j in i..8 {
                    if h[(i, j)] != Complex64::ZERO {
                        nonzero += 1;
                    }
                }
            }
        }
        let slots = (trials * 36) as f64;
        let frac = nonzero as f64 / slots;
        let sigma = (0.25 / slots).sqrt();
        assert!((frac - 0.5).abs() <= 3.0 * sigma, "nonzero fraction {frac}");
    }

    #[test]
    fn json_round_trip_preserves_instance() {
        let cfg = small_cfg();
        let inst = generate_instance(&cfg, 3).unwrap();
        let file = InstanceFile::from_instance(&inst);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: InstanceFile = serde_json::from_str(&text).unwrap();
        let back = parsed.to_instance().unwrap();
        assert_eq!(back.id, 3);
        assert_eq!(back.h.hermitian_deviation(), 0.0);
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(back.h[(i, j)], inst.h[(i, j)]);
            }
        }
        assert_eq!(back.reference.value, inst.reference.value);
        assert_eq!(back.approx_ratio_classical, inst.approx_ratio_classical);
    }

    #[test]
    fn classical_ratio_band_over_small_batch() {
        let cfg = GenConfig { count: 40, ..small_cfg() };
        let mut ratios = Vec::new();
        for id in 0..cfg.count as u64 {
            ratios.push(generate_instance(&cfg, id).unwrap().approx_ratio_classical);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((0.7..=0.95).contains(&mean), "mean classical ratio {mean}");
    }

    #[test]
    fn gen_writes_and_loads_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_cfg();
        let paths = gen_instances(&cfg, dir.path()).unwrap();
        assert_eq!(paths.len(), 4);
        let loaded = load_instances(dir.path()).unwrap();
        assert_eq!(loaded.len(), 4);
        assert_eq!(loaded[2].id, 2);
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = GenConfig { dim: 6, ..small_cfg() };
        assert!(matches!(gen_instances(&bad, Path::new("/tmp")), Err(HarnessError::Usage(_))));
    }
}
