//! Acceptance suite. Each numbered check prints one PASS/FAIL line and
//! panics on failure, so `cargo test --test acceptance` doubles as the
//! release gate and `-- --nocapture` as the report.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

use wsvqe::clifford::{random_clifford, synthesize, CliffordTableau};
use wsvqe::numerics::{eig_hermitian_min, gershgorin_lower_bound, random_unit_vector};
use wsvqe::pauli::{
    basis_rotation_circuit, decompose, estimate_expectation_grouped, exact_expectation, group_qwc,
};
use wsvqe::pipeline::{rescale_iterations, RhobegVariant, ShotBudget};
use wsvqe::shadows::{estimate_fidelity, take_snapshots};
use wsvqe::statevector::StateVector;
use wsvqe::{seed, ComplexMatrix};
use wsvqe_cli::experiment::{run_experiment, ExperimentConfig, ALL_VARIANTS};
use wsvqe_cli::instance::{gen_instances, generate_instance, load_instances, GenConfig};
use wsvqe_cli::landscape::{evaluate, LandscapeRequest};
use wsvqe_cli::summarize::{load_traces, median_curves};

fn report(number: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {number:02} {name}: {verdict} ({detail})");
    assert!(pass, "criterion {number} ({name}) failed: {detail}");
}

fn gauss(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random::<f64>().max(1e-12);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

/// Dense Gaussian Hermitian test matrix: (G + G^H) / 2.
fn dense_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut rows = vec![vec![Complex64::ZERO; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            rows[i][j] = Complex64::new(gauss(rng), gauss(rng));
        }
    }
    for i in 0..dim {
        for j in 0..i {
            let avg = 0.5 * (rows[i][j] + rows[j][i].conj());
            rows[i][j] = avg;
            rows[j][i] = avg.conj();
        }
        rows[i][i] = Complex64::new(rows[i][i].re, 0.0);
    }
    ComplexMatrix::from_rows(&rows).unwrap()
}

#[test]
fn criterion_01_decomposition_reconstructs() {
    let mut rng = seed::derive(1001, &[]);
    let mut worst = 0.0f64;
    for k in 0..500 {
        let dim = [2, 4, 8][k % 3];
        let h = dense_hermitian(dim, &mut rng);
        let terms = decompose(&h).unwrap();
        let mut sum = vec![vec![Complex64::ZERO; dim]; dim];
        for t in &terms {
            let p = t.string.to_matrix();
            for i in 0..dim {
                for j in 0..dim {
                    sum[i][j] += t.coefficient * p[(i, j)];
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max((sum[i][j] - h[(i, j)]).norm());
            }
        }
    }
    report(1, "decomposition-oracle", worst <= 1e-10, &format!("max entry error {worst:.2e}"));
}

#[test]
fn criterion_02_shot_estimate_consistency() {
    const SHOTS: usize = 1_000_000;
    let pairs: Vec<u64> = (0..20).collect();
    let outcomes: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|&k| {
            let mut rng = seed::derive(1002, &[k]);
            let cfg =
                GenConfig { count: 1, dim: 8, sparsity: 0.5, entry_bound: 5.0, master_seed: 9000 + k };
            let inst = generate_instance(&cfg, k).unwrap();
            let state = StateVector::from_vector(&random_unit_vector(8, &mut rng)).unwrap();
            let groups = group_qwc(&decompose(&inst.h).unwrap());
            let est = estimate_expectation_grouped(&state, &groups, SHOTS, &mut rng).unwrap();
            let exact = exact_expectation(&state, &inst.h).unwrap();
            // exact sampling variance of the grouped estimator
            let mut variance = 0.0;
            for g in &groups {
                if !g.has_non_identity_term() {
                    continue;
                }
                let rotated = state.apply(&basis_rotation_circuit(g)).unwrap();
                let (mut m1, mut m2) = (0.0, 0.0);
                for b in 0..8usize {
                    let p = rotated.amplitude(b).unwrap().norm_sqr();
                    let v: f64 = g
                        .terms
                        .iter()
                        .map(|t| {
                            let parity = (b & t.string.support_mask()).count_ones() % 2;
                            if parity == 1 {
                                -t.coefficient
                            } else {
                                t.coefficient
                            }
                        })
                        .sum();
                    m1 += p * v;
                    m2 += p * v * v;
                }
                variance += (m2 - m1 * m1).max(0.0) / SHOTS as f64;
            }
            (est.value, exact, variance.sqrt())
        })
        .collect();
    let hits = outcomes.iter().filter(|(est, exact, se)| (est - exact).abs() <= 5.0 * se).count();
    report(2, "qee-consistency", hits >= 19, &format!("{hits}/20 within 5 standard errors"));
}

/// Collects the full n-qubit Clifford group (up to phase) by sampling.
fn collect_clifford_group(n: usize, expected: usize, rng: &mut impl Rng) -> Vec<CliffordTableau> {
    let mut seen: HashMap<Vec<u8>, CliffordTableau> = HashMap::new();
    for _ in 0..200_000 {
        let c = random_clifford(n, rng).unwrap();
        seen.entry(c.canonical_bytes()).or_insert(c);
        if seen.len() == expected {
            break;
        }
    }
    assert_eq!(seen.len(), expected, "did not reach all {expected} classes");
    seen.into_values().collect()
}

#[test]
fn criterion_03_shadow_unbiasedness_exact() {
    let mut rng = seed::derive(1003, &[]);
    let group = collect_clifford_group(1, 24, &mut rng);
    let circuits: Vec<_> = group.iter().map(|c| synthesize(c).unwrap()).collect();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let target = random_unit_vector(2, &mut rng);
        let model_vec = random_unit_vector(2, &mut rng);
        let model = StateVector::from_vector(&model_vec).unwrap();
        let target_state = StateVector::from_vector(&target).unwrap();
        // E[f_hat] over uniform Cliffords and Born-weighted outcomes
        let mut mean = 0.0;
        for circuit in &circuits {
            let rm = model.apply(circuit).unwrap();
            let rt = target_state.apply(circuit).unwrap();
            for b in 0..2usize {
                let born = rm.amplitude(b).unwrap().norm_sqr();
                let term = 3.0 * rt.amplitude(b).unwrap().norm_sqr() - 1.0;
                mean += born * term / 24.0;
            }
        }
        let exact = model.fidelity_exact(&target).unwrap();
        worst = worst.max((mean - exact).abs());
    }
    report(3, "shadow-unbiased-exact", worst <= 1e-9, &format!("max deviation {worst:.2e}"));
}

#[test]
fn criterion_04_shadow_unbiasedness_statistical() {
    let deviations: Vec<f64> = (0..20u64)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&k| {
            let mut rng = seed::derive(1004, &[k]);
            let model_vec = random_unit_vector(8, &mut rng);
            let target = random_unit_vector(8, &mut rng);
            let model = StateVector::from_vector(&model_vec).unwrap();
            let unitaries: Vec<_> =
                (0..100_000).map(|_| random_clifford(3, &mut rng).unwrap()).collect();
            let shadow = take_snapshots(&model, &unitaries, &mut rng).unwrap();
            let est = estimate_fidelity(&shadow, &target).unwrap();
            let exact = model.fidelity_exact(&target).unwrap();
            (est - exact).abs()
        })
        .collect();
    let worst = deviations.iter().cloned().fold(0.0, f64::max);
    report(4, "shadow-unbiased-statistical", worst <= 0.02, &format!("max |est - F| {worst:.4}"));
}

/// Regularized upper incomplete gamma Q(a, x), for the chi-square
/// survival function: series for the lower part when x < a + 1, Lentz's
/// continued fraction otherwise.
fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    let ln_gamma_a = ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        for _ in 0..500 {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        1.0 - sum * (-x + a * x.ln() - ln_gamma_a).exp()
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x + a * x.ln() - ln_gamma_a).exp() * h
    }
}

/// Lanczos log-gamma.
fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, &g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

#[test]
fn criterion_05_clifford_uniformity() {
    let mut rng = seed::derive(1005, &[]);
    // n = 1: chi-square over the 24 classes
    let mut counts: HashMap<Vec<u8>, usize> = HashMap::new();
    const SAMPLES: usize = 24_000;
    for _ in 0..SAMPLES {
        let c = random_clifford(1, &mut rng).unwrap();
        *counts.entry(c.canonical_bytes()).or_insert(0) += 1;
    }
    let classes = counts.len();
    let expected = SAMPLES as f64 / 24.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = gamma_q(23.0 / 2.0, chi2 / 2.0);
    let n1_ok = classes == 24 && p >= 0.001;

    // n = 2: class coverage at 200k samples
    let mut seen = std::collections::HashSet::new();
    for _ in 0..200_000 {
        seen.insert(random_clifford(2, &mut rng).unwrap().canonical_bytes());
    }
    let n2_ok = seen.len() >= 11_000;
    report(
        5,
        "clifford-uniformity",
        n1_ok && n2_ok,
        &format!("n=1 chi2 {chi2:.1} p {p:.4} over {classes} classes; n=2 distinct {}", seen.len()),
    );
}

#[test]
fn criterion_06_gershgorin_soundness() {
    let mut rng = seed::derive(1006, &[]);
    let mut violations = 0usize;
    for _ in 0..1000 {
        let h = dense_hermitian(8, &mut rng);
        let mu = gershgorin_lower_bound(&h).unwrap();
        let lambda = eig_hermitian_min(&h).unwrap().value;
        if mu > lambda + 1e-9 {
            violations += 1;
        }
    }
    report(6, "gershgorin-soundness", violations == 0, &format!("{violations}/1000 violations"));
}

#[test]
fn criterion_07_classical_approximator_quality() {
    let cfg = GenConfig { count: 100, dim: 8, sparsity: 0.5, entry_bound: 5.0, master_seed: 1007 };
    let ratios: Vec<f64> = (0..100u64)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&id| generate_instance(&cfg, id).unwrap().approx_ratio_classical)
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    report(7, "classical-quality", (0.70..=0.95).contains(&mean), &format!("mean ratio {mean:.3}"));
}

#[test]
fn criterion_08_dynamic_rhobeg_fixed_points() {
    let cases = [(1.0, 3.0 * PI / 32.0), (0.5, 3.0 * PI / 16.0), (0.25, 3.0 * PI / 8.0)];
    let ok = cases.iter().all(|&(f, rho)| RhobegVariant::WsDynamic.resolve(f) == rho);
    report(8, "dynamic-rhobeg", ok, "f_final {1, 0.5, 0.25} -> {3pi/32, 3pi/16, 3pi/8}");
}

#[test]
fn criterion_09_iteration_rescaling() {
    let ok = rescale_iterations(8000, 3000) == 3
        && rescale_iterations(0, 1000) == 0
        && rescale_iterations(3000, 3000) == 1;
    report(9, "iteration-rescaling", ok, "(8000,3000)->3, (0,1000)->0, (3000,3000)->1");
}

#[test]
fn criteria_10_11_13_desk_scale_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let gen = GenConfig { count: 50, dim: 8, sparsity: 0.5, entry_bound: 5.0, master_seed: 2024 };
    let inst_dir = dir.path().join("instances");
    gen_instances(&gen, &inst_dir).unwrap();
    let instances = load_instances(&inst_dir).unwrap();
    let cfg = ExperimentConfig {
        master_seed: 314,
        reps: 2,
        budget: ShotBudget { n_shots: 200, n_snaps: 400 },
        variants: ALL_VARIANTS.to_vec(),
        acae_max_evals: 50,
        vqe_max_evals: 100,
        reuse_unitaries: true,
        jobs: std::thread::available_parallelism().map_or(4, |n| n.get()),
    };
    let out = dir.path().join("traces");
    let manifest = run_experiment(&cfg, &instances, &out).unwrap();
    assert_eq!(manifest.runs.len(), 250);

    let traces = load_traces(&[&out]).unwrap();
    let curves = median_curves(&traces);
    let at = |variant: &str, axis: usize| -> f64 {
        curves[variant].iter().find(|&&(i, _)| i == axis).map(|&(_, v)| v).unwrap()
    };
    let a_ok = at("ws_dynamic", 20) >= at("vqe_base", 20) + 0.1;
    let b_ok = ["ws_base", "ws_static", "ws_dynamic"]
        .iter()
        .all(|v| at(v, 100) >= at("vqe_base", 100));
    let dominated = (20..=60).filter(|&i| at("ws_static", i) >= at("ws_base", i)).count();
    let c_ok = dominated as f64 >= 0.7 * 41.0;
    report(
        10,
        "desk-scale-orderings",
        a_ok && b_ok && c_ok,
        &format!(
            "at 20: ws_dynamic {:.3} vs vqe_base {:.3}; at 100: ws {:.3}/{:.3}/{:.3} vs vqe {:.3}; static>=base on {dominated}/41",
            at("ws_dynamic", 20),
            at("vqe_base", 20),
            at("ws_base", 100),
            at("ws_static", 100),
            at("ws_dynamic", 100),
            at("vqe_base", 100)
        ),
    );

    // criterion 11: mean final ACAE estimated fidelity over the WS runs
    let mut finals = Vec::new();
    for run in &manifest.runs {
        let name = run.trace.as_ref().unwrap();
        if !name.contains("ws_") {
            continue;
        }
        let body = std::fs::read_to_string(out.join(name)).unwrap();
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let headers = reader.headers().unwrap().clone();
        let c_phase = headers.iter().position(|h| h == "phase").unwrap();
        let c_obj = headers.iter().position(|h| h == "objective").unwrap();
        let best_acae = reader
            .records()
            .filter_map(|r| r.ok())
            .filter(|r| &r[c_phase] == "ACAE")
            .filter_map(|r| r[c_obj].parse::<f64>().ok())
            .fold(f64::NEG_INFINITY, f64::max);
        finals.push(best_acae);
    }
    assert_eq!(finals.len(), 150);
    let mean_f = finals.iter().sum::<f64>() / finals.len() as f64;
    report(11, "acae-fidelity-band", (0.4..=0.85).contains(&mean_f), &format!("mean f_final {mean_f:.3}"));

    // criterion 13: identical reruns
    let out2 = dir.path().join("traces-rerun");
    run_experiment(&cfg, &instances, &out2).unwrap();
    let mut identical = true;
    for run in &manifest.runs {
        let name = run.trace.as_ref().unwrap();
        if std::fs::read(out.join(name)).unwrap() != std::fs::read(out2.join(name)).unwrap() {
            identical = false;
            break;
        }
    }
    report(13, "determinism", identical, "250 trace CSVs byte-identical across reruns");
}

#[test]
fn criterion_12_landscape() {
    let cfg = GenConfig { count: 1, dim: 8, sparsity: 0.5, entry_bound: 5.0, master_seed: 1012 };
    let inst = generate_instance(&cfg, 0).unwrap();
    let req = LandscapeRequest::new(4, 11, 77);
    let points = evaluate(&inst, &req).unwrap();
    let rows_ok = points.len() == 1681;
    let range_ok = points
        .iter()
        .all(|p| (0.0..=1.0).contains(&p.fid_approx) && (0.0..=1.0).contains(&p.fid_opt));
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.est_fidelity).sum::<f64>() / n;
    let my = points.iter().map(|p| p.fid_approx).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for p in &points {
        let (dx, dy) = (p.est_fidelity - mx, p.fid_approx - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let r = sxy / (sxx * syy).sqrt();
    report(
        12,
        "landscape",
        rows_ok && range_ok && r >= 0.8,
        &format!("{} rows, Pearson r {r:.3}", points.len()),
    );
}
