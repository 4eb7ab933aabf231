//! Hot-path benchmarks: one VQE objective evaluation and the pieces it
//! is made of.

use criterion::{criterion_group, criterion_main, Criterion};
use rand::Rng;
use std::f64::consts::PI;
use std::hint::black_box;

use wsvqe::ansatz::{build, prepare, AnsatzSpec};
use wsvqe::clifford::{random_clifford, synthesize};
use wsvqe::pauli::{decompose, estimate_expectation_grouped, group_qwc};
use wsvqe::seed;
use wsvqe::shadows::{estimate_fidelity, take_snapshots};
use wsvqe::statevector::zero_state;

fn random_params(rng: &mut impl Rng) -> Vec<f64> {
    (0..18).map(|_| rng.random_range(-PI..PI)).collect()
}

fn dense_hermitian(rng: &mut impl Rng) -> wsvqe::ComplexMatrix {
    use num_complex::Complex64;
    let mut rows = vec![vec![Complex64::ZERO; 8]; 8];
    for i in 0..8 {
        for j in i..8 {
            let re = rng.random_range(-5.0..5.0);
            let im = if i == j { 0.0 } else { rng.random_range(-5.0..5.0) };
            rows[i][j] = Complex64::new(re, im);
            rows[j][i] = rows[i][j].conj();
        }
    }
    wsvqe::ComplexMatrix::from_rows(&rows).unwrap()
}

fn bench_statevector_apply(c: &mut Criterion) {
    let mut rng = seed::derive(1, &[]);
    let spec = AnsatzSpec::new(3, 2);
    let params = random_params(&mut rng);
    let circuit = build(&spec, &params).unwrap();
    let state = zero_state(3).unwrap();
    c.bench_function("statevector_apply_ansatz", |b| {
        b.iter(|| black_box(&state).apply(black_box(&circuit)).unwrap())
    });
}

fn bench_clifford_sample_and_synthesize(c: &mut Criterion) {
    let mut rng = seed::derive(2, &[]);
    c.bench_function("random_clifford_synthesize_n3", |b| {
        b.iter(|| {
            let t = random_clifford(3, &mut rng).unwrap();
            black_box(synthesize(&t).unwrap())
        })
    });
}

fn bench_decompose(c: &mut Criterion) {
    let mut rng = seed::derive(3, &[]);
    let h = dense_hermitian(&mut rng);
    c.bench_function("pauli_decompose_8x8", |b| b.iter(|| black_box(decompose(&h).unwrap())));
}

fn bench_vqe_objective(c: &mut Criterion) {
    let mut rng = seed::derive(4, &[]);
    let h = dense_hermitian(&mut rng);
    let groups = group_qwc(&decompose(&h).unwrap());
    let spec = AnsatzSpec::new(3, 2);
    let params = random_params(&mut rng);
    c.bench_function("vqe_objective_eval_200_shots", |b| {
        b.iter(|| {
            let state = prepare(&spec, &params).unwrap();
            black_box(estimate_expectation_grouped(&state, &groups, 200, &mut rng).unwrap())
        })
    });
}

fn bench_acae_objective(c: &mut Criterion) {
    let mut rng = seed::derive(5, &[]);
    let spec = AnsatzSpec::new(3, 2);
    let params = random_params(&mut rng);
    let target = wsvqe::numerics::random_unit_vector(8, &mut rng);
    let unitaries: Vec<_> = (0..400).map(|_| random_clifford(3, &mut rng).unwrap()).collect();
    c.bench_function("acae_objective_eval_400_snapshots", |b| {
        b.iter(|| {
            let state = prepare(&spec, &params).unwrap();
            let shadow = take_snapshots(&state, &unitaries, &mut rng).unwrap();
            black_box(estimate_fidelity(&shadow, &target).unwrap())
        })
    });
}

criterion_group!(
    kernels,
    bench_statevector_apply,
    bench_clifford_sample_and_synthesize,
    bench_decompose,
    bench_vqe_objective,
    bench_acae_objective
);
criterion_main!(kernels);
