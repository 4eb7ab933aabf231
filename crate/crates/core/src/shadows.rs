//! Classical-shadow snapshot acquisition and the ACAE fidelity estimator.

use rand::Rng;

use crate::clifford::{synthesize, CliffordTableau};
use crate::numerics::ComplexVector;
use crate::statevector::StateVector;
use crate::{Error, Result};

/// One (Clifford unitary, measured bitstring) pair.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub unitary: CliffordTableau,
    pub outcome: usize,
}

/// A collection of snapshots of one model state.
#[derive(Debug, Clone)]
pub struct ShadowSet {
    pub n: usize,
    pub snapshots: Vec<Snapshot>,
}

impl ShadowSet {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

/// Acquires one single-shot snapshot per unitary: rotate the model state
/// by the synthesized Clifford, sample one outcome.
pub fn take_snapshots(
    model: &StateVector,
    unitaries: &[CliffordTableau],
    rng: &mut impl Rng,
) -> Result<ShadowSet> {
    if unitaries.is_empty() {
        return Err(Error::Invalid("snapshot acquisition needs at least one unitary".into()));
    }
    let n = model.n_qubits();
    let mut snapshots = Vec::with_capacity(unitaries.len());
    for unitary in unitaries {
        let rotated = model.apply(&synthesize(unitary)?)?;
        let outcome = rotated.sample_one(rng);
        snapshots.push(Snapshot { unitary: unitary.clone(), outcome });
    }
    Ok(ShadowSet { n, snapshots })
}

/// Shadow fidelity estimate against a pure target vector:
/// `(1/N) sum_i [(2^n + 1) |<b_i| U_i |target>|^2 - 1]`.
///
/// Individual terms lie in `[-1, 2^n]`; the mean is unbiased but not
/// confined to `[0, 1]` and is deliberately not clipped here.
pub fn estimate_fidelity(shadow: &ShadowSet, target: &ComplexVector) -> Result<f64> {
    let dim = 1usize << shadow.n;
    if target.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: target.len() });
    }
    let target_state = StateVector::from_vector(target)?;
    let scale = (dim + 1) as f64;
    let mut sum = 0.0;
    for snap in &shadow.snapshots {
        let rotated_target = target_state.apply(&synthesize(&snap.unitary)?)?;
        let p = rotated_target.amplitude(snap.outcome)?.norm_sqr();
        sum += scale * p - 1.0;
    }
    Ok(sum / shadow.snapshots.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::random_clifford;
    use crate::statevector::zero_state;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn identity_unitary_on_zero_state() {
        let model = zero_state(3).unwrap();
        let unitaries = vec![CliffordTableau::identity(3); 20];
        let mut rng = crate::seed::derive(17, &[0]);
        let shadow = take_snapshots(&model, &unitaries, &mut rng).unwrap();
        assert_eq!(shadow.len(), 20);
        assert!(shadow.snapshots.iter().all(|s| s.outcome == 0));
    }

    #[test]
    fn single_snapshot_terms() {
        let target = ComplexVector::basis(8, 0);
        let shadow = ShadowSet {
            n: 3,
            snapshots: vec![Snapshot { unitary: CliffordTableau::identity(3), outcome: 0 }],
        };
        // (2^3 + 1) * 1 - 1 = 8
        assert_abs_diff_eq!(estimate_fidelity(&shadow, &target).unwrap(), 8.0);

        let orthogonal = ComplexVector::basis(8, 1);
        assert_abs_diff_eq!(estimate_fidelity(&shadow, &orthogonal).unwrap(), -1.0);
    }

    #[test]
    fn plus_state_outcome_frequencies() {
        let model = zero_state(1)
            .unwrap()
            .apply(&crate::statevector::Circuit {
                n_qubits: 1,
                gates: vec![crate::statevector::Gate::H { qubit: 0 }],
            })
            .unwrap();
        let unitaries = vec![CliffordTableau::identity(1); 10_000];
        let mut rng = crate::seed::derive(17, &[1]);
        let shadow = take_snapshots(&model, &unitaries, &mut rng).unwrap();
        let zeros = shadow.snapshots.iter().filter(|s| s.outcome == 0).count() as f64;
        assert!((zeros / 10_000.0 - 0.5).abs() <= 5.0 * 0.005);
    }

    #[test]
    fn statistical_unbiasedness_small() {
        let mut rng = crate::seed::derive(17, &[2]);
        for _ in 0..3 {
            let model_vec = crate::numerics::random_unit_vector(8, &mut rng);
            let target = crate::numerics::random_unit_vector(8, &mut rng);
            let model = StateVector::from_vector(&model_vec).unwrap();
            let unitaries: Vec<_> = (0..20_000)
                .map(|_| random_clifford(3, &mut rng).unwrap())
                .collect();
            let shadow = take_snapshots(&model, &unitaries, &mut rng).unwrap();
            let est = estimate_fidelity(&shadow, &target).unwrap();
            let exact = model.fidelity_exact(&target).unwrap();
            assert!((est - exact).abs() <= 0.06, "est {est} exact {exact}");
        }
    }

    #[test]
    fn global_phase_invariance() {
        let mut rng = crate::seed::derive(17, &[3]);
        let model_vec = crate::numerics::random_unit_vector(4, &mut rng);
        let target = crate::numerics::random_unit_vector(4, &mut rng);
        let phased = target.scaled(Complex64::from_polar(1.0, 1.234));
        let model = StateVector::from_vector(&model_vec).unwrap();
        let unitaries: Vec<_> = (0..50).map(|_| random_clifford(2, &mut rng).unwrap()).collect();
        let shadow = take_snapshots(&model, &unitaries, &mut rng).unwrap();
        let a = estimate_fidelity(&shadow, &target).unwrap();
        let b = estimate_fidelity(&shadow, &phased).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let shadow = ShadowSet {
            n: 2,
            snapshots: vec![Snapshot { unitary: CliffordTableau::identity(2), outcome: 0 }],
        };
        assert!(estimate_fidelity(&shadow, &ComplexVector::basis(8, 0)).is_err());
    }
}
