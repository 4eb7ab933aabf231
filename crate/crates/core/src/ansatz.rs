//! Hardware-efficient SU(2) ansatz: alternating RY/RZ rotation layers with
//! CX entanglement blocks between them.
//!
//! The entanglement order is CX(1,2) then CX(0,1) per layer (generalized
//! to CX(n-2, n-1) ... CX(0, 1) for other widths), matching the circuit
//! the evaluation uses.

use serde::{Deserialize, Serialize};

use crate::statevector::{zero_state, Circuit, Gate, StateVector};
use crate::{Error, Result};

/// Ansatz shape: qubit count and entanglement-block repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub reps: usize,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, reps: usize) -> Self {
        Self { n_qubits, reps }
    }

    /// Total parameter count: `2 * n_qubits * (reps + 1)`.
    pub fn param_count(&self) -> usize {
        2 * self.n_qubits * (self.reps + 1)
    }
}

/// Builds the parameterized circuit.
///
/// Layer `l` applies `RY(theta[2*n*l + q])` on each qubit `q`, then
/// `RZ(theta[2*n*l + n + q])`; between rotation layers the entanglement
/// block applies CX gates in descending control order.
pub fn build(spec: &AnsatzSpec, params: &[f64]) -> Result<Circuit> {
    let expected = spec.param_count();
    if params.len() != expected {
        return Err(Error::ParamCountMismatch { expected, got: params.len() });
    }
    let n = spec.n_qubits;
    let mut circuit = Circuit::new(n);
    for layer in 0..=spec.reps {
        let base = 2 * n * layer;
        for q in 0..n {
            circuit.push(Gate::Ry { qubit: q, angle: params[base + q] });
        }
        for q in 0..n {
            circuit.push(Gate::Rz { qubit: q, angle: params[base + n + q] });
        }
        if layer < spec.reps {
            for c in (0..n.saturating_sub(1)).rev() {
                circuit.push(Gate::Cx { control: c, target: c + 1 });
            }
        }
    }
    Ok(circuit)
}

/// Builds the circuit and applies it to `|0...0>`.
pub fn prepare(spec: &AnsatzSpec, params: &[f64]) -> Result<StateVector> {
    let circuit = build(spec, params)?;
    zero_state(spec.n_qubits)?.apply(&circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn parameter_count_formula() {
        for n in 2..=4 {
            for reps in 0..=3 {
                let spec = AnsatzSpec::new(n, reps);
                assert_eq!(spec.param_count(), 2 * n * (reps + 1));
            }
        }
        assert_eq!(AnsatzSpec::new(3, 2).param_count(), 18);
        assert_eq!(AnsatzSpec::new(3, 0).param_count(), 6);
    }

    #[test]
    fn gate_counts_for_reference_shape() {
        let spec = AnsatzSpec::new(3, 2);
        let c = build(&spec, &[0.0; 18]).unwrap();
        let rotations = c.gates.iter().filter(|g| matches!(g, Gate::Ry { .. } | Gate::Rz { .. })).count();
        let cxs = c.gates.iter().filter(|g| matches!(g, Gate::Cx { .. })).count();
        assert_eq!(rotations, 18);
        assert_eq!(cxs, 4);

        let c = build(&AnsatzSpec::new(3, 0), &[0.0; 6]).unwrap();
        assert!(c.gates.iter().all(|g| !matches!(g, Gate::Cx { .. })));
    }

    #[test]
    fn entanglement_order_follows_figure() {
        let c = build(&AnsatzSpec::new(3, 1), &[0.0; 12]).unwrap();
        let cxs: Vec<_> = c
            .gates
            .iter()
            .filter_map(|g| match g {
                Gate::Cx { control, target } => Some((*control, *target)),
                _ => None,
            })
            .collect();
        assert_eq!(cxs, vec![(1, 2), (0, 1)]);
    }

    #[test]
    fn zero_parameters_prepare_zero_state() {
        let s = prepare(&AnsatzSpec::new(3, 2), &[0.0; 18]).unwrap();
        assert_abs_diff_eq!(s.amplitude(0).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_pi_rotation_gives_deterministic_basis_state() {
        // theta[0] = pi flips qubit 0 in the first RY layer; the CX blocks
        // then propagate the excitation along the chain:
        // |001> -CX(1,2),CX(0,1)-> |011> -CX(1,2),CX(0,1)-> |101>
        let mut params = [0.0; 18];
        params[0] = PI;
        let s = prepare(&AnsatzSpec::new(3, 2), &params).unwrap();
        assert_abs_diff_eq!(s.amplitude(5).unwrap().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_norm_for_random_params() {
        let mut rng = crate::seed::derive(19, &[0]);
        use rand::Rng;
        for _ in 0..20 {
            let params: Vec<f64> = (0..18).map(|_| rng.random_range(-PI..PI)).collect();
            let s = prepare(&AnsatzSpec::new(3, 2), &params).unwrap();
            assert!((s.norm() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn two_pi_periodicity_up_to_global_phase() {
        let mut rng = crate::seed::derive(19, &[1]);
        use rand::Rng;
        let spec = AnsatzSpec::new(3, 2);
        let params: Vec<f64> = (0..18).map(|_| rng.random_range(-PI..PI)).collect();
        let reference = prepare(&spec, &params).unwrap();
        for k in 0..18 {
            let mut shifted = params.clone();
            shifted[k] += 2.0 * PI;
            let s = prepare(&spec, &shifted).unwrap();
            let f = s.fidelity_exact(&reference.to_vector()).unwrap();
            assert!((f - 1.0).abs() <= 1e-9, "coordinate {k}: fidelity {f}");
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            build(&AnsatzSpec::new(3, 2), &[0.0; 17]),
            Err(Error::ParamCountMismatch { expected: 18, got: 17 })
        ));
    }
}
