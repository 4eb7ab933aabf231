//! Dense statevector simulation for small qubit counts.
//!
//! Convention: basis index `i` encodes bits with qubit 0 as the LEAST
//! significant bit. This is fixed globally and asserted in tests.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::numerics::ComplexVector;
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 10;

/// A single gate from the closed set needed by the ansatz and Clifford
/// synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    H { qubit: usize },
    S { qubit: usize },
    Sdg { qubit: usize },
    X { qubit: usize },
    Z { qubit: usize },
    Cx { control: usize, target: usize },
    Cz { control: usize, target: usize },
}

impl Gate {
    fn max_qubit(&self) -> usize {
        match *self {
            Gate::Ry { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::H { qubit }
            | Gate::S { qubit }
            | Gate::Sdg { qubit }
            | Gate::X { qubit }
            | Gate::Z { qubit } => qubit,
            Gate::Cx { control, target } | Gate::Cz { control, target } => control.max(target),
        }
    }

    /// The inverse gate (negated angles, S and Sdg swapped).
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Ry { qubit, angle } => Gate::Ry { qubit, angle: -angle },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit, angle: -angle },
            Gate::S { qubit } => Gate::Sdg { qubit },
            Gate::Sdg { qubit } => Gate::S { qubit },
            g => g,
        }
    }
}

/// An ordered gate list on a fixed qubit count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    /// Reversed gate order with every gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Concatenates `other` after `self`.
    pub fn then(&self, other: &Circuit) -> Circuit {
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Circuit { n_qubits: self.n_qubits.max(other.n_qubits), gates }
    }
}

/// A pure state on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// `|0...0>` on `n` qubits.
pub fn zero_state(n: usize) -> Result<StateVector> {
    if n < 1 || n > MAX_QUBITS {
        return Err(Error::QubitCountOutOfRange { n, min: 1, max: MAX_QUBITS });
    }
    let mut amplitudes = vec![Complex64::ZERO; 1 << n];
    amplitudes[0] = Complex64::ONE;
    Ok(StateVector { n_qubits: n, amplitudes })
}

impl StateVector {
    /// Wraps a unit-norm amplitude vector of length `2^n`.
    pub fn from_vector(v: &ComplexVector) -> Result<StateVector> {
        let dim = v.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::NotPowerOfTwo { dim });
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange { n, min: 1, max: MAX_QUBITS });
        }
        Ok(StateVector { n_qubits: n, amplitudes: v.entries().to_vec() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The stored amplitude at a basis index.
    pub fn amplitude(&self, basis_index: usize) -> Result<Complex64> {
        self.amplitudes
            .get(basis_index)
            .copied()
            .ok_or(Error::BasisIndexOutOfRange { index: basis_index, n_qubits: self.n_qubits })
    }

    /// Applies the circuit in place.
    pub fn apply_mut(&mut self, circuit: &Circuit) -> Result<()> {
        for gate in &circuit.gates {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    /// Applies the circuit to a copy of the state.
    pub fn apply(&self, circuit: &Circuit) -> Result<StateVector> {
        let mut s = self.clone();
        s.apply_mut(circuit)?;
        Ok(s)
    }

    fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let n = self.n_qubits;
        if gate.max_qubit() >= n {
            return Err(Error::QubitIndexOutOfRange { index: gate.max_qubit(), n_qubits: n });
        }
        let dim = self.amplitudes.len();
        match *gate {
            Gate::Ry { qubit, angle } => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                self.for_pairs(qubit, |a0, a1| (c * a0 - s * a1, s * a0 + c * a1));
            }
            Gate::Rz { qubit, angle } => {
                let e0 = Complex64::from_polar(1.0, -angle / 2.0);
                let e1 = Complex64::from_polar(1.0, angle / 2.0);
                for i in 0..dim {
                    self.amplitudes[i] *= if i >> qubit & 1 == 0 { e0 } else { e1 };
                }
            }
            Gate::H { qubit } => {
                let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
                self.for_pairs(qubit, |a0, a1| (inv_sqrt2 * (a0 + a1), inv_sqrt2 * (a0 - a1)));
            }
            Gate::S { qubit } => self.phase_on_one(qubit, Complex64::I),
            Gate::Sdg { qubit } => self.phase_on_one(qubit, -Complex64::I),
            Gate::X { qubit } => self.for_pairs(qubit, |a0, a1| (a1, a0)),
            Gate::Z { qubit } => self.phase_on_one(qubit, -Complex64::ONE),
            Gate::Cx { control, target } => {
                if control == target {
                    return Err(Error::Invalid("CX control equals target".into()));
                }
                for i in 0..dim {
                    if i >> control & 1 == 1 && i >> target & 1 == 0 {
                        self.amplitudes.swap(i, i | (1 << target));
                    }
                }
            }
            Gate::Cz { control, target } => {
                if control == target {
                    return Err(Error::Invalid("CZ control equals target".into()));
                }
                for i in 0..dim {
                    if i >> control & 1 == 1 && i >> target & 1 == 1 {
                        self.amplitudes[i] = -self.amplitudes[i];
                    }
                }
            }
        }
        Ok(())
    }

    fn for_pairs(&mut self, qubit: usize, f: impl Fn(Complex64, Complex64) -> (Complex64, Complex64)) {
        let bit = 1 << qubit;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
                let (b0, b1) = f(a0, a1);
                self.amplitudes[i] = b0;
                self.amplitudes[i | bit] = b1;
            }
        }
    }

    fn phase_on_one(&mut self, qubit: usize, phase: Complex64) {
        for i in 0..self.amplitudes.len() {
            if i >> qubit & 1 == 1 {
                self.amplitudes[i] *= phase;
            }
        }
    }

    /// Samples `shots` computational-basis outcomes i.i.d. from `|a_i|^2`
    /// by inverse-CDF search per shot.
    pub fn sample(&self, shots: usize, rng: &mut impl Rng) -> BTreeMap<usize, usize> {
        let mut histogram = BTreeMap::new();
        for _ in 0..shots {
            *histogram.entry(self.sample_one(rng)).or_insert(0) += 1;
        }
        histogram
    }

    /// Draws a single outcome.
    pub fn sample_one(&self, rng: &mut impl Rng) -> usize {
        let r: f64 = rng.random();
        let mut acc = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            acc += a.norm_sqr();
            if r < acc {
                return i;
            }
        }
        self.amplitudes.len() - 1
    }

    /// `|<target|state>|^2` against a unit-norm target vector.
    pub fn fidelity_exact(&self, target: &ComplexVector) -> Result<f64> {
        if target.len() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: self.amplitudes.len(), got: target.len() });
        }
        let overlap: Complex64 = target
            .entries()
            .iter()
            .zip(&self.amplitudes)
            .map(|(t, a)| t.conj() * a)
            .sum();
        Ok(overlap.norm_sqr())
    }

    pub fn to_vector(&self) -> ComplexVector {
        ComplexVector::new(self.amplitudes.clone())
    }
}
