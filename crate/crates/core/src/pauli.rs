//! Pauli decomposition, qubit-wise-commuting grouping, and shot-based
//! expectation estimation.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::ComplexMatrix;
use crate::statevector::{Circuit, Gate, StateVector};
use crate::{seed, Error, Result};

/// Coefficients at or below this magnitude are dropped from decompositions.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl std::fmt::Display for PauliLetter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// A Pauli string; the letter at position `q` acts on qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString(pub Vec<PauliLetter>);

impl PauliString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&l| l == PauliLetter::I)
    }

    /// Bitmask of qubits carrying a non-identity letter.
    pub fn support_mask(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != PauliLetter::I)
            .fold(0, |m, (q, _)| m | (1 << q))
    }

    /// Qubit-wise commutation: at every position the letters agree or one
    /// of them is the identity.
    pub fn qubit_wise_commutes(&self, other: &PauliString) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| {
            a == PauliLetter::I || b == PauliLetter::I || a == b
        })
    }

    /// Decodes the string index: base-4 digit `q` (I,X,Y,Z) is the letter
    /// for qubit `q`.
    fn from_index(mut idx: usize, n: usize) -> PauliString {
        let mut letters = Vec::with_capacity(n);
        for _ in 0..n {
            letters.push(match idx % 4 {
                0 => PauliLetter::I,
                1 => PauliLetter::X,
                2 => PauliLetter::Y,
                3 => PauliLetter::Z,
                _ => unreachable!(),
            });
            idx /= 4;
        }
        PauliString(letters)
    }

    /// Action on a basis state: `P|j> = phase(j) |j ^ flip_mask>`.
    fn action_on_basis(&self, j: usize) -> (usize, Complex64) {
        let mut target = j;
        let mut phase = Complex64::ONE;
        for (q, &l) in self.0.iter().enumerate() {
            let bit = j >> q & 1;
            match l {
                PauliLetter::I => {}
                PauliLetter::X => target ^= 1 << q,
                PauliLetter::Y => {
                    target ^= 1 << q;
                    phase *= if bit == 0 { Complex64::I } else { -Complex64::I };
                }
                PauliLetter::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (target, phase)
    }

    /// Dense matrix representation, used by tests and small oracles.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let dim = 1 << self.len();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for j in 0..dim {
            let (i, phase) = self.action_on_basis(j);
            m[(i, j)] = phase;
        }
        m
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// One term `x_i P_i` of a Hermitian decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coefficient: f64,
}

/// Jointly measurable terms with their shared measurement basis
/// (identity positions filled with Z).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementGroup {
    pub terms: Vec<PauliTerm>,
    pub basis: Vec<PauliLetter>,
}

impl MeasurementGroup {
    /// Whether measuring this group costs a circuit at all.
    pub fn has_non_identity_term(&self) -> bool {
        self.terms.iter().any(|t| !t.string.is_identity())
    }
}

/// Pauli decomposition of a Hermitian matrix of dimension `2^n`:
/// `x_i = Tr(P_i H) / 2^n`, with numerically-zero terms pruned.
pub fn decompose(h: &ComplexMatrix) -> Result<Vec<PauliTerm>> {
    if !h.is_square() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    let dim = h.rows();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::NotPowerOfTwo { dim });
    }
    let deviation = h.hermitian_deviation();
    if deviation > crate::numerics::STRUCTURAL_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = dim.trailing_zeros() as usize;
    let mut terms = Vec::new();
    for idx in 0..(1usize << (2 * n)) {
        let string = PauliString::from_index(idx, n);
        // Tr(P H) = sum_j <j|P H|j>; the only k with <j|P|k> != 0 is
        // k = j ^ flip_mask, contributing phase(k) H[k][j].
        let flip = string_flip_mask(&string);
        let mut trace = Complex64::ZERO;
        for j in 0..dim {
            let k = j ^ flip;
            let (tgt, phase_k) = string.action_on_basis(k);
            debug_assert_eq!(tgt, j);
            trace += phase_k * h[(k, j)];
        }
        let coefficient = trace.re / dim as f64;
        debug_assert!(trace.im.abs() <= 1e-9 * (1.0 + trace.re.abs()));
        if coefficient.abs() > PRUNE_THRESHOLD {
            terms.push(PauliTerm { string, coefficient });
        }
    }
    Ok(terms)
}

fn string_flip_mask(s: &PauliString) -> usize {
    s.0.iter()
        .enumerate()
        .filter(|(_, &l)| l == PauliLetter::X || l == PauliLetter::Y)
        .fold(0, |m, (q, _)| m | (1 << q))
}

/// Greedy first-fit grouping by qubit-wise commutation.
///
/// Every input term lands in exactly one group; a group's basis is the
/// union of its members' non-identity letters, with remaining positions
/// measured in Z.
pub fn group_qwc(terms: &[PauliTerm]) -> Vec<MeasurementGroup> {
    struct OpenGroup {
        terms: Vec<PauliTerm>,
        slots: Vec<Option<PauliLetter>>,
    }
    let mut open: Vec<OpenGroup> = Vec::new();
    for term in terms {
        let fits = |g: &OpenGroup| {
            term.string.0.iter().zip(&g.slots).all(|(&l, &slot)| {
                l == PauliLetter::I || slot.is_none() || slot == Some(l)
            })
        };
        match open.iter_mut().find(|g| fits(g)) {
            Some(g) => {
                for (q, &l) in term.string.0.iter().enumerate() {
                    if l != PauliLetter::I {
                        g.slots[q] = Some(l);
                    }
                }
                g.terms.push(term.clone());
            }
            None => {
                let mut slots = vec![None; term.string.len()];
                for (q, &l) in term.string.0.iter().enumerate() {
                    if l != PauliLetter::I {
                        slots[q] = Some(l);
                    }
                }
                open.push(OpenGroup { terms: vec![term.clone()], slots });
            }
        }
    }
    open.into_iter()
        .map(|g| MeasurementGroup {
            terms: g.terms,
            basis: g.slots.into_iter().map(|s| s.unwrap_or(PauliLetter::Z)).collect(),
        })
        .collect()
}

/// Rotation circuit taking the group basis to the computational basis:
/// X -> H, Y -> Sdg then H, Z -> nothing.
pub fn basis_rotation_circuit(group: &MeasurementGroup) -> Circuit {
    let n = group.basis.len();
    let mut circuit = Circuit::new(n);
    for (q, &b) in group.basis.iter().enumerate() {
        match b {
            PauliLetter::X => circuit.push(Gate::H { qubit: q }),
            PauliLetter::Y => {
                circuit.push(Gate::Sdg { qubit: q });
                circuit.push(Gate::H { qubit: q });
            }
            PauliLetter::Z | PauliLetter::I => {}
        }
    }
    circuit
}

/// Outcome of a shot-based expectation estimate, with exact shot
/// accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationEstimate {
    pub value: f64,
    pub circuits_used: usize,
    pub total_shots: usize,
}

/// Shot-based Quantum Expectation Estimation over pre-grouped terms.
///
/// Each group with a non-identity member costs one measurement circuit of
/// `shots_per_circuit` shots; a term's `<P>` is the mean of the outcome
/// parities over its support. Identity terms contribute their coefficient
/// at zero cost. Each group draws from its own RNG substream, derived in
/// group order.
pub fn estimate_expectation_grouped(
    state: &StateVector,
    groups: &[MeasurementGroup],
    shots_per_circuit: usize,
    rng: &mut impl Rng,
) -> Result<ExpectationEstimate> {
    assert!(shots_per_circuit >= 1, "shots_per_circuit must be >= 1");
    let mut value = 0.0;
    let mut circuits_used = 0usize;
    for group in groups {
        if !group.has_non_identity_term() {
            value += group.terms.iter().map(|t| t.coefficient).sum::<f64>();
            continue;
        }
        let mut group_rng = seed::child(rng);
        circuits_used += 1;
        let rotated = state.apply(&basis_rotation_circuit(group))?;
        let mut parity_sums = vec![0i64; group.terms.len()];
        for _ in 0..shots_per_circuit {
            let outcome = rotated.sample_one(&mut group_rng);
            for (t, term) in group.terms.iter().enumerate() {
                if term.string.is_identity() {
                    continue;
                }
                let parity = (outcome & term.string.support_mask()).count_ones() & 1;
                parity_sums[t] += if parity == 0 { 1 } else { -1 };
            }
        }
        for (t, term) in group.terms.iter().enumerate() {
            if term.string.is_identity() {
                value += term.coefficient;
            } else {
                value += term.coefficient * parity_sums[t] as f64 / shots_per_circuit as f64;
            }
        }
    }
    Ok(ExpectationEstimate { value, circuits_used, total_shots: circuits_used * shots_per_circuit })
}

/// Convenience wrapper: prepares the state, groups the terms, estimates.
pub fn estimate_expectation(
    prepare: impl Fn(&[f64]) -> Result<StateVector>,
    params: &[f64],
    terms: &[PauliTerm],
    shots_per_circuit: usize,
    rng: &mut impl Rng,
) -> Result<ExpectationEstimate> {
    let state = prepare(params)?;
    let groups = group_qwc(terms);
    estimate_expectation_grouped(&state, &groups, shots_per_circuit, rng)
}

/// Noise-free `Re <psi|H|psi>` oracle.
pub fn exact_expectation(state: &StateVector, h: &ComplexMatrix) -> Result<f64> {
    crate::numerics::rayleigh_quotient(h, &state.to_vector())
}
