//! Random Clifford group elements as binary symplectic tableaus, and
//! synthesis into simulator circuits.
//!
//! A tableau stores the images of the `X_q` and `Z_q` generators under
//! conjugation, each as a Pauli with a sign bit. Global phase is not
//! tracked; the fidelity estimator only ever uses `|<b|U|v>|^2`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::statevector::{Circuit, Gate};
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 6;

/// A signed Pauli operator in bitmask form: qubit `q` carries X iff bit
/// `q` of `x` is set and Z iff bit `q` of `z` is set (both set = Y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPauli {
    pub x: u32,
    pub z: u32,
    /// True means the operator carries a leading minus sign.
    pub negative: bool,
}

impl SignedPauli {
    fn x_gen(q: usize) -> Self {
        Self { x: 1 << q, z: 0, negative: false }
    }

    fn z_gen(q: usize) -> Self {
        Self { x: 0, z: 1 << q, negative: false }
    }

    /// Symplectic product: 0 if the Paulis commute, 1 if they anticommute.
    pub fn symplectic_product(&self, other: &SignedPauli) -> u32 {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1
    }

    /// Conjugation by a single gate, `P -> G P G†`.
    fn conjugate(&mut self, gate: &Gate) {
        match *gate {
            Gate::H { qubit } => {
                let b = 1u32 << qubit;
                // HYH = -Y
                self.negative ^= (self.x & b != 0) && (self.z & b != 0);
                let xb = self.x & b;
                let zb = self.z & b;
                self.x = (self.x & !b) | zb;
                self.z = (self.z & !b) | xb;
            }
            Gate::S { qubit } => {
                let b = 1u32 << qubit;
                self.negative ^= (self.x & b != 0) && (self.z & b != 0);
                self.z ^= self.x & b;
            }
            Gate::Sdg { qubit } => {
                let b = 1u32 << qubit;
                self.z ^= self.x & b;
                self.negative ^= (self.x & b != 0) && (self.z & b != 0);
            }
            Gate::X { qubit } => {
                self.negative ^= self.z & (1 << qubit) != 0;
            }
            Gate::Z { qubit } => {
                self.negative ^= self.x & (1 << qubit) != 0;
            }
            Gate::Cx { control, target } => {
                let cb = 1u32 << control;
                let tb = 1u32 << target;
                let xc = self.x & cb != 0;
                let zt = self.z & tb != 0;
                let xt = self.x & tb != 0;
                let zc = self.z & cb != 0;
                self.negative ^= xc && zt && (xt == zc);
                if xc {
                    self.x ^= tb;
                }
                if zt {
                    self.z ^= cb;
                }
            }
            Gate::Cz { control, target } => {
                // CZ = H(target) CX(control, target) H(target)
                self.conjugate(&Gate::H { qubit: target });
                self.conjugate(&Gate::Cx { control, target });
                self.conjugate(&Gate::H { qubit: target });
            }
            Gate::Ry { .. } | Gate::Rz { .. } => {
                panic!("rotation gates are not Clifford conjugations")
            }
        }
    }
}

/// Binary symplectic tableau of an n-qubit Clifford element modulo global
/// phase. Row `q` is the image of `X_q`, row `n + q` the image of `Z_q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordTableau {
    n: usize,
    rows: Vec<SignedPauli>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(SignedPauli::x_gen)
            .chain((0..n).map(SignedPauli::z_gen))
            .collect();
        Self { n, rows }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Image of `X_q` under conjugation.
    pub fn x_image(&self, q: usize) -> SignedPauli {
        self.rows[q]
    }

    /// Image of `Z_q` under conjugation.
    pub fn z_image(&self, q: usize) -> SignedPauli {
        self.rows[self.n + q]
    }

    /// Checks that the generator images preserve all commutation relations.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for i in 0..2 * n {
            for j in (i + 1)..2 * n {
                let expected = if j == i + n { 1 } else { 0 };
                if self.rows[i].symplectic_product(&self.rows[j]) != expected {
                    return false;
                }
            }
        }
        true
    }

    /// Conjugates every row by the gate, i.e. replaces `C` with `G C`.
    pub fn prepend_gate(&mut self, gate: &Gate) {
        for row in &mut self.rows {
            row.conjugate(gate);
        }
    }

    /// The tableau of a Clifford circuit, built by conjugating generator
    /// images gate by gate.
    pub fn from_circuit(circuit: &Circuit) -> Self {
        let mut tab = Self::identity(circuit.n_qubits);
        for gate in &circuit.gates {
            tab.prepend_gate(gate);
        }
        tab
    }

    /// Compact canonical byte encoding, used to hash group elements.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.rows.len() * 9);
        for row in &self.rows {
            out.extend_from_slice(&row.x.to_le_bytes());
            out.extend_from_slice(&row.z.to_le_bytes());
            out.push(row.negative as u8);
        }
        out
    }
}

/// Samples a tableau exactly uniformly over the n-qubit Clifford group
/// modulo global phase.
///
/// The symplectic part is built pair by pair: each `(X_q, Z_q)` image pair
/// is drawn uniformly from the admissible set by rejection, whose size is
/// independent of earlier choices, so the product measure is uniform over
/// the group. Sign bits are uniform.
pub fn random_clifford(n: usize, rng: &mut impl Rng) -> Result<CliffordTableau> {
    if n < 1 || n > MAX_QUBITS {
        return Err(Error::QubitCountOutOfRange { n, min: 1, max: MAX_QUBITS });
    }
    let full: u64 = 1u64 << (2 * n);
    let mut rows: Vec<SignedPauli> = Vec::with_capacity(2 * n);
    let mut x_rows: Vec<SignedPauli> = Vec::with_capacity(n);
    let mut z_rows: Vec<SignedPauli> = Vec::with_capacity(n);
    for _ in 0..n {
        // f: nonzero, commuting with all chosen pairs
        let f = loop {
            let v = draw_pauli(full, rng);
            if (v.x | v.z) == 0 {
                continue;
            }
            if x_rows.iter().chain(&z_rows).all(|r| v.symplectic_product(r) == 0) {
                break v;
            }
        };
        // g: commutes with earlier pairs, anticommutes with f
        let g = loop {
            let v = draw_pauli(full, rng);
            if v.symplectic_product(&f) == 1
                && x_rows.iter().chain(&z_rows).all(|r| v.symplectic_product(r) == 0)
            {
                break v;
            }
        };
        x_rows.push(f);
        z_rows.push(g);
    }
    for mut row in x_rows.into_iter().chain(z_rows) {
        row.negative = rng.random();
        rows.push(row);
    }
    Ok(CliffordTableau { n, rows })
}

fn draw_pauli(full: u64, rng: &mut impl Rng) -> SignedPauli {
    let bits = rng.random_range(0..full);
    let n_bits = full.trailing_zeros() as usize / 2;
    SignedPauli {
        x: (bits & ((1 << n_bits) - 1)) as u32,
        z: (bits >> n_bits) as u32,
        negative: false,
    }
}

/// Synthesizes a circuit over {H, S, Sdg, CX, X, Z} whose conjugation
/// action reproduces the tableau exactly (and whose unitary therefore
/// matches the Clifford element up to global phase).
///
/// The tableau is reduced to the identity one qubit at a time, recording
/// the reducing gates; the emitted circuit is their inverse in reverse
/// order.
pub fn synthesize(tab: &CliffordTableau) -> Result<Circuit> {
    if !tab.is_symplectic() {
        return Err(Error::NotSymplectic);
    }
    let n = tab.n;
    let mut work = tab.clone();
    let mut recorded: Vec<Gate> = Vec::new();
    let emit = |work: &mut CliffordTableau, recorded: &mut Vec<Gate>, gate: Gate| {
        work.prepend_gate(&gate);
        recorded.push(gate);
    };
    for q in 0..n {
        // Reduce the X_q image to +X_q.
        // 1. Make every supported qubit of the row pure X.
        for j in q..n {
            let row = work.rows[q];
            let b = 1u32 << j;
            if row.x & b != 0 && row.z & b != 0 {
                emit(&mut work, &mut recorded, Gate::S { qubit: j });
            } else if row.x & b == 0 && row.z & b != 0 {
                emit(&mut work, &mut recorded, Gate::H { qubit: j });
            }
        }
        // 2. Fold all X support onto one qubit.
        let row = work.rows[q];
        let pivot = (q..n).find(|&j| row.x & (1 << j) != 0).expect("row must have X support");
        for j in (pivot + 1)..n {
            if work.rows[q].x & (1 << j) != 0 {
                emit(&mut work, &mut recorded, Gate::Cx { control: pivot, target: j });
            }
        }
        // 3. Move it onto qubit q.
        if pivot != q {
            emit(&mut work, &mut recorded, Gate::Cx { control: pivot, target: q });
            emit(&mut work, &mut recorded, Gate::Cx { control: q, target: pivot });
            emit(&mut work, &mut recorded, Gate::Cx { control: pivot, target: q });
        }
        debug_assert_eq!(work.rows[q].x, 1 << q);
        debug_assert_eq!(work.rows[q].z, 0);

        // Reduce the Z_q image to +Z_q; it anticommutes with X_q, so it
        // carries Z on qubit q already.
        debug_assert!(work.rows[n + q].z & (1 << q) != 0);
        // 1. Make qubits beyond q pure Z (gates on j > q leave X_q alone).
        for j in (q + 1)..n {
            let row = work.rows[n + q];
            let b = 1u32 << j;
            if row.x & b != 0 {
                if row.z & b != 0 {
                    emit(&mut work, &mut recorded, Gate::S { qubit: j });
                }
                emit(&mut work, &mut recorded, Gate::H { qubit: j });
            }
        }
        // 2. Fold trailing Z support onto qubit q (CX with target q fixes X_q).
        for j in (q + 1)..n {
            if work.rows[n + q].z & (1 << j) != 0 {
                emit(&mut work, &mut recorded, Gate::Cx { control: j, target: q });
            }
        }
        // 3. A leftover Y on qubit q is fixed by H S H, which maps Y to Z
        //    while commuting with X.
        if work.rows[n + q].x & (1 << q) != 0 {
            emit(&mut work, &mut recorded, Gate::H { qubit: q });
            emit(&mut work, &mut recorded, Gate::S { qubit: q });
            emit(&mut work, &mut recorded, Gate::H { qubit: q });
        }
        debug_assert_eq!(work.rows[n + q].x, 0);
        debug_assert_eq!(work.rows[n + q].z, 1 << q);

        // Fix signs without disturbing the other generator.
        if work.rows[q].negative {
            emit(&mut work, &mut recorded, Gate::Z { qubit: q });
        }
        if work.rows[n + q].negative {
            emit(&mut work, &mut recorded, Gate::X { qubit: q });
        }
    }
    debug_assert_eq!(work, CliffordTableau::identity(n));
    // recorded gates G_k..G_1 satisfy G_k...G_1 C = I, so
    // C = G_1†...G_k†: apply inverses in reverse order.
    let mut circuit = Circuit::new(n);
    for gate in recorded.iter().rev() {
        circuit.push(gate.inverse());
    }
    Ok(circuit)
}
