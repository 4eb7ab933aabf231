//! Warm-started Variational Quantum Eigensolver (WS-VQE) toolkit.
//!
//! The crate splits into small, mostly pure modules:
//!
//! - [`numerics`]: dense complex linear algebra, an exact Hermitian
//!   eigensolver, and the classical eigenvector approximation
//!   (Gershgorin bound + inverse power method).
//! - [`statevector`]: a dense statevector simulator for small qubit counts.
//! - [`pauli`]: Pauli decomposition, qubit-wise-commuting grouping, and
//!   shot-based expectation estimation.
//! - [`clifford`]: uniformly random Clifford tableaus and synthesis into
//!   simulator circuits.
//! - [`shadows`]: classical-shadow snapshots and the fidelity estimator.
//! - [`ansatz`]: the hardware-efficient SU(2) ansatz.
//! - [`optimizer`]: a derivative-free trust-region optimizer with COBYLA's
//!   `rhobeg`/`rhoend` contract.
//! - [`pipeline`]: VQE, ACAE pretraining, and the warm-started composition.
//!
//! All randomness flows through caller-supplied RNG streams; see [`seed`]
//! for deterministic substream derivation.

pub mod ansatz;
pub mod clifford;
mod error;
pub mod numerics;
pub mod optimizer;
pub mod pauli;
pub mod pipeline;
pub mod seed;
pub mod shadows;
pub mod statevector;

pub use error::Error;
pub use numerics::{ComplexMatrix, ComplexVector, EigenPair};
pub use statevector::{Circuit, Gate, StateVector};

/// Shorthand for results carrying this crate's error type.
pub type Result<T> = std::result::Result<T, Error>;
