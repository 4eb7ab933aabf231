//! Dense complex linear algebra and the classical eigenvector approximation.
//!
//! Everything here targets tiny matrices (dimension <= 64), so the
//! implementations favor robustness over asymptotics: a cyclic Jacobi
//! eigensolver on the real embedding of a Hermitian matrix, LU with partial
//! pivoting, and the Gershgorin-seeded inverse power method.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Structural tolerance for Hermiticity and unit-norm checks.
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Residual tolerance for eigenpairs and linear solves, relative to the
/// Frobenius norm of the matrix involved.
pub const RESIDUAL_TOL: f64 = 1e-9;

const MAX_EIG_DIM: usize = 64;

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, got: row.len() });
            }
            entries.extend_from_slice(row);
        }
        Ok(Self { rows: r, cols: c, entries })
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from Hermitian symmetry, `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_deviation() <= STRUCTURAL_TOL
    }

    fn check_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let deviation = self.hermitian_deviation();
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let mut out = vec![Complex64::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        Ok(ComplexVector::new(out))
    }

    /// `self - mu * I` for square matrices.
    pub fn shifted(&self, mu: f64) -> Self {
        let mut m = self.clone();
        for i in 0..m.rows.min(m.cols) {
            m[(i, i)] -= Complex64::new(mu, 0.0);
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Standard basis vector `e_k` of the given dimension.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![Complex64::ZERO; dim];
        v[k] = Complex64::ONE;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_unit_norm(&self) -> bool {
        (self.norm() - 1.0).abs() <= STRUCTURAL_TOL
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self(self.0.iter().map(|e| e / n).collect())
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|e| e * s).collect())
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// An eigenvalue with a unit-norm eigenvector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: ComplexVector,
}

/// Smallest eigenvalue and a unit eigenvector of a Hermitian matrix.
///
/// The complex matrix `H = A + iB` is embedded into the real symmetric
/// `[[A, -B], [B, A]]` and diagonalized with cyclic Jacobi rotations; each
/// eigenvalue of `H` appears twice in the embedding and any unit vector of
/// the doubled eigenspace maps back to a valid complex eigenvector.
pub fn eig_hermitian_min(h: &ComplexMatrix) -> Result<EigenPair> {
    h.check_hermitian()?;
    let n = h.rows();
    if n > MAX_EIG_DIM {
        return Err(Error::Invalid(format!("dimension {n} exceeds eigensolver limit {MAX_EIG_DIM}")));
    }
    let m = 2 * n;
    // Real embedding: S[i][j] = Re H, S[i][n+j] = -Im H, mirrored below.
    let mut s = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let e = h[(i, j)];
            s[i * m + j] = e.re;
            s[i * m + (n + j)] = -e.im;
            s[(n + i) * m + j] = e.im;
            s[(n + i) * m + (n + j)] = e.re;
        }
    }
    let (eigvals, eigvecs) = jacobi_symmetric(&mut s, m);
    let (k_min, &lambda) = eigvals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        v.push(Complex64::new(eigvecs[i * m + k_min], eigvecs[(n + i) * m + k_min]));
    }
    let vector = ComplexVector::new(v).normalized();
    Ok(EigenPair { value: lambda, vector })
}

/// Cyclic Jacobi on a dense symmetric matrix stored row-major.
///
/// Returns eigenvalues and the accumulated rotation matrix whose columns
/// are eigenvectors.
fn jacobi_symmetric(s: &mut [f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    let fro: f64 = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-15 * fro.max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off: f64 = 0.0;
        for p in 0..m {
            for q in (p + 1)..m {
                off = off.max(s[p * m + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = s[p * m + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let skp = s[k * m + p];
                    let skq = s[k * m + q];
                    s[k * m + p] = c * skp - sn * skq;
                    s[k * m + q] = sn * skp + c * skq;
                }
                for k in 0..m {
                    let spk = s[p * m + k];
                    let sqk = s[q * m + k];
                    s[p * m + k] = c * spk - sn * sqk;
                    s[q * m + k] = sn * spk + c * sqk;
                }
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - sn * vkq;
                    v[k * m + q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let eigvals = (0..m).map(|i| s[i * m + i]).collect();
    (eigvals, v)
}

/// Solves `A x = b` by LU with partial pivoting.
///
/// Pivots smaller than `1e-12 * ||A||_F` abort with a singularity error so
/// callers can shift and retry.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexVector) -> Result<ComplexVector> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let pivot_floor = STRUCTURAL_TOL * a.frobenius_norm();
    let mut lu: Vec<Complex64> = (0..n * n).map(|k| a[(k / n, k % n)]).collect();
    let mut x: Vec<Complex64> = b.entries().to_vec();
    for col in 0..n {
        let (p, pmag) = (col..n)
            .map(|r| (r, lu[r * n + col].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pmag < pivot_floor {
            return Err(Error::Singular { pivot: pmag });
        }
        if p != col {
            for j in 0..n {
                lu.swap(col * n + j, p * n + j);
            }
            x.swap(col, p);
        }
        let inv = lu[col * n + col].inv();
        for r in (col + 1)..n {
            let f = lu[r * n + col] * inv;
            lu[r * n + col] = f;
            for j in (col + 1)..n {
                let sub = f * lu[col * n + j];
                lu[r * n + j] -= sub;
            }
            let sub = f * x[col];
            x[r] -= sub;
        }
    }
    for row in (0..n).rev() {
        let mut acc = x[row];
        for j in (row + 1)..n {
            acc -= lu[row * n + j] * x[j];
        }
        x[row] = acc / lu[row * n + row];
    }
    Ok(ComplexVector::new(x))
}

/// Gershgorin lower bound `min_i (H_ii - R_i)` on the spectrum of a
/// Hermitian matrix, with `R_i = sum_{k != i} |H_ik|`.
pub fn gershgorin_lower_bound(h: &ComplexMatrix) -> Result<f64> {
    h.check_hermitian()?;
    let n = h.rows();
    let mut mu = f64::INFINITY;
    for i in 0..n {
        let radius: f64 = (0..n).filter(|&k| k != i).map(|k| h[(i, k)].norm()).sum();
        mu = mu.min(h[(i, i)].re - radius);
    }
    Ok(mu)
}

const SINGULAR_SHIFT_LIMIT: usize = 3;

/// Inverse power iteration toward the eigenvector nearest the shift `mu`.
///
/// Starts from a random complex unit vector and applies
/// `(H - mu I)^{-1}` via LU solves, normalizing each iterate. A singular
/// shift is nudged by `1e-6 * (1 + |mu|)` and retried, at most three times.
pub fn inverse_power(h: &ComplexMatrix, mu: f64, k: usize, rng: &mut impl Rng) -> Result<ComplexVector> {
    h.check_hermitian()?;
    let n = h.rows();
    let q0 = random_unit_vector(n, rng);
    inverse_power_from(h, mu, k, q0)
}

/// Same as [`inverse_power`] but with an explicit starting vector.
pub fn inverse_power_from(h: &ComplexMatrix, mu: f64, k: usize, q0: ComplexVector) -> Result<ComplexVector> {
    h.check_hermitian()?;
    let mut mu = mu;
    let mut shifts = 0usize;
    let mut shifted = h.shifted(mu);
    let mut q = q0.normalized();
    let mut iter = 0usize;
    while iter < k {
        match lu_solve(&shifted, &q) {
            Ok(z) => {
                q = z.normalized();
                iter += 1;
            }
            Err(Error::Singular { .. }) => {
                if shifts >= SINGULAR_SHIFT_LIMIT {
                    return Err(Error::InversePowerStalled { shifts });
                }
                mu -= 1e-6 * (1.0 + mu.abs());
                shifted = h.shifted(mu);
                shifts += 1;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(q)
}

/// A random unit vector with i.i.d. complex Gaussian entries.
pub fn random_unit_vector(dim: usize, rng: &mut impl Rng) -> ComplexVector {
    let entries: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    ComplexVector::new(entries).normalized()
}

// Box-Muller; avoids pulling in rand_distr for one distribution.
fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Real part of `v† H v` for a unit vector `v`.
pub fn rayleigh_quotient(h: &ComplexMatrix, v: &ComplexVector) -> Result<f64> {
    let hv = h.mul_vec(v)?;
    let q = v.inner(&hv)?;
    debug_assert!(
        !h.is_hermitian() || q.im.abs() <= RESIDUAL_TOL * (1.0 + q.re.abs()),
        "Rayleigh quotient of a Hermitian matrix must be real, got imag {}",
        q.im
    );
    Ok(q.re)
}
