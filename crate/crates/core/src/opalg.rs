//! Dense complex operator algebra.
//!
//! Everything in the crate is carried by [`Operator`], a dense `d × d`
//! complex matrix. Superoperators use the column-stacking convention
//!
//! ```text
//! vec(A · X · B) = (Bᵀ ⊗ A) · vec(X)
//! ```
//!
//! so `vec(X)[i + j·d] = X[i, j]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex square matrix on a system (or composite) Hilbert space.
pub type Operator = DMatrix<Complex64>;

/// Column vector, used for vectorized operators.
pub type CVector = DVector<Complex64>;

/// Default tolerance for structural predicates.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> Operator {
    Operator::identity(d, d)
}

pub fn zeros(d: usize) -> Operator {
    Operator::zeros(d, d)
}

/// Pauli X.
pub fn sigma_x() -> Operator {
    Operator::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

/// Pauli Y.
pub fn sigma_y() -> Operator {
    Operator::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

/// Pauli Z, `diag(1, -1)`.
pub fn sigma_z() -> Operator {
    Operator::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Raising operator `σ₊ = (σ_x + iσ_y)/2 = |0⟩⟨1|`.
pub fn sigma_plus() -> Operator {
    Operator::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

/// Lowering operator `σ₋ = (σ_x − iσ_y)/2 = |1⟩⟨0|`; it takes the `σ_z = +1`
/// level to the `σ_z = −1` ground level.
pub fn sigma_minus() -> Operator {
    Operator::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

/// Matrix unit `E_{ij} = |i⟩⟨j|` on a `d`-dimensional space.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> Operator {
    let mut e = zeros(d);
    e[(i, j)] = ONE;
    e
}

/// Rank-one projector `|ψ⟩⟨ψ|` (the vector is not normalized).
pub fn ket_bra(psi: &[Complex64]) -> Operator {
    let v = CVector::from_column_slice(psi);
    &v * v.adjoint()
}

pub fn dagger(a: &Operator) -> Operator {
    a.adjoint()
}

/// Commutator `[A, B] = AB − BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

/// Hermitian inner product `tr(A† B)`.
pub fn hs_inner(a: &Operator, b: &Operator) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Entrywise maximum modulus `max |A_ij|`.
pub fn max_norm(a: &Operator) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |A_ij − B_ij|`. Panics if the shapes differ.
pub fn max_dist(a: &Operator, b: &Operator) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_dist: shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Maximum absolute column sum.
pub fn one_norm(a: &Operator) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn is_square(a: &Operator) -> bool {
    a.nrows() == a.ncols()
}

pub fn is_finite(a: &Operator) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `max |A − A†| ≤ tol`.
pub fn is_hermitian(a: &Operator, tol: f64) -> bool {
    is_square(a) && max_dist(a, &a.adjoint()) <= tol
}

/// `max |U†U − I| ≤ tol`.
pub fn is_unitary(u: &Operator, tol: f64) -> bool {
    is_square(u) && max_dist(&(u.adjoint() * u), &identity(u.nrows())) <= tol
}

/// Kronecker product, `(A⊗B)[(i·dB + k), (j·dB + l)] = A[i,j]·B[k,l]`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    a.kronecker(b)
}

/// Column-stacking vectorization.
pub fn vectorize(x: &Operator) -> CVector {
    CVector::from_column_slice(x.as_slice())
}

/// Inverse of [`vectorize`]. The length must be a perfect square `d²`.
pub fn unvectorize(x: &CVector) -> Result<Operator> {
    let n = x.len();
    let d = exact_sqrt(n).ok_or(Error::NotPerfectSquare(n))?;
    Ok(Operator::from_column_slice(d, d, x.as_slice()))
}

pub(crate) fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// `Tr_anc(M)[i, j] = Σ_k M[(i·m + k), (j·m + k)]` for `M` on `C^d ⊗ C^m`.
pub fn partial_trace_ancilla(m_op: &Operator, d: usize, m: usize) -> Result<Operator> {
    if !is_square(m_op) || m_op.nrows() != d * m {
        return Err(Error::DimensionMismatch {
            expected: d * m,
            found: m_op.nrows(),
        });
    }
    Ok(Operator::from_fn(d, d, |i, j| {
        (0..m).map(|k| m_op[(i * m + k, j * m + k)]).sum()
    }))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Only the Hermitian part `(A + A†)/2` is used.
pub fn hermitian_eigenvalues(a: &Operator) -> Result<Vec<f64>> {
    let (vals, _) = hermitian_eigen(a)?;
    Ok(vals)
}

/// Eigen-decomposition `A = W diag(λ) W†` of a Hermitian matrix, with the
/// eigenvalues ascending and the columns of `W` reordered to match.
pub fn hermitian_eigen(a: &Operator) -> Result<(Vec<f64>, Operator)> {
    if !is_square(a) {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    let h = (a + a.adjoint()) * c(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 10_000).ok_or(Error::EigenNoConvergence)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = Operator::from_fn(a.nrows(), a.nrows(), |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((vals, vecs))
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &Operator) -> Result<f64> {
    Ok(hermitian_eigenvalues(a)?.first().copied().unwrap_or(0.0))
}

/// Matrix exponential.
///
/// Hermitian and anti-Hermitian inputs go through the spectral decomposition
/// (so `expm` of an anti-Hermitian matrix is unitary to rounding). Everything
/// else goes to nalgebra's scaling-and-squaring Padé exponential.
pub fn expm(m: &Operator) -> Result<Operator> {
    if !is_square(m) {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    let scale = max_norm(m).max(f64::MIN_POSITIVE);
    let normal_tol = 1e-14 * scale;
    if max_dist(m, &m.adjoint()) <= normal_tol {
        return expm_spectral(m, ONE);
    }
    if max_dist(m, &(-m.adjoint())) <= normal_tol {
        // M = -iH with H Hermitian.
        let h = m * I;
        return expm_spectral(&h, -I);
    }
    Ok(m.exp())
}

/// `exp(phase · H)` for Hermitian `H`.
fn expm_spectral(h: &Operator, phase: Complex64) -> Result<Operator> {
    let (vals, w) = hermitian_eigen(h)?;
    let mut scaled = w.clone();
    for (k, lam) in vals.iter().enumerate() {
        let f = (phase * lam).exp();
        scaled.column_mut(k).iter_mut().for_each(|z| *z *= f);
    }
    Ok(scaled * w.adjoint())
}
