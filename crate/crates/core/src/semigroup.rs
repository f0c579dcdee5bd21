//! GKS–Lindblad generators and the semigroups they generate.
//!
//! In the Heisenberg picture a model `(H, {L_k})` generates
//!
//! ```text
//! ℒ(X) = ½ Σ_k [L_k†, X] L_k + ½ Σ_k L_k† [X, L_k] − i [X, H]
//! ```
//!
//! and `Φ_t = exp(tℒ)`. The Schrödinger-picture matrix is the conjugate
//! transpose of the Heisenberg one (Hilbert–Schmidt duality).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{self, c, commutator, expm, identity, kron, max_dist, max_norm, vectorize, Operator, DEFAULT_TOL};

/// A Hamiltonian together with its coupling (collapse) operators.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    h: Operator,
    ls: Vec<Operator>,
}

impl LindbladModel {
    /// Builds a model, checking that every operator is `d × d` and `H` is
    /// Hermitian to [`DEFAULT_TOL`] (relative to its largest entry, for
    /// entries above one).
    pub fn new(h: Operator, ls: Vec<Operator>) -> Result<Self> {
        check_square(&h)?;
        if !opalg::is_finite(&h) {
            return Err(Error::NonFinite);
        }
        let d = h.nrows();
        for l in &ls {
            check_square(l)?;
            if l.nrows() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: l.nrows(),
                });
            }
            if !opalg::is_finite(l) {
                return Err(Error::NonFinite);
            }
        }
        check_hamiltonian(&h)?;
        Ok(Self { h, ls })
    }

    /// A model with no coupling operators.
    pub fn hamiltonian(h: Operator) -> Result<Self> {
        Self::new(h, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn h(&self) -> &Operator {
        &self.h
    }

    pub fn ls(&self) -> &[Operator] {
        &self.ls
    }

    /// `Σ_k L_k† L_k`.
    pub fn coupling_weight(&self) -> Operator {
        self.ls
            .iter()
            .fold(opalg::zeros(self.dim()), |acc, l| acc + l.adjoint() * l)
    }

    /// `ℒ(X)` evaluated directly from the operators.
    pub fn apply_heisenberg(&self, x: &Operator) -> Operator {
        let mut out = (&self.h * x - x * &self.h) * opalg::I;
        for l in &self.ls {
            let ld = l.adjoint();
            out += (commutator(&ld, x) * l + &ld * commutator(x, l)) * c(0.5, 0.0);
        }
        out
    }

    /// `ℒ*(ρ) = −i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})`.
    pub fn apply_schrodinger(&self, rho: &Operator) -> Operator {
        let mut out = (&self.h * rho - rho * &self.h) * (-opalg::I);
        for l in &self.ls {
            let ld = l.adjoint();
            let ll = &ld * l;
            out += l * rho * &ld - (&ll * rho + rho * &ll) * c(0.5, 0.0);
        }
        out
    }
}

fn check_square(a: &Operator) -> Result<()> {
    if opalg::is_square(a) {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        })
    }
}

fn check_hamiltonian(h: &Operator) -> Result<()> {
    let asym = max_dist(h, &h.adjoint());
    if asym > DEFAULT_TOL * max_norm(h).max(1.0) {
        return Err(Error::NonHermitianHamiltonian(asym));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    /// Acts on observables.
    Heisenberg,
    /// Acts on states.
    Schrodinger,
}

impl Picture {
    pub fn flip(self) -> Self {
        match self {
            Picture::Heisenberg => Picture::Schrodinger,
            Picture::Schrodinger => Picture::Heisenberg,
        }
    }
}

/// Linear map on `d × d` operators, stored as a `d² × d²` matrix acting on
/// column-stacked vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    matrix: Operator,
    picture: Picture,
}

impl SuperOperator {
    pub fn from_matrix(matrix: Operator, picture: Picture) -> Result<Self> {
        check_square(&matrix)?;
        let dim = opalg::exact_sqrt(matrix.nrows()).ok_or(Error::NotPerfectSquare(matrix.nrows()))?;
        Ok(Self { dim, matrix, picture })
    }

    pub fn identity(dim: usize, picture: Picture) -> Self {
        Self {
            dim,
            matrix: identity(dim * dim),
            picture,
        }
    }

    pub fn zero(dim: usize, picture: Picture) -> Self {
        Self {
            dim,
            matrix: opalg::zeros(dim * dim),
            picture,
        }
    }

    /// `X ↦ A X B`.
    pub fn sandwich(a: &Operator, b: &Operator, picture: Picture) -> Self {
        Self {
            dim: a.nrows(),
            matrix: kron(&b.transpose(), a),
            picture,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn into_matrix(self) -> Operator {
        self.matrix
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    /// The Hilbert–Schmidt dual, in the other picture.
    pub fn dual(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.adjoint(),
            picture: self.picture.flip(),
        }
    }

    pub fn to_picture(&self, picture: Picture) -> Self {
        if picture == self.picture {
            self.clone()
        } else {
            self.dual()
        }
    }

    pub fn apply(&self, x: &Operator) -> Operator {
        assert_eq!(x.nrows(), self.dim, "SuperOperator::apply: dimension mismatch");
        let v = &self.matrix * vectorize(x);
        Operator::from_column_slice(self.dim, self.dim, v.as_slice())
    }

    /// `self ∘ other` (apply `other` first). Both must be in the same picture.
    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator> {
        if self.picture != other.picture {
            return Err(Error::WrongPicture {
                expected: self.picture,
                found: other.picture,
            });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
            picture: self.picture,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * c(s, 0.0),
            picture: self.picture,
        }
    }

    /// Entrywise max distance between the matrices, after bringing `other`
    /// to this picture.
    pub fn max_dist(&self, other: &SuperOperator) -> f64 {
        max_dist(&self.matrix, &other.to_picture(self.picture).matrix)
    }
}

/// Matrix of the GKS–Lindblad generator of `model` in the requested picture.
pub fn generator_superop(model: &LindbladModel, picture: Picture) -> Result<SuperOperator> {
    check_hamiltonian(model.h())?;
    let d = model.dim();
    let eye = identity(d);
    let h = model.h();
    // -i[X, H] = i(HX - XH)
    let mut m = (kron(&eye, h) - kron(&h.transpose(), &eye)) * opalg::I;
    for l in model.ls() {
        let ld = l.adjoint();
        let ll = &ld * l;
        m += kron(&l.transpose(), &ld);
        m -= (kron(&eye, &ll) + kron(&ll.transpose(), &eye)) * c(0.5, 0.0);
    }
    let heis = SuperOperator {
        dim: d,
        matrix: m,
        picture: Picture::Heisenberg,
    };
    Ok(heis.to_picture(picture))
}

/// `Φ_t = exp(t · gen)`, in the generator's picture.
pub fn semigroup_map(gen: &SuperOperator, t: f64) -> Result<SuperOperator> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(SuperOperator {
        dim: gen.dim,
        matrix: expm(&(&gen.matrix * c(t, 0.0)))?,
        picture: gen.picture,
    })
}

/// `D_ℒ(X, X) = ℒ(X†X) − ℒ(X†)X − X†ℒ(X)`.
pub fn dissipation(model: &LindbladModel, x: &Operator) -> Result<Operator> {
    if x.nrows() != model.dim() || !opalg::is_square(x) {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: x.nrows(),
        });
    }
    let xd = x.adjoint();
    Ok(model.apply_heisenberg(&(&xd * x)) - model.apply_heisenberg(&xd) * x - &xd * model.apply_heisenberg(x))
}

/// `Σ_k [X, L_k]† [X, L_k]`, the closed form of [`dissipation`].
pub fn dissipation_explicit(model: &LindbladModel, x: &Operator) -> Result<Operator> {
    if x.nrows() != model.dim() || !opalg::is_square(x) {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: x.nrows(),
        });
    }
    Ok(model.ls().iter().fold(opalg::zeros(model.dim()), |acc, l| {
        let k = commutator(x, l);
        acc + k.adjoint() * k
    }))
}

/// Choi matrix `(Φ ⊗ id)(|Ω⁺⟩⟨Ω⁺|) = Σ_ij Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|` of a
/// Schrödinger-picture map.
pub fn choi_matrix(map: &SuperOperator) -> Result<Operator> {
    if map.picture != Picture::Schrodinger {
        return Err(Error::WrongPicture {
            expected: Picture::Schrodinger,
            found: map.picture,
        });
    }
    let d = map.dim;
    let mut choi = opalg::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            let img = map.apply(&opalg::matrix_unit(d, i, j));
            for a in 0..d {
                for b in 0..d {
                    choi[(a * d + i, b * d + j)] = img[(a, b)];
                }
            }
        }
    }
    Ok(choi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpReport {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
}

/// Complete-positivity test: the Choi matrix must have no eigenvalue below
/// `-tol`.
pub fn cp_check(map: &SuperOperator, tol: f64) -> Result<CpReport> {
    let choi = choi_matrix(map)?;
    let min_eigenvalue = opalg::min_eigenvalue(&choi)?;
    Ok(CpReport {
        is_cp: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}

/// Density-matrix check: Hermitian, unit trace and positive semidefinite,
/// all to `tol`.
pub fn validate_density(rho: &Operator, tol: f64) -> Result<()> {
    if !opalg::is_square(rho) {
        return Err(Error::NotSquare {
            rows: rho.nrows(),
            cols: rho.ncols(),
        });
    }
    if !opalg::is_finite(rho) {
        return Err(Error::NonFinite);
    }
    let asym = max_dist(rho, &rho.adjoint());
    if asym > tol {
        return Err(Error::NotDensityMatrix(format!("not Hermitian ({asym:e})")));
    }
    let tr = rho.trace();
    if (tr - c(1.0, 0.0)).norm() > tol {
        return Err(Error::NotDensityMatrix(format!("trace {tr} ≠ 1")));
    }
    let min = opalg::min_eigenvalue(rho)?;
    if min < -tol {
        return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// Markovian time-ordered correlation kernel (quantum regression formula)
///
/// ```text
/// tr{ρ Φ_{τ₁}(Y₁† Φ_{τ₂}(Y₂† ⋯ Φ_{τₙ}(Yₙ† Xₙ) ⋯ X₂) X₁)}
/// ```
///
/// with `τ₁ = t₁`, `τ_k = t_k − t_{k−1}`. The semigroup is generated by
/// `gen`; a Schrödinger-picture generator is dualized first. Evaluation is
/// innermost-first.
pub fn markov_kernel(
    gen: &SuperOperator,
    rho: &Operator,
    times: &[f64],
    ys: &[Operator],
    xs: &[Operator],
) -> Result<Complex64> {
    let n = times.len();
    if ys.len() != n || xs.len() != n {
        return Err(Error::LengthMismatch(format!(
            "{} times, {} Y operators, {} X operators",
            n,
            ys.len(),
            xs.len()
        )));
    }
    if n == 0 {
        return Err(Error::LengthMismatch("at least one time is required".into()));
    }
    if times[0] < 0.0 {
        return Err(Error::NegativeTime(times[0]));
    }
    if times.windows(2).any(|w| w[1].is_nan() || w[1] < w[0]) {
        return Err(Error::DecreasingTimes);
    }
    validate_density(rho, DEFAULT_TOL)?;
    let d = gen.dim;
    for op in ys.iter().chain(xs.iter()) {
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: op.nrows(),
            });
        }
    }
    let heis = gen.to_picture(Picture::Heisenberg);
    let step = |k: usize| if k == 0 { times[0] } else { times[k] - times[k - 1] };

    let mut inner = semigroup_map(&heis, step(n - 1))?.apply(&(ys[n - 1].adjoint() * &xs[n - 1]));
    for k in (0..n - 1).rev() {
        let arg = ys[k].adjoint() * inner * &xs[k];
        inner = semigroup_map(&heis, step(k))?.apply(&arg);
    }
    Ok((rho * inner).trace())
}

/// [`markov_kernel`] for the semigroup of a Lindblad model.
pub fn markov_kernel_model(
    model: &LindbladModel,
    rho: &Operator,
    times: &[f64],
    ys: &[Operator],
    xs: &[Operator],
) -> Result<Complex64> {
    markov_kernel(&generator_superop(model, Picture::Heisenberg)?, rho, times, ys, xs)
}
