//! Dynamical-decoupling schemes and group averaging.
//!
//! A scheme is a finite set `𝒱` of unitary kicks, an ordering policy and a
//! pulse period `τ`. Averaging a generator over the kicks produces the
//! effective generator `L̄` whose collapse operators are
//! `R_{v,j} = v† L_j v / √#𝒱`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{self, c, identity, is_unitary, max_dist, Operator, DEFAULT_TOL};
use crate::semigroup::LindbladModel;

/// How kicks are drawn from the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    /// `0, 1, …, #𝒱−1, 0, 1, …`
    Cyclic,
    /// I.i.d. uniform draws, reproducible from the seed.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DDScheme {
    kicks: Vec<Operator>,
    order: Order,
    tau: f64,
}

impl DDScheme {
    /// Checks that the set is non-empty, every kick is a unitary of a common
    /// dimension (to [`DEFAULT_TOL`]) and `tau` is positive and finite.
    pub fn new(kicks: Vec<Operator>, order: Order, tau: f64) -> Result<Self> {
        check_kicks(&kicks)?;
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::NonPositiveStep(tau));
        }
        Ok(Self { kicks, order, tau })
    }

    pub fn kicks(&self) -> &[Operator] {
        &self.kicks
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.kicks[0].nrows()
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.kicks.clone(), self.order, tau)
    }

    pub fn with_order(&self, order: Order) -> Self {
        Self { order, ..self.clone() }
    }

    /// Kick indices for the first `n` pulses; see [`sequence`].
    pub fn sequence(&self, n: usize) -> Vec<usize> {
        sequence(self, n)
    }
}

fn check_kicks(kicks: &[Operator]) -> Result<()> {
    let first = kicks.first().ok_or(Error::EmptyKickSet)?;
    let d = first.nrows();
    for (index, v) in kicks.iter().enumerate() {
        if !opalg::is_square(v) {
            return Err(Error::NotSquare {
                rows: v.nrows(),
                cols: v.ncols(),
            });
        }
        if v.nrows() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.nrows(),
            });
        }
        if !opalg::is_finite(v) || !is_unitary(v, DEFAULT_TOL) {
            return Err(Error::NotUnitary { index });
        }
    }
    Ok(())
}

fn check_dim(kicks: &[Operator], d: usize) -> Result<()> {
    match kicks.iter().find(|v| v.nrows() != d || v.ncols() != d) {
        Some(v) => Err(Error::DimensionMismatch {
            expected: d,
            found: v.nrows(),
        }),
        None => Ok(()),
    }
}

/// The kick-index sequence of length `n`.
///
/// Random order uses ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
/// `SeedableRng::seed_from_u64(seed)`, drawing each index with
/// `Rng::random_range(0..#𝒱)`. A fresh generator is built per call, so the
/// output depends only on `(seed, n, #𝒱)`.
pub fn sequence(scheme: &DDScheme, n: usize) -> Vec<usize> {
    let k = scheme.kicks.len();
    match scheme.order {
        Order::Cyclic => (0..n).map(|i| i % k).collect(),
        Order::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.random_range(0..k)).collect()
        }
    }
}

/// `(1/#𝒱) Σ_v v† X v`.
pub fn group_average(kicks: &[Operator], x: &Operator) -> Result<Operator> {
    if kicks.is_empty() {
        return Err(Error::EmptyKickSet);
    }
    check_dim(kicks, x.nrows())?;
    let sum = kicks
        .iter()
        .fold(opalg::zeros(x.nrows()), |acc, v| acc + v.adjoint() * x * v);
    Ok(sum * c(1.0 / kicks.len() as f64, 0.0))
}

/// True iff the kick average sends every matrix unit `E_ij` to
/// `(tr E_ij / d) I` within `tol`, i.e. the set averages every operator to a
/// multiple of the identity.
pub fn verify_decoupling_set(kicks: &[Operator], tol: f64) -> bool {
    let Some(first) = kicks.first() else {
        return false;
    };
    let d = first.nrows();
    if check_dim(kicks, d).is_err() {
        return false;
    }
    let eye = identity(d);
    (0..d).all(|i| {
        (0..d).all(|j| {
            let e = opalg::matrix_unit(d, i, j);
            let target = if i == j {
                &eye * c(1.0 / d as f64, 0.0)
            } else {
                opalg::zeros(d)
            };
            group_average(kicks, &e)
                .map(|avg| max_dist(&avg, &target) <= tol)
                .unwrap_or(false)
        })
    })
}

/// Output of [`averaged_generator`].
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedModel {
    /// `H̄ = (1/#𝒱) Σ v†Hv − (tr H / d) I` and collapse operators `R_{v,j}`.
    pub model: LindbladModel,
    /// `tr H / d`, the identity component removed from `H̄`. It is a global
    /// phase and never enters the generator.
    pub identity_shift: f64,
}

/// The generator governing the fast-kick limit of a Markov dilation under
/// the kick set `kicks`.
///
/// Collapse operators are `R_{v,j} = v† L_j v / √#𝒱` ordered `v`-major. The
/// Hamiltonian is the kick average of `H` with its trace part removed; it is
/// zero whenever `kicks` is a decoupling set. For a decoupling set the
/// Heisenberg generator equals
///
/// ```text
/// L̄(X) = (1/#𝒱) Σ_v Σ_j v†L_j†v X v†L_j v − (1/d) Σ_j tr(L_j†L_j) X.
/// ```
pub fn averaged_generator(model: &LindbladModel, kicks: &[Operator]) -> Result<AveragedModel> {
    if kicks.is_empty() {
        return Err(Error::EmptyKickSet);
    }
    let d = model.dim();
    check_dim(kicks, d)?;
    let norm = c(1.0 / (kicks.len() as f64).sqrt(), 0.0);
    let rs: Vec<Operator> = kicks
        .iter()
        .flat_map(|v| model.ls().iter().map(move |l| v.adjoint() * l * v * norm))
        .collect();
    let shift = model.h().trace().re / d as f64;
    let mut h_bar = group_average(kicks, model.h())? - identity(d) * c(shift, 0.0);
    // Symmetrize and flush rounding noise so decoupling sets give H̄ = 0.
    h_bar = (&h_bar + h_bar.adjoint()) * c(0.5, 0.0);
    let floor = 1e-14 * opalg::max_norm(model.h()).max(1.0);
    h_bar.iter_mut().for_each(|z| {
        if z.norm() <= floor {
            *z = opalg::ZERO;
        }
    });
    Ok(AveragedModel {
        model: LindbladModel::new(h_bar, rs)?,
        identity_shift: shift,
    })
}

/// `λ = (1/d) tr(½ Σ_j L_j†L_j + iH)`, the decay rate of the vacuum
/// amplitude under a decoupling set.
pub fn lambda_rate(model: &LindbladModel) -> Complex64 {
    let d = model.dim() as f64;
    let w = model.coupling_weight().trace() * c(0.5, 0.0);
    (w + opalg::I * model.h().trace()) / d
}

/// The eight-element Pauli group, ordered `I, σ_x, σ_y, σ_z, −I, −σ_x, −σ_y,
/// −σ_z`. `v` and `−v` act identically by conjugation, so under cyclic order
/// every four consecutive kicks cover all distinct conjugations.
pub fn pauli_group() -> Vec<Operator> {
    let base = [identity(2), opalg::sigma_x(), opalg::sigma_y(), opalg::sigma_z()];
    let neg: Vec<Operator> = base.iter().map(|p| -p).collect();
    base.into_iter().chain(neg).collect()
}

/// `{I, σ_x}`.
pub fn flip_x_set() -> Vec<Operator> {
    vec![identity(2), opalg::sigma_x()]
}

/// Single-element set `{I}` (no decoupling).
pub fn trivial_set(d: usize) -> Vec<Operator> {
    vec![identity(d)]
}

/// Clock-and-shift products `S^a Z^b`, `a, b ∈ 0..d`, with
/// `S|k⟩ = |k+1 mod d⟩` and `Z|k⟩ = ω^k|k⟩`. A decoupling set in every
/// dimension; `a`-major order.
pub fn weyl_heisenberg_group(d: usize) -> Vec<Operator> {
    let mut shift = opalg::zeros(d);
    for k in 0..d {
        shift[((k + 1) % d, k)] = opalg::ONE;
    }
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    let clock = Operator::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, omega * i as f64)
        } else {
            opalg::ZERO
        }
    });
    let mut out = Vec::with_capacity(d * d);
    let mut sa = identity(d);
    for _ in 0..d {
        let mut zb = identity(d);
        for _ in 0..d {
            out.push(&sa * &zb);
            zb = &zb * &clock;
        }
        sa = &sa * &shift;
    }
    out
}

/// `(1/#𝒱) Σ_v v† D_ℒ(vXv†, vXv†) v`, which equals the dissipation of the
/// averaged generator for any unitary kick set.
pub fn averaged_dissipation(model: &LindbladModel, kicks: &[Operator], x: &Operator) -> Result<Operator> {
    if kicks.is_empty() {
        return Err(Error::EmptyKickSet);
    }
    check_dim(kicks, model.dim())?;
    let mut acc = opalg::zeros(model.dim());
    for v in kicks {
        let y = v * x * v.adjoint();
        acc += v.adjoint() * crate::semigroup::dissipation(model, &y)? * v;
    }
    Ok(acc * c(1.0 / kicks.len() as f64, 0.0))
}
