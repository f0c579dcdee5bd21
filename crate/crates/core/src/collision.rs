//! Repeated-interaction surrogate for the vacuum quantum stochastic
//! evolution with system-only kicks.
//!
//! Each step of length `τ` couples the system to a fresh ancilla with
//! `n + 1` levels (vacuum `0` plus one excitation level per channel) via
//!
//! ```text
//! U_step = exp( √τ Σ_j (L_j ⊗ E_{j,0} − L_j† ⊗ E_{0,j}) − iτ H ⊗ I )
//! ```
//!
//! and the ancilla is traced out in its vacuum. Kicks conjugate the step by
//! `v_k ⊗ I`. As `τ → 0` the composed map tends to `exp(T L̄)` where `L̄` is
//! the kick-averaged generator from [`crate::decouple::averaged_generator`].

use crate::decouple::{averaged_generator, DDScheme};
use crate::error::{Error, Result};
use crate::opalg::{self, c, expm, identity, kron, matrix_unit, Operator};
use crate::semigroup::{generator_superop, semigroup_map, LindbladModel, Picture, SuperOperator};

/// A finite-`τ` run: `steps · tau = total_time` exactly.
#[derive(Debug, Clone)]
pub struct CollisionConfig {
    model: LindbladModel,
    scheme: DDScheme,
    total_time: f64,
    steps: usize,
    kick_every: usize,
}

impl CollisionConfig {
    /// `steps = max(1, round(T / scheme.tau))`; the step length is then reset
    /// to `T / steps`. Kicks change every `kick_every` steps (default 1).
    pub fn new(model: LindbladModel, scheme: DDScheme, total_time: f64) -> Result<Self> {
        Self::with_kick_every(model, scheme, total_time, 1)
    }

    pub fn with_kick_every(model: LindbladModel, scheme: DDScheme, total_time: f64, kick_every: usize) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::NonPositiveStep(total_time));
        }
        if kick_every == 0 {
            return Err(Error::InvalidArgument("kick_every must be at least 1".into()));
        }
        if scheme.dim() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: scheme.dim(),
            });
        }
        let steps = ((total_time / scheme.tau()).round() as usize).max(1);
        let tau = total_time / steps as f64;
        let scheme = scheme.with_tau(tau)?;
        Ok(Self {
            model,
            scheme,
            total_time,
            steps,
            kick_every,
        })
    }

    pub fn model(&self) -> &LindbladModel {
        &self.model
    }

    pub fn scheme(&self) -> &DDScheme {
        &self.scheme
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        self.scheme.tau()
    }

    pub fn kick_every(&self) -> usize {
        self.kick_every
    }

    /// Ancilla dimension `n + 1`.
    pub fn ancilla_dim(&self) -> usize {
        self.model.ls().len() + 1
    }

    /// Kick index applied at each of the `steps` steps.
    pub fn kick_indices(&self) -> Vec<usize> {
        let pulses = self.steps.div_ceil(self.kick_every);
        let seq = self.scheme.sequence(pulses);
        (0..self.steps).map(|k| seq[k / self.kick_every]).collect()
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveStep(tau))
    }
}

/// `√τ Σ_j (L_j ⊗ E_{j,0} − L_j† ⊗ E_{0,j})`.
fn exchange_term(model: &LindbladModel, tau: f64) -> Operator {
    let m = model.ls().len() + 1;
    let sq = c(tau.sqrt(), 0.0);
    let mut g = opalg::zeros(model.dim() * m);
    for (j, l) in model.ls().iter().enumerate() {
        g += kron(l, &matrix_unit(m, j + 1, 0)) * sq;
        g -= kron(&l.adjoint(), &matrix_unit(m, 0, j + 1)) * sq;
    }
    g
}

/// The anti-Hermitian step generator `G` on `C^d ⊗ C^{n+1}`.
fn step_generator(model: &LindbladModel, tau: f64) -> Operator {
    let m = model.ls().len() + 1;
    kron(model.h(), &identity(m)) * c(0.0, -tau) + exchange_term(model, tau)
}

/// One collision unitary `exp(G)`; unitary to rounding.
pub fn step_unitary(model: &LindbladModel, tau: f64) -> Result<Operator> {
    check_tau(tau)?;
    expm(&step_generator(model, tau))
}

/// The first-order increment
/// `I − τ(½ΣL†L + iH) ⊗ I + √τ Σ_j (L_j ⊗ E_{j,0} − L_j† ⊗ E_{0,j})`.
pub fn first_order_step(model: &LindbladModel, tau: f64) -> Operator {
    let m = model.ls().len() + 1;
    let drift = model.coupling_weight() * c(0.5, 0.0) + model.h() * opalg::I;
    identity(model.dim() * m) - kron(&drift, &identity(m)) * c(tau, 0.0) + exchange_term(model, tau)
}

/// Kraus operators `K_a = ⟨a| U_step |0⟩`, `a = 0..=n`; `K_0` is the vacuum
/// block.
pub fn step_kraus(model: &LindbladModel, tau: f64) -> Result<Vec<Operator>> {
    let u = step_unitary(model, tau)?;
    Ok(kraus_from_unitary(&u, model.dim(), model.ls().len() + 1))
}

fn kraus_from_unitary(u: &Operator, d: usize, m: usize) -> Vec<Operator> {
    (0..m)
        .map(|a| Operator::from_fn(d, d, |i, j| u[(i * m + a, j * m)]))
        .collect()
}

/// Schrödinger matrix of `ρ ↦ Σ_a K_a ρ K_a†`.
fn kraus_superop(kraus: &[Operator], d: usize) -> Operator {
    kraus
        .iter()
        .fold(opalg::zeros(d * d), |acc, k| acc + kron(&k.conjugate(), k))
}

/// `ρ ↦ Tr_anc[U_step (ρ ⊗ |0⟩⟨0|) U_step†]`, or its Heisenberg dual.
pub fn step_map_vacuum(model: &LindbladModel, tau: f64, picture: Picture) -> Result<SuperOperator> {
    let kraus = step_kraus(model, tau)?;
    let s = SuperOperator::from_matrix(kraus_superop(&kraus, model.dim()), Picture::Schrodinger)?;
    Ok(s.to_picture(picture))
}

/// Same map as [`step_map_vacuum`], computed literally through the partial
/// trace of the joint state. Used to cross-check the Kraus route.
pub fn step_map_vacuum_by_partial_trace(model: &LindbladModel, tau: f64) -> Result<SuperOperator> {
    let d = model.dim();
    let m = model.ls().len() + 1;
    let u = step_unitary(model, tau)?;
    let ud = u.adjoint();
    let vac = matrix_unit(m, 0, 0);
    let mut cols = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            let joint = &u * kron(&matrix_unit(d, i, j), &vac) * &ud;
            let out = opalg::partial_trace_ancilla(&joint, d, m)?;
            cols.push(opalg::vectorize(&out));
        }
    }
    SuperOperator::from_matrix(Operator::from_columns(&cols), Picture::Schrodinger)
}

/// Kraus operators of every kicked step, `v† K_a v`.
fn kicked_kraus(config: &CollisionConfig) -> Result<Vec<Vec<Operator>>> {
    let kraus = step_kraus(&config.model, config.tau())?;
    Ok(config
        .scheme
        .kicks()
        .iter()
        .map(|v| kraus.iter().map(|k| v.adjoint() * k * v).collect())
        .collect())
}

/// The `N`-step kicked collision evolution in the Schrödinger picture.
pub fn evolve_dd(config: &CollisionConfig) -> Result<SuperOperator> {
    let d = config.model.dim();
    let per_kick: Vec<Operator> = kicked_kraus(config)?.iter().map(|ks| kraus_superop(ks, d)).collect();
    let mut total = identity(d * d);
    for k in config.kick_indices() {
        total = &per_kick[k] * total;
    }
    SuperOperator::from_matrix(total, Picture::Schrodinger)
}

/// System block `⟨0…0| Ũ_v(T, 0) |0…0⟩`, the product of kicked vacuum
/// blocks `v_k† K_0 v_k` (latest step leftmost).
pub fn vacuum_amplitude_dd(config: &CollisionConfig) -> Result<Operator> {
    let blocks: Vec<Operator> = kicked_kraus(config)?
        .into_iter()
        .map(|mut ks| ks.swap_remove(0))
        .collect();
    let mut total = identity(config.model.dim());
    for k in config.kick_indices() {
        total = &blocks[k] * total;
    }
    Ok(total)
}

/// `exp(−Tλ)` with `λ = (1/d) tr(½ΣL†L + iH)`, the limit of
/// [`vacuum_amplitude_dd`] (times the identity) for a decoupling set.
pub fn vacuum_amplitude_limit(model: &LindbladModel, total_time: f64) -> num_complex::Complex64 {
    (-crate::decouple::lambda_rate(model) * total_time).exp()
}

/// `exp(T L̄*)`: the Schrödinger-picture limit map of [`evolve_dd`].
pub fn limit_map(model: &LindbladModel, kicks: &[Operator], total_time: f64) -> Result<SuperOperator> {
    let avg = averaged_generator(model, kicks)?;
    let gen = generator_superop(&avg.model, Picture::Schrodinger)?;
    semigroup_map(&gen, total_time)
}

/// First-order Richardson extrapolation to `τ = 0` from two runs.
pub fn richardson(coarse: (f64, &SuperOperator), fine: (f64, &SuperOperator)) -> Result<SuperOperator> {
    let (t1, m1) = coarse;
    let (t2, m2) = fine;
    if t1 == t2 {
        return Err(Error::InvalidArgument("Richardson needs distinct step sizes".into()));
    }
    let m = (m2.matrix() * c(t1, 0.0) - m1.to_picture(m2.picture()).matrix() * c(t2, 0.0)) * c(1.0 / (t1 - t2), 0.0);
    SuperOperator::from_matrix(m, m2.picture())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    /// Step length actually used (`T / N`).
    pub tau: f64,
    /// `None` for cyclic order.
    pub seed: Option<u64>,
    pub error_vs_lbar: f64,
    pub error_vs_identity: f64,
    /// `ln(e_prev / e) / ln(τ_prev / τ)` against the previous row.
    pub empirical_order: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub rows: Vec<StudyRow>,
    /// `exp(T L̄*)`.
    pub target: SuperOperator,
    /// Richardson extrapolation from the two smallest step sizes.
    pub extrapolated: Option<SuperOperator>,
}

impl ConvergenceStudy {
    /// Errors strictly decrease down the table.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error_vs_lbar < w[0].error_vs_lbar)
    }

    /// Max-norm distance of the extrapolated limit from the identity map.
    pub fn limit_distance_from_identity(&self) -> Option<f64> {
        self.extrapolated
            .as_ref()
            .map(|m| m.max_dist(&SuperOperator::identity(m.dim(), Picture::Schrodinger)))
    }
}

/// Runs [`evolve_dd`] at each `τ` (which must be positive and descending)
/// and compares with `exp(T L̄*)`.
pub fn convergence_study(
    model: &LindbladModel,
    scheme: &DDScheme,
    total_time: f64,
    taus: &[f64],
) -> Result<ConvergenceStudy> {
    convergence_study_with(model, scheme, total_time, taus, 1)
}

pub fn convergence_study_with(
    model: &LindbladModel,
    scheme: &DDScheme,
    total_time: f64,
    taus: &[f64],
    kick_every: usize,
) -> Result<ConvergenceStudy> {
    if taus.iter().any(|&t| t.is_nan() || t <= 0.0) {
        return Err(Error::NonPositiveStep(
            taus.iter().copied().find(|&t| t.is_nan() || t <= 0.0).unwrap_or(0.0),
        ));
    }
    if taus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("taus must be strictly descending".into()));
    }
    let target = limit_map(model, scheme.kicks(), total_time)?;
    let d = model.dim();
    let eye = SuperOperator::identity(d, Picture::Schrodinger);
    let seed = match scheme.order() {
        crate::decouple::Order::Cyclic => None,
        crate::decouple::Order::Random(s) => Some(s),
    };
    let mut rows: Vec<StudyRow> = Vec::with_capacity(taus.len());
    let mut maps = Vec::with_capacity(taus.len());
    for &tau in taus {
        let cfg = CollisionConfig::with_kick_every(model.clone(), scheme.with_tau(tau)?, total_time, kick_every)?;
        let map = evolve_dd(&cfg)?;
        let error_vs_lbar = map.max_dist(&target);
        let empirical_order = rows
            .last()
            .map(|prev| (prev.error_vs_lbar / error_vs_lbar).ln() / (prev.tau / cfg.tau()).ln());
        rows.push(StudyRow {
            tau: cfg.tau(),
            seed,
            error_vs_lbar,
            error_vs_identity: map.max_dist(&eye),
            empirical_order,
        });
        maps.push(map);
    }
    let extrapolated = match rows.len() {
        n if n >= 2 => Some(richardson(
            (rows[n - 2].tau, &maps[n - 2]),
            (rows[n - 1].tau, &maps[n - 1]),
        )?),
        _ => None,
    };
    Ok(ConvergenceStudy {
        rows,
        target,
        extrapolated,
    })
}

/// Mean of [`evolve_dd`] over random-order runs with the given seeds.
pub fn seed_averaged_evolution(
    model: &LindbladModel,
    scheme: &DDScheme,
    total_time: f64,
    seeds: &[u64],
) -> Result<SuperOperator> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("no seeds".into()));
    }
    let d = model.dim();
    let mut acc = opalg::zeros(d * d);
    for &s in seeds {
        let cfg = CollisionConfig::new(
            model.clone(),
            scheme.with_order(crate::decouple::Order::Random(s)),
            total_time,
        )?;
        acc += evolve_dd(&cfg)?.matrix();
    }
    SuperOperator::from_matrix(acc * c(1.0 / seeds.len() as f64, 0.0), Picture::Schrodinger)
}
