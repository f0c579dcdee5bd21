//! Cauchy-randomized Hamiltonian dilation ("shallow pocket" model).
//!
//! The system Hamiltonian `H = Σ_n E_n P_n` is scaled by a standard Cauchy
//! random variable `Λ`. Averaging `e^{iΛtH} X e^{−iΛtH}` over `Λ` and using
//! `E[e^{iuΛ}] = e^{−|u|}` gives the semigroup
//!
//! ```text
//! Φ_t(X) = Σ_{n,m} P_n X P_m e^{−|E_m − E_n| t}
//! ```
//!
//! whose one-point function matches a Markov semigroup while the two-time
//! kernels do not. Because the environment is a single random scalar,
//! system-only kicks that average `H` to zero remove it exactly.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution};

use crate::decouple::DDScheme;
use crate::error::{Error, Result};
use crate::opalg::{self, c, hermitian_eigen, identity, kron, max_dist, Operator, DEFAULT_TOL};
use crate::semigroup::{validate_density, Picture, SuperOperator};

/// Energy gaps below this are treated as degenerate (factor `e^0`).
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub projector: Operator,
}

/// `H_sys = Σ_n E_n P_n` together with the system state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    levels: Vec<Level>,
    rho: Operator,
}

impl SpectralModel {
    /// Checks `P_n P_m = δ_nm P_n`, `Σ P_n = I` and that `rho` is a density
    /// matrix, all to [`DEFAULT_TOL`].
    pub fn new(levels: Vec<Level>, rho: Operator) -> Result<Self> {
        let first = levels
            .first()
            .ok_or_else(|| Error::InvalidSpectralModel("no levels".into()))?;
        let d = first.projector.nrows();
        for (n, lv) in levels.iter().enumerate() {
            let p = &lv.projector;
            if p.nrows() != d || p.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.nrows(),
                });
            }
            if !lv.energy.is_finite() || !opalg::is_finite(p) {
                return Err(Error::NonFinite);
            }
            for (m, other) in levels.iter().enumerate().skip(n) {
                let prod = p * &other.projector;
                let expected = if n == m { p.clone() } else { opalg::zeros(d) };
                if max_dist(&prod, &expected) > DEFAULT_TOL {
                    return Err(Error::InvalidSpectralModel(format!(
                        "projectors {n} and {m} are not orthogonal projectors"
                    )));
                }
            }
            if !opalg::is_hermitian(p, DEFAULT_TOL) {
                return Err(Error::InvalidSpectralModel(format!("projector {n} is not Hermitian")));
            }
        }
        let sum = levels.iter().fold(opalg::zeros(d), |acc, lv| acc + &lv.projector);
        if max_dist(&sum, &identity(d)) > DEFAULT_TOL {
            return Err(Error::InvalidSpectralModel("projectors do not sum to I".into()));
        }
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.nrows(),
            });
        }
        validate_density(&rho, DEFAULT_TOL)?;
        Ok(Self { levels, rho })
    }

    /// Spectral model of a diagonal Hamiltonian `diag(energies)`.
    pub fn diagonal(energies: &[f64], rho: Operator) -> Result<Self> {
        let d = energies.len();
        let levels = energies
            .iter()
            .enumerate()
            .map(|(i, &e)| Level {
                energy: e,
                projector: opalg::matrix_unit(d, i, i),
            })
            .collect();
        Self::new(levels, rho)
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn rho(&self) -> &Operator {
        &self.rho
    }

    pub fn with_rho(&self, rho: Operator) -> Result<Self> {
        Self::new(self.levels.clone(), rho)
    }

    pub fn hamiltonian(&self) -> Operator {
        self.levels.iter().fold(opalg::zeros(self.dim()), |acc, lv| {
            acc + &lv.projector * c(lv.energy, 0.0)
        })
    }
}

/// `e^{−|Δ|}`, with `|Δ| < DEGENERACY_TOL` mapped to exactly one.
fn cauchy_factor(delta: f64) -> f64 {
    if delta.abs() < DEGENERACY_TOL {
        1.0
    } else {
        (-delta.abs()).exp()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// Heisenberg map `X ↦ Σ_{n,m} P_n X P_m e^{−|E_m − E_n| t}`.
pub fn cauchy_semigroup(sm: &SpectralModel, t: f64) -> Result<SuperOperator> {
    check_time(t)?;
    let d = sm.dim();
    let mut m = opalg::zeros(d * d);
    for a in &sm.levels {
        for b in &sm.levels {
            let f = cauchy_factor((b.energy - a.energy) * t);
            m += kron(&b.projector.transpose(), &a.projector) * c(f, 0.0);
        }
    }
    SuperOperator::from_matrix(m, Picture::Heisenberg)
}

/// Generator `ℒX = −Σ_{n,m} |E_m − E_n| P_n X P_m` of [`cauchy_semigroup`].
pub fn cauchy_generator(sm: &SpectralModel) -> SuperOperator {
    let d = sm.dim();
    let mut m = opalg::zeros(d * d);
    for a in &sm.levels {
        for b in &sm.levels {
            let gap = (b.energy - a.energy).abs();
            if gap >= DEGENERACY_TOL {
                m -= kron(&b.projector.transpose(), &a.projector) * c(gap, 0.0);
            }
        }
    }
    SuperOperator::from_matrix(m, Picture::Heisenberg).expect("square d²×d² matrix")
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: Complex64,
    /// `√((s²_re + s²_im) / N)` from the unbiased sample variances.
    pub std_err: f64,
    pub samples: usize,
}

/// Sample average of `tr{ρ e^{iλtH} X e^{−iλtH}}` over `λ ~ Cauchy(0, 1)`.
///
/// Works in the eigenbasis of `H` obtained by diagonalization, independent
/// of the projector form used by [`cauchy_semigroup`]. Draws come from
/// ChaCha8 seeded by `seed`, consumed in order.
pub fn mc_cauchy_oracle(sm: &SpectralModel, t: f64, x: &Operator, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let d = sm.dim();
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.nrows(),
        });
    }
    let (eps, w) = hermitian_eigen(&sm.hamiltonian())?;
    let rho_e = w.adjoint() * sm.rho() * &w;
    let x_e = w.adjoint() * x * &w;
    // tr{ρ' D† X' D} = Σ_{a,b} ρ'_{ba} X'_{ab} e^{iλt(ε_a − ε_b)}
    let mut terms = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let coeff = rho_e[(b, a)] * x_e[(a, b)];
            terms.push((coeff, (eps[a] - eps[b]) * t));
        }
    }
    let cauchy = Cauchy::new(0.0, 1.0).expect("unit scale");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq_re, mut sum_sq_im) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
    for _ in 0..samples {
        let lambda: f64 = cauchy.sample(&mut rng);
        let v: Complex64 = terms
            .iter()
            .map(|&(coeff, freq)| coeff * Complex64::from_polar(1.0, lambda * freq))
            .sum();
        sum += v;
        sum_sq_re += v.re * v.re;
        sum_sq_im += v.im * v.im;
    }
    let n = samples as f64;
    let mean = sum / n;
    let dof = (n - 1.0).max(1.0);
    let var_re = ((sum_sq_re - n * mean.re * mean.re) / dof).max(0.0);
    let var_im = ((sum_sq_im - n * mean.im * mean.im) / dof).max(0.0);
    Ok(McEstimate {
        mean,
        std_err: ((var_re + var_im) / n).sqrt(),
        samples,
    })
}

/// `tr{ρ P_n Y† P_m X P_r}` for all `(n, m, r)`.
fn kernel_coefficients(
    sm: &SpectralModel,
    y: &Operator,
    x: &Operator,
) -> Result<Vec<(usize, usize, usize, Complex64)>> {
    let d = sm.dim();
    for op in [y, x] {
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: op.nrows(),
            });
        }
    }
    let yd = y.adjoint();
    let k = sm.levels.len();
    let mut out = Vec::with_capacity(k * k * k);
    for n in 0..k {
        let left = sm.rho() * &sm.levels[n].projector * &yd;
        for m in 0..k {
            let mid = &left * &sm.levels[m].projector * x;
            for r in 0..k {
                let coeff = (&mid * &sm.levels[r].projector).trace();
                out.push((n, m, r, coeff));
            }
        }
    }
    Ok(out)
}

fn check_times(t: f64, h: f64) -> Result<()> {
    check_time(t)?;
    check_time(h)
}

/// Two-time kernel of the randomized dilation,
/// `Σ tr{ρ P_n Y† P_m X P_r} e^{−|(E_n − E_r)t + (E_m − E_r)h|}`.
pub fn two_time_kernel(sm: &SpectralModel, y: &Operator, x: &Operator, t: f64, h: f64) -> Result<Complex64> {
    check_times(t, h)?;
    let e = |i: usize| sm.levels[i].energy;
    Ok(kernel_coefficients(sm, y, x)?
        .into_iter()
        .map(|(n, m, r, coeff)| coeff * cauchy_factor((e(n) - e(r)) * t + (e(m) - e(r)) * h))
        .sum())
}

/// The Markov two-time kernel of the same semigroup,
/// `Σ tr{ρ P_n Y† P_m X P_r} e^{−|E_n − E_r|t − |E_m − E_r|h}`.
pub fn markov_two_time(sm: &SpectralModel, y: &Operator, x: &Operator, t: f64, h: f64) -> Result<Complex64> {
    check_times(t, h)?;
    let e = |i: usize| sm.levels[i].energy;
    Ok(kernel_coefficients(sm, y, x)?
        .into_iter()
        .map(|(n, m, r, coeff)| coeff * cauchy_factor((e(n) - e(r)) * t) * cauchy_factor((e(m) - e(r)) * h))
        .sum())
}

/// How [`dd_pocket_evolution`] evaluated the Cauchy average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AverageMethod {
    /// All kicked Hamiltonians commute; exact spectral formula.
    ClosedForm,
    /// Exact expansion of the propagator into `terms` distinct frequencies.
    FrequencyExpansion { terms: usize },
    /// Gauss–Legendre in `θ = arctan λ`.
    Quadrature { nodes: usize, estimated_error: f64 },
}

#[derive(Debug, Clone)]
pub struct PocketEvolution {
    /// Heisenberg picture.
    pub map: SuperOperator,
    pub method: AverageMethod,
}

/// Quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    /// Stop doubling once successive estimates agree to this (max norm).
    pub tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            initial_nodes: 129,
            max_nodes: 4200,
            tol: 1e-10,
        }
    }
}

/// Evaluation strategy for [`dd_pocket_evolution_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Closed form when the kicked Hamiltonians commute, otherwise the
    /// frequency expansion, otherwise (too many frequencies) quadrature.
    Auto,
    FrequencyExpansion,
    Quadrature(QuadratureOptions),
}

/// Number of level-occupation states above which `Auto` gives up on the
/// frequency expansion.
pub const MAX_EXPANSION_STATES: usize = 20_000;

/// Cauchy-averaged kicked evolution `X ↦ E_λ[Ũ_λ† X Ũ_λ]` with
/// `Ũ_λ = Π_k exp(−iλτ v_k† H v_k)` over `n` pulses from `scheme`.
pub fn dd_pocket_evolution(sm: &SpectralModel, scheme: &DDScheme, n: usize) -> Result<PocketEvolution> {
    dd_pocket_evolution_with(sm, scheme, n, Strategy::Auto)
}

pub fn dd_pocket_evolution_with(
    sm: &SpectralModel,
    scheme: &DDScheme,
    n: usize,
    strategy: Strategy,
) -> Result<PocketEvolution> {
    let d = sm.dim();
    if scheme.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: scheme.dim(),
        });
    }
    let h = sm.hamiltonian();
    let conj: Vec<Operator> = scheme.kicks().iter().map(|v| v.adjoint() * &h * v).collect();
    let seq = scheme.sequence(n);
    let runs = run_lengths(&seq);
    match strategy {
        Strategy::Quadrature(opts) => return quadrature_average(&conj, &runs, scheme.tau(), opts),
        Strategy::FrequencyExpansion => {
            return frequency_expansion(sm, scheme.kicks(), &runs, scheme.tau(), usize::MAX)?
                .ok_or_else(|| Error::InvalidArgument("frequency expansion too large".into()));
        }
        Strategy::Auto => {}
    }
    let mut counts = vec![0usize; conj.len()];
    for &k in &seq {
        counts[k] += 1;
    }
    let used: Vec<usize> = (0..conj.len()).filter(|&k| counts[k] > 0).collect();
    let scale = opalg::max_norm(&h).max(1.0);
    let commuting = used.iter().all(|&a| {
        used.iter()
            .all(|&b| opalg::max_norm(&opalg::commutator(&conj[a], &conj[b])) <= 1e-12 * scale * scale)
    });
    if commuting {
        let mut h_eff = opalg::zeros(d);
        for &k in &used {
            h_eff += &conj[k] * c(scheme.tau() * counts[k] as f64, 0.0);
        }
        return Ok(PocketEvolution {
            map: spectral_cauchy_map(&h_eff)?,
            method: AverageMethod::ClosedForm,
        });
    }
    if let Some(ev) = frequency_expansion(sm, scheme.kicks(), &runs, scheme.tau(), MAX_EXPANSION_STATES)? {
        return Ok(ev);
    }
    quadrature_average(&conj, &runs, scheme.tau(), QuadratureOptions::default())
}

/// Consecutive equal kicks, as `(kick, run length)`.
fn run_lengths(seq: &[usize]) -> Vec<(usize, usize)> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for &k in seq {
        match runs.last_mut() {
            Some((last, len)) if *last == k => *len += 1,
            _ => runs.push((k, 1)),
        }
    }
    runs
}

/// Exact Cauchy average through the frequency content of `Ũ_λ`.
///
/// Every kicked Hamiltonian `v†Hv` has the spectrum of `H`, so
/// `exp(−iλτℓ v†Hv) = Σ_n e^{−iλτℓE_n} v†P_n v` and the propagator is
/// `Ũ_λ = Σ_c A_c e^{−iλ ε_c}` summed over level-occupation vectors `c`
/// with `ε_c = τ Σ_n c_n E_n`. Then
/// `E_λ[Ũ†XŨ] = Σ_{c,c'} A_c† X A_{c'} e^{−|ε_c − ε_{c'}|}`.
/// Returns `None` when more than `max_states` occupation vectors arise.
fn frequency_expansion(
    sm: &SpectralModel,
    kicks: &[Operator],
    runs: &[(usize, usize)],
    tau: f64,
    max_states: usize,
) -> Result<Option<PocketEvolution>> {
    use std::collections::BTreeMap;

    let d = sm.dim();
    // Merge degenerate levels so occupation vectors stay small.
    let mut levels: Vec<(f64, Operator)> = Vec::new();
    for lv in sm.levels() {
        match levels.iter_mut().find(|(e, _)| (e - lv.energy).abs() < DEGENERACY_TOL) {
            Some((_, p)) => *p += &lv.projector,
            None => levels.push((lv.energy, lv.projector.clone())),
        }
    }
    let kicked: Vec<Vec<Operator>> = kicks
        .iter()
        .map(|v| levels.iter().map(|(_, p)| v.adjoint() * p * v).collect())
        .collect();

    let mut states: BTreeMap<Vec<usize>, Operator> = BTreeMap::new();
    states.insert(vec![0; levels.len()], identity(d));
    for &(k, len) in runs {
        let mut next: BTreeMap<Vec<usize>, Operator> = BTreeMap::new();
        for (occ, a) in &states {
            for (nidx, proj) in kicked[k].iter().enumerate() {
                let mut key = occ.clone();
                key[nidx] += len;
                let term = proj * a;
                next.entry(key).and_modify(|acc| *acc += &term).or_insert(term);
            }
        }
        if next.len() > max_states {
            return Ok(None);
        }
        states = next;
    }

    // Collect (ε, A) and merge equal frequencies.
    let mut terms: Vec<(f64, Operator)> = states
        .into_iter()
        .map(|(occ, a)| {
            let eps = tau * occ.iter().zip(&levels).map(|(&n, (e, _))| n as f64 * e).sum::<f64>();
            (eps, a)
        })
        .collect();
    terms.sort_by(|x, y| x.0.total_cmp(&y.0));
    let scale = terms.iter().map(|(e, _)| e.abs()).fold(1.0, f64::max);
    let mut merged: Vec<(f64, Operator)> = Vec::new();
    for (e, a) in terms {
        match merged.last_mut() {
            Some((e0, acc)) if (e - *e0).abs() <= DEGENERACY_TOL * scale => *acc += a,
            _ => merged.push((e, a)),
        }
    }
    merged.retain(|(_, a)| opalg::max_norm(a) > 0.0);

    let adj: Vec<Operator> = merged.iter().map(|(_, a)| a.adjoint()).collect();
    let tr: Vec<Operator> = merged.iter().map(|(_, a)| a.transpose()).collect();
    let mut m = opalg::zeros(d * d);
    for (j, (ej, _)) in merged.iter().enumerate() {
        for (l, (el, _)) in merged.iter().enumerate() {
            m += kron(&tr[l], &adj[j]) * c(cauchy_factor(ej - el), 0.0);
        }
    }
    Ok(Some(PocketEvolution {
        map: SuperOperator::from_matrix(m, Picture::Heisenberg)?,
        method: AverageMethod::FrequencyExpansion { terms: merged.len() },
    }))
}

/// `X ↦ Σ_{a,b} Q_a X Q_b e^{−|e_a − e_b|}` over eigenspaces of `h_eff`.
fn spectral_cauchy_map(h_eff: &Operator) -> Result<SuperOperator> {
    let d = h_eff.nrows();
    let (vals, w) = hermitian_eigen(h_eff)?;
    // Cluster the ascending eigenvalues into degenerate blocks.
    let mut blocks: Vec<(f64, Operator)> = Vec::new();
    for (k, &e) in vals.iter().enumerate() {
        let col = w.column(k).into_owned();
        let proj = &col * col.adjoint();
        match blocks.last_mut() {
            Some((e0, q)) if (e - *e0).abs() < DEGENERACY_TOL => *q += proj,
            _ => blocks.push((e, proj)),
        }
    }
    let mut m = opalg::zeros(d * d);
    for (ea, qa) in &blocks {
        for (eb, qb) in &blocks {
            m += kron(&qb.transpose(), qa) * c(cauchy_factor(ea - eb), 0.0);
        }
    }
    SuperOperator::from_matrix(m, Picture::Heisenberg)
}

/// Propagator pieces `exp(−iλτ h)` built from a fixed eigendecomposition.
struct Exponentiator {
    vals: Vec<f64>,
    vecs: Operator,
}

impl Exponentiator {
    fn new(h: &Operator) -> Result<Self> {
        let (vals, vecs) = hermitian_eigen(h)?;
        Ok(Self { vals, vecs })
    }

    fn exp(&self, s: f64) -> Operator {
        let mut scaled = self.vecs.clone();
        for (k, e) in self.vals.iter().enumerate() {
            let f = Complex64::from_polar(1.0, -s * e);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= f);
        }
        scaled * self.vecs.adjoint()
    }
}

fn quadrature_average(
    conj: &[Operator],
    runs: &[(usize, usize)],
    tau: f64,
    opts: QuadratureOptions,
) -> Result<PocketEvolution> {
    let d = conj.first().map(|h| h.nrows()).unwrap_or(0);
    let exps = conj.iter().map(Exponentiator::new).collect::<Result<Vec<_>>>()?;
    let evaluate = |nodes: usize| -> Operator {
        let (xs, ws) = gauss_legendre(nodes);
        let mut acc = opalg::zeros(d * d);
        for (x, w) in xs.iter().zip(ws.iter()) {
            // λ = tan θ, θ = πx/2; the Cauchy weight dλ/(π(1+λ²)) = dθ/π = dx/2.
            let lambda = (std::f64::consts::FRAC_PI_2 * x).tan();
            let mut u = identity(d);
            for &(k, len) in runs {
                u = exps[k].exp(lambda * tau * len as f64) * u;
            }
            acc += kron(&u.transpose(), &u.adjoint()) * c(0.5 * w, 0.0);
        }
        acc
    };
    let mut nodes = opts.initial_nodes.max(1);
    let mut current = evaluate(nodes);
    let mut estimated_error = f64::INFINITY;
    while nodes * 2 <= opts.max_nodes {
        let next_nodes = nodes * 2;
        let next = evaluate(next_nodes);
        estimated_error = max_dist(&next, &current);
        current = next;
        nodes = next_nodes;
        if estimated_error <= opts.tol {
            break;
        }
    }
    Ok(PocketEvolution {
        map: SuperOperator::from_matrix(current, Picture::Heisenberg)?,
        method: AverageMethod::Quadrature { nodes, estimated_error },
    })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` (Newton iteration on the
/// three-term recurrence), nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[n - 1 - i] = x;
        xs[i] = -x;
        ws[n - 1 - i] = w;
        ws[i] = w;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decouple::{flip_x_set, trivial_set, Order};
    use crate::opalg::{expm, sigma_x, sigma_y, sigma_z, ONE, ZERO};
    use crate::semigroup::semigroup_map;

    fn plus_state() -> Operator {
        opalg::ket_bra(&[c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)])
    }

    fn qubit(gamma: f64) -> SpectralModel {
        SpectralModel::diagonal(&[gamma, -gamma], plus_state()).unwrap()
    }

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let (xs, ws) = gauss_legendre(7);
        assert!((ws.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫ x^12 = 2/13, degree 12 ≤ 2·7 − 1.
        let q: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(12)).sum();
        assert!((q - 2.0 / 13.0).abs() < 1e-14);
        let (xs, ws) = gauss_legendre(129);
        assert!((ws.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert!(xs[64].abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let bad = vec![
            Level {
                energy: 1.0,
                projector: opalg::matrix_unit(2, 0, 0),
            },
            Level {
                energy: 0.0,
                projector: opalg::matrix_unit(2, 0, 0),
            },
        ];
        assert!(matches!(
            SpectralModel::new(bad, plus_state()),
            Err(Error::InvalidSpectralModel(_))
        ));
        let incomplete = vec![Level {
            energy: 1.0,
            projector: opalg::matrix_unit(2, 0, 0),
        }];
        assert!(SpectralModel::new(incomplete, plus_state()).is_err());
        assert!(SpectralModel::diagonal(&[1.0, 0.0], identity(2)).is_err());
        assert!(SpectralModel::new(vec![], plus_state()).is_err());
    }

    #[test]
    fn semigroup_basics() {
        let sm = qubit(0.7);
        assert_eq!(cauchy_semigroup(&sm, 0.0).unwrap().matrix(), &identity(4));
        assert!(cauchy_semigroup(&sm, -0.1).is_err());
        let phi = cauchy_semigroup(&sm, 0.9).unwrap();
        assert_eq!(phi.apply(&identity(2)), identity(2));
        let x = Operator::from_row_slice(2, 2, &[c(1., 0.), c(2., 1.), c(-3., 0.5), c(4., 0.)]);
        let out = phi.apply(&x);
        let f = (-2.0 * 0.7 * 0.9f64).exp();
        assert!((out[(0, 1)] - x[(0, 1)] * f).norm() < 1e-15);
        assert!((out[(1, 0)] - x[(1, 0)] * f).norm() < 1e-15);
        assert_eq!(out[(0, 0)], x[(0, 0)]);
    }

    #[test]
    fn semigroup_matches_generator_exponential() {
        let sm = SpectralModel::diagonal(&[1.0, 0.0, -0.4], opalg::matrix_unit(3, 0, 0)).unwrap();
        let gen = cauchy_generator(&sm);
        for t in [0.1, 0.8, 2.3] {
            let a = cauchy_semigroup(&sm, t).unwrap();
            let b = semigroup_map(&gen, t).unwrap();
            assert!(a.max_dist(&b) < 1e-11);
        }
        let s = cauchy_semigroup(&sm, 0.4)
            .unwrap()
            .compose(&cauchy_semigroup(&sm, 0.7).unwrap())
            .unwrap();
        assert!(s.max_dist(&cauchy_semigroup(&sm, 1.1).unwrap()) < 1e-15);
    }

    #[test]
    fn degenerate_levels_are_decoherence_free() {
        let sm = SpectralModel::diagonal(&[0.5, 0.5 + 1e-14, -1.0], opalg::matrix_unit(3, 2, 2)).unwrap();
        let out = cauchy_semigroup(&sm, 3.0).unwrap().apply(&opalg::matrix_unit(3, 0, 1));
        assert_eq!(out[(0, 1)], ONE);
    }

    #[test]
    fn mc_trivial_cases() {
        let sm = qubit(1.0);
        let est = mc_cauchy_oracle(&sm, 0.5, &identity(2), 1000, 7).unwrap();
        assert!((est.mean - ONE).norm() < 1e-14);
        assert!(est.std_err < 1e-14);
        let x = sigma_x() + sigma_y() * c(0.3, 0.0);
        let est = mc_cauchy_oracle(&sm, 0.0, &x, 100, 7).unwrap();
        let direct = (sm.rho() * &x).trace();
        assert!((est.mean - direct).norm() < 1e-14);
        assert!(mc_cauchy_oracle(&sm, 0.5, &x, 0, 7).is_err());
    }

    #[test]
    fn mc_plus_state_coherence() {
        let est = mc_cauchy_oracle(&qubit(1.0), 0.5, &sigma_x(), 100_000, 2024).unwrap();
        let target = (-1.0f64).exp();
        assert!((est.mean - c(target, 0.0)).norm() <= 3.0 * est.std_err, "{est:?}");
        // Reproducible from the seed.
        assert_eq!(
            est,
            mc_cauchy_oracle(&qubit(1.0), 0.5, &sigma_x(), 100_000, 2024).unwrap()
        );
    }

    #[test]
    fn kernels_reduce_to_one_point_function() {
        let sm = SpectralModel::diagonal(&[1.0, 0.0, -1.0], random_state3()).unwrap();
        let x = random_op3(3);
        let t = 0.6;
        let w = (sm.rho() * cauchy_semigroup(&sm, t).unwrap().apply(&x)).trace();
        let a = two_time_kernel(&sm, &identity(3), &x, t, 0.0).unwrap();
        let b = markov_two_time(&sm, &identity(3), &x, t, 0.0).unwrap();
        assert!((a - w).norm() < 1e-14 && (b - w).norm() < 1e-14);
    }

    #[test]
    fn qubit_kernels_coincide() {
        let sm = SpectralModel::diagonal(&[0.8, -0.3], random_state2()).unwrap();
        let (y, x) = (random_op2(1), random_op2(2));
        for (t, h) in [(0.2, 0.5), (1.0, 1.0), (2.0, 0.1)] {
            let a = two_time_kernel(&sm, &y, &x, t, h).unwrap();
            let b = markov_two_time(&sm, &y, &x, t, h).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn qutrit_single_term_factors() {
        // Only (n, m, r) = (0, 2, 1) survives: ρ = |ψ⟩⟨ψ| with ψ ∝ (1, 1, 0),
        // Y† = |0⟩⟨2|, X = |2⟩⟨1| gives tr{ρ P_0 Y† P_2 X P_1} = ρ_10 = 1/2.
        let psi = [c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0), ZERO];
        let sm = SpectralModel::diagonal(&[1.0, 0.0, -1.0], opalg::ket_bra(&psi)).unwrap();
        let y = opalg::matrix_unit(3, 2, 0);
        let x = opalg::matrix_unit(3, 2, 1);
        let a = two_time_kernel(&sm, &y, &x, 1.0, 1.0).unwrap();
        let b = markov_two_time(&sm, &y, &x, 1.0, 1.0).unwrap();
        assert!((a - c(0.5, 0.0)).norm() < 1e-15);
        assert!((b - c(0.5 * (-2.0f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn markov_two_time_matches_regression_formula() {
        let sm = SpectralModel::diagonal(&[1.0, 0.0, -1.0], random_state3()).unwrap();
        let (y, x) = (random_op3(5), random_op3(6));
        let gen = cauchy_generator(&sm);
        let (t, h) = (0.4, 0.9);
        let via_semigroup = crate::semigroup::markov_kernel(
            &gen,
            sm.rho(),
            &[t, t + h],
            &[y.clone(), identity(3)],
            &[identity(3), x.clone()],
        )
        .unwrap();
        let direct = markov_two_time(&sm, &y, &x, t, h).unwrap();
        assert!((via_semigroup - direct).norm() < 1e-12);
    }

    #[test]
    fn exchange_symmetry_where_it_holds() {
        let sm = SpectralModel::diagonal(&[1.0, 0.0, -1.0], random_state3()).unwrap();
        let (y, x) = (random_op3(8), random_op3(9));
        // Equal-time kernels.
        let a = two_time_kernel(&sm, &y, &x, 0.7, 0.0).unwrap();
        let b = two_time_kernel(&sm, &x, &y, 0.7, 0.0).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
        // States commuting with H.
        let diag_state =
            Operator::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.5, 0.), c(0.3, 0.), c(0.2, 0.)]));
        let sm = sm.with_rho(diag_state).unwrap();
        let a = two_time_kernel(&sm, &y, &x, 0.7, 0.4).unwrap();
        let b = two_time_kernel(&sm, &x, &y, 0.7, 0.4).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
    }

    #[test]
    fn negative_times_rejected() {
        let sm = qubit(1.0);
        assert!(two_time_kernel(&sm, &sigma_x(), &sigma_x(), -1.0, 0.0).is_err());
        assert!(markov_two_time(&sm, &sigma_x(), &sigma_x(), 0.0, -1.0).is_err());
    }

    #[test]
    fn flip_kicks_cancel_exactly() {
        let sm = qubit(1.3);
        for (tau, n) in [(0.1, 2), (0.01, 100), (0.37, 64)] {
            let s = DDScheme::new(flip_x_set(), Order::Cyclic, tau).unwrap();
            let ev = dd_pocket_evolution(&sm, &s, n).unwrap();
            assert_eq!(ev.method, AverageMethod::ClosedForm);
            assert!(ev.map.max_dist(&SuperOperator::identity(2, Picture::Heisenberg)) <= 1e-12);
        }
    }

    #[test]
    fn no_kicks_reproduces_semigroup() {
        let sm = SpectralModel::diagonal(&[1.0, 0.2, -0.5], random_state3()).unwrap();
        let s = DDScheme::new(trivial_set(3), Order::Cyclic, 0.05).unwrap();
        let ev = dd_pocket_evolution(&sm, &s, 20).unwrap();
        assert!(ev.map.max_dist(&cauchy_semigroup(&sm, 1.0).unwrap()) < 1e-13);
    }

    #[test]
    fn expansion_agrees_with_closed_form() {
        let sm = SpectralModel::diagonal(&[1.0, 0.2, -0.5], random_state3()).unwrap();
        for (set, n) in [(trivial_set(3), 20), (vec![identity(3), cyclic_shift3()], 9)] {
            let s = DDScheme::new(set, Order::Cyclic, 0.05).unwrap();
            let exact = dd_pocket_evolution(&sm, &s, n).unwrap();
            let exp = dd_pocket_evolution_with(&sm, &s, n, Strategy::FrequencyExpansion).unwrap();
            assert!(matches!(exp.method, AverageMethod::FrequencyExpansion { .. }));
            assert!(exp.map.max_dist(&exact.map) < 1e-13);
        }
    }

    #[test]
    fn quadrature_error_estimate_is_honest() {
        // The tan substitution leaves an oscillating endpoint, so Gauss–Legendre
        // converges algebraically; the doubling estimate must bound the error.
        let sm = qubit(1.0);
        let s = DDScheme::new(trivial_set(2), Order::Cyclic, 0.01).unwrap();
        let exact = dd_pocket_evolution(&sm, &s, 10).unwrap();
        let quad = dd_pocket_evolution_with(&sm, &s, 10, Strategy::Quadrature(QuadratureOptions::default())).unwrap();
        let AverageMethod::Quadrature { estimated_error, .. } = quad.method else {
            panic!("expected quadrature");
        };
        let err = quad.map.max_dist(&exact.map);
        assert!(
            err <= estimated_error && err < 1e-4,
            "err {err}, estimate {estimated_error}"
        );
    }

    #[test]
    fn non_commuting_average_matches_monte_carlo() {
        // H = (σ_x + σ_z)/√2 under {I, σ_x}.
        let r = 0.5f64.sqrt();
        let levels = {
            let (vals, w) = hermitian_eigen(&((sigma_x() + sigma_z()) * c(r, 0.0))).unwrap();
            (0..2)
                .map(|k| {
                    let col = w.column(k).into_owned();
                    Level {
                        energy: vals[k],
                        projector: &col * col.adjoint(),
                    }
                })
                .collect::<Vec<_>>()
        };
        let sm = SpectralModel::new(levels, plus_state()).unwrap();
        let s = DDScheme::new(flip_x_set(), Order::Cyclic, 0.1).unwrap();
        let ev = dd_pocket_evolution(&sm, &s, 5).unwrap();
        assert!(matches!(ev.method, AverageMethod::FrequencyExpansion { .. }));
        let quad = dd_pocket_evolution_with(&sm, &s, 5, Strategy::Quadrature(QuadratureOptions::default())).unwrap();
        let AverageMethod::Quadrature { estimated_error, .. } = quad.method else {
            panic!("expected quadrature");
        };
        assert!(quad.map.max_dist(&ev.map) <= estimated_error.max(1e-10));

        // Monte-Carlo over λ with explicit matrix exponentials.
        let h = sm.hamiltonian();
        let conj: Vec<Operator> = s.kicks().iter().map(|v| v.adjoint() * &h * v).collect();
        let cauchy = Cauchy::new(0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = sigma_y();
        let samples = 20_000;
        let mut vals = Vec::with_capacity(samples);
        for _ in 0..samples {
            let lambda: f64 = cauchy.sample(&mut rng);
            let mut u = identity(2);
            for &k in &s.sequence(5) {
                u = expm(&(&conj[k] * c(0.0, -lambda * 0.1))).unwrap() * u;
            }
            vals.push((sm.rho() * u.adjoint() * &x * &u).trace());
        }
        let n = samples as f64;
        let mean: Complex64 = vals.iter().sum::<Complex64>() / n;
        let var: f64 = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let val = (sm.rho() * ev.map.apply(&x)).trace();
        assert!((val - mean).norm() <= 4.0 * se, "expansion {val}, mc {mean} ± {se}");
    }

    fn cyclic_shift3() -> Operator {
        let mut p = opalg::zeros(3);
        for i in 0..3 {
            p[((i + 1) % 3, i)] = c(1.0, 0.0);
        }
        p
    }

    fn random_state2() -> Operator {
        let a = random_op2(42);
        let p = &a * a.adjoint();
        let tr = p.trace();
        p / tr
    }

    fn random_state3() -> Operator {
        let a = random_op3(42);
        let p = &a * a.adjoint();
        let tr = p.trace();
        p / tr
    }

    fn random_op2(seed: u64) -> Operator {
        pseudo_random(2, seed)
    }

    fn random_op3(seed: u64) -> Operator {
        pseudo_random(3, seed)
    }

    fn pseudo_random(d: usize, seed: u64) -> Operator {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Operator::from_fn(d, d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }
}
