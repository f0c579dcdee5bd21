//! Standard models, kick sets and test catalogs shared by the tests and the
//! CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::opalg::{
    c, hermitian_eigen, matrix_unit, sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z, zeros, Operator,
};
use crate::pocket::{Level, SpectralModel};
use crate::semigroup::LindbladModel;

/// Pure dephasing, `L = √γ σ_z`, `H = 0`.
pub fn dephasing(gamma: f64) -> LindbladModel {
    coupled(sigma_z(), gamma)
}

/// Amplitude damping, `L = √γ σ₋`, `H = 0`.
pub fn damping(gamma: f64) -> LindbladModel {
    coupled(sigma_minus(), gamma)
}

/// Pumping, `L = √γ σ₊`, `H = 0`.
pub fn pumping(gamma: f64) -> LindbladModel {
    coupled(sigma_plus(), gamma)
}

fn coupled(l: Operator, gamma: f64) -> LindbladModel {
    LindbladModel::new(zeros(2), vec![l * c(gamma.sqrt(), 0.0)]).expect("qubit model is valid")
}

/// `H_sys = γ σ_z` randomized by a Cauchy variable; its semigroup is the
/// same dephasing semigroup as [`dephasing`]`(γ)`.
pub fn shallow_pocket(gamma: f64, rho: Operator) -> Result<SpectralModel> {
    SpectralModel::diagonal(&[gamma, -gamma], rho)
}

/// `|+⟩⟨+|`.
pub fn plus_state() -> Operator {
    Operator::from_element(2, 2, c(0.5, 0.0))
}

/// Matrix with entries uniform in the unit square of ℂ.
pub fn random_operator(d: usize, rng: &mut impl Rng) -> Operator {
    Operator::from_fn(d, d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> Operator {
    let a = random_operator(d, rng);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// Full-rank density matrix `AA† / tr(AA†)`.
pub fn random_density(d: usize, rng: &mut impl Rng) -> Operator {
    let a = random_operator(d, rng);
    let p = &a * a.adjoint();
    let tr = p.trace();
    p / tr
}

/// Model with random Hermitian `H` and `n` random collapse operators.
pub fn random_model(d: usize, n: usize, rng: &mut impl Rng) -> LindbladModel {
    let h = random_hermitian(d, rng);
    let ls = (0..n).map(|_| random_operator(d, rng)).collect();
    LindbladModel::new(h, ls).expect("random model is valid")
}

/// Spectral model of a Hermitian matrix, one level per eigenvector.
pub fn spectral_from_hamiltonian(h: &Operator, rho: Operator) -> Result<SpectralModel> {
    let (vals, w) = hermitian_eigen(h)?;
    let levels = vals
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let col = w.column(k).into_owned();
            Level {
                energy: e,
                projector: &col * col.adjoint(),
            }
        })
        .collect();
    SpectralModel::new(levels, rho)
}

/// One point of the Monte-Carlo validation catalog.
#[derive(Debug, Clone)]
pub struct McCase {
    pub name: &'static str,
    pub model: SpectralModel,
    pub t: f64,
    pub x: Operator,
}

/// Ten `(model, t, X)` cases covering qubits, degenerate and
/// non-degenerate qutrits, a four-level system and a non-diagonal
/// eigenbasis.
pub fn mc_catalog() -> Vec<McCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let plus = plus_state();
    let qubit = shallow_pocket(1.0, plus.clone()).expect("valid");
    let qutrit = SpectralModel::diagonal(&[1.0, 0.0, -1.0], random_density(3, &mut rng)).expect("valid");
    let degenerate = SpectralModel::diagonal(&[0.7, 0.7, -0.4], random_density(3, &mut rng)).expect("valid");
    let four = SpectralModel::diagonal(&[1.5, 0.3, -0.2, -2.0], random_density(4, &mut rng)).expect("valid");
    let rotated_h = random_hermitian(3, &mut rng);
    let rotated = spectral_from_hamiltonian(&rotated_h, random_density(3, &mut rng)).expect("valid");
    let x3 = random_operator(3, &mut rng);
    let x4 = random_operator(4, &mut rng);
    let case = |name, model: &SpectralModel, t, x| McCase {
        name,
        model: model.clone(),
        t,
        x,
    };
    vec![
        case("qubit sx t=0.5", &qubit, 0.5, sigma_x()),
        case("qubit sy t=1", &qubit, 1.0, sigma_y()),
        case("qubit sz t=2", &qubit, 2.0, sigma_z()),
        case(
            "qubit E01 t=0.1",
            &qubit.with_rho(random_density(2, &mut rng)).expect("valid"),
            0.1,
            matrix_unit(2, 0, 1),
        ),
        case("qutrit E02 t=0.3", &qutrit, 0.3, matrix_unit(3, 0, 2)),
        case("qutrit random t=1", &qutrit, 1.0, x3.clone()),
        case("degenerate qutrit t=0.8", &degenerate, 0.8, x3.clone()),
        case("four-level t=0.25", &four, 0.25, x4.clone()),
        case("four-level t=1.5", &four, 1.5, x4),
        case("rotated qutrit t=0.6", &rotated, 0.6, x3),
    ]
}

/// Times used for both `t` and `h` in the two-time kernel catalog.
pub const KERNEL_TIMES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// `Y`, `X` operators for the kernel catalog: all matrix units plus one
/// fixed random operator.
pub fn kernel_operators(d: usize) -> Vec<Operator> {
    let mut ops: Vec<Operator> = (0..d).flat_map(|i| (0..d).map(move |j| matrix_unit(d, i, j))).collect();
    ops.push(random_operator(d, &mut ChaCha8Rng::seed_from_u64(7 + d as u64)));
    ops
}

/// Qutrit `E = (1, 0, −1)` with a generic full-rank state; its middle level
/// lies strictly between the outer ones.
pub fn qutrit_witness() -> SpectralModel {
    let rho = random_density(3, &mut ChaCha8Rng::seed_from_u64(3));
    SpectralModel::diagonal(&[1.0, 0.0, -1.0], rho).expect("valid")
}

/// Two-level instances for the kernel comparison.
pub fn qubit_instances() -> Vec<SpectralModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut out = vec![
        shallow_pocket(1.0, plus_state()).expect("valid"),
        shallow_pocket(0.3, random_density(2, &mut rng)).expect("valid"),
        SpectralModel::diagonal(&[2.0, 0.5], random_density(2, &mut rng)).expect("valid"),
    ];
    let h = random_hermitian(2, &mut rng);
    out.push(spectral_from_hamiltonian(&h, random_density(2, &mut rng)).expect("valid"));
    out
}

/// Largest `|two_time_kernel − markov_two_time|` over the kernel catalog.
pub fn max_kernel_gap(sm: &SpectralModel) -> Result<f64> {
    let ops = kernel_operators(sm.dim());
    let mut worst: f64 = 0.0;
    for y in &ops {
        for x in &ops {
            for &t in &KERNEL_TIMES {
                for &h in &KERNEL_TIMES {
                    let a = crate::pocket::two_time_kernel(sm, y, x, t, h)?;
                    let b = crate::pocket::markov_two_time(sm, y, x, t, h)?;
                    worst = worst.max((a - b).norm());
                }
            }
        }
    }
    Ok(worst)
}
