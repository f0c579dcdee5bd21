use proptest::prelude::*;
use qdd_core::catalog::{random_density, random_hermitian, random_model, random_operator};
use qdd_core::decouple::{averaged_dissipation, averaged_generator, group_average, pauli_group, weyl_heisenberg_group};
use qdd_core::opalg::{
    c, expm, identity, is_hermitian, kron, max_dist, max_norm, min_eigenvalue, partial_trace_ancilla, unvectorize,
    vectorize, Operator,
};
use qdd_core::semigroup::{
    cp_check, dissipation, dissipation_explicit, generator_superop, semigroup_map, LindbladModel, Picture,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn scale_of(m: &LindbladModel) -> f64 {
    max_norm(&m.coupling_weight()).max(max_norm(m.h())).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative(seed: u64, da in 1usize..4, db in 1usize..4, dc in 1usize..4) {
        let mut r = rng(seed);
        let (a, b, cc) = (random_operator(da, &mut r), random_operator(db, &mut r), random_operator(dc, &mut r));
        let left = kron(&kron(&a, &b), &cc);
        let right = kron(&a, &kron(&b, &cc));
        prop_assert!(max_dist(&left, &right) < 1e-14);
    }

    #[test]
    fn vec_sandwich_identity(seed: u64, d in 1usize..5) {
        let mut r = rng(seed);
        let (a, x, b) = (random_operator(d, &mut r), random_operator(d, &mut r), random_operator(d, &mut r));
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vectorize(&x);
        prop_assert!((lhs - rhs).camax() < 1e-13);
        prop_assert_eq!(unvectorize(&vectorize(&x)).unwrap(), x);
    }

    #[test]
    fn expm_commutes_with_adjoint(seed: u64, d in 1usize..5, s in 0.01f64..4.0) {
        let m = random_operator(d, &mut rng(seed)) * c(s, 0.0);
        let e = expm(&m).unwrap();
        let e_adj = expm(&m.adjoint()).unwrap();
        prop_assert!(max_dist(&e_adj, &e.adjoint()) <= 1e-12 * max_norm(&e).max(1.0));
    }

    #[test]
    fn expm_of_anti_hermitian_is_unitary(seed: u64, d in 1usize..5, s in 0.01f64..10.0) {
        let h = random_hermitian(d, &mut rng(seed));
        let u = expm(&(h * c(0.0, -s))).unwrap();
        prop_assert!(qdd_core::opalg::is_unitary(&u, 1e-12));
    }

    #[test]
    fn partial_trace_keeps_positivity(seed: u64, d in 1usize..4, m in 1usize..4) {
        let rho = random_density(d * m, &mut rng(seed));
        let red = partial_trace_ancilla(&rho, d, m).unwrap();
        prop_assert!(min_eigenvalue(&red).unwrap() >= -1e-12);
        prop_assert!((red.trace() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn generator_is_unital_and_trace_preserving(seed: u64, d in 1usize..5, n in 0usize..4) {
        let mut r = rng(seed);
        let model = random_model(d, n, &mut r);
        let s = scale_of(&model);
        prop_assert!(max_norm(&model.apply_heisenberg(&identity(d))) <= 1e-12 * s);
        let rho = random_density(d, &mut r);
        prop_assert!(model.apply_schrodinger(&rho).trace().norm() <= 1e-12 * s);
    }

    #[test]
    fn generator_preserves_hermiticity(seed: u64, d in 1usize..5, n in 0usize..4) {
        let mut r = rng(seed);
        let model = random_model(d, n, &mut r);
        let x = random_hermitian(d, &mut r);
        prop_assert!(is_hermitian(&model.apply_heisenberg(&x), 1e-12 * scale_of(&model)));
    }

    #[test]
    fn semigroup_law(seed: u64, d in 1usize..4, n in 0usize..3, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let model = random_model(d, n, &mut rng(seed));
        let gen = generator_superop(&model, Picture::Heisenberg).unwrap();
        let lhs = semigroup_map(&gen, s).unwrap().compose(&semigroup_map(&gen, t).unwrap()).unwrap();
        let rhs = semigroup_map(&gen, s + t).unwrap();
        prop_assert!(lhs.max_dist(&rhs) < 1e-11);
    }

    #[test]
    fn semigroup_is_completely_positive(seed: u64, d in 1usize..4, n in 0usize..4, t in 0.0f64..2.0) {
        let model = random_model(d, n, &mut rng(seed));
        let gen = generator_superop(&model, Picture::Schrodinger).unwrap();
        let report = cp_check(&semigroup_map(&gen, t).unwrap(), 1e-10).unwrap();
        prop_assert!(report.is_cp, "min eigenvalue {}", report.min_eigenvalue);
    }

    #[test]
    fn dissipation_is_positive_and_forms_agree(seed: u64, d in 1usize..5, n in 0usize..4) {
        let mut r = rng(seed);
        let model = random_model(d, n, &mut r);
        let x = random_operator(d, &mut r);
        let a = dissipation(&model, &x).unwrap();
        let b = dissipation_explicit(&model, &x).unwrap();
        let s = scale_of(&model) * max_norm(&x).max(1.0).powi(2);
        prop_assert!(max_dist(&a, &b) <= 1e-12 * s);
        prop_assert!(min_eigenvalue(&b).unwrap() >= -1e-10 * s);
    }

    #[test]
    fn group_average_is_idempotent(seed: u64, d in 1usize..5) {
        let x = random_operator(d, &mut rng(seed));
        let g = weyl_heisenberg_group(d);
        let once = group_average(&g, &x).unwrap();
        let twice = group_average(&g, &once).unwrap();
        prop_assert!(max_dist(&once, &twice) < 1e-13);
        prop_assert!(max_dist(&once, &(identity(d) * (x.trace() / c(d as f64, 0.0)))) < 1e-13);
    }

    #[test]
    fn averaged_dissipation_identity(seed: u64, n in 0usize..3) {
        let mut r = rng(seed);
        let model = random_model(2, n, &mut r);
        let x = random_operator(2, &mut r);
        let kicks = pauli_group();
        let avg = averaged_generator(&model, &kicks).unwrap();
        let lhs = dissipation(&avg.model, &x).unwrap();
        prop_assert!(max_dist(&lhs, &averaged_dissipation(&model, &kicks, &x).unwrap()) <= 1e-11);
        // For sets with v† = ±v the conjugation direction does not matter.
        let mut alt = Operator::zeros(2, 2);
        for v in &kicks {
            let y = v.adjoint() * &x * v;
            alt += v.adjoint() * dissipation(&model, &y).unwrap() * v;
        }
        alt /= c(kicks.len() as f64, 0.0);
        prop_assert!(max_dist(&lhs, &alt) <= 1e-11);
    }

    #[test]
    fn averaging_is_idempotent_on_generators(seed: u64, d in 2usize..4, n in 1usize..3) {
        let model = random_model(d, n, &mut rng(seed));
        let kicks = weyl_heisenberg_group(d);
        let once = averaged_generator(&model, &kicks).unwrap().model;
        let twice = averaged_generator(&once, &kicks).unwrap().model;
        let g1 = generator_superop(&once, Picture::Heisenberg).unwrap();
        let g2 = generator_superop(&twice, Picture::Heisenberg).unwrap();
        prop_assert!(g1.max_dist(&g2) <= 1e-12 * scale_of(&model));
    }

    #[test]
    fn nonzero_coupling_survives_averaging(seed: u64, n in 1usize..4) {
        let model = random_model(2, n, &mut rng(seed));
        let avg = averaged_generator(&model, &pauli_group()).unwrap();
        let g = generator_superop(&avg.model, Picture::Heisenberg).unwrap();
        prop_assert!(max_norm(g.matrix()) > 1e-8);
    }
}

#[test]
fn fifty_random_models_keep_nonzero_averaged_generator() {
    use rand::Rng;
    let mut r = rng(99);
    for _ in 0..50 {
        let n = r.random_range(1..=3);
        let model = random_model(2, n, &mut r);
        let avg = averaged_generator(&model, &pauli_group()).unwrap();
        let g = generator_superop(&avg.model, Picture::Heisenberg).unwrap();
        assert!(max_norm(g.matrix()) > 1e-8);
    }
}
