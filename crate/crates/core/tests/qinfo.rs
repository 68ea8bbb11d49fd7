mod common;

use common::{plus_state, qubit, toy_model};
use num_complex::Complex64;
use objectivity::broadcast::{build_sfe_state_for_count, explicit_macro_register_state, explicit_small_state, simulate_controlled};
use objectivity::qinfo::{
    appendix_bound, appendix_bound_clamped, fuchs_lower_bound, holevo_chi, mutual_information, pointer_entropy,
    theorem_bound, EnsembleCQ,
};
use objectivity::qmat::random::{random_density, random_qubit, random_unitary};
use objectivity::qmat::{binary_entropy, gen_overlap, ComplexMatrix, DensityOperator};
use objectivity::scatter::{PhotonBranches, PhotonSource};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn product_state_has_no_mutual_information() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let a = random_density(&mut r, 2);
    let b = random_density(&mut r, 3);
    let i = mutual_information(&a.tensor(&b), &[0]).unwrap();
    assert!(i.abs() < 1e-10, "{i}");
}

#[test]
fn bell_state_carries_two_bits() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi = DensityOperator::pure(&[c(s), c(0.0), c(0.0), c(s)]).unwrap().with_dims(vec![2, 2]).unwrap();
    assert!((mutual_information(&phi, &[0]).unwrap() - 2.0).abs() < 1e-10);
}

#[test]
fn ideal_broadcast_gives_pointer_entropy_to_each_fragment() {
    let p = 0.3;
    let mut m = ComplexMatrix::zeros(8, 8);
    m[(0, 0)] = c(p);
    m[(7, 7)] = c(1.0 - p);
    let rho = DensityOperator::new(m, vec![2, 2, 2]).unwrap();
    let h = binary_entropy(p).unwrap();
    for cut in [[0usize, 1], [0, 2]] {
        let sub = objectivity::qmat::partial_trace(&rho, &cut).unwrap();
        assert!((mutual_information(&sub, &[0]).unwrap() - h).abs() < 1e-12);
    }
    assert!((mutual_information(&rho, &[0]).unwrap() - h).abs() < 1e-12);
}

#[test]
fn missing_cut_is_rejected() {
    let rho = DensityOperator::maximally_mixed(4).with_dims(vec![2, 2]).unwrap();
    assert!(mutual_information(&rho, &[]).is_err());
    assert!(mutual_information(&rho, &[0, 1]).is_err());
    assert!(mutual_information(&rho, &[2]).is_err());
}

#[test]
fn holevo_of_orthogonal_and_identical_encodings() {
    let zero = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
    let one = DensityOperator::diagonal(&[0.0, 1.0]).unwrap();
    let e = EnsembleCQ::new(vec![0.3, 0.7], vec![zero.clone(), one]).unwrap();
    assert!((holevo_chi(&e).unwrap() - binary_entropy(0.3).unwrap()).abs() < 1e-12);
    let e = EnsembleCQ::new(vec![0.3, 0.7], vec![zero.clone(), zero]).unwrap();
    assert!(holevo_chi(&e).unwrap().abs() < 1e-12);
}

#[test]
fn holevo_of_two_pure_states() {
    // Gram eigenvalues (1 ± √(1 − 4p(1−p)(1−|g|²)))/2 with |g|² = 1/2.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = DensityOperator::pure(&[c(1.0), c(0.0)]).unwrap();
    let plus = DensityOperator::pure(&[c(s), c(s)]).unwrap();
    let e = EnsembleCQ::new(vec![0.5, 0.5], vec![zero, plus]).unwrap();
    let l = 0.5 * (1.0 + s);
    let want = binary_entropy(l).unwrap();
    assert!((holevo_chi(&e).unwrap() - want).abs() < 1e-12);
    // python: h((1 + 1/√2)/2)
    assert!((want - 0.600_876_036_692_856_2).abs() < 1e-12, "{want}");
}

#[test]
fn fuchs_bound_is_below_explicit_information() {
    let model = toy_model(0.05);
    let rho = qubit(0.35, Complex64::new(0.2, 0.1));
    let b = PhotonBranches::new(&model, &PhotonSource::Monochromatic).unwrap();
    let b_micro = gen_overlap(
        &DensityOperator::from_matrix(b.block(0, 0)).unwrap(),
        &DensityOperator::from_matrix(b.block(1, 1)).unwrap(),
    )
    .unwrap();
    for n_t in [2usize, 4, 6, 8] {
        for (f, m) in [(0.5, 0.5), (0.5, 0.25), (0.25, 0.25), (0.75, 0.25)] {
            if (n_t as f64 * m).fract() != 0.0 {
                continue;
            }
            let state = explicit_small_state(&model, &PhotonSource::Monochromatic, &rho, f, m, n_t).unwrap();
            let i = mutual_information(&state, &[0]).unwrap();
            let lower = fuchs_lower_bound(0.35, 0.65, b_micro, f * n_t as f64).unwrap();
            assert!(lower <= i + 1e-12, "N={n_t} f={f}: {lower} > {i}");
        }
    }
}

#[test]
fn theorem_bound_dominates_gap_for_random_unitaries() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let n = 8;
    for _ in 0..20 {
        let u1 = random_unitary(&mut r, 2);
        let u2 = random_unitary(&mut r, 2);
        let rho_e = random_qubit(&mut r);
        let rho_s = random_qubit(&mut r);
        let p1 = rho_s.matrix()[(0, 0)].re;
        let hs = pointer_entropy(p1).unwrap();
        let env = PhotonBranches::from_unitaries(u1.clone(), u2.clone(), rho_e.matrix().clone()).unwrap();
        for k in [2usize, 4, 6] {
            let f = k as f64 / n as f64;
            let bound = theorem_bound(&rho_s, &u1, &u2, &rho_e, n, f).unwrap();
            let keep: Vec<bool> = (0..n).map(|j| j < k).collect();
            let sfe = simulate_controlled(&rho_s, &vec![env.clone(); n], &keep).unwrap();
            let gap = (hs - mutual_information(&sfe, &[0]).unwrap()).abs();
            assert!(gap <= bound.value + 1e-10, "f={f}: gap {gap} > {}", bound.value);
        }
    }
}

#[test]
fn theorem_bound_on_sphere_matches_clamped_form() {
    let model = toy_model(0.05);
    let b = PhotonBranches::new(&model, &PhotonSource::Monochromatic).unwrap();
    let rho_e = DensityOperator::from_matrix(b.rho.clone()).unwrap();
    let rho_s = qubit(0.4, Complex64::new(0.1, -0.05));
    let n = 40;
    let f = 0.25;
    let bound = theorem_bound(&rho_s, &b.s1, &b.s2, &rho_e, n, f).unwrap();
    let o = b.cross_trace().norm();
    let cn = 2.0 * rho_s.matrix()[(0, 1)].norm();
    let eps_e = cn * o.powi(n as i32);
    let eps_fe = cn * o.powf((1.0 - f) * n as f64);
    let direct = appendix_bound(eps_e, eps_fe, o, f * n as f64, 0.4, 0.6).unwrap();
    assert!(bound.in_regime);
    assert!((bound.value - direct).abs() < 1e-10, "{} vs {direct}", bound.value);

    let state =
        build_sfe_state_for_count(&model, &PhotonSource::Monochromatic, &rho_s, f, f, n).unwrap();
    let via_state = objectivity::broadcast::bound_at_fraction(&state, f).unwrap();
    assert!((via_state - direct).abs() < 1e-10, "{via_state} vs {direct}");
}

#[test]
fn full_fraction_exceeds_pointer_entropy_for_coherent_input() {
    let model = toy_model(0.05);
    let rho = plus_state();
    let state = build_sfe_state_for_count(&model, &PhotonSource::Monochromatic, &rho, 1.0, 0.5, 400).unwrap();
    let i = mutual_information(&explicit_macro_register_state(&state).unwrap(), &[0]).unwrap();
    assert!(i > 1.0 + 0.9, "{i}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn holevo_never_exceeds_label_entropy(seed in any::<u64>(), k in 2usize..5) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..k).map(|_| r.random_range(0.01..1.0)).collect();
        let total: f64 = w.iter().sum();
        let probs: Vec<f64> = w.iter().map(|x| x / total).collect();
        let states = (0..k).map(|_| random_density(&mut r, 3)).collect();
        let e = EnsembleCQ::new(probs, states).unwrap();
        let chi = holevo_chi(&e).unwrap();
        prop_assert!(chi >= 0.0 && chi <= e.label_entropy() + 1e-10);
        prop_assert!(chi <= 3f64.log2() + 1e-10);
    }

    #[test]
    fn clamped_bound_agrees_inside_regime(e1 in 0.0..0.5f64, e2 in 0.0..0.5f64, b in 0.0..1.0f64, m in 0.0..20.0f64, p in 0.0..1.0f64) {
        let strict = appendix_bound(e1, e2, b, m, p, 1.0 - p).unwrap();
        let clamped = appendix_bound_clamped(e1, e2, b, m, p, 1.0 - p).unwrap();
        prop_assert!(clamped.in_regime);
        prop_assert!((strict - clamped.value).abs() < 1e-14);
    }
}
