//! Randomized invariants across modules.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    apply_triplet_block, build_hamiltonian, cubic_residual, dense_triplet_eigen,
    instantaneous_eigenstate, schmidt_decompose, solve_shifted_eigenvalues, Branch, ModelParams,
    TripletState,
};
use crate::oracles::{adiabatic_propagate, wilson_loop_from_states, wilson_loop_phase};
use crate::phases::{
    circular_distance, composite_phase_constant_theta, nontransition_phases, schmidt_vector_phase,
    subsystem_phase_constant_theta, wrap_phase, zero_coupling_phase, LoopPath,
};

fn branch() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::Minus), Just(Branch::Zero), Just(Branch::Plus)]
}

/// Polar angles kept away from the poles and the equator, where the
/// closed forms switch to limit values.
fn polar() -> impl Strategy<Value = f64> {
    prop_oneof![0.05..FRAC_PI_2 - 0.05, FRAC_PI_2 + 0.05..PI - 0.05]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cubic_roots_are_ordered_eigenvalues(theta in polar(), g in -20.0..20.0f64) {
        let roots = solve_shifted_eigenvalues(theta, g).unwrap().as_array();
        prop_assert!(roots[0] < roots[1] && roots[1] < roots[2]);
        let (vals, _) = dense_triplet_eigen(&ModelParams::new(g, theta, 0.0).unwrap());
        for (x, e) in roots.iter().zip(vals) {
            prop_assert!(cubic_residual(*x, theta, g).abs() < 1e-10 * (1.0 + g.abs()).powi(3));
            prop_assert!((x + g - e).abs() < 1e-9 * (1.0 + g.abs()));
        }
    }

    #[test]
    fn eigenstates_solve_the_block(theta in polar(), phi in 0.0..2.0 * PI, g in -10.0..10.0f64, b in branch()) {
        let params = ModelParams::new(g, theta, phi).unwrap();
        let (sol, psi) = instantaneous_eigenstate(&params, b).unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        let h = apply_triplet_block(&params, &psi.amps);
        for (hv, v) in h.iter().zip(psi.amps) {
            prop_assert!((hv - v * sol.energy).norm() < 1e-10 * (1.0 + g.abs()));
        }
    }

    #[test]
    fn schmidt_data_is_independent_of_azimuth(theta in polar(), phi in 0.0..2.0 * PI, g in 0.05..10.0f64, b in branch()) {
        let at = |ph: f64| {
            let (_, psi) = instantaneous_eigenstate(&ModelParams::new(g, theta, ph).unwrap(), b).unwrap();
            schmidt_decompose(&psi)
        };
        if let (Ok(s0), Ok(s1)) = (at(0.0), at(phi)) {
            prop_assert!((s0.p1 - s1.p1).abs() < 1e-12);
            prop_assert!((s0.p2 - s1.p2).abs() < 1e-12);
            prop_assert!((s0.r - s1.r).abs() < 1e-12);
        }
    }

    #[test]
    fn schmidt_form_rebuilds_random_states(re in prop::array::uniform3(-1.0..1.0f64), im in prop::array::uniform3(-1.0..1.0f64)) {
        let raw = TripletState::new([0, 1, 2].map(|k| Complex64::new(re[k], im[k])));
        prop_assume!(raw.norm_sqr() > 1e-3);
        let psi = raw.normalized();
        if let Ok(s) = schmidt_decompose(&psi) {
            let m = psi.two_qubit_matrix();
            for (i, row) in m.iter().enumerate() {
                for (j, want) in row.iter().enumerate() {
                    let got = s.p1.sqrt() * s.vecs_a[0][i] * s.vecs_b[0][j]
                        + s.p2.sqrt() * s.vecs_a[1][i] * s.vecs_b[1][j];
                    prop_assert!((got - want).norm() < 1e-12);
                }
            }
            prop_assert!((s.p1 + s.p2 - 1.0).abs() < 1e-12);
            prop_assert!(s.p1 >= s.p2);
        }
    }

    #[test]
    fn schmidt_phases_are_antisymmetric(theta in polar(), g in 0.05..50.0f64, b in branch()) {
        if let Ok((g1, g2)) = schmidt_vector_phase(theta, g, b) {
            prop_assert_eq!(g2.to_bits(), (-g1).to_bits());
        }
    }

    #[test]
    fn subsystem_phases_are_permutation_symmetric(theta in polar(), g in 0.05..50.0f64, b in branch()) {
        if let Ok(p) = nontransition_phases(theta, g, b) {
            prop_assert_eq!(p.gamma_a, p.gamma_b);
            let a = subsystem_phase_constant_theta(theta, g, b).unwrap();
            prop_assert_eq!(p.gamma_a.unwrap().unwrapped(), a);
        }
    }

    #[test]
    fn zero_coupling_reproduces_the_berry_formula(theta in 1e-3..FRAC_PI_2 - 1e-3) {
        let got = composite_phase_constant_theta(theta, 0.0, Branch::Plus).unwrap().unwrapped();
        let omega = 2.0 * PI * (1.0 - theta.cos());
        prop_assert!((got + omega).abs() < 1e-12);
        let want = zero_coupling_phase(1, omega).unwrap().gamma_ab.unwrap().unwrapped();
        prop_assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn singlet_row_and_column_vanish(theta in 0.0..PI, phi in 0.0..2.0 * PI, g in -10.0..10.0f64) {
        let h = build_hamiltonian(&ModelParams::new(g, theta, phi).unwrap());
        for k in 0..3 {
            prop_assert_eq!(h[(3, k)], Complex64::new(0.0, 0.0));
            prop_assert_eq!(h[(k, 3)], Complex64::new(0.0, 0.0));
        }
        prop_assert_eq!(h[(3, 3)], Complex64::new(-g, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn wilson_loop_ignores_state_phases(seed in any::<u64>(), theta in polar(), g in 0.0..5.0f64, b in branch()) {
        let path = LoopPath::constant_polar(theta);
        let n = 256;
        let states: Vec<TripletState> = (0..n)
            .map(|j| {
                let (th, ph) = path.point(j as f64 / n as f64);
                let (_, psi) = instantaneous_eigenstate(&ModelParams::new(g, th, ph).unwrap(), b).unwrap();
                psi
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rephased: Vec<TripletState> = states
            .iter()
            .map(|s| s.scaled(Complex64::from_polar(1.0, rng.random_range(-PI..PI))))
            .collect();
        let d = circular_distance(wilson_loop_from_states(&states), wilson_loop_from_states(&rephased));
        prop_assert!(d < 1e-10);
    }
}

#[test]
fn wilson_error_falls_at_second_order() {
    let (theta, g, b) = (FRAC_PI_3, 1.0, Branch::Plus);
    let exact = composite_phase_constant_theta(theta, g, b).unwrap().unwrapped();
    let path = LoopPath::constant_polar(theta);
    let ns = [256usize, 512, 1024, 2048, 4096, 8192];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| circular_distance(wilson_loop_phase(&path, g, b, n).unwrap(), exact))
        .collect();
    // least-squares slope of ln err against ln N
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let order = -num / den;
    assert!(order >= 1.9, "observed order {order}, errors {errs:?}");
}

#[test]
fn slower_loops_drift_less() {
    let path = LoopPath::constant_polar(FRAC_PI_3);
    for g in [0.5, 2.0] {
        let d1 = adiabatic_propagate(&path, g, Branch::Plus, 2000.0, 2_000_000).unwrap().populations_drift;
        let d2 = adiabatic_propagate(&path, g, Branch::Plus, 4000.0, 4_000_000).unwrap().populations_drift;
        assert!(d2 <= 0.5 * d1, "g={g}: drift {d1:e} at T=2000, {d2:e} at T=4000");
    }
}

#[test]
fn zero_branch_schmidt_phase_approaches_pi_monotonically() {
    let gaps: Vec<f64> = [5.0, 10.0, 20.0, 50.0, 100.0]
        .iter()
        .map(|&g| {
            let (_, g2) = schmidt_vector_phase(FRAC_PI_4, g, Branch::approaching_triplet(0, FRAC_PI_4).unwrap()).unwrap();
            circular_distance(g2, PI)
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[4] < 0.05);
}

#[test]
fn strong_coupling_quenches_the_composite_phase() {
    for theta in [FRAC_PI_6, FRAC_PI_3] {
        for b in Branch::ALL {
            let p = composite_phase_constant_theta(theta, 100.0, b).unwrap().unwrapped();
            assert!(wrap_phase(p).abs() < 0.05, "theta={theta} {b}: {p}");
        }
    }
}
