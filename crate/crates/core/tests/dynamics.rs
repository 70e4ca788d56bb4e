mod common;

use common::*;
use cyclonet::dynamics::{
    chain_evolve, evolve, matrix_power_spectral, perturb, Coupling, CouplingOrientation,
    PerturbationScenario, So3Example,
};
use cyclonet::linalg::matrix_power_direct;
use cyclonet::spectral::FallbackPolicy;
use cyclonet::{Matrix, State, C64};
use rand::Rng;

#[test]
fn evolve_matches_direct_power() {
    let mut rng = rng(21);
    for _ in 0..20 {
        let net = random_two_qubit_network(&mut rng);
        let psi = random_state(&mut rng, 4);
        let got = evolve(&net, &psi, 999).unwrap();
        let want = apply(&matrix_power_direct(&net.compile().unwrap(), 999), &psi);
        assert!(got.max_abs_diff(&want) < 1e-9);
        assert!((got.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn million_power_of_so3_example() {
    let g = So3Example::new(1.2).unwrap().matrix();
    let spectral = matrix_power_spectral(&g, 1_000_000, FallbackPolicy::Oracle).unwrap();
    assert!(spectral.max_abs_diff(&matrix_power_direct(&g, 1_000_000)) < 1e-7);
}

#[test]
fn table_at_zero_is_identity_and_powers_stay_unitary() {
    let mut rng = rng(22);
    for _ in 0..20 {
        let ex = So3Example::new(rng.gen_range(0.1..3.0)).unwrap();
        assert!(ex.m_power(0.0).max_abs_diff(&Matrix::identity(3)) < 1e-12);
        let m = ex.m_power(rng.gen_range(0..5000) as f64);
        assert!(m.unitarity_residual() < 1e-10);
    }
}

fn scenario(
    rng: &mut impl Rng,
    orientation: CouplingOrientation,
    acyclic: [C64; 2],
    psi: State,
) -> PerturbationScenario<f64> {
    let ex = So3Example::new(rng.gen_range(0.2..3.0)).unwrap();
    PerturbationScenario::new(
        ex.network(),
        Coupling::cnot(orientation),
        acyclic,
        rng.gen_range(0..50),
        rng.gen_range(0..50),
        psi,
    )
    .unwrap()
}

#[test]
fn acyclic_zero_branch_is_unperturbed() {
    let mut rng = rng(23);
    for _ in 0..30 {
        let phi = random_state(&mut rng, 2);
        let psi = random_state(&mut rng, 4);
        let s = scenario(&mut rng, CouplingOrientation::ControlOnAcyclic, [phi[0], phi[1]], psi.clone());
        let out = perturb(&s).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-10);
        let zero_branch = State::from_amplitudes_unchecked(out.amplitudes()[..4].to_vec());
        let want = evolve(&s.net, &psi, (s.n + s.n_prime) as i64).unwrap().scale(phi[0]);
        assert!(zero_branch.max_abs_diff(&want) < 1e-10);
    }
}

#[test]
fn eigenstate_pre_cycles_give_global_phase() {
    let ex = So3Example::new(0.9).unwrap();
    for k in 0..4 {
        let psi = ex.eigenstate(k).unwrap();
        let make = |n| {
            PerturbationScenario::new(
                ex.network(),
                Coupling::cnot(CouplingOrientation::ControlOnAcyclic),
                [C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
                n,
                13,
                psi.clone(),
            )
            .unwrap()
        };
        let a = perturb(&make(0)).unwrap();
        let b = perturb(&make(41)).unwrap();
        assert!(a.fidelity(&b) > 1.0 - 1e-12, "k={k}");
    }
}

#[test]
fn perturbed_psi3_never_returns() {
    let ex = So3Example::new(1.4).unwrap();
    let psi3 = State::basis(4, 0);
    for np in 0..=1000 {
        let s = PerturbationScenario::new(
            ex.network(),
            Coupling::cnot(CouplingOrientation::ControlOnAcyclic),
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            0,
            np,
            psi3.clone(),
        )
        .unwrap();
        let out = perturb(&s).unwrap();
        let cyclic = State::from_amplitudes_unchecked(out.amplitudes()[4..].to_vec());
        assert!(psi3.inner(&cyclic).norm() < 1e-10, "n'={np}");
    }
}

#[test]
fn single_link_chain_is_a_perturbation() {
    let mut rng = rng(24);
    for _ in 0..10 {
        let net = random_two_qubit_network(&mut rng);
        let psi = random_state(&mut rng, 4);
        let phi = random_state(&mut rng, 2);
        let np = rng.gen_range(0..20);
        let chain = chain_evolve(&[net.clone()], [phi[0], phi[1]], &[psi.clone()], np).unwrap();
        let s = PerturbationScenario::new(
            net,
            Coupling::cnot(CouplingOrientation::ControlOnAcyclic),
            [phi[0], phi[1]],
            0,
            np + 1,
            psi,
        )
        .unwrap();
        assert!(chain.max_abs_diff(&perturb(&s).unwrap()) < 1e-10);
    }
}

#[test]
fn chain_without_perturbation_factorizes() {
    let mut rng = rng(25);
    let nets: Vec<_> = (0..3).map(|_| random_two_qubit_network(&mut rng)).collect();
    let states: Vec<_> = (0..3).map(|_| random_state(&mut rng, 4)).collect();
    let np = 7;
    let out = chain_evolve(&nets, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], &states, np).unwrap();
    let mut want = State::basis(2, 0);
    for j in (0..3).rev() {
        want = want.kron(&evolve(&nets[j], &states[j], np as i64 + 3).unwrap());
    }
    assert!(out.max_abs_diff(&want) < 1e-10);
    assert_eq!(out.dim(), 128);
}

#[test]
fn chain_rejects_five_links() {
    let mut rng = rng(26);
    let nets: Vec<_> = (0..5).map(|_| random_two_qubit_network(&mut rng)).collect();
    let states: Vec<_> = (0..5).map(|_| random_state(&mut rng, 4)).collect();
    assert!(chain_evolve(&nets, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], &states, 0).is_err());
}
