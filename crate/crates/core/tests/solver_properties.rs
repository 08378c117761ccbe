mod common;

use eacap::capacity::{entanglement_assisted_capacity, CapacityWitness, SolverSettings};
use eacap::certify::{chain_report, sigma_b, sigma_b_compact, ChainSettings};
use eacap::holevo::holevo_quantity;
use eacap::linalg::max_abs_diff;
use eacap::random::{derive_seed, haar_unitary, random_density_matrix, random_pure_state, rng_from_seed};
use eacap::{schmidt_decompose, DensityMatrix, QuantumChannel};
use proptest::prelude::*;

/// Depolarizing channel on `C^d`: `(id⊗N)Φ` has spectrum
/// `(1 − p + p/d², p/d² ×(d²−1))`, and a pure input goes to
/// `(1 − p + p/d, p/d ×(d−1))` with barycenter `I/d` for a basis ensemble.
fn depolarizing_oracles(d: usize, p: f64) -> (f64, f64) {
    let dd = (d * d) as f64;
    let mut joint = vec![p / dd; d * d];
    joint[0] = 1.0 - p + p / dd;
    let mut out = vec![p / d as f64; d];
    out[0] = 1.0 - p + p / d as f64;
    let log_d = (d as f64).log2();
    (2.0 * log_d - common::shannon_bits(&joint), log_d - common::shannon_bits(&out))
}

#[test]
fn qutrit_depolarizing_matches_closed_forms() {
    let s = SolverSettings::default();
    for p in [0.0, 0.3, 0.7, 1.0, 1.1] {
        let t = QuantumChannel::depolarizing(3, p).unwrap();
        let (ce, ch) = depolarizing_oracles(3, p);
        let got_ce = entanglement_assisted_capacity(&t, &s).unwrap();
        let got_ch = holevo_quantity(&t, &s).unwrap();
        assert!((got_ce.value_bits - ce).abs() <= 1e-4, "p={p}: {} vs {ce}", got_ce.value_bits);
        assert!((got_ch.value_bits - ch).abs() <= 1e-3, "p={p}: {} vs {ch}", got_ch.value_bits);
    }
}

#[test]
fn qubit_capacities_decrease_on_grid() {
    let s = SolverSettings::default();
    let mut last = (f64::INFINITY, f64::INFINITY);
    for i in 0..=20 {
        let t = QuantumChannel::depolarizing(2, i as f64 / 20.0).unwrap();
        let ce = entanglement_assisted_capacity(&t, &s).unwrap().value_bits;
        let ch = holevo_quantity(&t, &s).unwrap().value_bits;
        assert!(ce <= last.0 + 1e-9 && ch <= last.1 + 1e-9);
        last = (ce, ch);
    }
}

#[test]
fn solvers_are_deterministic() {
    let t = common::random_channel(3, 2, 77);
    let s = SolverSettings { seed: 5, ..Default::default() };
    let a = holevo_quantity(&t, &s).unwrap();
    let b = holevo_quantity(&t, &s).unwrap();
    assert_eq!(a.value_nats.to_bits(), b.value_nats.to_bits());
    assert_eq!(a.gap_bound.to_bits(), b.gap_bound.to_bits());
    let c = entanglement_assisted_capacity(&t, &s).unwrap();
    let d = entanglement_assisted_capacity(&t, &s).unwrap();
    assert_eq!(c.value_nats.to_bits(), d.value_nats.to_bits());
    assert_eq!(c.iterations, d.iterations);
}

#[test]
fn donald_minimality_in_chain() {
    for i in 0..40u64 {
        let d = 2 + (i % 2) as usize;
        let t = common::random_channel(d, d, derive_seed(41, i));
        let rho = DensityMatrix::pure(&random_pure_state(d * d, derive_seed(42, i)).unwrap()).unwrap();
        let tau = random_density_matrix(d, d, derive_seed(43, i)).unwrap();
        let r = chain_report(&t, &rho, &tau, &ChainSettings::default()).unwrap();
        assert!(r.est3_rhs <= r.donald_rhs + 1e-9, "instance {i}");
        assert!(r.donald_rhs <= r.est5_rhs + 1e-9, "instance {i}");
    }
}

#[test]
fn degenerate_schmidt_input_still_certifies() {
    // product input: α = (1, 0, 0), so the χ family comes from the completed basis
    let t = common::random_channel(3, 3, 5);
    let a = random_pure_state(3, 1).unwrap();
    let b = random_pure_state(3, 2).unwrap();
    let v = a.kronecker(&b);
    let rho = DensityMatrix::pure(&v).unwrap();
    let r = chain_report(&t, &rho, &DensityMatrix::maximally_mixed(3), &ChainSettings::default()).unwrap();
    assert!(r.monotone_ok, "{:?}", r.links());
    assert!(r.cond1_ok(1e-9));
    assert!(r.eq4_lhs_nats.abs() <= 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn assistance_never_hurts(d_in in 2usize..=3, d_out in 2usize..=3, seed in any::<u64>()) {
        let t = common::random_channel(d_in, d_out, seed);
        let s = SolverSettings::default();
        let ce = entanglement_assisted_capacity(&t, &s).unwrap();
        let ch = holevo_quantity(&t, &s).unwrap();
        prop_assert!(ce.value_nats >= ch.value_nats - 1e-6);
        let min_d = d_in.min(d_out) as f64;
        prop_assert!(ce.value_bits <= 2.0 * min_d.log2() + 1e-6);
        prop_assert!(ch.value_bits <= min_d.log2() + 1e-6);
        prop_assert!(ce.converged && ce.gap_bound <= s.tol);
        if ch.converged {
            prop_assert!(ch.gap_bound <= s.tol);
        }
        let CapacityWitness::Ensemble(e) = &ch.witness else { panic!("ensemble witness") };
        prop_assert!(e.lower_bound_nats <= ch.value_nats + 1e-12);
    }

    #[test]
    fn capacities_ignore_basis_changes(d in 2usize..=3, seed in any::<u64>()) {
        let t = common::random_channel(d, d, seed);
        let mut rng = rng_from_seed(derive_seed(seed, 1));
        let rotated = t.conjugated(&haar_unitary(&mut rng, d), &haar_unitary(&mut rng, d)).unwrap();
        let s = SolverSettings::default();
        let a = entanglement_assisted_capacity(&t, &s).unwrap().value_nats;
        let b = entanglement_assisted_capacity(&rotated, &s).unwrap().value_nats;
        prop_assert!((a - b).abs() <= 2.0 * s.tol);
        let ha = holevo_quantity(&t, &s).unwrap();
        let hb = holevo_quantity(&rotated, &s).unwrap();
        prop_assert!((ha.value_nats - hb.value_nats).abs() <= 2.0 * s.tol + ha.gap_bound + hb.gap_bound);
    }

    #[test]
    fn sigma_b_forms_agree(d in 2usize..=4, d_out in 1usize..=4, seed in any::<u64>()) {
        let t = common::random_channel(d, d_out, seed);
        let v = random_pure_state(d * d, derive_seed(seed, 2)).unwrap();
        let sd = schmidt_decompose(&v, (d, d)).unwrap();
        let a = sigma_b(&t, &sd).unwrap();
        let b = sigma_b_compact(&t, &sd).unwrap();
        prop_assert!(max_abs_diff(a.matrix(), b.matrix()) <= 1e-12);
    }
}
