mod common;

use eacap::entropy::{
    domination_constant, g_factor, k_form, k_form_operator, mutual_information, relative_entropy,
};
use eacap::linalg::{frobenius_norm, identity};
use eacap::random::{density_matrix_with, derive_seed, random_density_matrix, rng_from_seed};
use eacap::DensityMatrix;
use proptest::prelude::*;

fn pair(d: usize, seed: u64) -> (DensityMatrix, DensityMatrix) {
    let rho = random_density_matrix(d, common::random_rank(d, seed), seed).unwrap();
    let tau = random_density_matrix(d, d, derive_seed(seed, 1)).unwrap();
    (rho, tau)
}

#[test]
fn relative_entropy_is_nonnegative_on_1000_pairs() {
    for i in 0..1000u64 {
        let (rho, tau) = pair(2 + (i % 4) as usize, derive_seed(31, i));
        assert!(relative_entropy(&rho, &tau).unwrap().value >= -1e-9);
    }
}

#[test]
fn relative_entropy_vanishes_only_at_equality() {
    for i in 0..200u64 {
        let (_, tau) = pair(3, derive_seed(32, i));
        assert!(relative_entropy(&tau, &tau).unwrap().value.abs() <= 1e-12);
        let (rho, _) = pair(3, derive_seed(33, i));
        if frobenius_norm(&(rho.matrix() - tau.matrix())) > 1e-6 {
            assert!(relative_entropy(&rho, &tau).unwrap().value > 0.0);
        }
    }
}

#[test]
fn k_form_at_maximally_mixed_is_scaled_frobenius() {
    // every kernel entry is 1/μ = d, so K = d‖η‖²
    for d in 2..=5 {
        let tau = DensityMatrix::maximally_mixed(d);
        let rho = random_density_matrix(d, 1, d as u64).unwrap();
        let eta = rho.matrix() - tau.matrix();
        let expected = d as f64 * frobenius_norm(&eta).powi(2);
        let k = k_form(&tau, &eta).unwrap();
        assert!((k - expected).abs() <= 1e-12 * expected.max(1.0));
        // pure ρ: D(ρ‖I/d) = ln d
        let dv = relative_entropy(&rho, &tau).unwrap().value;
        assert!((dv - (d as f64).ln()).abs() <= 1e-10 && dv <= k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn proposition_upper(d in 2usize..=5, seed in any::<u64>()) {
        let (rho, tau) = pair(d, seed);
        let dv = relative_entropy(&rho, &tau).unwrap().value;
        let k = k_form(&tau, &(rho.matrix() - tau.matrix())).unwrap();
        prop_assert!(dv <= k + 1e-9);
        prop_assert!((k - common::k_form_reference(tau.matrix(), &(rho.matrix() - tau.matrix()))).abs() <= 1e-9 * k.max(1.0));
    }

    #[test]
    fn proposition_lower(d in 2usize..=5, seed in any::<u64>()) {
        let (rho, tau) = pair(d, seed);
        let dv = relative_entropy(&rho, &tau).unwrap().value;
        let kf = k_form(&tau, &(rho.matrix() - tau.matrix())).unwrap();
        let k = domination_constant(&rho, &tau).unwrap();
        prop_assert!(g_factor(k).unwrap() * kf <= dv + 1e-9);
        prop_assert!((dv - common::relative_entropy_reference(rho.matrix(), tau.matrix())).abs() <= 1e-9 * dv.max(1.0));
    }

    #[test]
    fn k_form_decreases_in_its_operator(d in 2usize..=5, seed in any::<u64>(), scale in 0.0f64..2.0) {
        let mut rng = rng_from_seed(seed);
        let phi = density_matrix_with(&mut rng, d, d).unwrap().into_matrix();
        let bump = density_matrix_with(&mut rng, d, 1 + (seed % d as u64) as usize).unwrap().into_matrix();
        let psi = &phi + bump.scale(scale);
        let eta = density_matrix_with(&mut rng, d, d).unwrap().into_matrix() - identity(d).unscale(d as f64);
        let k_phi = k_form_operator(&phi, &eta).unwrap();
        let k_psi = k_form_operator(&psi, &eta).unwrap();
        prop_assert!(k_phi >= k_psi - 1e-9 * k_phi.max(1.0));
    }

    #[test]
    fn data_processing(d_in in 2usize..=4, d_out in 2usize..=4, seed in any::<u64>()) {
        let t = common::random_channel(d_in, d_out, seed);
        let (rho, tau) = pair(d_in, derive_seed(seed, 9));
        let before = relative_entropy(&rho, &tau).unwrap().value;
        let after = relative_entropy(&t.apply(&rho).unwrap(), &t.apply(&tau).unwrap()).unwrap().value;
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn mutual_information_is_concave(d_in in 2usize..=3, d_out in 2usize..=3, seed in any::<u64>()) {
        let t = common::random_channel(d_in, d_out, seed);
        let r1 = random_density_matrix(d_in, d_in, derive_seed(seed, 1)).unwrap();
        let r2 = random_density_matrix(d_in, 1 + (seed % d_in as u64) as usize, derive_seed(seed, 2)).unwrap();
        let i1 = mutual_information(&t, &r1).unwrap();
        let i2 = mutual_information(&t, &r2).unwrap();
        for a in [0.25, 0.5, 0.75] {
            let mixed = mutual_information(&t, &r1.mix(&r2, a).unwrap()).unwrap();
            prop_assert!(mixed >= a * i1 + (1.0 - a) * i2 - 1e-8);
        }
    }
}
