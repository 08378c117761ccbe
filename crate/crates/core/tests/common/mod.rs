//! Closed-form oracles and instance generators shared by the integration
//! tests. Nothing here calls the library's entropy or eigen routines.

#![allow(dead_code)]

use eacap::random::{derive_seed, rng_from_seed};
use eacap::{ComplexMatrix, QuantumChannel};
use nalgebra::SymmetricEigen;
use rand::Rng;

/// Shannon entropy in bits.
pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

pub fn h2(x: f64) -> f64 {
    shannon_bits(&[x, 1.0 - x])
}

/// The maximally entangled input is optimal by covariance, and
/// `(id⊗N_p)Φ` has spectrum `(1−3p/4, p/4, p/4, p/4)`, so
/// `C_E = 2 − H(1−3p/4, p/4, p/4, p/4)`.
pub fn depolarizing_ce_bits(p: f64) -> f64 {
    let q = p / 4.0;
    2.0 - shannon_bits(&[1.0 - 3.0 * q, q, q, q])
}

/// Orthogonal pure inputs: outputs have spectrum `(1 − p/2, p/2)` and the
/// barycenter is `I/2`, so `C_H = 1 − H₂(p/2)`.
pub fn depolarizing_ch_bits(p: f64) -> f64 {
    1.0 - h2(p / 2.0)
}

/// Spectrum of a Hermitian matrix straight from nalgebra.
pub fn spectrum(m: &ComplexMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut v: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eig(m: &ComplexMatrix) -> f64 {
    spectrum(m)[0]
}

/// `D(ρ‖τ)` for full-rank `τ` by a dense double sum over both eigenbases:
/// `Σ λ_i ln λ_i − Σ_{i,j} |⟨a_i|b_j⟩|² λ_i ln μ_j`.
pub fn relative_entropy_reference(rho: &ComplexMatrix, tau: &ComplexMatrix) -> f64 {
    let a = SymmetricEigen::new((rho + rho.adjoint()).scale(0.5));
    let b = SymmetricEigen::new((tau + tau.adjoint()).scale(0.5));
    let n = rho.nrows();
    let mut total = 0.0;
    for i in 0..n {
        let l = a.eigenvalues[i].max(0.0);
        if l == 0.0 {
            continue;
        }
        total += l * l.ln();
        for j in 0..n {
            let overlap = a.eigenvectors.column(i).dotc(&b.eigenvectors.column(j)).norm_sqr();
            total -= overlap * l * b.eigenvalues[j].ln();
        }
    }
    total
}

/// `K_τ(η)` for full-rank `τ` from the divided-difference kernel.
pub fn k_form_reference(tau: &ComplexMatrix, eta: &ComplexMatrix) -> f64 {
    let e = SymmetricEigen::new((tau + tau.adjoint()).scale(0.5));
    let rotated = e.eigenvectors.adjoint() * eta * &e.eigenvectors;
    let mu = &e.eigenvalues;
    let n = tau.nrows();
    let mut total = 0.0;
    for k in 0..n {
        for l in 0..n {
            let kernel = if (mu[k] - mu[l]).abs() < 1e-14 * mu[k].abs() {
                1.0 / mu[k]
            } else {
                (mu[k].ln() - mu[l].ln()) / (mu[k] - mu[l])
            };
            total += rotated[(k, l)].norm_sqr() * kernel;
        }
    }
    total
}

/// Random channel with a seed-dependent number of Kraus operators, from the
/// fewest that admit an isometry up to `d_in·d_out`.
pub fn random_channel(d_in: usize, d_out: usize, seed: u64) -> QuantumChannel {
    let mut rng = rng_from_seed(derive_seed(seed, 0xC4A2));
    let n = rng.random_range(d_in.div_ceil(d_out)..=d_in * d_out);
    QuantumChannel::random_with(&mut rng, d_in, d_out, n).expect("valid dimensions")
}

/// Random rank in `1..=dim`.
pub fn random_rank(dim: usize, seed: u64) -> usize {
    rng_from_seed(derive_seed(seed, 0x2A4C)).random_range(1..=dim)
}
