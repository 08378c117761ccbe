//! Seeded random states, unitaries and isometries.
//!
//! Every sampler draws from a ChaCha8 stream. Per-trial seeds come from
//! [`derive_seed`], so a trial's data depends only on `(master_seed, index)`
//! and never on scheduling.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::state::DensityMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer applied to the pair `(master, index)`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian entry (`E|z|² = 1`).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    // row-major fill so the stream order does not depend on storage order
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim, dim);
    (&g + g.adjoint()).scale(0.5)
}

pub fn pure_state_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    let v = DVector::from_iterator(dim, (0..dim).map(|_| complex_gaussian(rng)));
    let norm = v.norm();
    v.unscale(norm)
}

/// Normalized complex Gaussian vector.
pub fn random_pure_state(dim: usize, seed: u64) -> Result<ComplexVector> {
    if dim == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    Ok(pure_state_vector(&mut rng_from_seed(seed), dim))
}

pub fn density_matrix_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(invalid(format!(
            "need 1 <= rank <= dim, got rank {rank}, dim {dim}"
        )));
    }
    let g = ginibre(rng, dim, rank);
    DensityMatrix::from_unnormalized(&g * g.adjoint())
}

/// `GG†/tr(GG†)` with `G` a `dim × rank` Ginibre matrix.
pub fn random_density_matrix(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    density_matrix_with(&mut rng_from_seed(seed), dim, rank)
}

/// Haar-distributed isometry `rows × cols` (`rows ≥ cols`) from the QR
/// decomposition of a Ginibre matrix, with the phases of `R`'s diagonal
/// absorbed into `Q`.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = ginibre(rng, rows, cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    haar_isometry(rng, dim, dim)
}
