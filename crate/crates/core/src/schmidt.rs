//! Schmidt decomposition of bipartite pure states.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{invalid, mismatch, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, ZERO};

/// `|v⟩ = Σ_k α_k |e_k⟩ ⊗ |f_k⟩` with `α_1 ≥ α_2 ≥ … ≥ 0`.
///
/// `basis_left` holds the `e_k` (first factor) and `basis_right` the `f_k`
/// (second factor) as columns. For a square split both bases are complete.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub basis_left: ComplexMatrix,
    pub basis_right: ComplexMatrix,
    pub dims: (usize, usize),
}

impl SchmidtDecomposition {
    pub fn left(&self, k: usize) -> ComplexVector {
        self.basis_left.column(k).into_owned()
    }

    pub fn right(&self, k: usize) -> ComplexVector {
        self.basis_right.column(k).into_owned()
    }

    /// `Σ_k α_k e_k ⊗ f_k`.
    pub fn reconstruct(&self) -> ComplexVector {
        let (d1, d2) = self.dims;
        let mut v = ComplexVector::zeros(d1 * d2);
        for (k, &a) in self.coefficients.iter().enumerate() {
            for i in 0..d1 {
                for j in 0..d2 {
                    v[i * d2 + j] += self.basis_left[(i, k)] * self.basis_right[(j, k)] * a;
                }
            }
        }
        v
    }

    /// Squared coefficients `α_k²`, the spectrum of either marginal.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|a| a * a).collect()
    }
}

/// Schmidt decomposition of a unit vector on `X ⊗ Y`, `dims = (dim_x, dim_y)`.
///
/// Each `e_k` is rephased so that its largest-magnitude component is real and
/// positive; `f_k` carries the compensating phase.
pub fn schmidt_decompose(v: &ComplexVector, dims: (usize, usize)) -> Result<SchmidtDecomposition> {
    let (d1, d2) = dims;
    if v.len() != d1 * d2 || d1 == 0 || d2 == 0 {
        return Err(mismatch(format!("vector of length {}", d1 * d2), v.len()));
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(invalid(format!("state vector has norm {norm}, expected 1")));
    }
    // v[i·d2 + j] = M[i, j] = Σ_k s_k U[i,k] conj(W[j,k])
    let m = ComplexMatrix::from_fn(d1, d2, |i, j| v[i * d2 + j]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    let r = d1.min(d2);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut coefficients = Vec::with_capacity(r);
    let mut left_cols = Vec::with_capacity(r);
    let mut right_cols = Vec::with_capacity(r);
    for &k in &order {
        coefficients.push(svd.singular_values[k]);
        let mut e: ComplexVector = u.column(k).into_owned();
        let mut f: ComplexVector = DVector::from_iterator(d2, (0..d2).map(|j| v_t[(k, j)]));
        let pivot = e
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(_, z)| z)
            .unwrap_or(ZERO);
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            e *= phase;
            f *= phase.conj();
        }
        left_cols.push(e);
        right_cols.push(f);
    }
    let basis_left = complete_basis(&left_cols, d1);
    let basis_right = complete_basis(&right_cols, d2);
    Ok(SchmidtDecomposition {
        coefficients,
        basis_left,
        basis_right,
        dims,
    })
}

/// Extends orthonormal columns to a full basis of `C^dim` by Gram–Schmidt
/// against the standard basis, in index order.
fn complete_basis(cols: &[ComplexVector], dim: usize) -> ComplexMatrix {
    let mut basis: Vec<ComplexVector> = cols.to_vec();
    let mut candidate = 0;
    while basis.len() < dim && candidate < dim {
        let mut w = crate::linalg::basis_vector(dim, candidate);
        for _ in 0..2 {
            for b in &basis {
                let overlap: Complex64 = b.dotc(&w);
                w -= b * overlap;
            }
        }
        let n = w.norm();
        if n > 1e-6 {
            basis.push(w.unscale(n));
        }
        candidate += 1;
    }
    ComplexMatrix::from_columns(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, identity, max_abs_diff, partial_trace, projector, Subsystem};
    use crate::random::random_pure_state;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn product_vector() {
        let v = basis_vector(2, 0).kronecker(&basis_vector(2, 1));
        let sd = schmidt_decompose(&v, (2, 2)).unwrap();
        assert!((sd.coefficients[0] - 1.0).abs() < 1e-12);
        assert!(sd.coefficients[1].abs() < 1e-12);
        assert!((sd.reconstruct() - &v).norm() < 1e-12);
    }

    #[test]
    fn bell_vector() {
        let mut v = ComplexVector::zeros(4);
        v[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        v[3] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let sd = schmidt_decompose(&v, (2, 2)).unwrap();
        for a in &sd.coefficients {
            assert!((a - FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn random_reconstruction_and_marginal() {
        for seed in 0..50 {
            let v = random_pure_state(9, seed).unwrap();
            let sd = schmidt_decompose(&v, (3, 3)).unwrap();
            let total: f64 = sd.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-10);
            assert!(sd.coefficients.windows(2).all(|w| w[0] >= w[1]));
            assert!((sd.reconstruct() - &v).norm() < 1e-9);
            for basis in [&sd.basis_left, &sd.basis_right] {
                assert!(max_abs_diff(&(basis.adjoint() * basis), &identity(3)) < 1e-10);
            }
            let marginal = partial_trace(&projector(&v), (3, 3), Subsystem::First).unwrap();
            let mut from_sd = ComplexMatrix::zeros(3, 3);
            for (k, w) in sd.weights().iter().enumerate() {
                from_sd += projector(&sd.left(k)).scale(*w);
            }
            assert!(max_abs_diff(&marginal, &from_sd) < 1e-9);
            for k in 0..3 {
                let e = sd.left(k);
                let pivot = e.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
                assert!(pivot.im.abs() < 1e-12 && pivot.re > 0.0);
            }
        }
    }

    #[test]
    fn rectangular_split_is_completed() {
        let v = random_pure_state(6, 3).unwrap();
        let sd = schmidt_decompose(&v, (2, 3)).unwrap();
        assert_eq!(sd.coefficients.len(), 2);
        assert_eq!(sd.basis_right.ncols(), 3);
        assert!(max_abs_diff(&(sd.basis_right.adjoint() * &sd.basis_right), &identity(3)) < 1e-10);
        assert!((sd.reconstruct() - &v).norm() < 1e-9);
    }

    #[test]
    fn rejects_non_unit() {
        let v = ComplexVector::from_element(4, Complex64::new(1.0, 0.0));
        assert!(schmidt_decompose(&v, (2, 2)).is_err());
    }
}
