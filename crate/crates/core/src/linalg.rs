//! Dense complex linear algebra on small Hermitian operators.
//!
//! All matrices are `nalgebra::DMatrix<Complex64>`. Bipartite operators on
//! `X ⊗ Y` use the index convention `(i_x, i_y) ↦ i_x · dim_y + i_y`, which is
//! also the convention of [`DMatrix::kronecker`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, mismatch, Error, Result};

/// Dense complex matrix.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

/// Hermiticity tolerance accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Which factor of a bipartite system to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Eigen-data of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// `V diag(f(μ)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let w = f(self.eigenvalues[k]);
            if w == 0.0 {
                continue;
            }
            let col = v.column(k);
            for j in 0..n {
                let cj = col[j].conj() * w;
                for i in 0..n {
                    out[(i, j)] += col[i] * cj;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }

    /// Matrix elements `⟨v_k| m |v_l⟩` in this eigenbasis.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.adjoint() * m * &self.eigenvectors
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Partial trace of an operator on `X ⊗ Y` with `dims = (dim_x, dim_y)`.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let (dx, dy) = dims;
    let n = dx * dy;
    if m.nrows() != n || m.ncols() != n {
        return Err(mismatch(
            format!("{n}x{n} for dims ({dx}, {dy})"),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    let out = match keep {
        Subsystem::First => ComplexMatrix::from_fn(dx, dx, |i, j| {
            (0..dy).map(|k| m[(i * dy + k, j * dy + k)]).sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(dy, dy, |i, j| {
            (0..dx).map(|k| m[(k * dy + i, k * dy + j)]).sum()
        }),
    };
    Ok(out)
}

/// Largest entry of `|m - m†|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `tr(a b)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|v⟩⟨w|`.
pub fn outer(v: &ComplexVector, w: &ComplexVector) -> ComplexMatrix {
    v * w.adjoint()
}

pub fn projector(v: &ComplexVector) -> ComplexMatrix {
    outer(v, v)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn basis_vector(dim: usize, index: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[index] = ONE;
    v
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
///
/// The input is symmetrized as `(m + m†)/2` before decomposition.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigensystem> {
    if !m.is_square() {
        return Err(mismatch(
            "square matrix",
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(eig_symmetrized(m))
}

/// Decomposition without the Hermiticity check, for matrices that are
/// Hermitian by construction.
pub(crate) fn eig_symmetrized(m: &ComplexMatrix) -> HermitianEigensystem {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigensystem {
            eigenvalues: DVector::zeros(0),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        };
    }
    let sym = hermitian_part(m);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    }
}

/// Result of a positive semi-definiteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// `λ_min(m) ≥ -tol`, reporting `λ_min`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<PsdCheck> {
    let min_eigenvalue = hermitian_eig(m)?.min_eigenvalue();
    Ok(PsdCheck {
        is_psd: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}

/// Natural logarithm on the support: eigenvalues `≤ floor` map to zero.
pub fn log_on_support(m: &ComplexMatrix, floor: f64) -> ComplexMatrix {
    eig_symmetrized(m).map_spectrum(|x| if x > floor { x.ln() } else { 0.0 })
}

/// Unit vector check with tolerance on `|‖v‖ - 1|`.
pub(crate) fn ensure_unit(v: &ComplexVector, tol: f64) -> Result<()> {
    let norm = v.norm();
    if !(norm - 1.0).abs().le(&tol) {
        return Err(invalid(format!("vector norm {norm} is not 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, rng_from_seed};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
            values.len(),
            values.iter().map(|&x| c(x)),
        ))
    }

    #[test]
    fn tensor_of_identities_and_projectors() {
        assert_eq!(tensor_product(&identity(2), &identity(2)), identity(4));
        assert_eq!(
            tensor_product(&diag(&[1.0, 0.0]), &diag(&[1.0, 0.0])),
            diag(&[1.0, 0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn tensor_matches_index_loops() {
        let mut rng = rng_from_seed(7);
        let a = random_hermitian(&mut rng, 2);
        let b = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64 - 0.3, j as f64 + 0.7));
        let t = tensor_product(&a, &b);
        for ia in 0..2 {
            for ja in 0..2 {
                for ib in 0..2 {
                    for jb in 0..2 {
                        let expected = a[(ia, ja)] * b[(ib, jb)];
                        assert_eq!(t[(ia * 2 + ib, ja * 2 + jb)], expected);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_of_products() {
        let rho = diag(&[0.25, 0.75]);
        let sigma = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.6), Complex64::new(0.1, 0.2), Complex64::new(0.1, -0.2), c(0.4)],
        );
        let joint = tensor_product(&rho, &sigma);
        let kept = partial_trace(&joint, (2, 2), Subsystem::Second).unwrap();
        assert!(max_abs_diff(&kept, &sigma) < 1e-15);
        let kept = partial_trace(&joint, (2, 2), Subsystem::First).unwrap();
        assert!(max_abs_diff(&kept, &rho) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = ComplexVector::from_vec(vec![c(s), ZERO, ZERO, c(s)]);
        let bell = projector(&v);
        for keep in [Subsystem::First, Subsystem::Second] {
            let r = partial_trace(&bell, (2, 2), keep).unwrap();
            assert!(max_abs_diff(&r, &identity(2).scale(0.5)) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_matches_double_loop() {
        let mut rng = rng_from_seed(11);
        let m = random_hermitian(&mut rng, 4);
        let r = partial_trace(&m, (2, 2), Subsystem::Second).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ZERO;
                for a in 0..2 {
                    acc += m[(2 * a + i, 2 * a + j)];
                }
                assert!((r[(i, j)] - acc).norm() < 1e-15);
            }
        }
        assert!((trace(&r) - trace(&m)).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = identity(5);
        assert!(matches!(
            partial_trace(&m, (2, 2), Subsystem::First),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eig_of_diagonal_is_sorted() {
        let e = hermitian_eig(&diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues.as_slice(), &[1.0, 2.0, 3.0]);
        let e = hermitian_eig(&identity(4)).unwrap();
        assert!(e.eigenvalues.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn eig_residuals_and_reconstruction() {
        let mut rng = rng_from_seed(3);
        for n in [2, 3, 5, 8] {
            let m = random_hermitian(&mut rng, n);
            let e = hermitian_eig(&m).unwrap();
            for k in 0..n {
                let v = e.eigenvectors.column(k).into_owned();
                let r = &m * &v - v.scale(e.eigenvalues[k]);
                assert!(r.norm() <= 1e-10, "residual {}", r.norm());
            }
            let rec = e.reconstruct();
            assert!(frobenius_norm(&(rec - &m)) <= 1e-10 * frobenius_norm(&m));
            let gram = e.eigenvectors.adjoint() * &e.eigenvectors;
            assert!(max_abs_diff(&gram, &identity(n)) <= 1e-10);
            assert!(e.eigenvalues.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn psd_checks() {
        let r = is_psd(&identity(2), 1e-12).unwrap();
        assert!(r.is_psd);
        assert!((r.min_eigenvalue - 1.0).abs() < 1e-15);
        let r = is_psd(&diag(&[1.0, -1.0]), 1e-12).unwrap();
        assert!(!r.is_psd);
        assert!((r.min_eigenvalue + 1.0).abs() < 1e-15);
    }
}
