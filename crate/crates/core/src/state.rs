//! Density matrices.

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    self, eig_symmetrized, hermitian_deviation, identity, is_finite, projector, trace,
    ComplexMatrix, ComplexVector, HermitianEigensystem,
};

/// Hermiticity tolerance (max abs deviation) for a valid state.
pub const STATE_HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues down to `-STATE_PSD_TOL` are accepted as floating-point drift.
pub const STATE_PSD_TOL: f64 = 1e-10;
/// Allowed deviation of the trace from one.
pub const STATE_TRACE_TOL: f64 = 1e-10;

/// A positive semi-definite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps `matrix`. The stored matrix is the Hermitian part
    /// of the input.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidState("empty matrix".into()));
        }
        if !is_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        let dev = hermitian_deviation(&matrix);
        if dev > STATE_HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = trace(&matrix).re;
        if (tr - 1.0).abs() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let min = eig_symmetrized(&matrix).min_eigenvalue();
        if min < -STATE_PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Normalizes a positive semi-definite matrix by its trace.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = trace(&matrix).re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(invalid(format!("cannot normalize matrix with trace {tr}")));
        }
        let hermitian = linalg::hermitian_part(&matrix).unscale(tr);
        Self::new(hermitian)
    }

    /// Wraps a matrix that is a state by construction (e.g. a channel output).
    /// Only Hermitian symmetrization is applied.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: linalg::hermitian_part(&matrix),
        }
    }

    /// `|v⟩⟨v|` for a unit vector `v`.
    pub fn pure(v: &ComplexVector) -> Result<Self> {
        linalg::ensure_unit(v, 1e-10)?;
        Ok(Self::from_trusted(projector(&v.unscale(v.norm()))))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: identity(dim).unscale(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Eigendecomposition with eigenvalues in `[-1e-10, 0)` clamped to zero.
    pub fn eigensystem(&self) -> HermitianEigensystem {
        let mut e = eig_symmetrized(&self.matrix);
        for x in e.eigenvalues.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        e
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_of_product(&self.matrix, &self.matrix).re
    }

    /// Convex combination `a·self + (1-a)·other`.
    pub fn mix(&self, other: &Self, a: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(crate::error::mismatch(self.dim(), other.dim()));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(invalid(format!("mixing weight {a} outside [0, 1]")));
        }
        Ok(Self::from_trusted(
            self.matrix.scale(a) + other.matrix.scale(1.0 - a),
        ))
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_trusted(linalg::tensor_product(&self.matrix, &other.matrix))
    }

    /// If the state is pure within `tol` (`λ_max ≥ 1 - tol`), returns its
    /// vector.
    pub fn pure_vector(&self, tol: f64) -> Option<ComplexVector> {
        let e = self.eigensystem();
        if e.max_eigenvalue() >= 1.0 - tol {
            Some(e.eigenvectors.column(self.dim() - 1).into_owned())
        } else {
            None
        }
    }
}
