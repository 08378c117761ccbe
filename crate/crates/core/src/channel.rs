//! Quantum channels in Kraus form.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::{
    eig_symmetrized, identity, is_finite, max_abs_diff, outer, ComplexMatrix, ComplexVector, ZERO,
};
use crate::random::{haar_isometry, rng_from_seed};
use crate::state::DensityMatrix;

pub mod json;

/// Trace-preservation tolerance for [`QuantumChannel::new`].
pub const TP_TOL: f64 = 1e-10;
/// Complete-positivity tolerance on the normalized Choi spectrum.
pub const CP_TOL: f64 = 1e-10;

/// A completely positive trace-preserving map `B(C^d_in) → B(C^d_out)`,
/// `ρ ↦ Σ_j K_j ρ K_j†`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    /// Validates shapes and `Σ K_j†K_j = I` within [`TP_TOL`].
    pub fn new(d_in: usize, d_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(d_in, d_out, kraus, TP_TOL)
    }

    pub fn with_tolerance(
        d_in: usize,
        d_out: usize,
        kraus: Vec<ComplexMatrix>,
        tp_tol: f64,
    ) -> Result<Self> {
        if d_in == 0 || d_out == 0 {
            return Err(invalid("channel dimensions must be at least 1"));
        }
        if kraus.is_empty() {
            return Err(invalid("a channel needs at least one Kraus operator"));
        }
        for (index, k) in kraus.iter().enumerate() {
            if k.nrows() != d_out || k.ncols() != d_in {
                return Err(Error::KrausShape {
                    index,
                    rows: k.nrows(),
                    cols: k.ncols(),
                    d_out,
                    d_in,
                });
            }
            if !is_finite(k) {
                return Err(Error::NonFinite);
            }
        }
        let channel = Self { d_in, d_out, kraus };
        let dev = channel.tp_deviation();
        if dev > tp_tol {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(channel)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    /// `max |Σ K_j†K_j − I|`.
    pub fn tp_deviation(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            sum += k.adjoint() * k;
        }
        max_abs_diff(&sum, &identity(self.d_in))
    }

    /// `Σ_j K_j X K_j†` for an arbitrary operator `X` on the input.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_input(x)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_input(rho.matrix())?;
        Ok(DensityMatrix::from_trusted(self.apply_unchecked(rho.matrix())))
    }

    /// Heisenberg-picture map `Y ↦ Σ_j K_j† Y K_j`.
    pub fn adjoint_apply(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            out += k.adjoint() * y * k;
        }
        out
    }

    /// Output of the complementary channel on the Kraus-index environment:
    /// `[T^c(X)]_{ij} = tr(K_i X K_j†)`.
    pub fn complementary_apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = self.kraus.len();
        let kx: Vec<ComplexMatrix> = self.kraus.iter().map(|k| k * x).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            // tr(K_i X K_j†) = Σ_{a,b} (K_i X)[a,b] conj(K_j[a,b])
            kx[i]
                .iter()
                .zip(self.kraus[j].iter())
                .map(|(p, q)| p * q.conj())
                .sum()
        })
    }

    /// Adjoint of [`Self::complementary_apply`]: `Y ↦ Σ_{ij} Y_{ji} K_j†K_i`.
    pub fn complementary_adjoint(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let n = self.kraus.len();
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for i in 0..n {
            for j in 0..n {
                let c = y[(j, i)];
                if c == ZERO {
                    continue;
                }
                out += (self.kraus[j].adjoint() * &self.kraus[i]) * c;
            }
        }
        out
    }

    /// `(id_{A'} ⊗ T)` applied to an operator on `A' ⊗ A` with `d_{A'} = d_aux`.
    pub fn apply_extended_operator(&self, m: &ComplexMatrix, d_aux: usize) -> Result<ComplexMatrix> {
        let n = d_aux * self.d_in;
        if m.nrows() != n || m.ncols() != n {
            return Err(mismatch(
                format!("{n}x{n} operator on A'⊗A"),
                format!("{}x{}", m.nrows(), m.ncols()),
            ));
        }
        let db = self.d_out;
        let mut out = ComplexMatrix::zeros(d_aux * db, d_aux * db);
        for i in 0..d_aux {
            for j in 0..d_aux {
                let block = m.view((i * self.d_in, j * self.d_in), (self.d_in, self.d_in));
                let image = self.apply_unchecked(&block.into_owned());
                out.view_mut((i * db, j * db), (db, db)).copy_from(&image);
            }
        }
        Ok(out)
    }

    /// `(id_{A'} ⊗ T)ρ_{A'A}` with `d_{A'} = d_in`.
    pub fn apply_extended(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let m = self.apply_extended_operator(rho.matrix(), self.d_in)?;
        Ok(DensityMatrix::from_trusted(m))
    }

    /// Normalized Choi state `(id ⊗ T)|Φ⟩⟨Φ|`, `|Φ⟩ = Σ_i |ii⟩/√d_in`.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.d_in;
        let mut phi = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                phi[(i * d + i, j * d + j)] = Complex64::new(1.0 / d as f64, 0.0);
            }
        }
        let m = self
            .apply_extended_operator(&phi, d)
            .expect("maximally entangled state has matching dimensions");
        ChoiMatrix {
            state: DensityMatrix::from_trusted(m),
            d_in: d,
            d_out: self.d_out,
        }
    }

    /// Kraus family from the normalized Choi state, via its eigendecomposition.
    /// Eigenvalues below `1e-14` are dropped.
    pub fn from_choi(choi: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        let n = d_in * d_out;
        if choi.nrows() != n || choi.ncols() != n {
            return Err(mismatch(format!("{n}x{n} Choi matrix"), choi.nrows()));
        }
        let e = eig_symmetrized(choi);
        if e.min_eigenvalue() < -CP_TOL {
            return Err(Error::NotCompletelyPositive(e.min_eigenvalue()));
        }
        let mut kraus = Vec::new();
        for m in (0..n).rev() {
            let lambda = e.eigenvalues[m];
            if lambda <= 1e-14 {
                continue;
            }
            let scale = (lambda * d_in as f64).sqrt();
            let v = e.eigenvectors.column(m);
            kraus.push(ComplexMatrix::from_fn(d_out, d_in, |b, a| v[a * d_out + b] * scale));
        }
        Self::new(d_in, d_out, kraus)
    }

    /// Identity channel on `C^d`.
    pub fn identity(d: usize) -> Result<Self> {
        Self::new(d, d, vec![identity(d)])
    }

    /// Replacement channel `φ ↦ tr(φ)·σ` realized as `{√λ_r |g_r⟩⟨i|}`.
    pub fn replacement(sigma: &DensityMatrix, d_in: usize) -> Result<Self> {
        let e = sigma.eigensystem();
        let d_out = sigma.dim();
        let mut kraus = Vec::new();
        for r in (0..d_out).rev() {
            let lambda = e.eigenvalues[r];
            if lambda <= 0.0 {
                continue;
            }
            let g: ComplexVector = e.eigenvectors.column(r).into_owned();
            for i in 0..d_in {
                let basis = crate::linalg::basis_vector(d_in, i);
                kraus.push(outer(&g, &basis).scale(lambda.sqrt()));
            }
        }
        Self::new(d_in, d_out, kraus)
    }

    /// Upper end of the completely positive range of the depolarizing
    /// parameter, `d²/(d²−1)`.
    pub fn depolarizing_max_p(d: usize) -> f64 {
        let d2 = (d * d) as f64;
        d2 / (d2 - 1.0)
    }

    /// `N_p(ρ) = (1−p)ρ + p·tr(ρ)·I/d`, valid for `0 ≤ p ≤ d²/(d²−1)`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        if d < 2 {
            return Err(invalid(format!("depolarizing channel needs d >= 2, got {d}")));
        }
        let p_max = Self::depolarizing_max_p(d);
        if !(0.0..=p_max).contains(&p) {
            return Err(invalid(format!(
                "depolarizing parameter {p} outside the completely positive range [0, {p_max}]"
            )));
        }
        let n = d * d;
        let mut choi = ComplexMatrix::identity(n, n).scale(p / n as f64);
        for i in 0..d {
            for j in 0..d {
                choi[(i * d + i, j * d + j)] += Complex64::new((1.0 - p) / d as f64, 0.0);
            }
        }
        Self::from_choi(&choi, d, d)
    }

    /// Stinespring sampling: Haar isometry `V: C^d_in → C^d_out ⊗ C^n`,
    /// `K_j = (I ⊗ ⟨j|) V`.
    pub fn random_with<R: Rng + ?Sized>(
        rng: &mut R,
        d_in: usize,
        d_out: usize,
        kraus_count: usize,
    ) -> Result<Self> {
        if kraus_count == 0 || d_in == 0 || d_out == 0 {
            return Err(invalid("random channel needs positive dimensions and kraus_count"));
        }
        if d_out * kraus_count < d_in {
            return Err(invalid(format!(
                "d_out·kraus_count = {} cannot hold an isometry from dimension {d_in}",
                d_out * kraus_count
            )));
        }
        let v = haar_isometry(rng, d_out * kraus_count, d_in);
        let kraus = (0..kraus_count)
            .map(|j| ComplexMatrix::from_fn(d_out, d_in, |b, a| v[(b * kraus_count + j, a)]))
            .collect();
        Self::new(d_in, d_out, kraus)
    }

    pub fn random(d_in: usize, d_out: usize, kraus_count: usize, seed: u64) -> Result<Self> {
        Self::random_with(&mut rng_from_seed(seed), d_in, d_out, kraus_count)
    }

    /// Channel `ρ ↦ V T(U ρ U†) V†`.
    pub fn conjugated(&self, u_in: &ComplexMatrix, v_out: &ComplexMatrix) -> Result<Self> {
        let kraus = self.kraus.iter().map(|k| v_out * k * u_in).collect();
        Self::new(self.d_in, self.d_out, kraus)
    }

    fn check_input(&self, x: &ComplexMatrix) -> Result<()> {
        if x.nrows() != self.d_in || x.ncols() != self.d_in {
            return Err(mismatch(
                format!("{0}x{0} input", self.d_in),
                format!("{}x{}", x.nrows(), x.ncols()),
            ));
        }
        Ok(())
    }
}

/// Normalized Choi state of a channel.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub state: DensityMatrix,
    pub d_in: usize,
    pub d_out: usize,
}

impl ChoiMatrix {
    pub fn min_eigenvalue(&self) -> f64 {
        eig_symmetrized(self.state.matrix()).min_eigenvalue()
    }

    /// `max |Tr_B J − I/d_in|`.
    pub fn tp_deviation(&self) -> f64 {
        let reduced = crate::linalg::partial_trace(
            self.state.matrix(),
            (self.d_in, self.d_out),
            crate::linalg::Subsystem::First,
        )
        .expect("Choi matrix has product dimensions");
        max_abs_diff(&reduced, &identity(self.d_in).unscale(self.d_in as f64))
    }
}

/// Checks both channel certificates at the given tolerance, naming the
/// first violated one.
pub fn validate(channel: &QuantumChannel, tol: f64) -> Result<()> {
    let dev = channel.tp_deviation();
    if dev > tol {
        return Err(Error::NotTracePreserving(dev));
    }
    let min = channel.choi().min_eigenvalue();
    if min < -tol {
        return Err(Error::NotCompletelyPositive(min));
    }
    Ok(())
}

/// `|Φ⟩⟨Φ|` with `|Φ⟩ = Σ_i |ii⟩/√d`.
pub fn maximally_entangled(d: usize) -> DensityMatrix {
    let mut v = DVector::from_element(d * d, ZERO);
    for i in 0..d {
        v[i * d + i] = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    DensityMatrix::from_trusted(outer(&v, &v))
}
