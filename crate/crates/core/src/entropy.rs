//! Entropic functionals, in nats.
//!
//! The central objects are the relative entropy `D(ρ‖τ) = tr ρ(ln ρ − ln τ)`
//! and the quadratic form
//!
//! ```text
//! K_τ(η) = ∫_0^∞ tr[η (τ + x)^{-1}]² dx = Σ_{k,l} |⟨h_k|η|h_l⟩|² · (ln μ_k − ln μ_l)/(μ_k − μ_l)
//! ```
//!
//! (eigen-pairs `(μ_k, h_k)` of `τ`), which sandwiches the relative entropy:
//! `g(k)·K_τ(ρ−τ) ≤ D(ρ‖τ) ≤ K_τ(ρ−τ)` whenever `kτ ≥ ρ`.
//!
//! The quadrature routines evaluate both integral representations directly and
//! serve as cross-validators for the closed eigenbasis forms.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::channel::QuantumChannel;
use crate::error::{invalid, mismatch, Result};
use crate::linalg::{
    eig_symmetrized, hermitian_deviation, identity, trace_of_product, ComplexMatrix,
    ComplexVector, HermitianEigensystem,
};
use crate::quadrature::{integrate, QuadratureSettings};
use crate::state::DensityMatrix;

/// Eigenvalues of the second argument at or below this value span its kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-12;
/// Weight of the first argument on that kernel above which `D = ∞`.
pub const KERNEL_MASS_TOL: f64 = 1e-10;
/// Matrix elements of `η` below this magnitude count as vanishing in the
/// zero-eigenvalue conventions of `K_τ`.
pub const ELEMENT_TOL: f64 = 1e-10;

/// Value of a relative entropy; `+∞` when the support condition fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelEntropy {
    pub value: f64,
    pub kernel_violation: bool,
}

impl RelEntropy {
    pub fn is_finite(&self) -> bool {
        !self.kernel_violation
    }

    fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            kernel_violation: true,
        }
    }
}

fn xlogx_sum(eigenvalues: impl IntoIterator<Item = f64>) -> f64 {
    eigenvalues
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| x * x.ln())
        .sum()
}

/// `−Σ λ ln λ` with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    -xlogx_sum(rho.eigensystem().eigenvalues.iter().copied())
}

/// Entropy of a PSD matrix that is a state by construction.
pub(crate) fn entropy_of_matrix(m: &ComplexMatrix) -> f64 {
    -xlogx_sum(eig_symmetrized(m).eigenvalues.iter().copied())
}

fn ensure_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(mismatch(a, b));
    }
    Ok(())
}

/// `D(ρ‖τ)` evaluated in the eigenbasis of `τ`.
pub fn relative_entropy(rho: &DensityMatrix, tau: &DensityMatrix) -> Result<RelEntropy> {
    ensure_same_dim(rho.dim(), tau.dim())?;
    Ok(relative_entropy_matrices(rho.matrix(), tau.matrix()))
}

pub(crate) fn relative_entropy_matrices(rho: &ComplexMatrix, tau: &ComplexMatrix) -> RelEntropy {
    let tau_eig = eig_symmetrized(tau);
    relative_entropy_with(rho, &tau_eig)
}

/// `D(ρ‖τ)` given the eigensystem of `τ`.
pub(crate) fn relative_entropy_with(rho: &ComplexMatrix, tau: &HermitianEigensystem) -> RelEntropy {
    let rotated = tau.to_eigenbasis(rho);
    let mut kernel_mass = 0.0;
    let mut cross = 0.0;
    for k in 0..tau.dim() {
        let mu = tau.eigenvalues[k];
        let weight = rotated[(k, k)].re;
        if mu <= KERNEL_THRESHOLD {
            kernel_mass += weight;
        } else {
            cross += weight * mu.ln();
        }
    }
    if kernel_mass > KERNEL_MASS_TOL {
        return RelEntropy::infinite();
    }
    let neg_entropy = xlogx_sum(eig_symmetrized(rho).eigenvalues.iter().copied());
    RelEntropy {
        value: neg_entropy - cross,
        kernel_violation: false,
    }
}

/// `(ln x − ln y)/(x − y)` for `x, y > 0`, equal to `1/x` when `x = y`.
///
/// Near the diagonal (`x/y ∈ (1/2, 2)`) the form `ln1p(δ)/(δ y)` with
/// `δ = (x − y)/y` avoids cancellation.
pub fn log_mean_reciprocal(x: f64, y: f64) -> f64 {
    if x == y {
        return 1.0 / x;
    }
    let ratio = x / y;
    if ratio > 0.5 && ratio < 2.0 {
        let delta = (x - y) / y;
        (delta.ln_1p() / delta) / y
    } else {
        (x.ln() - y.ln()) / (x - y)
    }
}

/// `K_τ(η)` for a positive semi-definite operator `τ` (not necessarily a
/// state). Returns `+∞` if `η` has weight outside the support of `τ`.
pub fn k_form_operator(tau: &ComplexMatrix, eta: &ComplexMatrix) -> Result<f64> {
    ensure_same_dim(tau.nrows(), eta.nrows())?;
    check_hermitian(eta)?;
    Ok(k_form_in_eigenbasis(&eig_symmetrized(tau), eta))
}

/// `K_τ(η)` for a state `τ` and Hermitian `η`.
pub fn k_form(tau: &DensityMatrix, eta: &ComplexMatrix) -> Result<f64> {
    k_form_operator(tau.matrix(), eta)
}

/// `K_τ(η)` from a precomputed eigensystem of `τ`, with the zero-eigenvalue
/// conventions: a pair touching the kernel contributes `∞` if the matrix
/// element is non-zero and `0` otherwise.
pub fn k_form_in_eigenbasis(tau: &HermitianEigensystem, eta: &ComplexMatrix) -> f64 {
    let rotated = tau.to_eigenbasis(eta);
    let n = tau.dim();
    let mut total = 0.0;
    for k in 0..n {
        for l in 0..n {
            let element = rotated[(k, l)].norm();
            let (mu_k, mu_l) = (tau.eigenvalues[k], tau.eigenvalues[l]);
            if mu_k <= KERNEL_THRESHOLD || mu_l <= KERNEL_THRESHOLD {
                if element > ELEMENT_TOL {
                    return f64::INFINITY;
                }
                continue;
            }
            total += element * element * log_mean_reciprocal(mu_k, mu_l);
        }
    }
    total
}

fn check_hermitian(eta: &ComplexMatrix) -> Result<()> {
    let dev = hermitian_deviation(eta);
    if dev > crate::linalg::HERMITIAN_TOL {
        return Err(crate::Error::NotHermitian(dev));
    }
    Ok(())
}

/// `g(k) = (k ln k − k + 1)/(k − 1)²`, with `g(1) = 1/2`.
pub fn g_factor(k: f64) -> Result<f64> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(invalid(format!("g(k) needs finite k >= 1, got {k}")));
    }
    let h = k - 1.0;
    if h < 1e-3 {
        // g = Σ_n (−h)^n / ((n+1)(n+2))
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 0..12 {
            sum += term / ((n + 1) * (n + 2)) as f64;
            term *= -h;
        }
        return Ok(sum);
    }
    Ok((k * k.ln() - k + 1.0) / (h * h))
}

/// Smallest `k ≥ 1` with `kτ ≥ ρ`: `max(1, λ_max(τ^{-1/2} ρ τ^{-1/2}))`.
/// Requires `τ` positive definite.
pub fn domination_constant(rho: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(rho.dim(), tau.dim())?;
    let e = tau.eigensystem();
    if e.min_eigenvalue() <= KERNEL_THRESHOLD {
        return Err(invalid("domination constant needs a positive definite tau"));
    }
    let inv_sqrt = e.map_spectrum(|x| 1.0 / x.sqrt());
    let whitened = &inv_sqrt * rho.matrix() * &inv_sqrt;
    Ok(eig_symmetrized(&whitened).max_eigenvalue().max(1.0))
}

/// `K_φ(η)` by quadrature of `∫_0^∞ tr[η (φ + x)^{-1}]² dx`, substituting
/// `x = u/(1−u)` and inverting `φ + x` directly at every node.
pub fn k_form_via_quadrature(
    phi: &ComplexMatrix,
    eta: &ComplexMatrix,
    settings: &QuadratureSettings,
) -> Result<f64> {
    ensure_same_dim(phi.nrows(), eta.nrows())?;
    check_hermitian(eta)?;
    let n = phi.nrows();
    if eig_symmetrized(phi).min_eigenvalue() <= KERNEL_THRESHOLD {
        return Err(invalid("quadrature form needs a positive definite operator"));
    }
    let integrand = |u: f64| {
        if u >= 1.0 {
            // x → ∞: tr[η (φ + x)^{-1}]² · dx/du → tr[η²]
            return trace_of_product(eta, eta).re;
        }
        let x = u / (1.0 - u);
        let shifted = phi + identity(n).scale(x);
        let inv = shifted
            .try_inverse()
            .expect("positive definite shift is invertible");
        let a = eta * inv;
        trace_of_product(&a, &a).re / ((1.0 - u) * (1.0 - u))
    };
    Ok(integrate(integrand, 0.0, 1.0, settings).value)
}

/// `D(ρ‖τ) = ∫_0^1 (1−t) K_{ρ_t}(ρ−τ) dt` with `ρ_t = tρ + (1−t)τ`, for
/// full-rank states.
pub fn relative_entropy_via_integral(
    rho: &DensityMatrix,
    tau: &DensityMatrix,
    settings: &QuadratureSettings,
) -> Result<f64> {
    ensure_same_dim(rho.dim(), tau.dim())?;
    for (name, s) in [("rho", rho), ("tau", tau)] {
        if s.eigensystem().min_eigenvalue() <= 1e-8 {
            return Err(invalid(format!("{name} must be full rank (lambda_min > 1e-8)")));
        }
    }
    let diff = rho.matrix() - tau.matrix();
    let integrand = |t: f64| {
        let rho_t = rho.matrix().scale(t) + tau.matrix().scale(1.0 - t);
        (1.0 - t) * k_form_in_eigenbasis(&eig_symmetrized(&rho_t), &diff)
    };
    Ok(integrate(integrand, 0.0, 1.0, settings).value)
}

/// Purification `Σ_i √λ_i |i⟩_{A'} ⊗ |h_i⟩_A` of `ρ_A`.
pub fn purification(rho: &DensityMatrix) -> ComplexVector {
    let d = rho.dim();
    let e = rho.eigensystem();
    let mut v = DVector::from_element(d * d, Complex64::new(0.0, 0.0));
    for i in 0..d {
        let w = e.eigenvalues[i].sqrt();
        for a in 0..d {
            v[i * d + a] = e.eigenvectors[(a, i)] * w;
        }
    }
    let norm = v.norm();
    v.unscale(norm)
}

/// Channel mutual information
/// `D((id⊗T)ψ ‖ ρ_{A'} ⊗ T(ρ_A))` on a purification `ψ` of `ρ_A`.
pub fn mutual_information(channel: &QuantumChannel, rho: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(rho.dim(), channel.d_in())?;
    let psi = DensityMatrix::pure(&purification(rho))?;
    let joint = channel.apply_extended(&psi)?;
    let marginal = crate::linalg::partial_trace(
        psi.matrix(),
        (channel.d_in(), channel.d_in()),
        crate::linalg::Subsystem::First,
    )?;
    let output = channel.apply(rho)?;
    let product = crate::linalg::tensor_product(&marginal, output.matrix());
    Ok(relative_entropy_matrices(joint.matrix(), &product).value)
}

/// `S(ρ_A) + S(T(ρ_A)) − S((id⊗T)ψ)`, the entropic form of
/// [`mutual_information`].
pub fn mutual_information_entropic(channel: &QuantumChannel, rho: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(rho.dim(), channel.d_in())?;
    let psi = DensityMatrix::pure(&purification(rho))?;
    let joint = channel.apply_extended(&psi)?;
    let output = channel.apply(rho)?;
    Ok(von_neumann_entropy(rho) + von_neumann_entropy(&output) - von_neumann_entropy(&joint))
}

/// `|Σp_i D(ρ_i‖σ) − Σp_i D(ρ_i‖ρ̄) − D(ρ̄‖σ)|` with `ρ̄ = Σp_iρ_i`.
pub fn donald_residual(
    weights: &[f64],
    states: &[DensityMatrix],
    sigma: &DensityMatrix,
) -> Result<f64> {
    if weights.len() != states.len() || states.is_empty() {
        return Err(invalid("weights and states must be non-empty and of equal length"));
    }
    if weights.iter().any(|&p| p < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(invalid("weights must form a probability vector"));
    }
    let d = sigma.dim();
    let mut barycenter = ComplexMatrix::zeros(d, d);
    for (p, s) in weights.iter().zip(states) {
        ensure_same_dim(s.dim(), d)?;
        barycenter += s.matrix().scale(*p);
    }
    let barycenter = DensityMatrix::from_trusted(barycenter);
    let mut lhs = 0.0;
    let mut rhs = relative_entropy(&barycenter, sigma)?.value;
    for (p, s) in weights.iter().zip(states) {
        if *p == 0.0 {
            continue;
        }
        lhs += p * relative_entropy(s, sigma)?.value;
        rhs += p * relative_entropy(s, &barycenter)?.value;
    }
    if !lhs.is_finite() || !rhs.is_finite() {
        return Err(invalid("Donald's identity needs finite relative entropies"));
    }
    Ok((lhs - rhs).abs())
}
