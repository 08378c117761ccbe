//! Capacity solvers.
//!
//! `C_E(T) = max_ρ I(ρ, T)` is a concave program over input states and is
//! solved by entropic mirror ascent,
//!
//! ```text
//! ρ ← exp(ln ρ + s·∇I(ρ)) / tr(·)
//! ```
//!
//! with Armijo backtracking on `s`. Concavity turns the first-order gap
//! `λ_max(∇I) − tr(ρ∇I)` into an upper bound on `C_E − I(ρ)`.
//!
//! `C_H(T) = min_σ max_ψ D(T(ψ)‖σ)` lives in [`crate::holevo`].

use std::f64::consts::LN_2;

use crate::channel::QuantumChannel;
use crate::entropy::entropy_of_matrix;
use crate::error::{mismatch, Result};
use crate::linalg::{eig_symmetrized, identity, trace_of_product, ComplexMatrix, ComplexVector};
use crate::state::DensityMatrix;

/// Solver knobs shared by both capacity routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Target optimality gap, nats.
    pub tol: f64,
    pub max_iter: usize,
    /// Random starts per inner maximization of the Holevo solver.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 5000,
            restarts: 32,
            seed: 0,
        }
    }
}

/// Witness ensemble of the Holevo solver: pure inputs `ψ_i` with weights
/// `p_i` and output barycenter `σ = Σ p_i T(ψ_i)`.
#[derive(Debug, Clone)]
pub struct HolevoEnsemble {
    pub barycenter: DensityMatrix,
    pub inputs: Vec<ComplexVector>,
    pub weights: Vec<f64>,
    /// Holevo χ of the ensemble, a certified lower bound on `C_H` (nats).
    pub lower_bound_nats: f64,
}

#[derive(Debug, Clone)]
pub enum CapacityWitness {
    /// Optimal input state found for `C_E`.
    InputState(DensityMatrix),
    Ensemble(HolevoEnsemble),
}

#[derive(Debug, Clone)]
pub struct CapacityEstimate {
    pub value_nats: f64,
    pub value_bits: f64,
    /// Optimality gap, nats.
    pub gap_bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub witness: CapacityWitness,
}

impl CapacityEstimate {
    pub(crate) fn new(
        value_nats: f64,
        gap_bound: f64,
        iterations: usize,
        converged: bool,
        witness: CapacityWitness,
    ) -> Self {
        Self {
            value_nats,
            value_bits: value_nats / LN_2,
            gap_bound,
            iterations,
            converged,
            witness,
        }
    }

    pub fn gap_bits(&self) -> f64 {
        self.gap_bound / LN_2
    }
}

/// Eigenvalues at or below this floor are treated as exact zeros when taking
/// logarithms of channel outputs in the gradient.
const LOG_FLOOR: f64 = 1e-14;
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-8;

fn log_pos(m: &ComplexMatrix) -> ComplexMatrix {
    eig_symmetrized(m).map_spectrum(|x| if x > LOG_FLOOR { x.ln() } else { 0.0 })
}

/// `I(ρ, T) = S(ρ) + S(T(ρ)) − S(T^c(ρ))` in nats, via the complementary
/// channel on the Kraus environment.
pub fn ce_objective(channel: &QuantumChannel, rho: &DensityMatrix) -> Result<f64> {
    check_dim(channel, rho)?;
    Ok(objective_unchecked(channel, rho.matrix()))
}

fn objective_unchecked(channel: &QuantumChannel, rho: &ComplexMatrix) -> f64 {
    entropy_of_matrix(rho) + entropy_of_matrix(&channel.apply_unchecked(rho))
        - entropy_of_matrix(&channel.complementary_apply(rho))
}

fn check_dim(channel: &QuantumChannel, rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != channel.d_in() {
        return Err(mismatch(channel.d_in(), rho.dim()));
    }
    Ok(())
}

/// Euclidean gradient of `I(ρ, T)` with respect to `ρ`, in nats:
/// `−ln ρ − T†(ln T(ρ)) + T^c†(ln T^c(ρ)) − I`.
///
/// A state with `λ_min < 1e-12` is first mixed with `1e-12·I/d`.
pub fn ce_gradient(channel: &QuantumChannel, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    check_dim(channel, rho)?;
    let d = rho.dim();
    let eig = rho.eigensystem();
    let m = if eig.min_eigenvalue() < 1e-12 {
        (rho.matrix() + identity(d).scale(1e-12 / d as f64)).unscale(1.0 + 1e-12)
    } else {
        rho.matrix().clone()
    };
    let log_rho = eig_symmetrized(&m).map_spectrum(|x| x.max(f64::MIN_POSITIVE).ln());
    Ok(gradient_with_log(channel, &m, &log_rho))
}

fn gradient_with_log(
    channel: &QuantumChannel,
    rho: &ComplexMatrix,
    log_rho: &ComplexMatrix,
) -> ComplexMatrix {
    let d = rho.nrows();
    let out_term = channel.adjoint_apply(&log_pos(&channel.apply_unchecked(rho)));
    let env_term = channel.complementary_adjoint(&log_pos(&channel.complementary_apply(rho)));
    let g = -log_rho - out_term + env_term - identity(d);
    crate::linalg::hermitian_part(&g)
}

/// `exp(L)/tr exp(L)` and its exact logarithm.
fn gibbs(l: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let e = eig_symmetrized(l);
    let shift = e.max_eigenvalue();
    let z: f64 = e.eigenvalues.iter().map(|x| (x - shift).exp()).sum();
    let log_z = shift + z.ln();
    let rho = e.map_spectrum(|x| (x - log_z).exp());
    let log_rho = e.map_spectrum(|x| x - log_z);
    (rho, log_rho)
}

/// Entanglement-assisted capacity by entropic mirror ascent from `I/d`.
///
/// Terminates when the first-order gap drops to `settings.tol`; hitting
/// `max_iter` or a vanishing step yields `converged = false`.
pub fn entanglement_assisted_capacity(
    channel: &QuantumChannel,
    settings: &SolverSettings,
) -> Result<CapacityEstimate> {
    let d = channel.d_in();
    let mut log_rho = identity(d).scale(-(d as f64).ln());
    let mut rho = identity(d).unscale(d as f64);
    let mut value = objective_unchecked(channel, &rho);
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < settings.max_iter {
        let grad = gradient_with_log(channel, &rho, &log_rho);
        gap = eig_symmetrized(&grad).max_eigenvalue() - trace_of_product(&rho, &grad).re;
        if gap <= settings.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut step = 1.0;
        let mut accepted = None;
        while step >= MIN_STEP {
            let (candidate, candidate_log) = gibbs(&(&log_rho + grad.scale(step)));
            let candidate_value = objective_unchecked(channel, &candidate);
            let predicted = trace_of_product(&grad, &(&candidate - &rho)).re;
            if candidate_value >= value + ARMIJO * predicted {
                accepted = Some((candidate, candidate_log, candidate_value));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((r, l, v)) => {
                rho = r;
                log_rho = l;
                value = v;
            }
            None => break,
        }
    }
    if !converged && gap <= settings.tol {
        converged = true;
    }
    Ok(CapacityEstimate::new(
        value.max(0.0),
        gap.max(0.0),
        iterations,
        converged,
        CapacityWitness::InputState(DensityMatrix::from_trusted(rho)),
    ))
}

/// One row of the depolarizing sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Row {
    pub p: f64,
    pub ce_bits: f64,
    pub ch_bits: f64,
    /// `None` where `ch_bits ≤ 1e-9`.
    pub ratio: Option<f64>,
    pub converged: bool,
}

/// Below this Holevo value the ratio is reported as undefined.
pub const RATIO_FLOOR_BITS: f64 = 1e-9;

/// `C_E`, `C_H` and their ratio for the qubit depolarizing channel on
/// `p_grid`, rows sorted by `p`.
pub fn figure1_sweep(p_grid: &[f64], settings: &SolverSettings) -> Result<Vec<Figure1Row>> {
    let mut grid = p_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.iter().map(|&p| figure1_row(p, settings)).collect()
}

pub fn figure1_row(p: f64, settings: &SolverSettings) -> Result<Figure1Row> {
    let channel = QuantumChannel::depolarizing(2, p)?;
    let ce = entanglement_assisted_capacity(&channel, settings)?;
    let ch = crate::holevo::holevo_quantity(&channel, settings)?;
    let ratio = (ch.value_bits > RATIO_FLOOR_BITS).then(|| ce.value_bits / ch.value_bits);
    Ok(Figure1Row {
        p,
        ce_bits: ce.value_bits,
        ch_bits: ch.value_bits,
        ratio,
        converged: ce.converged && ch.converged,
    })
}

/// `points` equispaced values on `[0, 4/3]` plus the probe `0.999`; the
/// default sweep uses 81.
pub fn default_figure1_grid(points: usize) -> Vec<f64> {
    let top = QuantumChannel::depolarizing_max_p(2);
    let mut grid: Vec<f64> = (0..points)
        .map(|i| top * i as f64 / (points - 1) as f64)
        .collect();
    grid.push(0.999);
    grid.sort_by(f64::total_cmp);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::mutual_information;
    use crate::random::{random_density_matrix, random_hermitian, rng_from_seed};

    #[test]
    fn objective_matches_relative_entropy_form() {
        for seed in 0..10 {
            let t = QuantumChannel::random(3, 2, 6, seed).unwrap();
            let rho = random_density_matrix(3, 3, seed + 50).unwrap();
            let a = ce_objective(&t, &rho).unwrap();
            let b = mutual_information(&t, &rho).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn noiseless_qubit_carries_two_bits() {
        let t = QuantumChannel::identity(2).unwrap();
        let ce = entanglement_assisted_capacity(&t, &SolverSettings::default()).unwrap();
        assert!(ce.converged);
        assert!((ce.value_bits - 2.0).abs() < 1e-4);
        assert!((ce.value_bits * LN_2 - ce.value_nats).abs() < 1e-12);
    }

    #[test]
    fn fully_depolarized_qubit_carries_nothing() {
        let t = QuantumChannel::depolarizing(2, 1.0).unwrap();
        let ce = entanglement_assisted_capacity(&t, &SolverSettings::default()).unwrap();
        assert!(ce.value_bits.abs() < 1e-6);
    }

    #[test]
    fn gradient_symmetry_at_maximally_mixed_input() {
        let t = QuantumChannel::identity(3).unwrap();
        let g = ce_gradient(&t, &DensityMatrix::maximally_mixed(3)).unwrap();
        let c = g[(0, 0)];
        assert!(crate::linalg::max_abs_diff(&g, &identity(3).scale(c.re)) < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = rng_from_seed(3);
        for seed in 0..10 {
            let t = QuantumChannel::random(3, 3, 9, seed).unwrap();
            let rho = random_density_matrix(3, 3, seed + 1000).unwrap();
            let mut eta = random_hermitian(&mut rng, 3);
            let tr = crate::linalg::trace(&eta).re / 3.0;
            eta -= identity(3).scale(tr);
            eta.unscale_mut(crate::linalg::frobenius_norm(&eta));
            let g = ce_gradient(&t, &rho).unwrap();
            let analytic = trace_of_product(&g, &eta).re;
            let eps = 1e-5;
            let plus = objective_unchecked(&t, &(rho.matrix() + eta.scale(eps)));
            let minus = objective_unchecked(&t, &(rho.matrix() - eta.scale(eps)));
            let fd = (plus - minus) / (2.0 * eps);
            assert!((analytic - fd).abs() < 1e-5, "{analytic} vs {fd}");
        }
    }

    #[test]
    fn replacement_channel_is_flat() {
        let sigma = random_density_matrix(2, 2, 4).unwrap();
        let t = QuantumChannel::replacement(&sigma, 3).unwrap();
        let rho = random_density_matrix(3, 3, 5).unwrap();
        assert!(ce_objective(&t, &rho).unwrap().abs() < 1e-10);
        let g = ce_gradient(&t, &rho).unwrap();
        let mut rng = rng_from_seed(8);
        let mut eta = random_hermitian(&mut rng, 3);
        let tr = crate::linalg::trace(&eta).re / 3.0;
        eta -= identity(3).scale(tr);
        // objective vanishes identically, so does every traceless derivative
        assert!(trace_of_product(&g, &eta).re.abs() < 1e-9);
    }

    #[test]
    fn random_channel_converges_with_certificate() {
        let t = QuantumChannel::random(3, 3, 9, 77).unwrap();
        let settings = SolverSettings::default();
        let ce = entanglement_assisted_capacity(&t, &settings).unwrap();
        assert!(ce.converged, "gap {} after {} iterations", ce.gap_bound, ce.iterations);
        assert!(ce.gap_bound <= settings.tol);
        assert!(ce.value_bits <= 2.0 * 3f64.log2() + 1e-6);
    }

    #[test]
    fn default_grid_shape() {
        let g = default_figure1_grid(81);
        assert_eq!(g.len(), 82);
        assert_eq!(g[0], 0.0);
        assert!((g[81] - 4.0 / 3.0).abs() < 1e-15);
        assert!(g.contains(&0.999));
    }
}
