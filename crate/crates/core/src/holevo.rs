//! Holevo quantity `C_H(T) = min_σ max_ψ D(T(ψ)‖σ)` (nats, then bits).
//!
//! The solver keeps a growing set of pure witness inputs `ψ_i`:
//!
//! 1. Blahut–Arimoto over the witnesses gives weights `p` maximizing the
//!    ensemble Holevo χ; `χ(p)` is a certified lower bound and the output
//!    barycenter `σ = Σ p_i T(ψ_i)` is the next outer iterate.
//! 2. A multi-start ascent estimates `max_ψ D(T(ψ)‖σ)`, an upper bound when
//!    the inner maximum is found. Its maximizer joins the witness set.
//!
//! The loop stops when upper and lower bound meet within `tol`. The inner
//! problem is a maximization of a convex function over pure states, so the
//! upper bound is heuristic; it never drops below the lower bound because
//! every witness is also a start point.

use crate::capacity::{CapacityEstimate, CapacityWitness, HolevoEnsemble, SolverSettings};
use crate::channel::QuantumChannel;
use crate::entropy::{relative_entropy_with, KERNEL_THRESHOLD};
use crate::error::{mismatch, Result};
use crate::linalg::{
    basis_vector, eig_symmetrized, projector, trace_of_product, ComplexMatrix, ComplexVector,
    HermitianEigensystem,
};
use crate::random::{derive_seed, pure_state_vector, rng_from_seed};
use crate::state::DensityMatrix;

/// Logarithms of output eigenvalues are clamped at `ln(1e-30)` inside the
/// inner ascent so that rank-deficient outputs keep a finite, steep gradient.
const OUTPUT_LOG_CLAMP: f64 = 1e-30;
const INNER_MAX_ITER: usize = 500;
const INNER_TOL: f64 = 1e-13;
const BA_MAX_ITER: usize = 1_000;
const REFINE_SWEEPS: usize = 50;
const MERGE_TOL: f64 = 1e-6;
const PRUNE_WEIGHT: f64 = 1e-12;
/// Inputs with fidelity above `1 − DUPLICATE_TOL` count as the same witness.
const DUPLICATE_TOL: f64 = 1e-10;

/// Best pure input found for `max_ψ D(T(ψ)‖σ)`.
#[derive(Debug, Clone)]
pub struct InnerMaximum {
    pub value: f64,
    pub input: ComplexVector,
    /// Index of the start point that produced it.
    pub start: usize,
}

struct Target {
    eig: HermitianEigensystem,
    log: ComplexMatrix,
}

impl Target {
    fn new(sigma: &ComplexMatrix) -> Self {
        let eig = eig_symmetrized(sigma);
        let log = eig.map_spectrum(|x| if x > KERNEL_THRESHOLD { x.ln() } else { 0.0 });
        Self { eig, log }
    }

    fn divergence(&self, output: &ComplexMatrix) -> f64 {
        relative_entropy_with(output, &self.eig).value
    }
}

fn inner_gradient(channel: &QuantumChannel, output: &ComplexMatrix, target: &Target) -> ComplexMatrix {
    let log_out = eig_symmetrized(output).map_spectrum(|x| x.max(OUTPUT_LOG_CLAMP).ln());
    crate::linalg::hermitian_part(&channel.adjoint_apply(&(log_out - &target.log)))
}

/// Ascent from one start. Each step moves to the top eigenvector of the
/// linearized objective, backtracking along the sphere when that does not
/// increase `D(T(ψ)‖σ)`.
fn ascend(channel: &QuantumChannel, target: &Target, start: ComplexVector) -> (f64, ComplexVector) {
    let mut psi = start;
    let mut output = channel.apply_unchecked(&projector(&psi));
    let mut value = target.divergence(&output);
    if !value.is_finite() {
        return (value, psi);
    }
    for _ in 0..INNER_MAX_ITER {
        let g = inner_gradient(channel, &output, target);
        let e = eig_symmetrized(&g);
        let mut top: ComplexVector = e.eigenvectors.column(e.dim() - 1).into_owned();
        let overlap = top.dotc(&psi);
        if overlap.norm() > 0.0 {
            top *= overlap / overlap.norm();
        }
        let mut step = 1.0;
        let mut improved = None;
        while step > 1e-6 {
            let mut candidate = &psi + (&top - &psi).scale(step);
            let n = candidate.norm();
            if n < 1e-12 {
                step *= 0.5;
                continue;
            }
            candidate.unscale_mut(n);
            let cand_out = channel.apply_unchecked(&projector(&candidate));
            let cand_value = target.divergence(&cand_out);
            if cand_value > value {
                improved = Some((candidate, cand_out, cand_value));
                break;
            }
            step *= 0.5;
        }
        match improved {
            Some((p, o, v)) => {
                let gain = v - value;
                psi = p;
                output = o;
                value = v;
                if gain <= INNER_TOL * value.abs().max(1.0) {
                    break;
                }
            }
            None => break,
        }
    }
    (value, psi)
}

/// `max_ψ D(T(ψ)‖σ)` estimated from the given warm starts plus `restarts`
/// random starts seeded by `derive_seed(seed, i)`. Ties go to the lowest
/// start index.
pub fn inner_maximum(
    channel: &QuantumChannel,
    sigma: &DensityMatrix,
    warm_starts: &[ComplexVector],
    restarts: usize,
    seed: u64,
) -> Result<InnerMaximum> {
    if sigma.dim() != channel.d_out() {
        return Err(mismatch(channel.d_out(), sigma.dim()));
    }
    let target = Target::new(sigma.matrix());
    Ok(inner_maximum_with(channel, &target, warm_starts, restarts, seed))
}

fn inner_maximum_with(
    channel: &QuantumChannel,
    target: &Target,
    warm_starts: &[ComplexVector],
    restarts: usize,
    seed: u64,
) -> InnerMaximum {
    let local = local_maxima(channel, target, warm_starts, restarts, seed);
    let mut best: Option<InnerMaximum> = None;
    for (index, (value, input)) in local.into_iter().enumerate() {
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(InnerMaximum {
                value,
                input,
                start: index,
            });
        }
    }
    best.expect("at least one start")
}

/// Ascent result from every start, in start order.
fn local_maxima(
    channel: &QuantumChannel,
    target: &Target,
    warm_starts: &[ComplexVector],
    restarts: usize,
    seed: u64,
) -> Vec<(f64, ComplexVector)> {
    let d = channel.d_in();
    let mut starts: Vec<ComplexVector> = warm_starts.to_vec();
    for r in 0..restarts {
        let mut rng = rng_from_seed(derive_seed(seed, r as u64));
        starts.push(pure_state_vector(&mut rng, d));
    }
    if starts.is_empty() {
        starts.push(basis_vector(d, 0));
    }
    starts
        .into_iter()
        .map(|s| ascend(channel, target, s))
        .collect()
}

struct Witness {
    input: ComplexVector,
    output: ComplexMatrix,
    neg_entropy: f64,
}

impl Witness {
    fn new(channel: &QuantumChannel, input: ComplexVector) -> Self {
        let output = channel.apply_unchecked(&projector(&input));
        let neg_entropy = eig_symmetrized(&output)
            .eigenvalues
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|x| x * x.ln())
            .sum();
        Self {
            input,
            output,
            neg_entropy,
        }
    }

    /// `D(T(ψ)‖σ) = tr T(ψ) ln T(ψ) − tr T(ψ) ln σ`.
    fn divergence(&self, target: &Target) -> f64 {
        relative_divergence(self.neg_entropy, &self.output, target)
    }
}

fn relative_divergence(neg_entropy: f64, output: &ComplexMatrix, target: &Target) -> f64 {
    let rotated_mass: f64 = {
        let r = target.eig.to_eigenbasis(output);
        (0..target.eig.dim())
            .filter(|&k| target.eig.eigenvalues[k] <= KERNEL_THRESHOLD)
            .map(|k| r[(k, k)].re)
            .sum()
    };
    if rotated_mass > crate::entropy::KERNEL_MASS_TOL {
        return f64::INFINITY;
    }
    neg_entropy - trace_of_product(output, &target.log).re
}

fn barycenter(witnesses: &[Witness], weights: &[f64], d_out: usize) -> ComplexMatrix {
    let mut sigma = ComplexMatrix::zeros(d_out, d_out);
    for (w, p) in witnesses.iter().zip(weights) {
        sigma += w.output.scale(*p);
    }
    sigma
}

/// Weights maximizing χ over the fixed witness set.
///
/// Blahut–Arimoto is the multiplicative update `p_i ∝ p_i·exp(D_i)` with
/// `D_i = D(T(ψ_i)‖σ)`. Here the exponent is scaled by an adaptive step
/// `s ≥ 1`, doubled after each accepted update and halved back toward the
/// plain update (`s = 1`, which never decreases χ) on rejection.
fn blahut_arimoto(witnesses: &[Witness], d_out: usize, tol: f64, start: &[f64]) -> (Vec<f64>, f64) {
    let n = witnesses.len();
    let mut p: Vec<f64> = if start.len() == n {
        start.to_vec()
    } else {
        vec![1.0 / n as f64; n]
    };
    let evaluate = |p: &[f64]| {
        let target = Target::new(&barycenter(witnesses, p, d_out));
        let divs: Vec<f64> = witnesses.iter().map(|w| w.divergence(&target)).collect();
        let chi: f64 = p.iter().zip(&divs).map(|(a, b)| a * b).sum();
        (divs, chi)
    };
    let (mut divs, mut chi) = evaluate(&p);
    let mut step = 1.0f64;
    for _ in 0..BA_MAX_ITER {
        let upper = divs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if upper - chi <= tol {
            break;
        }
        loop {
            let mut candidate: Vec<f64> = p
                .iter()
                .zip(&divs)
                .map(|(pi, di)| pi * (step * (di - upper)).exp())
                .collect();
            let z: f64 = candidate.iter().sum();
            candidate.iter_mut().for_each(|c| *c /= z);
            let (cand_divs, cand_chi) = evaluate(&candidate);
            if cand_chi >= chi || step <= 1.0 {
                p = candidate;
                divs = cand_divs;
                chi = cand_chi;
                step *= 2.0;
                break;
            }
            step = (step * 0.5).max(1.0);
        }
    }
    (p, chi)
}

/// Index and value of the largest local maximum, lowest index on ties.
fn best_of(local: &[(f64, ComplexVector)]) -> (usize, f64) {
    local
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, (v, _))| if *v > acc.1 { (i, *v) } else { acc })
}

/// Folds the weight of each witness into an earlier one with fidelity above
/// `1 − MERGE_TOL`. Refinement drives nearby witnesses to the same local
/// maximum, and near-parallel witnesses stall the weight solve.
fn merge_duplicates(witnesses: &mut Vec<Witness>, weights: &mut Vec<f64>) {
    let mut i = 0;
    while i < witnesses.len() {
        let mut j = i + 1;
        while j < witnesses.len() {
            if witnesses[i].input.dotc(&witnesses[j].input).norm_sqr() > 1.0 - MERGE_TOL {
                weights[i] += weights[j];
                witnesses.remove(j);
                weights.remove(j);
            } else {
                j += 1;
            }
        }
        i += 1;
    }
}

fn entropy_of(output: &ComplexMatrix) -> f64 {
    -eig_symmetrized(output)
        .eigenvalues
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|x| x * x.ln())
        .sum::<f64>()
}

/// `χ = S(Σ p_i T(ψ_i)) − Σ p_i S(T(ψ_i))`.
fn ensemble_chi(witnesses: &[Witness], weights: &[f64], d_out: usize) -> f64 {
    let mixed = entropy_of(&barycenter(witnesses, weights, d_out));
    mixed + witnesses.iter().zip(weights).map(|(w, p)| p * w.neg_entropy).sum::<f64>()
}

/// One sweep of coordinate ascent on `χ` over the witness states at fixed
/// weights. The derivative of `χ` in `ψ_i` is `p_i` times that of
/// `D(T(ψ_i)‖σ)` at the current barycenter, so each witness moves toward the
/// top eigenvector of the linearized divergence, with backtracking on `χ`.
fn refine_witnesses(
    channel: &QuantumChannel,
    witnesses: &mut [Witness],
    weights: &[f64],
    d_out: usize,
) -> f64 {
    let mut chi = ensemble_chi(witnesses, weights, d_out);
    for i in 0..witnesses.len() {
        let target = Target::new(&barycenter(witnesses, weights, d_out));
        let g = inner_gradient(channel, &witnesses[i].output, &target);
        let e = eig_symmetrized(&g);
        let mut top: ComplexVector = e.eigenvectors.column(e.dim() - 1).into_owned();
        let psi = witnesses[i].input.clone();
        let overlap = top.dotc(&psi);
        if overlap.norm() > 0.0 {
            top *= overlap / overlap.norm();
        }
        let mut step = 1.0;
        while step > 1e-6 {
            let mut candidate = &psi + (&top - &psi).scale(step);
            let n = candidate.norm();
            if n > 1e-12 {
                candidate.unscale_mut(n);
                let previous = std::mem::replace(&mut witnesses[i], Witness::new(channel, candidate));
                let value = ensemble_chi(witnesses, weights, d_out);
                if value > chi {
                    chi = value;
                    break;
                }
                witnesses[i] = previous;
            }
            step *= 0.5;
        }
    }
    chi
}

/// Holevo quantity of `channel`; see the module docs for the scheme.
///
/// `value` is the inner maximum at the final barycenter, `gap_bound` its
/// distance to the witness lower bound, `iterations` the number of outer
/// rounds.
pub fn holevo_quantity(channel: &QuantumChannel, settings: &SolverSettings) -> Result<CapacityEstimate> {
    let d_in = channel.d_in();
    let d_out = channel.d_out();
    let mut witnesses: Vec<Witness> = (0..d_in)
        .map(|i| Witness::new(channel, basis_vector(d_in, i)))
        .collect();
    let mut weights: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut ba_tol = (settings.tol * 1e-2).max(1e-14);

    loop {
        let (p, chi) = blahut_arimoto(&witnesses, d_out, ba_tol, &weights);
        // drop witnesses the ensemble no longer uses
        let keep: Vec<bool> = p.iter().map(|&w| w > PRUNE_WEIGHT).collect();
        let mut kept = Vec::with_capacity(witnesses.len());
        weights.clear();
        for ((w, pi), k) in witnesses.into_iter().zip(p).zip(keep) {
            if k {
                kept.push(w);
                weights.push(pi);
            }
        }
        witnesses = kept;
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut chi = chi;
        merge_duplicates(&mut witnesses, &mut weights);
        for _ in 0..REFINE_SWEEPS {
            let refined = refine_witnesses(channel, &mut witnesses, &weights, d_out);
            let gain = refined - chi;
            chi = refined;
            if gain <= 1e-3 * settings.tol {
                break;
            }
        }

        let sigma = barycenter(&witnesses, &weights, d_out);
        let target = Target::new(&sigma);
        let warm: Vec<ComplexVector> = witnesses.iter().map(|w| w.input.clone()).collect();
        let round_seed = derive_seed(settings.seed, iterations as u64);
        // random starts only once the warm starts look converged
        let mut local = local_maxima(channel, &target, &warm, 0, round_seed);
        if best_of(&local).1 - chi <= settings.tol || iterations >= settings.max_iter {
            local = local_maxima(channel, &target, &warm, settings.restarts, round_seed);
        }
        let (best_index, best_value) = best_of(&local);
        let gap = (best_value - chi).max(0.0);
        let converged = gap <= settings.tol;
        if converged || iterations >= settings.max_iter {
            let ensemble = HolevoEnsemble {
                barycenter: DensityMatrix::from_trusted(sigma),
                inputs: witnesses.iter().map(|w| w.input.clone()).collect(),
                weights,
                lower_bound_nats: chi.max(0.0),
            };
            return Ok(CapacityEstimate::new(
                best_value.max(0.0),
                gap,
                iterations,
                converged,
                CapacityWitness::Ensemble(ensemble),
            ));
        }
        iterations += 1;

        // every distinct local maximum that cuts the current barycenter
        let mut added = 0;
        for (i, (value, input)) in local.into_iter().enumerate() {
            if i != best_index && value <= chi + settings.tol {
                continue;
            }
            if i < warm.len() && i != best_index {
                continue;
            }
            let duplicate = witnesses
                .iter()
                .any(|w| w.input.dotc(&input).norm_sqr() > 1.0 - DUPLICATE_TOL);
            if !duplicate {
                witnesses.push(Witness::new(channel, input));
                added += 1;
            }
        }
        if added == 0 {
            // the best cut is already a witness; BA has not finished moving
            // weight onto it, so tighten the weight solve instead
            ba_tol = (ba_tol * 0.1).max(1e-16);
        }
        // new witnesses enter with a small positive weight
        let floor = 1e-3 / witnesses.len() as f64;
        weights.resize(witnesses.len(), 0.0);
        let mut z = 0.0;
        for w in weights.iter_mut() {
            *w = w.max(floor);
            z += *w;
        }
        for w in weights.iter_mut() {
            *w /= z;
        }
    }
}
