use std::f64::consts::LN_2;
use std::path::Path;

use eacap::capacity::{
    default_figure1_grid, entanglement_assisted_capacity, figure1_row, CapacityEstimate,
    SolverSettings, RATIO_FLOOR_BITS,
};
use eacap::certify::{chain_report, verify_theorem, ChainSettings, TheoremRecord};
use eacap::channel::json::channel_to_json;
use eacap::entropy::{domination_constant, g_factor, k_form, relative_entropy};
use eacap::holevo::holevo_quantity;
use eacap::random::{derive_seed, random_density_matrix, rng_from_seed};
use eacap::{DensityMatrix, QuantumChannel};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::input::{load_channel, named_channel, parse_state};
use crate::output::{csv_line, emit, json_text, ratio_cell, ratio_json, sig6};
use crate::svg::figure1_svg;
use crate::{Command, CommonArgs, Format};

/// Violation threshold for the proposition check, nats.
const PROPOSITION_TOL: f64 = 1e-9;
const PURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    InputError,
    NonConvergence,
    Inconclusive,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::InputError => 1,
            Status::NonConvergence => 2,
            Status::Inconclusive => 3,
        }
    }
}

pub fn run(command: Command) -> Result<Status, String> {
    match command {
        Command::Capacity { channel, source, common } => {
            check_common(&common)?;
            let t = load_channel(channel.as_deref(), source.named.as_deref())?;
            capacity(&t, &common)
        }
        Command::VerifyTheorem { trials, d_in, d_out, common } => {
            check_common(&common)?;
            if trials == 0 || d_in == 0 || d_out == 0 {
                return Err("--trials, --din and --dout must be at least 1".into());
            }
            verify_theorem_cmd(trials, d_in, d_out, &common)
        }
        Command::VerifyProposition { trials, d, common } => {
            check_common(&common)?;
            if trials == 0 {
                return Err("--trials must be at least 1".into());
            }
            let dims = match d {
                Some(0) => return Err("--din must be at least 1".into()),
                Some(d) => vec![d],
                None => (2..=5).collect(),
            };
            verify_proposition(trials, &dims, &common)
        }
        Command::Chain { channel, source, state, common } => {
            check_common(&common)?;
            let t = load_channel(channel.as_deref(), source.named.as_deref())?;
            chain(&t, &state, &common)
        }
        Command::Figure1 { points, svg, common } => {
            check_common(&common)?;
            if points < 2 {
                return Err("--points must be at least 2".into());
            }
            figure1(points, svg.as_deref(), &common)
        }
        Command::Channel { source, common } => {
            let spec = source.named.ok_or("--named is required")?;
            let t = named_channel(&spec)?;
            emit(common.out.as_deref(), &format!("{}\n", channel_to_json(&t)))?;
            Ok(Status::Ok)
        }
    }
}

fn check_common(c: &CommonArgs) -> Result<(), String> {
    if !(c.tol > 0.0 && c.tol.is_finite()) {
        return Err(format!("--tol must be positive, got {}", c.tol));
    }
    if c.max_iter == 0 {
        return Err("--max-iter must be at least 1".into());
    }
    if c.jobs == Some(0) {
        return Err("--jobs must be at least 1".into());
    }
    Ok(())
}

fn settings(c: &CommonArgs) -> SolverSettings {
    SolverSettings {
        tol: c.tol,
        max_iter: c.max_iter,
        restarts: c.restarts,
        seed: c.seed,
    }
}

/// Maps `f` over `0..n` on a pool of `jobs` threads, results in index order.
fn parallel<T: Send>(
    jobs: Option<usize>,
    n: usize,
    f: impl Fn(usize) -> Result<T, String> + Sync + Send,
) -> Result<Vec<T>, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| format!("cannot start worker pool: {e}"))?;
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

fn capacity(t: &QuantumChannel, c: &CommonArgs) -> Result<Status, String> {
    let s = settings(c);
    let ce = entanglement_assisted_capacity(t, &s).map_err(|e| e.to_string())?;
    let ch = holevo_quantity(t, &s).map_err(|e| e.to_string())?;
    let ratio = (ch.value_bits > RATIO_FLOOR_BITS).then(|| ce.value_bits / ch.value_bits);
    let text = match c.format {
        Format::Csv => {
            let mut out = csv_line(&[
                "quantity", "bits", "gap_bits", "iterations", "converged",
            ]);
            for (name, e) in [("ce", &ce), ("ch", &ch)] {
                out += &csv_line(&[
                    name.to_string(),
                    sig6(e.value_bits),
                    sig6(e.gap_bits()),
                    e.iterations.to_string(),
                    e.converged.to_string(),
                ]);
            }
            out += &csv_line(&["ratio".to_string(), ratio_cell(ratio), String::new(), String::new(), String::new()]);
            out
        }
        Format::Json => json_text(&json!({
            "d_in": t.d_in(),
            "d_out": t.d_out(),
            "ce": estimate_json(&ce),
            "ch": estimate_json(&ch),
            "ratio": ratio_json(ratio),
        })),
    };
    emit(c.out.as_deref(), &text)?;
    Ok(if ce.converged && ch.converged { Status::Ok } else { Status::NonConvergence })
}

fn estimate_json(e: &CapacityEstimate) -> serde_json::Value {
    json!({
        "bits": e.value_bits,
        "gap_bits": e.gap_bits(),
        "iterations": e.iterations,
        "converged": e.converged,
    })
}

fn verify_theorem_cmd(trials: usize, d_in: usize, d_out: usize, c: &CommonArgs) -> Result<Status, String> {
    let s = settings(c);
    let records: Vec<TheoremRecord> = parallel(c.jobs, trials, |i| {
        let seed = derive_seed(c.seed, i as u64);
        let t = QuantumChannel::random(d_in, d_out, d_in * d_out, seed).map_err(|e| e.to_string())?;
        verify_theorem(&t, &SolverSettings { seed, ..s }).map_err(|e| e.to_string())
    })?;
    let tol_bits = s.tol / LN_2;
    let trivial = d_in == 1;
    let violations = records.iter().filter(|r| !r.holds(tol_bits)).count();
    let inconclusive = records.iter().filter(|r| !(r.ce_converged && r.ch_converged)).count();
    let min_slack = records.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let min_certified = records.iter().map(|r| r.certified_slack).fold(f64::INFINITY, f64::min);
    let verdict = if trivial {
        "trivially satisfied: d_in = 1, both sides vanish"
    } else if violations > 0 {
        "violated"
    } else if inconclusive > 0 {
        "inconclusive"
    } else {
        "holds"
    };
    let text = match c.format {
        Format::Csv => {
            let mut out = csv_line(&[
                "trial", "ce_bits", "ch_bits", "ratio", "prefactor", "slack", "certified_slack", "converged",
            ]);
            for (i, r) in records.iter().enumerate() {
                out += &csv_line(&[
                    i.to_string(),
                    sig6(r.ce_bits),
                    sig6(r.ch_bits),
                    ratio_cell(theorem_ratio(r)),
                    r.prefactor.map_or_else(|| "trivial".into(), sig6),
                    sig6(r.slack),
                    sig6(r.certified_slack),
                    (r.ce_converged && r.ch_converged).to_string(),
                ]);
            }
            out += &format!(
                "# trials={trials} d_in={d_in} d_out={d_out} min_slack_bits={} min_certified_slack_bits={} violations={violations} inconclusive={inconclusive} verdict={verdict}\n",
                sig6(min_slack),
                sig6(min_certified)
            );
            out
        }
        Format::Json => json_text(&json!({
            "trials": records.iter().enumerate().map(|(i, r)| json!({
                "trial": i,
                "ce_bits": r.ce_bits,
                "ch_bits": r.ch_bits,
                "ratio": ratio_json(theorem_ratio(r)),
                "prefactor": r.prefactor.map_or_else(|| "trivial".into(), serde_json::Value::from),
                "slack": r.slack,
                "certified_slack": r.certified_slack,
                "converged": r.ce_converged && r.ch_converged,
            })).collect::<Vec<_>>(),
            "summary": {
                "d_in": d_in,
                "d_out": d_out,
                "min_slack_bits": min_slack,
                "min_certified_slack_bits": min_certified,
                "violations": violations,
                "inconclusive": inconclusive,
                "verdict": verdict,
            },
        })),
    };
    emit(c.out.as_deref(), &text)?;
    Ok(if violations > 0 || inconclusive > 0 { Status::Inconclusive } else { Status::Ok })
}

fn theorem_ratio(r: &TheoremRecord) -> Option<f64> {
    (r.ch_bits > RATIO_FLOOR_BITS).then(|| r.ce_bits / r.ch_bits)
}

#[derive(Default)]
struct PropositionStats {
    /// Largest `D − K`, nats.
    upper_excess: f64,
    /// Largest `g(k)·K − D`, nats.
    lower_excess: f64,
    violations: usize,
}

fn verify_proposition(trials: usize, dims: &[usize], c: &CommonArgs) -> Result<Status, String> {
    let mut rows = Vec::new();
    for &d in dims {
        let base = derive_seed(c.seed, d as u64);
        let per_trial = parallel(c.jobs, trials, |i| {
            let seed = derive_seed(base, i as u64);
            let rank = rng_from_seed(seed).random_range(1..=d);
            let rho = random_density_matrix(d, rank, derive_seed(seed, 1)).map_err(|e| e.to_string())?;
            let tau = random_density_matrix(d, d, derive_seed(seed, 2)).map_err(|e| e.to_string())?;
            proposition_excess(&rho, &tau).map_err(|e| e.to_string())
        })?;
        let mut stats = PropositionStats {
            upper_excess: f64::NEG_INFINITY,
            lower_excess: f64::NEG_INFINITY,
            violations: 0,
        };
        for (up, low) in per_trial {
            stats.upper_excess = stats.upper_excess.max(up);
            stats.lower_excess = stats.lower_excess.max(low);
            if up > PROPOSITION_TOL || low > PROPOSITION_TOL {
                stats.violations += 1;
            }
        }
        rows.push((d, stats));
    }
    let total: usize = rows.iter().map(|(_, s)| s.violations).sum();
    let text = match c.format {
        Format::Csv => {
            let mut out = csv_line(&["d", "trials", "max_upper_excess_nats", "max_lower_excess_nats", "violations"]);
            for (d, s) in &rows {
                out += &csv_line(&[
                    d.to_string(),
                    trials.to_string(),
                    sig6(s.upper_excess),
                    sig6(s.lower_excess),
                    s.violations.to_string(),
                ]);
            }
            out
        }
        Format::Json => json_text(&json!({
            "tolerance_nats": PROPOSITION_TOL,
            "dimensions": rows.iter().map(|(d, s)| json!({
                "d": d,
                "trials": trials,
                "max_upper_excess_nats": s.upper_excess,
                "max_lower_excess_nats": s.lower_excess,
                "violations": s.violations,
            })).collect::<Vec<_>>(),
            "violations": total,
        })),
    };
    emit(c.out.as_deref(), &text)?;
    Ok(if total == 0 { Status::Ok } else { Status::Inconclusive })
}

/// `(D − K, g(k)·K − D)`; both are non-positive when the sandwich holds.
fn proposition_excess(rho: &DensityMatrix, tau: &DensityMatrix) -> eacap::Result<(f64, f64)> {
    let d = relative_entropy(rho, tau)?.value;
    let k = k_form(tau, &(rho.matrix() - tau.matrix()))?;
    let g = g_factor(domination_constant(rho, tau)?)?;
    Ok((d - k, g * k - d))
}

fn chain(t: &QuantumChannel, state: &str, c: &CommonArgs) -> Result<Status, String> {
    let d = t.d_in();
    let rho = parse_state(state, d)?;
    let purity = rho.purity();
    if purity < 1.0 - PURE_TOL {
        return Err(format!("pure state required, input has purity {}", sig6(purity)));
    }
    let image = t
        .apply(&DensityMatrix::maximally_mixed(d))
        .map_err(|e| e.to_string())?;
    let settings = ChainSettings {
        tol: c.tol,
        restarts: c.restarts,
        seed: c.seed,
    };
    let r = chain_report(t, &rho, &image, &settings).map_err(|e| e.to_string())?;
    let links = [
        ("eq4_lhs", r.eq4_lhs_nats),
        ("lhs", r.lhs_nats),
        ("est1", r.est1_value),
        ("est2", r.est2_rhs),
        ("est3", r.est3_rhs),
        ("donald", r.donald_rhs),
        ("est5", r.est5_rhs),
        ("sup_divergence", r.sup_divergence),
    ];
    let sigma = r.sigma_b.matrix();
    let text = match c.format {
        Format::Csv => {
            let mut out = csv_line(&["quantity", "nats", "bits"]);
            for (name, v) in links {
                out += &csv_line(&[name.to_string(), sig6(v), sig6(v / LN_2)]);
            }
            out += "\nquantity,value\n";
            for (name, v) in [("m_a", r.m_a), ("k_a", r.k_a), ("prefactor", r.prefactor)] {
                out += &csv_line(&[name.to_string(), sig6(v)]);
            }
            for (i, l) in r.cond1_min_eigs.iter().enumerate() {
                out += &csv_line(&[format!("cond1_min_eig[{i}]"), sig6(*l)]);
            }
            for i in 0..sigma.nrows() {
                let cells: Vec<String> = (0..sigma.ncols())
                    .map(|j| complex_cell(sigma[(i, j)].re, sigma[(i, j)].im))
                    .collect();
                out += &csv_line(&[format!("sigma_b[{i}]"), cells.join(" ")]);
            }
            out += &csv_line(&["monotone_ok".to_string(), r.monotone_ok.to_string()]);
            out
        }
        Format::Json => json_text(&json!({
            "links_nats": links.iter().map(|(n, v)| (n.to_string(), json_number(*v))).collect::<serde_json::Map<_, _>>(),
            "m_a": r.m_a,
            "k_a": r.k_a,
            "prefactor": r.prefactor,
            "cond1_min_eigs": r.cond1_min_eigs,
            "sigma_b": (0..sigma.nrows())
                .map(|i| (0..sigma.ncols()).map(|j| [sigma[(i, j)].re, sigma[(i, j)].im]).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "monotone_ok": r.monotone_ok,
        })),
    };
    emit(c.out.as_deref(), &text)?;
    Ok(if r.monotone_ok { Status::Ok } else { Status::Inconclusive })
}

/// JSON has no infinity; an unbounded link is written as the string "inf".
fn json_number(v: f64) -> serde_json::Value {
    if v.is_finite() { v.into() } else { sig6(v).into() }
}

fn complex_cell(re: f64, im: f64) -> String {
    if im == 0.0 {
        sig6(re)
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", sig6(re), sig6(im.abs()))
    }
}

fn figure1(points: usize, svg: Option<&Path>, c: &CommonArgs) -> Result<Status, String> {
    let grid = default_figure1_grid(points);
    let s = settings(c);
    let rows = parallel(c.jobs, grid.len(), |i| figure1_row(grid[i], &s).map_err(|e| e.to_string()))?;
    let text = match c.format {
        Format::Csv => {
            let mut out = csv_line(&["p", "ce_bits", "ch_bits", "ratio"]);
            for r in &rows {
                out += &csv_line(&[sig6(r.p), sig6(r.ce_bits), sig6(r.ch_bits), ratio_cell(r.ratio)]);
            }
            out
        }
        Format::Json => json_text(&json!(rows
            .iter()
            .map(|r| json!({
                "p": r.p,
                "ce_bits": r.ce_bits,
                "ch_bits": r.ch_bits,
                "ratio": ratio_json(r.ratio),
                "converged": r.converged,
            }))
            .collect::<Vec<_>>())),
    };
    emit(c.out.as_deref(), &text)?;
    if let Some(path) = svg {
        emit(Some(path), &figure1_svg(&rows))?;
    }
    Ok(if rows.iter().all(|r| r.converged) { Status::Ok } else { Status::NonConvergence })
}
