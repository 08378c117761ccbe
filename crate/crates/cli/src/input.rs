use std::collections::BTreeMap;
use std::path::Path;

use eacap::channel::json::channel_from_json;
use eacap::channel::{maximally_entangled, validate};
use eacap::random::random_pure_state;
use eacap::{ComplexMatrix, ComplexVector, DensityMatrix, QuantumChannel};
use num_complex::Complex64;

/// TP and CP tolerance for channels read from files.
pub const CHANNEL_TOL: f64 = 1e-8;

pub fn load_channel(file: Option<&Path>, named: Option<&str>) -> Result<QuantumChannel, String> {
    match (file, named) {
        (Some(_), Some(_)) => Err("give either a channel file or --named, not both".into()),
        (None, None) => Err("a channel file or --named is required".into()),
        (None, Some(spec)) => named_channel(spec),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let channel = channel_from_json(&text, CHANNEL_TOL).map_err(|e| e.to_string())?;
            validate(&channel, CHANNEL_TOL).map_err(|e| e.to_string())?;
            Ok(channel)
        }
    }
}

/// `kind:key=value,...`
pub fn named_channel(spec: &str) -> Result<QuantumChannel, String> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params = BTreeMap::new();
    for item in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in --named, got `{item}`"))?;
        params.insert(k.trim(), v.trim());
    }
    let mut take = |key: &str| params.remove(key);
    let channel = match kind {
        "identity" => QuantumChannel::identity(usize_param(take("d"), "d", Some(2))?),
        "depolarizing" => {
            let d = usize_param(take("d"), "d", Some(2))?;
            let p = match take("p") {
                Some(v) => v.parse::<f64>().map_err(|_| format!("p must be a number, got `{v}`"))?,
                None => return Err("depolarizing needs p".into()),
            };
            QuantumChannel::depolarizing(d, p)
        }
        "replacement" => {
            let d_in = usize_param(take("din"), "din", Some(2))?;
            let d_out = usize_param(take("dout"), "dout", Some(2))?;
            QuantumChannel::replacement(&DensityMatrix::maximally_mixed(d_out), d_in)
        }
        "random" => {
            let d_in = usize_param(take("din"), "din", Some(2))?;
            let d_out = usize_param(take("dout"), "dout", Some(2))?;
            let kraus = usize_param(take("kraus"), "kraus", Some(d_in * d_out))?;
            let seed = match take("seed") {
                Some(v) => v.parse::<u64>().map_err(|_| format!("seed must be an integer, got `{v}`"))?,
                None => 0,
            };
            QuantumChannel::random(d_in, d_out, kraus, seed)
        }
        other => return Err(format!("unknown channel kind `{other}`")),
    };
    if let Some(key) = params.keys().next() {
        return Err(format!("unknown parameter `{key}` for {kind}"));
    }
    channel.map_err(|e| e.to_string())
}

fn usize_param(value: Option<&str>, key: &str, default: Option<usize>) -> Result<usize, String> {
    match value {
        Some(v) => v
            .parse()
            .map_err(|_| format!("{key} must be a non-negative integer, got `{v}`")),
        None => default.ok_or_else(|| format!("missing parameter {key}")),
    }
}

/// Input state on `A'A` with `d_A' = d_A = d`.
pub fn parse_state(spec: &str, d: usize) -> Result<DensityMatrix, String> {
    let dim = d * d;
    if spec == "max-entangled" {
        return Ok(maximally_entangled(d));
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed = seed
            .parse::<u64>()
            .map_err(|_| format!("random state seed must be an integer, got `{seed}`"))?;
        let v = random_pure_state(dim, seed).map_err(|e| e.to_string())?;
        return DensityMatrix::pure(&v).map_err(|e| e.to_string());
    }
    let value: serde_json::Value =
        serde_json::from_str(spec).map_err(|e| format!("state is not JSON: {e}"))?;
    let rows = value.as_array().ok_or("state JSON must be an array")?;
    let is_matrix = rows.first().is_some_and(|r| r.get(0).is_some_and(|e| e.is_array()));
    if is_matrix {
        if rows.len() != dim {
            return Err(format!("state matrix must be {dim}x{dim}, got {} rows", rows.len()));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or("state matrix rows must be arrays")?;
            if row.len() != dim {
                return Err(format!("state matrix must be {dim}x{dim}, row {i} has {} entries", row.len()));
            }
            for (j, entry) in row.iter().enumerate() {
                m[(i, j)] = complex(entry)?;
            }
        }
        return DensityMatrix::new(m).map_err(|e| e.to_string());
    }
    if rows.len() != dim {
        return Err(format!("state vector must have {dim} entries, got {}", rows.len()));
    }
    let entries: Vec<Complex64> = rows.iter().map(complex).collect::<Result<_, _>>()?;
    let v = ComplexVector::from_vec(entries);
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err("state vector must be nonzero and finite".into());
    }
    DensityMatrix::pure(&v.unscale(norm)).map_err(|e| e.to_string())
}

fn complex(entry: &serde_json::Value) -> Result<Complex64, String> {
    match entry.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err("state entries must be [re, im] number pairs".into()),
        },
        _ => Err("state entries must be [re, im] pairs".into()),
    }
}
