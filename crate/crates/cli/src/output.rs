use std::io::Write;
use std::path::Path;

/// Six significant digits, '.' separator. Magnitudes below 1e-4 or at least
/// 1e6 switch to exponent form so small gaps stay readable.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs();
    if !(1e-4..1e6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag.log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new digit, e.g. 9.999996 → 10.00000
    if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > 6 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

pub fn ratio_cell(ratio: Option<f64>) -> String {
    ratio.map_or_else(|| "undefined".into(), sig6)
}

pub fn ratio_json(ratio: Option<f64>) -> serde_json::Value {
    ratio.map_or_else(|| "undefined".into(), serde_json::Value::from)
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

/// Comma-joined CSV line with a trailing newline.
pub fn csv_line<S: AsRef<str>>(cells: &[S]) -> String {
    let mut line = cells.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

pub fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}
