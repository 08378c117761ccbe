use std::fmt::Write;

use eacap::capacity::Figure1Row;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 730.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 440.0;

/// Line plot of the sweep: capacities against the left axis, ratio against
/// the right axis. Undefined ratios split the ratio curve.
pub fn figure1_svg(rows: &[Figure1Row]) -> String {
    let p_max = rows.iter().map(|r| r.p).fold(0.0, f64::max).max(1e-12);
    let cap_max = rows
        .iter()
        .map(|r| r.ce_bits.max(r.ch_bits))
        .fold(0.0, f64::max)
        .ceil()
        .max(1.0);
    let ratio_max = rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max).ceil().max(1.0);
    let x = |p: f64| LEFT + (RIGHT - LEFT) * p / p_max;
    let y = |v: f64, top: f64| BOTTOM - (BOTTOM - TOP) * v / top;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT},{TOP} V{BOTTOM} H{RIGHT} V{TOP}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let yy = y(f * cap_max, cap_max);
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            yy + 4.0,
            trim(f * cap_max)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{RIGHT}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="black"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            RIGHT + 5.0,
            RIGHT + 8.0,
            yy + 4.0,
            trim(f * ratio_max)
        );
        let xx = x(f * p_max);
        let _ = writeln!(
            s,
            r#"<line x1="{xx:.2}" y1="{BOTTOM}" x2="{xx:.2}" y2="{:.2}" stroke="black"/><text x="{xx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            BOTTOM + 5.0,
            BOTTOM + 20.0,
            trim(f * p_max)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">p</text>"#,
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(20,{:.2}) rotate(-90)" text-anchor="middle">capacity (bits)</text>"#,
        (TOP + BOTTOM) / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(785,{:.2}) rotate(-90)" text-anchor="middle">C_E / C_H</text>"#,
        (TOP + BOTTOM) / 2.0
    );

    let ce: Vec<(f64, f64)> = rows.iter().map(|r| (x(r.p), y(r.ce_bits, cap_max))).collect();
    let ch: Vec<(f64, f64)> = rows.iter().map(|r| (x(r.p), y(r.ch_bits, cap_max))).collect();
    polyline(&mut s, &ce, "#1f77b4", "");
    polyline(&mut s, &ch, "#d62728", "");
    let mut segment = Vec::new();
    for r in rows {
        match r.ratio {
            Some(v) => segment.push((x(r.p), y(v, ratio_max))),
            None => polyline(&mut s, &std::mem::take(&mut segment), "#2ca02c", r#" stroke-dasharray="6,4""#),
        }
    }
    polyline(&mut s, &segment, "#2ca02c", r#" stroke-dasharray="6,4""#);

    let legend = [("#1f77b4", "C_E", ""), ("#d62728", "C_H", ""), ("#2ca02c", "C_E / C_H", r#" stroke-dasharray="6,4""#)];
    for (i, (color, label, dash)) in legend.iter().enumerate() {
        let yy = TOP + 20.0 + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{label}</text>"#,
            RIGHT - 150.0,
            RIGHT - 120.0,
            RIGHT - 112.0,
            yy + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn polyline(s: &mut String, points: &[(f64, f64)], color: &str, extra: &str) {
    if points.len() < 2 {
        return;
    }
    let coords: Vec<String> = points.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{extra}/>"#,
        coords.join(" ")
    );
}

fn trim(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
