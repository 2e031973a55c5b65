//! CSV vertex tables and the SVG overlay plot.

use std::fmt::Write as _;
use std::path::Path;

use icc_core::geom::{RatePair, Region2D};

use crate::error::CliError;

pub const CSV_HEADER: [&str; 2] = ["r1_bits", "r2_bits"];

/// Six decimals, never `-0.000000`.
pub fn fmt_bits(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.chars().all(|c| matches!(c, '-' | '0' | '.')) {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Hull vertices, CCW from the lexicographic minimum.
pub fn write_csv(path: &Path, region: &Region2D) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(CSV_HEADER).map_err(io)?;
    for v in region.vertices() {
        w.write_record([fmt_bits(v.r1), fmt_bits(v.r2)])
            .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<RatePair>, CliError> {
    let bad = |m: String| CliError::validation(path.display().to_string(), m);
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .ok_or_else(|| bad("short row".into()))?
                .parse()
                .map_err(|e: std::num::ParseFloatError| bad(e.to_string()))
        };
        out.push(RatePair::new(num(0)?, num(1)?));
    }
    Ok(out)
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 600.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 540.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn tick_step(max: f64) -> f64 {
    [0.1, 0.2, 0.25, 0.5, 1.0, 2.0, 5.0]
        .into_iter()
        .find(|s| max / s <= 10.0)
        .unwrap_or(10.0)
}

/// One closed outline per region, axes in bits, legend on the right.
pub fn render_svg(regions: &[(String, &Region2D)]) -> String {
    let max = regions
        .iter()
        .flat_map(|(_, r)| r.vertices())
        .fold(0.0f64, |m, v| m.max(v.r1).max(v.r2));
    let step = tick_step(max.max(0.1));
    let top = (max / step).ceil().max(1.0) * step;
    let x = |r1: f64| LEFT + (RIGHT - LEFT) * r1 / top;
    let y = |r2: f64| BOTTOM - (BOTTOM - TOP) * r2 / top;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let n = (top / step).round() as usize;
    for i in 0..=n {
        let v = i as f64 * step;
        let (px, py) = (x(v), y(v));
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{TOP:.2}" x2="{px:.2}" y2="{BOTTOM:.2}" stroke="#e0e0e0"/><line x1="{LEFT:.2}" y1="{py:.2}" x2="{RIGHT:.2}" y2="{py:.2}" stroke="#e0e0e0"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{v:.2}</text><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            BOTTOM + 16.0,
            LEFT - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT:.2}" y1="{BOTTOM:.2}" x2="{RIGHT:.2}" y2="{BOTTOM:.2}" stroke="black"/><line x1="{LEFT:.2}" y1="{BOTTOM:.2}" x2="{LEFT:.2}" y2="{TOP:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">R1 (bits)</text>"#,
        0.5 * (LEFT + RIGHT),
        BOTTOM + 40.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">R2 (bits)</text>"#,
        0.5 * (TOP + BOTTOM),
        0.5 * (TOP + BOTTOM)
    );
    for (i, (name, region)) in regions.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts: Vec<String> = region
            .vertices()
            .iter()
            .map(|v| format!("{:.2},{:.2}", x(v.r1), y(v.r2)))
            .collect();
        if let Some(first) = pts.first().cloned() {
            pts.push(first);
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 20.0 + 22.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            RIGHT + 20.0,
            RIGHT + 50.0,
            RIGHT + 58.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use icc_core::geom::convex_hull;

    #[test]
    fn bits_format() {
        assert_eq!(fmt_bits(1.0), "1.000000");
        assert_eq!(fmt_bits(-1e-12), "0.000000");
        assert_eq!(fmt_bits(0.1234567), "0.123457");
    }

    #[test]
    fn svg_has_one_outline_per_region() {
        let a = Region2D::new(convex_hull(&[
            RatePair::new(0.0, 0.0),
            RatePair::new(1.0, 0.0),
            RatePair::new(0.0, 1.0),
        ]));
        let b = Region2D::new(convex_hull(&[
            RatePair::new(0.0, 0.0),
            RatePair::new(1.5, 0.0),
            RatePair::new(0.0, 0.5),
        ]));
        let svg = render_svg(&[("a".into(), &a), ("b<c".into(), &b)]);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(r#"width="800" height="600""#));
        assert!(svg.contains("b&lt;c"));
        assert!(svg.contains("R1 (bits)") && svg.contains("R2 (bits)"));
    }
}
