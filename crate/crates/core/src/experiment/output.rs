//! Text serializations of Monte Carlo results. Floats use Rust's shortest
//! round-trip formatting, so re-parsing and re-writing is byte-identical.

use std::fmt::Write as _;

use super::stats::emit_cdf;
use super::{SampleRow, SuiteResult};
use crate::error::{Error, Result};

pub const SAMPLES_HEADER: &str = "band,mode,variant,drop_index,gini";

pub fn samples_csv(rows: &[SampleRow]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(SAMPLES_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.band,
            r.sample.mode.name(),
            r.sample.variant.name(),
            r.sample.drop_index,
            r.sample.value
        );
    }
    out
}

/// `gini,cdf` pairs of one series.
pub fn cdf_csv(values: &[f64]) -> String {
    let mut out = String::from("gini,cdf\n");
    for (v, f) in emit_cdf(values) {
        let _ = writeln!(out, "{v},{f}");
    }
    out
}

pub fn summary_json(result: &SuiteResult) -> Result<String> {
    #[derive(serde::Serialize)]
    struct Summary<'a> {
        master_seed: u64,
        drops: usize,
        gates_passed: bool,
        reports: &'a [super::PercentileReport],
    }
    let s = Summary {
        master_seed: result.master_seed,
        drops: result.drops,
        gates_passed: result.gates_passed(),
        reports: &result.reports,
    };
    serde_json::to_string_pretty(&s).map_err(|e| Error::invalid("summary", e.to_string()))
}

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 40.0;

/// Standalone SVG of the empirical CDF on `[0, 1] × [0, 1]`.
pub fn cdf_svg(title: &str, values: &[f64]) -> String {
    let x = |g: f64| PAD + g.clamp(0.0, 1.0) * (W - 2.0 * PAD);
    let y = |f: f64| H - PAD - f * (H - 2.0 * PAD);
    let mut points = String::new();
    for (v, f) in emit_cdf(values) {
        let _ = write!(points, "{:.2},{:.2} ", x(v), y(f));
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{PAD} {PAD} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    for t in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{t}</text>"#,
            x(t),
            H - PAD + 14.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{t}</text>"#,
            PAD - 4.0,
            y(t) + 3.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="20" font-size="12" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        points.trim_end()
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
