use std::collections::BTreeMap;
use std::fmt::Write;

use super::BenchRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotAxis {
    Bits,
    Multiplier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotValue {
    MeanElapsedMs,
    MeanCandidates,
    SuccessRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotSeries {
    Algorithm,
    Bits,
    Multiplier,
}

impl PlotAxis {
    fn get(self, r: &BenchRecord) -> f64 {
        match self {
            PlotAxis::Bits => r.bits as f64,
            PlotAxis::Multiplier => r.multiplier,
        }
    }

    fn label(self) -> &'static str {
        match self {
            PlotAxis::Bits => "bits",
            PlotAxis::Multiplier => "bound multiplier",
        }
    }
}

impl PlotValue {
    fn label(self) -> &'static str {
        match self {
            PlotValue::MeanElapsedMs => "mean elapsed (ms)",
            PlotValue::MeanCandidates => "mean candidates tested",
            PlotValue::SuccessRate => "success rate",
        }
    }

    fn aggregate(self, rs: &[&BenchRecord]) -> f64 {
        let n = rs.len() as f64;
        match self {
            PlotValue::MeanElapsedMs => rs.iter().map(|r| r.elapsed_ms).sum::<f64>() / n,
            PlotValue::MeanCandidates => rs.iter().map(|r| r.candidates_tested as f64).sum::<f64>() / n,
            PlotValue::SuccessRate => rs.iter().filter(|r| r.success).count() as f64 / n,
        }
    }
}

impl std::str::FromStr for PlotAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bits" => Ok(PlotAxis::Bits),
            "multiplier" => Ok(PlotAxis::Multiplier),
            _ => Err(Error::invalid(format!("unknown x axis `{s}`"))),
        }
    }
}

impl std::str::FromStr for PlotValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "elapsed" | "mean_elapsed" => Ok(PlotValue::MeanElapsedMs),
            "candidates" => Ok(PlotValue::MeanCandidates),
            "success" => Ok(PlotValue::SuccessRate),
            _ => Err(Error::invalid(format!("unknown y value `{s}`"))),
        }
    }
}

impl std::str::FromStr for PlotSeries {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "algorithm" => Ok(PlotSeries::Algorithm),
            "bits" => Ok(PlotSeries::Bits),
            "multiplier" => Ok(PlotSeries::Multiplier),
            _ => Err(Error::invalid(format!("unknown series field `{s}`"))),
        }
    }
}

fn series_key(series: PlotSeries, r: &BenchRecord) -> String {
    match series {
        PlotSeries::Algorithm => r.algorithm.as_str().to_string(),
        PlotSeries::Bits => format!("{} bits", r.bits),
        PlotSeries::Multiplier => format!("x{}", r.multiplier),
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line chart of `value` aggregated per `x`, one polyline per `series`.
pub fn emit_svg_plot(
    records: &[BenchRecord],
    x: PlotAxis,
    value: PlotValue,
    series: PlotSeries,
    log_y: bool,
) -> Result<String> {
    if records.is_empty() {
        return Err(Error::invalid("no records to plot"));
    }
    let mut groups: BTreeMap<String, BTreeMap<u64, Vec<&BenchRecord>>> = BTreeMap::new();
    for r in records {
        groups.entry(series_key(series, r)).or_default().entry(x.get(r).to_bits()).or_default().push(r);
    }
    let lines: Vec<(String, Vec<(f64, f64)>)> = groups
        .into_iter()
        .map(|(name, cells)| {
            let mut pts: Vec<(f64, f64)> =
                cells.into_iter().map(|(xb, rs)| (f64::from_bits(xb), value.aggregate(&rs))).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            (name, pts)
        })
        .collect();

    let ty = |v: f64| if log_y { v.max(1e-9).log10() } else { v };
    let all = lines.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(px, py) in all {
        x0 = x0.min(px);
        x1 = x1.max(px);
        y0 = y0.min(ty(py));
        y1 = y1.max(ty(py));
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    if !log_y {
        y0 = y0.min(0.0);
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |v: f64| LEFT + (v - x0) / (x1 - x0) * plot_w;
    let sy = |v: f64| TOP + plot_h - (ty(v) - y0) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g id="axes" stroke="black"><line x1="{LEFT}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{b}"/></g>"#,
        b = TOP + plot_h,
        r = LEFT + plot_w
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let label_y = if log_y { format!("1e{fy:.1}") } else { format!("{fy:.3}") };
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{fx:.2}</text>"#,
            sx(fx),
            TOP + plot_h + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{label_y}</text>"#,
            LEFT - 6.0,
            TOP + plot_h - plot_h * i as f64 / 4.0 + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text id="x-label" x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        x.label()
    );
    let y_label = if log_y { format!("{} (log scale)", value.label()) } else { value.label().to_string() };
    let _ = writeln!(
        s,
        r#"<text id="y-label" x="18" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&y_label)
    );
    for (i, (name, pts)) in lines.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts.iter().map(|&(px, py)| format!("{:.2},{:.2}", sx(px), sy(py))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-series="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            escape(name),
            coords.join(" ")
        );
        let ly = TOP + 20.0 * i as f64 + 10.0;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            s,
            r#"<g class="legend"><line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="12">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
