//! Parameter sweeps over the time budget or the SNR threshold, with CSV
//! and static SVG output.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{genetic_plan, shortest_time_plan, GaConfig};
use crate::error::SolveError;
use crate::model::units::db_to_linear;
use crate::model::Scenario;
use crate::solver::{solve, Method, Plan, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Mission-time budget in seconds.
    TMax,
    /// Minimum SNR in dB.
    SnrThresholdDb,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::TMax => "t_max",
            Axis::SnrThresholdDb => "snr_threshold_db",
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Axis::TMax => "mission-time budget (s)",
            Axis::SnrThresholdDb => "SNR threshold (dB)",
        }
    }

    /// `base` with this axis set to `value`; coverage radii follow.
    pub fn apply(&self, base: &Scenario, value: f64) -> Scenario {
        match self {
            Axis::TMax => base.with_t_max(value),
            Axis::SnrThresholdDb => base.with_snr_threshold(db_to_linear(value)),
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "t_max" => Ok(Axis::TMax),
            "snr_threshold_db" | "snr" => Ok(Axis::SnrThresholdDb),
            other => Err(format!("unknown sweep axis {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub base_scenario: PathBuf,
    pub methods: Vec<Method>,
}

impl SweepSpec {
    pub fn check(&self) -> Result<(), SolveError> {
        check_axis(&self.values, &self.methods)
    }
}

fn check_axis(values: &[f64], methods: &[Method]) -> Result<(), SolveError> {
    let bad = |msg: String| Err(SolveError::Config(msg));
    if values.is_empty() {
        return bad("sweep needs at least one value".into());
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return bad(format!("sweep value {v} is not finite"));
    }
    let up = values.windows(2).all(|w| w[0] < w[1]);
    let down = values.windows(2).all(|w| w[0] > w[1]);
    if !(up || down) {
        return bad("sweep values must be strictly increasing or strictly decreasing".into());
    }
    if methods.is_empty() {
        return bad("sweep needs at least one method".into());
    }
    if methods.contains(&Method::Exhaustive) {
        return bad("exhaustive search is not a sweep method".into());
    }
    Ok(())
}

/// One method at one axis value; `None` cells mean no feasible plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub method: Method,
    pub handovers: Option<u32>,
    pub time_s: Option<f64>,
    pub feasible: bool,
}

/// Plan with any non-exhaustive method.
pub fn plan_with(
    method: Method,
    scenario: &Scenario,
    solver: &SolverConfig,
    ga: &GaConfig,
) -> Result<Plan, SolveError> {
    match method {
        Method::Proposed => solve(scenario, solver),
        Method::ShortestTime => shortest_time_plan(scenario),
        Method::Genetic => genetic_plan(scenario, ga),
        Method::Exhaustive => crate::solver::exhaustive_oracle(scenario),
    }
}

/// Rows in `values` order, then `methods` order. Points run in parallel.
pub fn run_sweep(
    base: &Scenario,
    axis: Axis,
    values: &[f64],
    methods: &[Method],
    solver: &SolverConfig,
    ga: &GaConfig,
) -> Result<Vec<SweepRow>, SolveError> {
    check_axis(values, methods)?;
    base.check()?;
    let points: Vec<Result<Vec<SweepRow>, SolveError>> = values
        .par_iter()
        .map(|&value| {
            let scenario = axis.apply(base, value);
            methods
                .iter()
                .map(|&method| match plan_with(method, &scenario, solver, ga) {
                    Ok(plan) => Ok(SweepRow {
                        axis_value: value,
                        method,
                        handovers: Some(plan.handovers),
                        time_s: Some(plan.mission_time_s),
                        feasible: plan.solver_meta.feasible,
                    }),
                    Err(e) if e.is_infeasible() => Ok(SweepRow {
                        axis_value: value,
                        method,
                        handovers: None,
                        time_s: None,
                        feasible: false,
                    }),
                    Err(e) => Err(e),
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for p in points {
        rows.extend(p?);
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("axis_value,method,handovers,time_s,feasible\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.axis_value,
            r.method,
            r.handovers.map(|h| h.to_string()).unwrap_or_default(),
            r.time_s.map(|t| t.to_string()).unwrap_or_default(),
            r.feasible
        );
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Handover count against the axis value, one line per method. Infeasible
/// points break the line.
pub fn rows_to_svg(axis: Axis, rows: &[SweepRow]) -> String {
    let mut methods: Vec<Method> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let (x_lo, x_hi) = bounds(rows.iter().map(|r| r.axis_value));
    let y_max = rows.iter().filter_map(|r| r.handovers).max().unwrap_or(0).max(1);
    let (y_lo, y_hi) = (0.0, f64::from(y_max) + 1.0);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    for y in 0..=y_max + 1 {
        let py = sy(f64::from(y));
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_L}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y}</text>"##,
            MARGIN_L + plot_w,
            MARGIN_L - 6.0,
            py + 4.0
        );
    }
    for x in ticks(x_lo, x_hi) {
        let px = sx(x);
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0,
            MARGIN_T + plot_h + 18.0,
            trim(x)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 14.0,
        axis.label()
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">number of handovers</text>"#,
        MARGIN_T + plot_h / 2.0
    );

    for (i, m) in methods.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut segment: Vec<(f64, f64)> = Vec::new();
        let flush = |seg: &mut Vec<(f64, f64)>, s: &mut String| {
            if seg.len() > 1 {
                let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                    pts.join(" ")
                );
            }
            seg.clear();
        };
        for r in rows.iter().filter(|r| r.method == *m) {
            match r.handovers {
                Some(h) => {
                    let p = (sx(r.axis_value), sy(f64::from(h)));
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, p.0, p.1);
                    segment.push(p);
                }
                None => flush(&mut segment, &mut s),
            }
        }
        flush(&mut segment, &mut s);
        let ly = MARGIN_T + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_R + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{m}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

/// Round-number ticks covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|k| k * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut out = Vec::new();
    let mut x = (lo / step).ceil() * step;
    while x <= hi + step * 1e-9 {
        out.push(x);
        x += step;
    }
    out
}

fn trim(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
