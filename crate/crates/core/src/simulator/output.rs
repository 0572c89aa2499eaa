use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

use super::config::{ModelKind, ScenarioConfig};
use super::metrics::{compute_metrics, Metrics};
use super::run::{RunStatus, SimTrace};

/// Nine significant digits in scientific notation.
fn num(x: f64) -> String {
    format!("{x:.8e}")
}

/// Header `t,<state cols>,<input cols>,rx,ry,yx,yy,err`.
pub fn csv_header(trace: &SimTrace) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend(trace.state_names.iter().cloned());
    cols.extend(trace.input_names.iter().cloned());
    cols.extend(["rx", "ry", "yx", "yy", "err"].map(String::from));
    cols.join(",")
}

/// Writes the trace as CSV. Rates are left empty on records without them.
pub fn write_csv(trace: &SimTrace, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{}", csv_header(trace))?;
    let n_in = trace.input_names.len();
    let mut line = String::new();
    for r in &trace.records {
        line.clear();
        line.push_str(&num(r.t));
        for x in &r.state {
            line.push(',');
            line.push_str(&num(*x));
        }
        for j in 0..n_in {
            line.push(',');
            if let Some(u) = &r.rates {
                line.push_str(&num(u[j]));
            }
        }
        for x in [r.r[0], r.r[1], r.y[0], r.y[1], r.err] {
            line.push(',');
            line.push_str(&num(x));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn csv_string(trace: &SimTrace) -> String {
    let mut buf = Vec::new();
    write_csv(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub model: String,
    pub controller: String,
    pub run: RunStatus,
    pub steps: usize,
    pub records: usize,
    pub metrics: Metrics,
    pub warnings: Vec<String>,
    pub config: ScenarioConfig,
}

pub fn summarize(trace: &SimTrace, cfg: &ScenarioConfig) -> Summary {
    Summary {
        model: trace.model.to_string(),
        controller: trace.controller.to_string(),
        run: trace.status.clone(),
        steps: trace.steps,
        records: trace.records.len(),
        metrics: compute_metrics(trace, cfg.settle_fraction),
        warnings: trace.warnings.clone(),
        config: cfg.clone(),
    }
}

const WIDTH: f64 = 800.0;
const MAX_HEIGHT: f64 = 800.0;
const PAD: f64 = 30.0;
const MAX_POINTS: usize = 4000;
const ARROW_PX: f64 = 14.0;

/// Reference and vehicle path as SVG polylines, with heading arrows once
/// per simulated second.
pub fn render_svg(trace: &SimTrace) -> String {
    let recs = &trace.records;
    let pts = |f: &dyn Fn(usize) -> [f64; 2]| -> Vec<[f64; 2]> {
        (0..recs.len())
            .map(f)
            .filter(|p| p[0].is_finite() && p[1].is_finite())
            .collect()
    };
    let reference = pts(&|i| recs[i].r);
    let path = pts(&|i| recs[i].y);

    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in reference.iter().chain(&path) {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span_x = (x1 - x0).max(1e-9);
    let span_y = (y1 - y0).max(1e-9);
    let scale = ((WIDTH - 2.0 * PAD) / span_x).min((MAX_HEIGHT - 2.0 * PAD) / span_y);
    let height = span_y * scale + 2.0 * PAD;
    let width = span_x * scale + 2.0 * PAD;
    let map = |p: [f64; 2]| [PAD + (p[0] - x0) * scale, PAD + (y1 - p[1]) * scale];

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="18" font-family="sans-serif" font-size="13">{} / {}: reference (blue, dashed), path (red)</text>"#,
        trace.model, trace.controller
    );
    polyline(&mut s, &reference, &map, "#1f4fbf", r#" stroke-dasharray="6 4""#);
    polyline(&mut s, &path, &map, "#c0282d", "");

    let every = ((1.0 / trace.dt).round() as usize).max(1);
    for r in recs.iter().step_by(every) {
        let heading = match trace.model {
            ModelKind::Unicycle | ModelKind::Bicycle => r.state[2],
            ModelKind::Trivial if r.flat.len() >= 4 => r.flat[3].atan2(r.flat[2]),
            ModelKind::Trivial => continue,
        };
        if !r.y.iter().all(|x| x.is_finite()) || !heading.is_finite() {
            continue;
        }
        let [px, py] = map(r.y);
        // screen y grows downward
        let (dx, dy) = (heading.cos(), -heading.sin());
        let (tx, ty) = (px + ARROW_PX * dx, py + ARROW_PX * dy);
        let (bx, by) = (tx - 5.0 * dx, ty - 5.0 * dy);
        let (nx, ny) = (-dy * 3.0, dx * 3.0);
        let _ = writeln!(
            s,
            r##"<g stroke="#333" fill="#333"><line x1="{px:.2}" y1="{py:.2}" x2="{bx:.2}" y2="{by:.2}" stroke-width="1.2"/><polygon points="{tx:.2},{ty:.2} {:.2},{:.2} {:.2},{:.2}" stroke="none"/></g>"##,
            bx + nx,
            by + ny,
            bx - nx,
            by - ny
        );
    }
    s.push_str("</svg>\n");
    s
}

fn polyline(
    s: &mut String,
    pts: &[[f64; 2]],
    map: &dyn Fn([f64; 2]) -> [f64; 2],
    color: &str,
    extra: &str,
) {
    if pts.is_empty() {
        return;
    }
    let stride = pts.len().div_ceil(MAX_POINTS).max(1);
    let mut coords: Vec<String> = pts
        .iter()
        .step_by(stride)
        .map(|&p| {
            let [x, y] = map(p);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    if !(pts.len() - 1).is_multiple_of(stride) {
        let [x, y] = map(pts[pts.len() - 1]);
        coords.push(format!("{x:.2},{y:.2}"));
    }
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{extra} points="{}"/>"#,
        coords.join(" ")
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{run_scenario, ControllerKind, ModelParams, ReferenceSpec};

    fn trace() -> (SimTrace, ScenarioConfig) {
        let cfg = ScenarioConfig {
            model: ModelKind::Unicycle,
            controller: ControllerKind::NrFlat,
            alpha: 100.0,
            horizon: 0.02,
            dt: 0.01,
            duration: 2.0,
            reference: ReferenceSpec::sine(),
            initial_state: Some(vec![1.0, -1.0, 0.5]),
            model_params: ModelParams::default(),
            settle_fraction: 0.02,
            out_dir: None,
        };
        (run_scenario(&cfg).unwrap(), cfg)
    }

    #[test]
    fn csv_layout() {
        let (tr, _) = trace();
        let text = csv_string(&tr);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,px,py,theta,v,v_dot,omega,rx,ry,yx,yy,err"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 12);
        assert_eq!(first[0], "0.00000000e0");
        assert_eq!(first[1], "1.00000000e0");
        let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
        assert_eq!(last[5], "");
        assert_eq!(text.lines().count(), 202);
    }

    #[test]
    fn svg_has_both_strokes_and_arrows() {
        let (tr, _) = trace();
        let svg = render_svg(&tr);
        assert_eq!(svg.matches("<polyline").count(), 2);
        // t = 0, 1, 2
        assert_eq!(svg.matches("<polygon").count(), 3);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn summary_serializes() {
        let (tr, cfg) = trace();
        let json = serde_json::to_value(summarize(&tr, &cfg)).unwrap();
        assert_eq!(json["run"]["status"], "completed");
        assert_eq!(json["records"], 201);
        assert_eq!(json["config"]["horizon_T"], 0.02);
    }
}
