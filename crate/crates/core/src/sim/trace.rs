use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::run::TraceRecord;

pub const TRACE_HEADER: &str = "t,att_err_rad,omega_err,lyapunov,innovation_norm,commutation_residual";

/// Writes the trace with shortest round-trip float formatting.
pub fn write_trace_csv(trace: &[TraceRecord], path: &Path) -> Result<()> {
    if trace.is_empty() {
        return Err(Error::Config("cannot write an empty trace".into()));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "{TRACE_HEADER}")?;
        for r in trace {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.t, r.att_err_rad, r.omega_err, r.lyapunov, r.innovation_norm, r.commutation_residual
            )?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let csv_err = |line: usize, msg: String| Error::Csv {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(TRACE_HEADER) {
        return Err(csv_err(1, format!("expected header `{TRACE_HEADER}`")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let v = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| csv_err(n + 2, e.to_string()))?;
            match v[..] {
                [t, att_err_rad, omega_err, lyapunov, innovation_norm, commutation_residual] => Ok(TraceRecord {
                    t,
                    att_err_rad,
                    omega_err,
                    lyapunov,
                    innovation_norm,
                    commutation_residual,
                }),
                _ => Err(csv_err(n + 2, format!("expected 6 columns, got {}", v.len()))),
            }
        })
        .collect()
}

const WIDTH: f64 = 900.0;
const PANEL_HEIGHT: f64 = 220.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const PANEL_GAP: f64 = 50.0;
const MAX_POINTS: usize = 2000;
const LOG_FLOOR: f64 = 1e-16;

type Series = (&'static str, &'static str, fn(&TraceRecord) -> f64);

/// Three stacked log-scale panels: attitude error, angular velocity error, Lyapunov value.
pub fn render_plot_svg(trace: &[TraceRecord]) -> Result<String> {
    if trace.is_empty() {
        return Err(Error::Config("cannot plot an empty trace".into()));
    }
    let series: [Series; 3] = [
        ("attitude error [rad]", "#1f77b4", |r| r.att_err_rad),
        ("angular velocity error [rad/s]", "#d62728", |r| r.omega_err),
        ("Lyapunov value", "#2ca02c", |r| r.lyapunov),
    ];
    let stride = trace.len().div_ceil(MAX_POINTS).max(1);
    let samples: Vec<&TraceRecord> = trace
        .iter()
        .step_by(stride)
        .chain(std::iter::once(&trace[trace.len() - 1]))
        .collect();
    let t0 = trace[0].t;
    let t1 = trace[trace.len() - 1].t;
    let t_span = if t1 > t0 { t1 - t0 } else { 1.0 };
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let height = MARGIN_TOP + 3.0 * (PANEL_HEIGHT + PANEL_GAP);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, (label, color, value)) in series.iter().enumerate() {
        let top = MARGIN_TOP + i as f64 * (PANEL_HEIGHT + PANEL_GAP);
        let logs: Vec<f64> = samples.iter().map(|r| value(r).max(LOG_FLOOR).log10()).collect();
        let lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor();
        let mut hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
        if hi <= lo {
            hi = lo + 1.0;
        }
        let y = |l: f64| top + PANEL_HEIGHT * (hi - l) / (hi - lo);
        let x = |t: f64| MARGIN_LEFT + plot_w * (t - t0) / t_span;

        let _ = writeln!(svg, r#"<g class="panel">"#);
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN_LEFT}" y="{top}" width="{plot_w}" height="{PANEL_HEIGHT}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(svg, r#"<text x="{MARGIN_LEFT}" y="{}">{label}</text>"#, top - 8.0);
        let mut decade = lo;
        while decade <= hi {
            let _ = writeln!(
                svg,
                r##"<line x1="{MARGIN_LEFT}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#dddddd"/><text x="{2}" y="{3:.2}" text-anchor="end">1e{decade}</text>"##,
                y(decade),
                MARGIN_LEFT + plot_w,
                MARGIN_LEFT - 6.0,
                y(decade) + 4.0,
            );
            decade += 1.0;
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">t = {t1} s</text>"#,
            MARGIN_LEFT + plot_w,
            top + PANEL_HEIGHT + 16.0
        );
        let points: Vec<String> = samples
            .iter()
            .zip(&logs)
            .map(|(r, &l)| format!("{:.2},{:.2}", x(r.t), y(l)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            points.join(" ")
        );
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_plot_svg(trace: &[TraceRecord], path: &Path) -> Result<()> {
    let svg = render_plot_svg(trace)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(t: f64) -> TraceRecord {
        TraceRecord {
            t,
            att_err_rad: 0.5 * (-t).exp(),
            omega_err: 1.0 / (1.0 + t),
            lyapunov: 2.0 * (-2.0 * t).exp(),
            innovation_norm: 0.1,
            commutation_residual: 0.0,
        }
    }

    #[test]
    fn single_record_csv_has_two_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        write_trace_csv(&[record(0.0)], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap(), TRACE_HEADER);
        assert!(write_trace_csv(&[], &path).is_err());
        assert!(matches!(
            write_trace_csv(&[record(0.0)], &dir.path().join("no/such/dir.csv")),
            Err(Error::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn csv_round_trip(values in prop::collection::vec((0.0..1e3f64, 0.0..3.2f64, 0.0..1e2f64, 0.0..1e4f64, 0.0..2.0f64, 0.0..3.0f64), 1..20)) {
            let trace: Vec<TraceRecord> = values
                .iter()
                .map(|&(t, a, w, l, i, c)| TraceRecord { t, att_err_rad: a, omega_err: w, lyapunov: l, innovation_norm: i, commutation_residual: c })
                .collect();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("trace.csv");
            write_trace_csv(&trace, &path).unwrap();
            prop_assert_eq!(read_trace_csv(&path).unwrap(), trace);
        }
    }

    #[test]
    fn svg_has_three_series() {
        let trace: Vec<_> = (0..5000).map(|k| record(k as f64 * 0.01)).collect();
        let svg = render_plot_svg(&trace).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 3);
        let single = render_plot_svg(&[record(0.0)]).unwrap();
        assert_eq!(single.matches("<polyline").count(), 3);
        assert!(render_plot_svg(&[]).is_err());
    }
}
