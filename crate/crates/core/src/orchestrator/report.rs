use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::orchestrator::EvalReport;

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const METRICS: [&str; 7] = ["ap", "ap50", "ap75", "ap_s", "ap_m", "ap_l", "mean_p"];

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

/// Writes `report.json`, `report.csv` (one row per mode and metric) and one
/// `plot_<metric>.dat` file per metric with `mode_index value` lines.
pub fn emit_report(dir: &Path, report: &EvalReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(dir.join(REPORT_JSON), json)?;

    let mut w = csv::Writer::from_path(dir.join(REPORT_CSV))?;
    w.write_record(["mode", "metric", "value"])?;
    for r in &report.modes {
        for (name, v) in r.metrics() {
            w.write_record([r.mode.name(), name, &fmt_value(v)])?;
        }
    }
    w.flush()?;

    for metric in METRICS {
        let mut text = format!("# mode_index {metric}");
        for (i, r) in report.modes.iter().enumerate() {
            text.push_str(&format!(" {i}={}", r.mode));
        }
        text.push('\n');
        for (i, r) in report.modes.iter().enumerate() {
            let v = r.metrics().into_iter().find(|(n, _)| *n == metric).and_then(|(_, v)| v);
            writeln!(text, "{i} {}", v.map_or("nan".into(), |x| format!("{x:.6}"))).expect("string write");
        }
        fs::write(dir.join(format!("plot_{metric}.dat")), text)?;
    }
    Ok(())
}

pub fn load_report(path: &Path) -> Result<EvalReport> {
    let bytes = fs::read(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Fixed-width table of every metric per mode.
pub fn format_table(report: &EvalReport) -> String {
    let mut out = format!("{:<6}", "mode");
    for m in METRICS {
        write!(out, " {m:>8}").expect("string write");
    }
    out.push('\n');
    for r in &report.modes {
        write!(out, "{:<6}", r.mode.name()).expect("string write");
        for (_, v) in r.metrics() {
            let cell = v.map_or("-".into(), |x| format!("{x:.4}"));
            write!(out, " {cell:>8}").expect("string write");
        }
        out.push('\n');
    }
    out
}
