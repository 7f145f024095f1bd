//! Trace CSV files: one row per improvement event plus one per stage
//! boundary, floats rendered with 17 significant digits so a re-run
//! compares bit-exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use dhs_core::report::RunReport;

pub const TRACE_HEADER: &str = "evaluation,best_value,stage";

/// 17-significant-digit rendering: lossless for f64.
pub fn format_value(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn render_trace(report: &RunReport) -> String {
    let mut out = String::with_capacity(64 * (report.trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for row in &report.trace {
        out.push_str(&row.evaluation.to_string());
        out.push(',');
        out.push_str(&format_value(row.best_value));
        out.push(',');
        out.push_str(row.stage.label());
        out.push('\n');
    }
    out
}

pub fn write_trace(report: &RunReport, path: &Path) -> std::io::Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(render_trace(report).as_bytes())
}

/// A trace row read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRow {
    pub evaluation: u64,
    pub best_value: f64,
    pub stage: String,
}

/// Parses a trace file; the inverse of [`render_trace`] for checking
/// emitted summaries independently.
pub fn parse_trace(text: &str) -> Result<Vec<ParsedRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == TRACE_HEADER => {}
        other => return Err(format!("bad trace header: {other:?}")),
    }
    lines
        .enumerate()
        .map(|(index, line)| {
            let mut parts = line.split(',');
            let error = || format!("bad trace row {}: `{line}`", index + 2);
            let evaluation = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(error)?;
            let best_value = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(error)?;
            let stage = parts.next().ok_or_else(error)?.to_string();
            if parts.next().is_some() {
                return Err(error());
            }
            Ok(ParsedRow {
                evaluation,
                best_value,
                stage,
            })
        })
        .collect()
}
