//! CSV trace files.
//!
//! ```text
//! # label: run-07
//! # rotations: 30,61
//! step,x_um,y_um
//! 0,0,0
//! 1,700,5
//! ```
//!
//! Values are decimal integers in scaled units. LF and CRLF line endings
//! are accepted; output always uses LF.

use std::fmt::Write as _;
use std::path::Path;

use needle_core::{ObservationTrace, TraceMeta, TracePoint};

use crate::error::CliError;

pub const HEADER: &str = "step,x_um,y_um";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

pub fn parse_trace(text: &str) -> Result<ObservationTrace, ParseError> {
    let mut meta = TraceMeta::default();
    let mut points: Vec<TracePoint> = Vec::new();
    let mut seen_header = false;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(list) = comment.strip_prefix("rotations:") {
                meta.actual_rotation_steps = list
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<u32>()
                            .map_err(|_| err(line_no, format!("bad rotation step `{s}`")))
                    })
                    .collect::<Result<_, _>>()?;
            } else if let Some(label) = comment.strip_prefix("label:") {
                meta.label = Some(label.trim().to_string());
            }
            continue;
        }
        if !seen_header {
            if line != HEADER {
                return Err(err(line_no, format!("expected header `{HEADER}`")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(err(line_no, format!("expected 3 fields, found {}", fields.len())));
        }
        let step: u32 = fields[0]
            .parse()
            .map_err(|_| err(line_no, format!("bad step `{}`", fields[0])))?;
        let x: i64 = fields[1]
            .parse()
            .map_err(|_| err(line_no, format!("bad x `{}`", fields[1])))?;
        let y: i64 = fields[2]
            .parse()
            .map_err(|_| err(line_no, format!("bad y `{}`", fields[2])))?;
        if let Some(prev) = points.last() {
            if step <= prev.step {
                return Err(err(
                    line_no,
                    format!("step {step} does not increase (previous {})", prev.step),
                ));
            }
        }
        points.push(TracePoint::new(step, x, y));
    }
    if points.is_empty() {
        return Err(err(last_line.max(1), "trace has no data rows"));
    }
    ObservationTrace::new(points, meta).map_err(|e| err(last_line, e.to_string()))
}

pub fn format_trace(trace: &ObservationTrace) -> String {
    let mut out = String::new();
    if let Some(label) = &trace.meta.label {
        let _ = writeln!(out, "# label: {label}");
    }
    if !trace.meta.actual_rotation_steps.is_empty() {
        let list: Vec<String> = trace.meta.actual_rotation_steps.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "# rotations: {}", list.join(","));
    }
    out.push_str(HEADER);
    out.push('\n');
    for p in trace.points() {
        let _ = writeln!(out, "{},{},{}", p.step, p.x, p.y);
    }
    out
}

pub fn load_trace(path: &Path) -> Result<ObservationTrace, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_trace(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub fn save_trace(path: &Path, trace: &ObservationTrace) -> Result<(), CliError> {
    std::fs::write(path, format_trace(trace)).map_err(|e| CliError::io(path, e))
}
