//! Plain-text table output (CSV with `#` comment headers) and the matching
//! reader for scan files, so downstream commands can consume earlier runs.
//!
//! Floats are written with Rust's shortest round-trip formatting, which
//! keeps files diffable and lets a reader reproduce the exact bits.

use crate::error::{Error, Result};
use crate::indicator::IndicatorSample;
use std::fmt::Write as _;
use std::path::Path;

/// A CSV document: leading `# ` comment lines, one header row, data rows.
#[derive(Clone, Debug, Default)]
pub struct TableDoc {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TableDoc {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> TableDoc {
        TableDoc {
            comments: Vec::new(),
            header: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Add a `# ...` line above the header (config echo, provenance).
    pub fn comment(&mut self, text: impl AsRef<str>) -> &mut Self {
        self.comments.push(text.as_ref().to_string());
        self
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Render with LF line endings and a trailing newline.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Shortest decimal that parses back to exactly `v`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Empty cell for `None`, shortest round-trip otherwise.
pub fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_text(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values always serialize");
    text.push('\n');
    text
}

/// Read back a scan CSV written by this crate: columns are located by
/// header name, `#` lines are skipped, and missing optional columns
/// default to zero.  `y`, `total`, and `predicted_depth` are required.
pub fn read_scan_csv(path: &Path) -> Result<Vec<IndicatorSample>> {
    let text = std::fs::read_to_string(path)?;
    parse_scan_csv(&text, path)
}

pub fn parse_scan_csv(text: &str, origin: &Path) -> Result<Vec<IndicatorSample>> {
    let fail = |reason: String| Error::ScanParse {
        path: origin.to_path_buf(),
        reason,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| fail(String::from("no header row")))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |name: &str| columns.iter().position(|c| *c == name);
    let need =
        |name: &str| col(name).ok_or_else(|| fail(format!("missing required column `{name}`")));
    let y_col = need("y")?;
    let total_col = need("total")?;
    let depth_col = need("predicted_depth")?;
    let prime_col = col("prime_sum_re");
    let main_col = col("main_term_re");
    let smooth_col = col("smooth_term");

    let mut samples = Vec::new();
    for (lineno, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(fail(format!(
                "line {lineno}: expected {} cells, got {}",
                columns.len(),
                cells.len()
            )));
        }
        let field = |idx: usize| -> Result<f64> {
            cells[idx].parse().map_err(|_| {
                fail(format!(
                    "line {lineno}: column `{}` is not a number: `{}`",
                    columns[idx], cells[idx]
                ))
            })
        };
        let opt_field = |idx: Option<usize>| -> Result<f64> {
            idx.map(field).transpose().map(|v| v.unwrap_or(0.0))
        };
        samples.push(IndicatorSample {
            y: field(y_col)?,
            prime_sum_re: opt_field(prime_col)?,
            main_term_re: opt_field(main_col)?,
            smooth_term: opt_field(smooth_col)?,
            total: field(total_col)?,
            predicted_depth: field(depth_col)?,
        });
    }
    Ok(samples)
}
