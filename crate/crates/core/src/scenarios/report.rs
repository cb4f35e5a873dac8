use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str =
    "scenario,n,h,alpha,t,symbol_id,value_re,value_im,budget,predicted_re,predicted_im,abs_error,tolerance,pass";

/// Time at which a row was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowTime {
    Averaged,
    At(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    pub n: usize,
    pub h: f64,
    pub alpha: f64,
    pub t: RowTime,
    pub symbol_id: String,
    pub value: Complex64,
    pub budget: f64,
    pub predicted: Complex64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ReportRow {
    /// Builds a row; `abs_error` and `pass` are derived from the other fields.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        scenario: &str,
        n: usize,
        h: f64,
        alpha: f64,
        t: RowTime,
        symbol_id: impl Into<String>,
        value: Complex64,
        budget: f64,
        predicted: Complex64,
        tolerance: f64,
    ) -> Self {
        let abs_error = (value - predicted).norm();
        ReportRow {
            scenario: scenario.to_string(),
            n,
            h,
            alpha,
            t,
            symbol_id: symbol_id.into(),
            value,
            budget,
            predicted,
            abs_error,
            tolerance,
            pass: passes(abs_error, budget, tolerance),
        }
    }

    pub fn to_csv_line(&self) -> String {
        let t = match self.t {
            RowTime::Averaged => "averaged".to_string(),
            RowTime::At(t) => fmt_float(t),
        };
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scenario,
            self.n,
            fmt_float(self.h),
            fmt_float(self.alpha),
            t,
            self.symbol_id,
            fmt_float(self.value.re),
            fmt_float(self.value.im),
            fmt_float(self.budget),
            fmt_float(self.predicted.re),
            fmt_float(self.predicted.im),
            fmt_float(self.abs_error),
            fmt_float(self.tolerance),
            self.pass
        );
        s
    }
}

pub fn passes(abs_error: f64, budget: f64, tolerance: f64) -> bool {
    abs_error <= budget.max(tolerance)
}

/// 17 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub rows: usize,
    pub max_abs_error: f64,
    /// Rows whose budget exceeds the configured ceiling.
    pub budget_violations: usize,
    pub all_pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

impl Report {
    pub fn new(scenario: &str, rows: Vec<ReportRow>, max_budget: Option<f64>) -> Self {
        let budget_violations = match max_budget {
            Some(cap) => rows.iter().filter(|r| !(r.budget <= cap)).count(),
            None => 0,
        };
        let summary = Summary {
            scenario: scenario.to_string(),
            rows: rows.len(),
            max_abs_error: rows.iter().map(|r| r.abs_error).fold(0.0, f64::max),
            budget_violations,
            all_pass: budget_violations == 0 && rows.iter().all(|r| r.pass),
        };
        Report { rows, summary }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_csv_line());
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, csv: &Path, summary: &Path) -> std::io::Result<()> {
        write_atomic(csv, self.to_csv().as_bytes())?;
        write_atomic(summary, self.summary_json().as_bytes())
    }
}

/// Writes to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
