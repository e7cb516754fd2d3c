use std::fmt;
use std::path::Path;

use crate::error::Result;
use crate::output::{fmt_f64, CsvFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Measured and reported, not gated.
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub subject: String,
    pub measured: f64,
    pub threshold: f64,
    pub status: Status,
}

impl Check {
    /// Passes when `measured ≤ threshold`; NaN fails.
    pub fn at_most(name: &str, subject: &str, measured: f64, threshold: f64) -> Self {
        let status = if measured <= threshold { Status::Pass } else { Status::Fail };
        Self { name: name.into(), subject: subject.into(), measured, threshold, status }
    }

    pub fn info(name: &str, subject: &str, measured: f64) -> Self {
        Self { name: name.into(), subject: subject.into(), measured, threshold: f64::NAN, status: Status::Info }
    }

    pub fn failed(name: &str, subject: &str, measured: f64, threshold: f64) -> Self {
        Self { name: name.into(), subject: subject.into(), measured, threshold, status: Status::Fail }
    }
}

/// Ordered list of checks; passes iff no check failed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// `check,subject,measured,threshold,status` plus a closing `overall` row.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut csv = CsvFile::create(path, &["check", "subject", "measured", "threshold", "status"])?;
        for c in &self.checks {
            let threshold = if c.threshold.is_nan() { String::new() } else { fmt_f64(c.threshold) };
            csv.row(&[&c.name, &c.subject, &fmt_f64(c.measured), &threshold, c.status.as_str()])?;
        }
        let overall = if self.passed() { Status::Pass } else { Status::Fail };
        csv.row(&["overall", "", "", "", overall.as_str()])?;
        csv.finish()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let threshold = if c.threshold.is_nan() { "-".to_string() } else { format!("{:.3e}", c.threshold) };
            writeln!(f, "{:<5} {:<38} {:<20} {:>11.4e}  (limit {threshold})", c.status.as_str(), c.name, c.subject, c.measured)?;
        }
        write!(f, "overall: {}", if self.passed() { "pass" } else { "fail" })
    }
}
