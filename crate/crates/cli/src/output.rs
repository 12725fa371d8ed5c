//! CSV tables, verdict records and the text summary.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

/// `x` with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A CSV table held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One pass/fail check. `pass` always equals `value cmp threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub params: Value,
    pub value: f64,
    pub threshold: f64,
    pub cmp: Comparison,
    pub pass: bool,
}

impl Verdict {
    pub fn at_most(name: impl Into<String>, params: Value, value: f64, threshold: f64) -> Self {
        Verdict {
            name: name.into(),
            params,
            value,
            threshold,
            cmp: Comparison::AtMost,
            pass: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, params: Value, value: f64, threshold: f64) -> Self {
        Verdict {
            name: name.into(),
            params,
            value,
            threshold,
            cmp: Comparison::AtLeast,
            pass: value >= threshold,
        }
    }

    pub fn summary_line(&self) -> String {
        let op = match self.cmp {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        };
        format!(
            "{} {} value={:e} {op} {:e} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold,
            self.params
        )
    }
}

pub fn all_pass(verdicts: &[Verdict]) -> bool {
    verdicts.iter().all(|v| v.pass)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// `verdicts.jsonl` (one record per line) and `summary.txt`.
pub fn write_verdicts(dir: &Path, verdicts: &[Verdict], extra_summary: &str) -> Result<()> {
    let mut jsonl = String::new();
    for v in verdicts {
        jsonl.push_str(&serde_json::to_string(v)?);
        jsonl.push('\n');
    }
    let path = dir.join("verdicts.jsonl");
    fs::write(&path, jsonl).map_err(|e| CliError::io(&path, e))?;

    let mut text = String::new();
    if !extra_summary.is_empty() {
        text.push_str(extra_summary);
        if !extra_summary.ends_with('\n') {
            text.push('\n');
        }
    }
    for v in verdicts {
        let _ = writeln!(text, "{}", v.summary_line());
    }
    let passed = verdicts.iter().filter(|v| v.pass).count();
    let _ = writeln!(text, "{passed}/{} verdicts pass", verdicts.len());
    let path = dir.join("summary.txt");
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::f64::consts::PI] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
    }

    #[test]
    fn verdict_pass_matches_comparison() {
        assert!(Verdict::at_most("a", json!({}), 1.0, 1.0).pass);
        assert!(!Verdict::at_most("a", json!({}), 1.1, 1.0).pass);
        assert!(!Verdict::at_least("b", json!({}), 0.5, 1.0).pass);
        assert!(!Verdict::at_most("nan", json!({}), f64::NAN, 1.0).pass);
        let line = serde_json::to_string(&Verdict::at_least("b", json!({"n": 3}), 2.0, 1.0)).unwrap();
        assert_eq!(line, r#"{"name":"b","params":{"n":3},"value":2.0,"threshold":1.0,"cmp":">=","pass":true}"#);
    }
}
