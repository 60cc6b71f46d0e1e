//! Pass/fail records shared by the verification routines and the CLI.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One named check. `witness` carries a counterexample on failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Pass, lhs: None, rhs: None, witness: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Fail,
            lhs: None,
            rhs: None,
            witness: Some(witness.into()),
        }
    }

    /// Builds a check from a condition; the witness is only rendered on failure.
    pub fn expect(name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Check::pass(name)
        } else {
            Check::fail(name, witness())
        }
    }

    /// First counterexample from an iterator of failures, if any.
    pub fn first_failure<I: IntoIterator<Item = String>>(name: impl Into<String>, failures: I) -> Self {
        match failures.into_iter().next() {
            None => Check::pass(name),
            Some(w) => Check::fail(name, w),
        }
    }

    /// Compares two rendered values; both are recorded either way.
    pub fn compare(name: impl Into<String>, lhs: String, rhs: String) -> Self {
        let mut c = if lhs == rhs {
            Check::pass(name)
        } else {
            Check::fail(name, format!("{lhs} != {rhs}"))
        };
        c.lhs = Some(lhs);
        c.rhs = Some(rhs);
        c
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(Check::passed)
}

/// Output format of a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Md,
    Text,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" => Ok(Format::Md),
            "text" => Ok(Format::Text),
            _ => Err(Error::InvalidInput(format!("unknown format {s}"))),
        }
    }
}

/// Settings shared by every command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Working precision in bits for numerical class polynomial evaluation.
    pub precision: u32,
    /// Truncation order for q-series checks.
    pub order: u32,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub verbosity: u8,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { precision: 512, order: 4, format: Format::Text, cache_dir: None, verbosity: 0 }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.precision < 128 {
            return Err(Error::InvalidInput(format!("precision {} is below 128 bits", self.precision)));
        }
        if self.order < 2 {
            return Err(Error::InvalidInput(format!("series order {} is below 2", self.order)));
        }
        Ok(())
    }
}

/// Result of one command: the checks it ran and an optional payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<serde_json::Value>,
    pub checks: Vec<Check>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        all_pass(&self.checks)
    }

    /// 0 if every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            Format::Csv => {
                let mut out = String::from("name,status,lhs,rhs,witness\n");
                for c in &self.checks {
                    let cells = [
                        c.name.clone(),
                        status_word(c).to_lowercase(),
                        c.lhs.clone().unwrap_or_default(),
                        c.rhs.clone().unwrap_or_default(),
                        c.witness.clone().unwrap_or_default(),
                    ];
                    let quoted: Vec<String> = cells.iter().map(|s| csv_field(s)).collect();
                    out.push_str(&quoted.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Md => {
                let mut out = String::from("| check | status | lhs | rhs |\n|---|---|---|---|\n");
                for c in &self.checks {
                    let _ = writeln!(
                        out,
                        "| {} | {} | {} | {} |",
                        c.name,
                        status_word(c),
                        c.lhs.as_deref().unwrap_or(""),
                        c.rhs.as_deref().unwrap_or("")
                    );
                }
                out
            }
            Format::Text => {
                let mut out = String::new();
                for c in &self.checks {
                    let _ = write!(out, "{} {}", status_word(c), c.name);
                    match (&c.lhs, &c.rhs, c.passed()) {
                        (Some(l), _, true) => {
                            let _ = write!(out, ": {l}");
                        }
                        (_, _, false) => {
                            let _ = write!(out, ": {}", c.witness.as_deref().unwrap_or(""));
                        }
                        _ => {}
                    }
                    out.push('\n');
                }
                out
            }
        }
    }
}

fn status_word(c: &Check) -> &'static str {
    if c.passed() {
        "PASS"
    } else {
        "FAIL"
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
