//! Versioned, deterministic suite reports.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::AppResult;

pub const SCHEMA: &str = "1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One measured quantity. Exploratory rows carry no tolerance and never fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// NaN (written as `null`) when the computation itself failed.
    #[serde(deserialize_with = "nan_if_null")]
    pub value: f64,
    pub tolerance: Option<f64>,
    /// `lower` checks pass when `value < tolerance`, `upper` ones when `value > tolerance`.
    #[serde(default = "lower")]
    pub direction: String,
    pub pass: Option<bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub info: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn nan_if_null<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

fn lower() -> String {
    "lower".into()
}

impl Check {
    /// Passes when `value < tolerance` (NaN fails).
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance: Some(tolerance),
            direction: lower(),
            pass: Some(value < tolerance),
            info: BTreeMap::new(),
            error: None,
        }
    }

    /// Passes when `value > threshold`; used for negative controls.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance: Some(threshold),
            direction: "upper".into(),
            pass: Some(value > threshold),
            info: BTreeMap::new(),
            error: None,
        }
    }

    pub fn info_only(name: impl Into<String>, value: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance: None,
            direction: lower(),
            pass: None,
            info: BTreeMap::new(),
            error: None,
        }
    }

    /// A check whose computation raised an error; always fails.
    pub fn errored(name: impl Into<String>, tolerance: Option<f64>, err: impl ToString) -> Self {
        Check {
            name: name.into(),
            value: f64::NAN,
            tolerance,
            direction: lower(),
            pass: Some(false),
            info: BTreeMap::new(),
            error: Some(err.to_string()),
        }
    }

    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.info.insert(key.into(), v);
        self
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub suite: String,
    pub seed: u64,
    pub version: String,
    pub flags: BTreeMap<String, String>,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: &str, seed: u64, flags: BTreeMap<String, String>, checks: Vec<Check>) -> Self {
        Report {
            schema: SCHEMA.into(),
            suite: suite.into(),
            seed,
            version: VERSION.into(),
            flags,
            pass: !checks.iter().any(Check::failed),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn json_name(&self) -> String {
        format!("{}-{}.json", self.suite, self.seed)
    }

    pub fn csv_name(&self) -> String {
        format!("{}-{}.csv", self.suite, self.seed)
    }

    pub fn to_json(&self) -> AppResult<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per check: `name,value,tolerance,direction,pass`.
    pub fn write_csv<W: Write>(&self, out: W) -> AppResult<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["name", "value", "tolerance", "direction", "pass"])?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                format!("{:e}", c.value),
                c.tolerance.map(|t| format!("{t:e}")).unwrap_or_default(),
                c.direction.clone(),
                c.pass.map(|p| p.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `{suite}-{seed}.json` and `{suite}-{seed}.csv` into `dir`.
    pub fn emit(&self, dir: &Path) -> AppResult<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let json = dir.join(self.json_name());
        let csv = dir.join(self.csv_name());
        fs::write(&json, self.to_json()? + "\n")?;
        self.write_csv(fs::File::create(&csv)?)?;
        Ok((json, csv))
    }
}
