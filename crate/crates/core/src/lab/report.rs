use std::path::Path;

use serde::Serialize;

use super::Metrics;
use crate::error::{Result, VhpError};

pub const REPORT_SCHEMA: &str = "vhp-report/1";

/// One gated check. `group` collects the checks that belong to one property.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub group: String,
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(group: &str, name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { group: group.into(), name: name.into(), value, pass: value <= bound }
    }

    pub fn at_least(group: &str, name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { group: group.into(), name: name.into(), value, pass: value >= bound }
    }

    pub fn within(group: &str, name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self { group: group.into(), name: name.into(), value, pass: (value - target).abs() <= tol }
    }

    pub fn line(&self) -> String {
        format!("{}: {}", self.name, if self.pass { "pass" } else { "fail" })
    }
}

/// What a scenario hands back before timing and provenance are attached.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub slopes: Metrics,
    pub drift: Metrics,
    pub envelope: Metrics,
    pub metrics: Metrics,
    pub rows: Vec<Row>,
}

/// CSV record; columns that do not apply to a scenario are left empty.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Row {
    pub t: f64,
    pub sup_omega: Option<f64>,
    pub sup_u: Option<f64>,
    pub sup_grad_u: Option<f64>,
    pub trace_drift: Option<f64>,
    pub leakage: Option<f64>,
    pub mass: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    /// sha256 of the config text
    pub config_hash: String,
    pub code_version: String,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    pub group: String,
    pub name: String,
    pub value: f64,
    pub pass: bool,
    pub line: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: String,
    pub scenario: String,
    pub pass: bool,
    pub summary: Vec<String>,
    pub checks: Vec<CheckEntry>,
    pub slopes: Metrics,
    pub drift: Metrics,
    pub envelope: Metrics,
    pub metrics: Metrics,
    pub runtime_s: f64,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(scenario: &str, out: &Outcome, runtime_s: f64, provenance: Provenance) -> Self {
        let checks: Vec<CheckEntry> = out
            .checks
            .iter()
            .map(|c| CheckEntry {
                group: c.group.clone(),
                name: c.name.clone(),
                value: c.value,
                pass: c.pass,
                line: c.line(),
            })
            .collect();
        Self {
            schema: REPORT_SCHEMA.into(),
            scenario: scenario.into(),
            pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
            summary: checks.iter().map(|c| c.line.clone()).collect(),
            checks,
            slopes: out.slopes.clone(),
            drift: out.drift.clone(),
            envelope: out.envelope.clone(),
            metrics: out.metrics.clone(),
            runtime_s,
            provenance,
        }
    }

    /// Checks of one group, all passing (and at least one present).
    pub fn group_pass(&self, group: &str) -> bool {
        let mut any = false;
        for c in self.checks.iter().filter(|c| c.group == group) {
            any = true;
            if !c.pass {
                return false;
            }
        }
        any
    }

    pub fn group(&self, group: &str) -> Vec<&CheckEntry> {
        self.checks.iter().filter(|c| c.group == group).collect()
    }
}

pub fn write_csv(rows: &[Row], path: &Path) -> Result<()> {
    let to_err = |e: csv::Error| VhpError::InvalidArgument(format!("writing {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    if rows.is_empty() {
        w.write_record(["t", "sup_omega", "sup_u", "sup_grad_u", "trace_drift", "leakage", "mass"])
            .map_err(to_err)?;
    }
    for r in rows {
        w.serialize(r).map_err(to_err)?;
    }
    w.flush()?;
    Ok(())
}
