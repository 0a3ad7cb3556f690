//! Scenario runner: TOML configuration, the eight scenarios, CSV series and
//! JSON reports.

mod families;
mod flows;
mod operators;
pub mod presets;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, VhpError};
use crate::Grid64;

pub use families::{DriftSpec, GreenParams, HeatSpec, SeriesSpec, ShearParams, ShearRefine};
pub use flows::{ClosureSpec, CrossCheckParams, PhysicsSpec, RefineLevel, RefinePath, SmoothingParams, StokesParams, TraceParams};
pub use operators::{
    duality_check, periodic_poisson, semigroup_levels, BsParams, CompatSpec, DualitySpec, RefineN2, ScalingSpec,
    SemigroupParams, SemigroupSpec,
};
pub use presets::{InitialSpec, Preset};
pub use report::{Check, Outcome, Provenance, Report, Row, REPORT_SCHEMA};

pub const SCENARIOS: [&str; 8] = [
    "bs-roundtrip",
    "semigroup-bench",
    "stokes-oracle",
    "nonlinear-cross-check",
    "conserved-trace",
    "shear-counterexample",
    "green-envelope",
    "smoothing-rates",
];

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub l1: f64,
    pub n1: usize,
    pub height: f64,
    pub n2: usize,
    /// accuracy order of the Biot-Savart / curl vertical stencil
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    8
}

impl GridSpec {
    pub fn new(l1: f64, n1: usize, height: f64, n2: usize) -> Self {
        Self { l1, n1, height, n2, order: default_order() }
    }

    pub fn build(&self) -> Result<Grid64> {
        Grid64::with_order(self.l1, self.n1, self.height, self.n2, self.order)
    }

    pub fn with_n2(&self, n2: usize) -> Self {
        Self { n2, ..self.clone() }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub dt: f64,
    pub t_end: f64,
}

impl TimeSpec {
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !(self.t_end > 0.0) {
            return Err(VhpError::InvalidArgument("dt and t_end must be positive".into()));
        }
        Ok((self.t_end / self.dt).round() as usize)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub csv: String,
    pub report: String,
    /// record a CSV row every this many steps
    pub every: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { csv: "series.csv".into(), report: "report.json".into(), every: 10 }
    }
}

#[derive(Clone, Debug, Deserialize)]
struct Common {
    scenario: String,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output: OutputSpec,
}

/// A parsed configuration: the common keys plus the scenario's own sections,
/// which are checked against the scenario's parameter type when it runs.
#[derive(Clone, Debug)]
pub struct LabConfig {
    pub scenario: String,
    pub seed: u64,
    pub output: OutputSpec,
    pub path: PathBuf,
    rest: toml::Table,
    hash: String,
}

impl LabConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| VhpError::Config { path: path.to_path_buf(), msg: e.to_string() })?;
        Self::parse(&text, path)
    }

    /// `path` names the source in errors and anchors relative series paths.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |msg: String| VhpError::Config { path: path.to_path_buf(), msg };
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| err(e.to_string()))?;
        let mut common = toml::Table::new();
        for key in ["scenario", "seed", "output"] {
            if let Some(v) = table.remove(key) {
                common.insert(key.into(), v);
            }
        }
        let common: Common = common.try_into().map_err(|e: toml::de::Error| err(e.to_string()))?;
        if common.output.every == 0 {
            return Err(err("output.every must be at least 1".into()));
        }
        let hash = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            scenario: common.scenario,
            seed: common.seed,
            output: common.output,
            path: path.to_path_buf(),
            rest: table,
            hash,
        })
    }

    /// The scenario sections as `P`; missing sections take `P::default()`.
    pub fn params<P: DeserializeOwned>(&self) -> Result<P> {
        self.rest
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| VhpError::Config { path: self.path.clone(), msg: e.to_string() })
    }

    pub fn config_hash(&self) -> &str {
        &self.hash
    }

    /// Resolves a path written in the config relative to the config's directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.path.parent().map(|d| d.join(p)).unwrap_or_else(|| p.to_path_buf())
        }
    }
}

pub fn run(cfg: &LabConfig) -> Result<(Report, Vec<Row>)> {
    let start = Instant::now();
    let out = match cfg.scenario.as_str() {
        "bs-roundtrip" => operators::bs_roundtrip(&cfg.params()?)?,
        "semigroup-bench" => operators::semigroup_bench(&cfg.params()?, cfg.seed)?,
        "stokes-oracle" => flows::stokes_oracle(&cfg.params()?, cfg.seed, cfg.output.every)?,
        "nonlinear-cross-check" => flows::cross_check(&cfg.params()?, cfg.seed, cfg.output.every)?,
        "conserved-trace" => flows::conserved_trace(&cfg.params()?, cfg.seed, cfg.output.every)?,
        "shear-counterexample" => families::shear_counterexample(&cfg.params()?, cfg, cfg.output.every)?,
        "green-envelope" => families::green_envelope(&cfg.params()?, cfg, cfg.output.every)?,
        "smoothing-rates" => flows::smoothing_rates(&cfg.params()?, cfg.seed)?,
        other => return Err(VhpError::UnknownScenario(other.to_string())),
    };
    let report = Report::new(
        &cfg.scenario,
        &out,
        start.elapsed().as_secs_f64(),
        Provenance {
            config_hash: cfg.hash.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
        },
    );
    Ok((report, out.rows))
}

/// Writes the CSV series and the JSON report into `dir`.
pub fn write_outputs(cfg: &LabConfig, report: &Report, rows: &[Row], dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(&cfg.output.csv);
    report::write_csv(rows, &csv_path)?;
    let json_path = dir.join(&cfg.output.report);
    let text = serde_json::to_string_pretty(report).map_err(|e| VhpError::InvalidArgument(e.to_string()))?;
    std::fs::write(&json_path, text + "\n")?;
    Ok((csv_path, json_path))
}

/// Successive observed orders log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
pub fn observed_orders(h: &[f64], e: &[f64]) -> Vec<f64> {
    h.windows(2).zip(e.windows(2)).map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect()
}

/// Minimum that propagates NaN, so a broken level fails its check.
pub(crate) fn min_of(v: &[f64]) -> f64 {
    v.iter().fold(f64::INFINITY, |a, &b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.min(b) })
}

pub(crate) type Metrics = BTreeMap<String, f64>;
