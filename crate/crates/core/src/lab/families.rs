//! Shear-flow counterexample family and the heat-transport Gaussian envelope.

use std::f64::consts::PI;
use std::path::PathBuf;

use ndarray::Array1;
use serde::Deserialize;

use super::{min_of, observed_orders, Check, GridSpec, LabConfig, Outcome, Row, TimeSpec};
use crate::diagnostics::{self, gaussian_envelope_check};
use crate::dynamics::shear::ResidualStats;
use crate::dynamics::{
    c2_residual_shear, heat_transport_fundamental, shear_flow_solve, DriftSeries, FundamentalSolution,
    HeatTransportConfig, ShearFlow,
};
use crate::error::{Result, VhpError};
use crate::series::TimeSeries;
use crate::stencil::Stencil;

/// A scalar driving term: a constant or a (t, value) CSV series.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub constant: Option<f64>,
    pub series: Option<PathBuf>,
}

impl SeriesSpec {
    fn load(&self, cfg: &LabConfig) -> Result<TimeSeries> {
        match (self.constant, &self.series) {
            (Some(c), None) => Ok(TimeSeries::constant(c)),
            (None, Some(p)) => TimeSeries::from_csv(&cfg.resolve(p)),
            _ => Err(VhpError::Config {
                path: cfg.path.clone(),
                msg: "give exactly one of `constant` and `series`".into(),
            }),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShearRefine {
    pub dt: Vec<f64>,
    pub n2: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShearParams {
    /// x2 resolution of the forced run and the x1 sampling of the residual
    pub grid: GridSpec,
    pub time: TimeSpec,
    /// residuals are taken on [t_from, t_end]
    pub t_from: f64,
    pub forcing: SeriesSpec,
    /// initial profile u1 = amplitude x2 exp(-x2)
    pub amplitude: f64,
    /// unforced refinement path (dt, n2)
    pub refine: ShearRefine,
}

impl Default for ShearParams {
    fn default() -> Self {
        Self {
            grid: GridSpec::new(2.0 * PI, 16, 8.0, 129),
            time: TimeSpec { dt: 1e-3, t_end: 0.5 },
            t_from: 0.1,
            forcing: SeriesSpec { constant: Some(1.0), series: None },
            amplitude: 1.0,
            refine: ShearRefine { dt: vec![4e-3, 2e-3, 1e-3, 5e-4], n2: vec![33, 65, 129, 257] },
        }
    }
}

fn shear_run(p: &ShearParams, f: &TimeSeries, dt: f64, n2: usize) -> Result<(ShearFlow<f64>, ResidualStats)> {
    let h = p.grid.height;
    let u0 = Array1::from_shape_fn(n2, |j| {
        let z = j as f64 * h / (n2 - 1) as f64;
        p.amplitude * z * (-z).exp()
    });
    let flow = shear_flow_solve(f, &u0, h, dt, p.time.t_end)?;
    let stats = c2_residual_shear(&flow, p.grid.l1, p.grid.n1, p.t_from)?;
    Ok((flow, stats))
}

pub fn shear_counterexample(p: &ShearParams, cfg: &LabConfig, every: usize) -> Result<Outcome> {
    let mut out = Outcome::default();
    let f = p.forcing.load(cfg)?;
    let (flow, forced) = shear_run(p, &f, p.time.dt, p.grid.n2)?;
    let h2 = p.grid.height / (p.grid.n2 - 1) as f64;
    let d = Stencil::<f64>::d1_second_order(p.grid.n2, h2);
    for (n, (t, prof)) in flow.times.iter().zip(&flow.profiles).enumerate() {
        if n % every != 0 && n + 1 != flow.times.len() {
            continue;
        }
        let shear = d.apply(prof.view()).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        out.rows.push(Row {
            t: *t,
            sup_omega: Some(shear),
            sup_u: Some(prof.iter().fold(0.0f64, |a, v| a.max(v.abs()))),
            sup_grad_u: Some(shear),
            ..Default::default()
        });
    }
    out.metrics.insert("forced_r1_minus_f".into(), forced.r1_minus_f);
    out.metrics.insert("forced_r1_sup".into(), forced.r1_sup);
    out.metrics.insert("forced_r2_sup".into(), forced.r2_sup);
    out.metrics.insert("forced_grad_p_sup".into(), forced.grad_p_sup);
    out.checks.push(Check::at_most("shear", "sup |r1 - f| ≤ 5e-3", forced.r1_minus_f, 5e-3));
    out.checks.push(Check::at_most("shear", "sup |r2| ≤ 1e-10", forced.r2_sup, 1e-10));

    if p.refine.dt.len() != p.refine.n2.len() || p.refine.dt.len() < 2 {
        return Err(VhpError::InvalidArgument("refine.dt and refine.n2 need the same length >= 2".into()));
    }
    let zero = TimeSeries::constant(0.0);
    let mut res = vec![];
    let mut hs = vec![];
    for (&dt, &n2) in p.refine.dt.iter().zip(&p.refine.n2) {
        let (_, s) = shear_run(p, &zero, dt, n2)?;
        let r = s.r1_sup.max(s.r2_sup);
        out.metrics.insert(format!("unforced_residual_n2_{n2}"), r);
        res.push(r);
        hs.push(p.grid.height / (n2 - 1) as f64);
    }
    let order = min_of(&observed_orders(&hs, &res));
    out.slopes.insert("unforced_residual_order".into(), order);
    out.checks.push(Check::at_least("shear", "unforced residual order ≥ 1.8", order, 1.8));
    Ok(out)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatSpec {
    pub l1: f64,
    pub n1: usize,
    pub height: f64,
    pub n2: usize,
    pub sigma0: f64,
    pub source: [f64; 2],
    pub t: f64,
    pub dt: f64,
    pub ell: f64,
}

impl HeatSpec {
    fn config(&self, drift: DriftSeries) -> HeatTransportConfig {
        HeatTransportConfig {
            l1: self.l1,
            n1: self.n1,
            height: self.height,
            n2: self.n2,
            sigma0: self.sigma0,
            source: (self.source[0], self.source[1]),
            s: 0.0,
            t: self.t,
            dt: self.dt,
            drift,
            ell: self.ell,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DriftSpec {
    /// U(t) = min(m (t_blow - t)^{-1/2}, cap)
    TypeI { m: f64, t_blow: f64, cap: f64 },
    /// U(t) from a (t, value) CSV
    Series { path: PathBuf },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreenParams {
    pub heat: HeatSpec,
    pub drift: DriftSpec,
    /// envelope ratios are taken where w exceeds this
    pub threshold: f64,
}

impl Default for GreenParams {
    fn default() -> Self {
        let d = HeatTransportConfig::default();
        Self {
            heat: HeatSpec {
                l1: d.l1,
                n1: d.n1,
                height: d.height,
                n2: d.n2,
                sigma0: d.sigma0,
                source: [d.source.0, d.source.1],
                t: d.t,
                dt: d.dt,
                ell: d.ell,
            },
            drift: DriftSpec::TypeI { m: 1.0, t_blow: 0.1, cap: 20.0 },
            threshold: 1e-8,
        }
    }
}

fn envelope_rows(sol: &FundamentalSolution, every: usize) -> Vec<Row> {
    let n = sol.mass.len();
    (0..n)
        .filter(|k| k % every == 0 || k + 1 == n)
        .map(|k| Row {
            t: sol.cfg.s + k as f64 * sol.cfg.dt,
            sup_omega: Some(sol.max_value[k]),
            sup_u: Some(if k == 0 { sol.cfg.drift.amplitude(sol.cfg.s).abs() } else { sol.drift_sup[k - 1] }),
            mass: Some(sol.mass[k]),
            ..Default::default()
        })
        .collect()
}

pub fn green_envelope(p: &GreenParams, cfg: &LabConfig, every: usize) -> Result<Outcome> {
    let mut out = Outcome::default();
    let (drift, m) = match &p.drift {
        DriftSpec::TypeI { m, t_blow, cap } => (DriftSeries::TypeI { m: *m, t_blow: *t_blow, cap: *cap }, *m),
        DriftSpec::Series { path } => (DriftSeries::Series(TimeSeries::from_csv(&cfg.resolve(path))?), f64::NAN),
    };
    let heat = heat_transport_fundamental(&p.heat.config(DriftSeries::None))?;
    let sol = heat_transport_fundamental(&p.heat.config(drift))?;
    let control = gaussian_envelope_check(&heat, &diagnostics::EnvelopeParams::carlen_loss(&heat, 0.0), p.threshold);
    let run = gaussian_envelope_check(&sol, &diagnostics::EnvelopeParams::carlen_loss(&sol, m), p.threshold);
    out.rows = envelope_rows(&sol, every);

    out.envelope.insert("pure_heat_max_ratio".into(), control.max_ratio);
    out.envelope.insert("drift_max_ratio".into(), run.max_ratio);
    out.envelope.insert("drift_margin".into(), 1.05 - run.max_ratio);
    out.envelope.insert("drift_violation_area".into(), run.violation_measure);
    out.drift.insert("drift_integral".into(), sol.drift_integral);
    out.drift.insert("drift_integral_quadrature_error".into(), run.drift_integral_error);
    let mass = heat.max_mass_drift().max(sol.max_mass_drift());
    let min_w = heat.min().min(sol.min());
    out.metrics.insert("max_mass_drift".into(), mass);
    out.metrics.insert("min_w".into(), min_w);
    if m.is_finite() {
        out.metrics.insert("type_i_constant".into(), m);
    }
    out.checks.push(Check::at_most("envelope", "pure-heat ratio ≤ 1 + 1e-3", control.max_ratio, 1.0 + 1e-3));
    out.checks.push(Check::at_least("envelope", "pure-heat ratio ≥ 1 - 1e-3", control.max_ratio, 1.0 - 1e-3));
    out.checks.push(Check::at_most("envelope", "drift ratio ≤ 1.05", run.max_ratio, 1.05));
    out.checks.push(Check::at_most("envelope", "mass drift ≤ 1e-6", mass, 1e-6));
    out.checks.push(Check::at_least("envelope", "min w ≥ -1e-10", min_w, -1e-10));
    Ok(out)
}
