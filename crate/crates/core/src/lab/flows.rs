//! Time-dependent vorticity scenarios: Stokes oracle, IMEX vs Duhamel
//! cross-check, conserved wall trace and smoothing rates.

use std::f64::consts::PI;

use serde::Deserialize;

use super::operators::snapshot_row;
use super::presets::{InitialSpec, Preset};
use super::{min_of, observed_orders, Check, GridSpec, Outcome, TimeSpec};
use crate::biot_savart::BiotSavart;
use crate::diagnostics::{log_times, smoothing_rate_check, SmoothingSample};
use crate::dynamics::{Closure, DuhamelStepper, ImexStepper, Physics, SimState};
use crate::error::{Result, VhpError};
use crate::kernels::KernelTable;
use crate::{Field64, Grid64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureSpec {
    C2,
    NeumannAblation,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsSpec {
    pub closure: ClosureSpec,
    pub convection: bool,
}

impl Default for PhysicsSpec {
    fn default() -> Self {
        Self { closure: ClosureSpec::C2, convection: true }
    }
}

impl PhysicsSpec {
    pub fn physics(self) -> Physics {
        let closure = match self.closure {
            ClosureSpec::C2 => Closure::C2,
            ClosureSpec::NeumannAblation => Closure::NeumannAblation,
        };
        Physics { convection: self.convection, pressure_source: self.convection, closure }
    }
}

/// Refuses a run whose initial velocity already violates the step bound.
fn cfl_precheck(imex: &ImexStepper<f64>, omega: &Field64, dt: f64) -> Result<()> {
    if !imex.physics.convection {
        return Ok(());
    }
    let bound = imex.cfl_bound(&imex.bs.apply(omega));
    if dt > bound {
        return Err(VhpError::Cfl { dt, bound });
    }
    Ok(())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StokesParams {
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub initial: InitialSpec,
}

impl Default for StokesParams {
    fn default() -> Self {
        Self {
            grid: GridSpec::new(2.0 * PI, 64, 10.0, 129),
            time: TimeSpec { dt: 1e-3, t_end: 0.1 },
            initial: InitialSpec::of(Preset::StreamPoly),
        }
    }
}

/// n linear Duhamel steps against the single application of T(t) to u(0).
pub fn stokes_oracle(p: &StokesParams, seed: u64, every: usize) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = p.grid.build()?;
    let steps = p.time.steps()?;
    let omega = p.initial.vorticity(&g, seed);
    let bs = BiotSavart::new(&g);
    let b0 = bs.trace(&omega);
    let t = steps as f64 * p.time.dt;
    let single = KernelTable::new(&g, t)?.t_apply(&bs.apply(&omega));
    let mut stepper = DuhamelStepper::new(&g, Physics::stokes())?;
    let mut s = SimState::new(omega);
    out.rows.push(snapshot_row(&bs, 0.0, &s.omega, &b0));
    for n in 1..=steps {
        stepper.step(&mut s, p.time.dt)?;
        if n % every == 0 || n == steps {
            out.rows.push(snapshot_row(&bs, s.t, &s.omega, &b0));
        }
    }
    let diff = s.omega.sub(&single).sup();
    out.metrics.insert("sup_difference".into(), diff);
    out.metrics.insert("sup_omega".into(), single.sup());
    out.checks.push(Check::at_most("stokes", "stepped vs single-shot ≤ 1e-5", diff, 1e-5));
    Ok(out)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinePath {
    pub dt: Vec<f64>,
    pub n2: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossCheckParams {
    /// n2 is taken from `refine` level by level
    pub grid: GridSpec,
    pub initial: InitialSpec,
    pub physics: PhysicsSpec,
    pub t_end: f64,
    /// (dt, n2) pairs refined together
    pub refine: RefinePath,
}

impl Default for CrossCheckParams {
    fn default() -> Self {
        Self {
            grid: GridSpec::new(2.0 * PI, 32, 8.0, 129),
            initial: InitialSpec::of(Preset::StreamPoly),
            physics: PhysicsSpec::default(),
            t_end: 0.1,
            refine: RefinePath { dt: vec![0.02, 0.01, 0.005], n2: vec![65, 129, 257] },
        }
    }
}

pub fn cross_check(p: &CrossCheckParams, seed: u64, every: usize) -> Result<Outcome> {
    let mut out = Outcome::default();
    if p.refine.dt.len() != p.refine.n2.len() || p.refine.dt.len() < 2 {
        return Err(VhpError::InvalidArgument("refine.dt and refine.n2 need the same length >= 2".into()));
    }
    let physics = p.physics.physics();
    let mut diffs = vec![];
    for (level, (&dt, &n2)) in p.refine.dt.iter().zip(&p.refine.n2).enumerate() {
        let g = p.grid.with_n2(n2).build()?;
        let omega = p.initial.vorticity(&g, seed);
        let steps = TimeSpec { dt, t_end: p.t_end }.steps()?;
        let mut imex = ImexStepper::new(&g, physics)?;
        cfl_precheck(&imex, &omega, dt)?;
        let mut duhamel = DuhamelStepper::new(&g, physics)?;
        let finest = level + 1 == p.refine.dt.len();
        let b0 = imex.bs.trace(&omega);
        let mut a = SimState::new(omega.clone());
        let mut b = SimState::new(omega);
        if finest {
            out.rows.push(snapshot_row(&imex.bs, 0.0, &a.omega, &b0));
        }
        for n in 1..=steps {
            imex.step(&mut a, dt)?;
            duhamel.step(&mut b, dt)?;
            if finest && (n % every == 0 || n == steps) {
                out.rows.push(snapshot_row(&imex.bs, a.t, &a.omega, &b0));
            }
        }
        let d = a.omega.sub(&b.omega).sup();
        out.metrics.insert(format!("difference_dt_{dt}"), d);
        diffs.push(d);
    }
    let order = min_of(&observed_orders(&p.refine.dt, &diffs));
    out.slopes.insert("dt_order".into(), order);
    out.checks.push(Check::at_least("cross-check", "IMEX vs Duhamel order ≥ 1", order, 1.0));
    Ok(out)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefineLevel {
    pub dt: f64,
    pub n2: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceParams {
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub initial: InitialSpec,
    /// the refined (C2) run used for the convergence check
    pub refine: RefineLevel,
}

impl Default for TraceParams {
    fn default() -> Self {
        Self {
            grid: GridSpec::new(2.0 * PI, 64, 10.0, 129),
            time: TimeSpec { dt: 1e-3, t_end: 0.5 },
            initial: InitialSpec::of(Preset::StreamPoly),
            refine: RefineLevel { dt: 5e-4, n2: 257 },
        }
    }
}

/// max_t sup_x1 |b(t) - b(0)| of one nonlinear run, with optional rows.
fn trace_run(
    g: &Grid64,
    omega: Field64,
    closure: Closure,
    time: &TimeSpec,
    rows: Option<(&mut Vec<super::Row>, usize)>,
) -> Result<f64> {
    let steps = time.steps()?;
    let mut imex = ImexStepper::new(g, Physics { closure, ..Default::default() })?;
    cfl_precheck(&imex, &omega, time.dt)?;
    let b0 = imex.bs.trace(&omega);
    let mut s = SimState::new(omega);
    let mut drift = 0.0f64;
    let mut rows = rows;
    if let Some((r, _)) = rows.as_mut() {
        r.push(snapshot_row(&imex.bs, 0.0, &s.omega, &b0));
    }
    for n in 1..=steps {
        imex.step(&mut s, time.dt)?;
        let b = imex.bs.trace(&s.omega);
        let d = b.values().iter().zip(b0.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        drift = drift.max(d);
        if let Some((r, every)) = rows.as_mut() {
            if n % *every == 0 || n == steps {
                r.push(snapshot_row(&imex.bs, s.t, &s.omega, &b0));
            }
        }
    }
    Ok(drift)
}

pub fn conserved_trace(p: &TraceParams, seed: u64, every: usize) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = p.grid.build()?;
    let omega = p.initial.vorticity(&g, seed);
    let reference = trace_run(&g, omega.clone(), Closure::C2, &p.time, Some((&mut out.rows, every)))?;
    let ablation = trace_run(&g, omega, Closure::NeumannAblation, &p.time, None)?;
    let gf = p.grid.with_n2(p.refine.n2).build()?;
    let fine_time = TimeSpec { dt: p.refine.dt, t_end: p.time.t_end };
    let fine = trace_run(&gf, p.initial.vorticity(&gf, seed), Closure::C2, &fine_time, None)?;
    let order = observed_orders(&[g.h2(), gf.h2()], &[reference, fine])[0];
    out.drift.insert("c2".into(), reference);
    out.drift.insert("c2_refined".into(), fine);
    out.drift.insert("neumann_ablation".into(), ablation);
    out.slopes.insert("drift_refinement_order".into(), order);
    out.checks.push(Check::at_most("trace-drift", "trace drift ≤ 1e-3", reference, 1e-3));
    out.checks.push(Check::at_least("trace-drift", "refinement order ≥ 1", order, 1.0));
    out.checks.push(Check::at_least("trace-drift", "ablation / C2 drift ≥ 10", ablation / reference, 10.0));
    Ok(out)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoothingParams {
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub initial: InitialSpec,
    pub physics: PhysicsSpec,
    /// first sample time; samples are log-uniform on [t0, t_end]
    pub t0: f64,
    pub samples: usize,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            grid: GridSpec::new(2.0 * PI, 64, 8.0, 129),
            time: TimeSpec { dt: 1e-4, t_end: 0.1 },
            initial: InitialSpec::of(Preset::StreamRandom),
            physics: PhysicsSpec::default(),
            t0: 1e-3,
            samples: 12,
        }
    }
}

pub fn smoothing_rates(p: &SmoothingParams, seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = p.grid.build()?;
    let omega = p.initial.vorticity(&g, seed);
    let steps = p.time.steps()?;
    let dt = p.time.dt;
    let mut imex = ImexStepper::new(&g, p.physics.physics())?;
    cfl_precheck(&imex, &omega, dt)?;
    let b0 = imex.bs.trace(&omega);
    let times = log_times(p.t0, p.time.t_end, p.samples);
    let mut s = SimState::new(omega);
    let mut samples = vec![];
    let mut next = 0;
    // one extra step so the last sample has a forward difference
    for _ in 0..=steps {
        let due = next < times.len() && s.t >= times[next] - 0.5 * dt;
        if !due {
            imex.step(&mut s, dt)?;
            continue;
        }
        imex.ensure_velocity(&mut s);
        let u = s.u.clone();
        let row = snapshot_row(&imex.bs, s.t, &s.omega, &b0);
        let t = s.t;
        imex.step(&mut s, dt)?;
        imex.ensure_velocity(&mut s);
        let dudt = s.u.u1.sub(&u.u1).sup().max(s.u.u2.sub(&u.u2).sup()) / dt;
        samples.push(SmoothingSample { t, u, dudt_sup: dudt });
        out.rows.push(row);
        while next < times.len() && s.t >= times[next] - 0.5 * dt {
            next += 1;
        }
    }
    let r = smoothing_rate_check(&samples)?;
    let names = ["t^(1/2) |grad u|", "t |grad^2 u|", "t |d_t u|"];
    for (m, name) in names.iter().enumerate() {
        let fit = &r.products[m];
        out.slopes.insert(format!("{name} slope"), fit.exponent);
        out.metrics.insert(format!("{name} max"), r.max_products[m]);
        out.checks.push(Check::at_least("smoothing", format!("{name} slope ≥ -0.15"), fit.exponent, -0.15));
    }
    out.slopes.insert("|grad u| slope".into(), r.grad[0].exponent);
    out.slopes.insert("|grad^2 u| slope".into(), r.grad[1].exponent);
    Ok(out)
}
