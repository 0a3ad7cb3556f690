//! Static operator scenarios: Biot-Savart round trip and trace identity, and
//! the e^{tB} / T(t) bench (duality, semigroup law, wall residual, scaling,
//! compatible initial data).

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::presets::{self, InitialSpec, Preset};
use super::{min_of, observed_orders, Check, GridSpec, Outcome, Row};
use crate::biot_savart::{curl, divergence, BiotSavart};
use crate::diagnostics::{self, log_times, operator_scaling_suite, ScalingOperator};
use crate::error::Result;
use crate::kernels::KernelTable;
use crate::{Field64, Grid64, Trace64, Vector64};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BsParams {
    /// reference grid; the trace checks run here
    pub grid: GridSpec,
    /// vertical resolutions of the round-trip refinement study
    pub refine: RefineN2,
    pub initial: InitialSpec,
    /// the non-negative datum of the trace lower bound
    pub blob: InitialSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefineN2 {
    pub n2: Vec<usize>,
}

impl Default for BsParams {
    fn default() -> Self {
        Self {
            grid: GridSpec::new(2.0 * PI, 32, 10.0, 129),
            refine: RefineN2 { n2: vec![33, 65, 129, 257] },
            initial: InitialSpec::of(Preset::StreamPoly),
            blob: InitialSpec::of(Preset::Blob),
        }
    }
}

/// Periodic Poisson kernel of the trace functional,
/// (1/L) sinh(k y2) / (cosh(k y2) - cos(k x1)) with k = 2 pi / L.
pub fn periodic_poisson(l1: f64, x1: f64, y2: f64) -> f64 {
    let k = 2.0 * PI / l1;
    (k * y2).sinh() / ((k * y2).cosh() - (k * x1).cos()) / l1
}

fn field_row(bs: &BiotSavart<f64>, t: f64, omega: &Field64, b0: Option<&Trace64>) -> Row {
    let u = bs.apply(omega);
    let drift = b0.map(|b0| {
        let b = bs.trace(omega);
        b.values().iter().zip(b0.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    });
    Row {
        t,
        sup_omega: Some(omega.sup()),
        sup_u: Some(u.sup()),
        sup_grad_u: Some(diagnostics::gradient_sups(&u).0),
        trace_drift: drift,
        leakage: Some(diagnostics::top_leakage_monitor(omega)),
        mass: Some(diagnostics::mass(omega)),
    }
}

pub(crate) fn snapshot_row(bs: &BiotSavart<f64>, t: f64, omega: &Field64, b0: &Trace64) -> Row {
    field_row(bs, t, omega, Some(b0))
}

pub fn bs_roundtrip(p: &BsParams) -> Result<Outcome> {
    let mut out = Outcome::default();
    let (mut h, mut err, mut div, mut wall) = (vec![], vec![], 0.0f64, 0.0f64);
    for &n2 in &p.refine.n2 {
        let g = p.grid.with_n2(n2).build()?;
        let omega = p.initial.vorticity(&g, 0);
        let u = BiotSavart::new(&g).apply(&omega);
        let e = (curl(&u).sub(&omega).mean_square() / omega.mean_square()).sqrt();
        h.push(g.h2());
        err.push(e);
        div = div.max(divergence(&u).sup());
        wall = wall.max(u.u2.wall().sup());
        out.metrics.insert(format!("roundtrip_rel_l2_n2_{n2}"), e);
    }
    let orders = observed_orders(&h, &err);
    for (o, n2) in orders.iter().zip(p.refine.n2.iter().skip(1)) {
        out.slopes.insert(format!("roundtrip_order_to_n2_{n2}"), *o);
    }
    out.checks.push(Check::at_least("roundtrip", "order ≥ 1.8", min_of(&orders), 1.8));
    out.checks.push(Check::at_most("roundtrip", "div u ≤ 1e-10", div, 1e-10));
    out.checks.push(Check::at_most("roundtrip", "u2 wall = 0", wall, 0.0));

    let g = p.grid.build()?;
    let bs = BiotSavart::new(&g);
    let omega = p.initial.vorticity(&g, 0);
    out.rows.push(field_row(&bs, 0.0, &omega, None));
    let compat = bs.trace(&omega).sup();
    out.checks.push(Check::at_most("trace", "compact-stream trace ≤ 1e-6", compat, 1e-6));

    let blob = p.blob.vorticity(&g, 0);
    let b = bs.trace(&blob);
    let mass = diagnostics::mass(&blob);
    let support: Vec<(f64, f64)> = blob
        .values()
        .indexed_iter()
        .filter(|(_, v)| **v > 0.0)
        .map(|((j, i), _)| (g.x1(i), g.z(j)))
        .collect();
    // b(x1) = int P(x1 - y1, y2) omega(y) dy >= mass * min over the support of P
    let mut margin = f64::INFINITY;
    for (a, bv) in b.values().iter().enumerate() {
        let x = g.x1(a);
        let pmin = support.iter().map(|&(y1, y2)| periodic_poisson(g.l1(), x - y1, y2)).fold(f64::INFINITY, f64::min);
        margin = margin.min(bv - mass * pmin);
    }
    out.metrics.insert("blob_mass".into(), mass);
    out.metrics.insert("blob_lower_bound_margin".into(), margin);
    out.checks.push(Check::at_least("trace", "min b > 0", b.min(), f64::MIN_POSITIVE));
    out.checks.push(Check::at_least("trace", "kernel lower bound holds", margin, 0.0));
    Ok(out)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SemigroupParams {
    pub duality: DualitySpec,
    pub semigroup: SemigroupSpec,
    pub scaling: ScalingSpec,
    pub compat: CompatSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualitySpec {
    pub grid: GridSpec,
    pub t: f64,
    pub pairs: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSpec {
    pub grid: GridSpec,
    pub n2: Vec<usize>,
    pub times: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSpec {
    pub grid: GridSpec,
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompatSpec {
    pub grid: GridSpec,
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

impl Default for SemigroupParams {
    fn default() -> Self {
        Self {
            duality: DualitySpec { grid: GridSpec::new(2.0 * PI, 64, 8.0, 129), t: 0.1, pairs: 50 },
            semigroup: SemigroupSpec {
                grid: GridSpec::new(PI, 32, 8.0, 129),
                n2: vec![33, 65, 129],
                times: vec![0.05, 0.1],
            },
            scaling: ScalingSpec { grid: GridSpec::new(8.0, 1024, 2.0, 65), t0: 1e-3, t1: 1e-1, samples: 8 },
            compat: CompatSpec { grid: GridSpec::new(2.0 * PI, 32, 10.0, 65), t0: 1e-4, t1: 1e-2, samples: 8 },
        }
    }
}

pub fn duality_check(d: &DualitySpec, seed: u64) -> Result<f64> {
    let g = d.grid.build()?;
    let tab = KernelTable::new(&g, d.t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..d.pairs {
        let (v, f) = presets::duality_pair(&g, &mut rng);
        let r = tab.duality(&v, &f).relative;
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
    }
    Ok(worst)
}

fn semigroup_data(g: &Grid64) -> Field64 {
    let k = 2.0 * PI / g.l1();
    Field64::from_fn(g, |x, z| (1.0 + 0.5 * (k * x).cos() + 0.3 * (2.0 * k * x).sin()) * (-(z - 1.0).powi(2)).exp())
}

/// (h2, semigroup-law defect, wall residual) per vertical resolution.
pub fn semigroup_levels(s: &SemigroupSpec) -> Result<Vec<(f64, f64, f64)>> {
    let mut levels = vec![];
    for &n2 in &s.n2 {
        let g = s.grid.with_n2(n2).build()?;
        let f = semigroup_data(&g);
        let tabs = s.times.iter().map(|&t| KernelTable::new(&g, t)).collect::<Result<Vec<_>>>()?;
        let mut defect = 0.0f64;
        let mut wall = 0.0f64;
        for (i, &t) in s.times.iter().enumerate() {
            wall = wall.max(tabs[i].wall_residual(&f));
            for (j, &u) in s.times.iter().enumerate() {
                let once = KernelTable::new(&g, t + u)?.apply(&f);
                defect = defect.max(once.sub(&tabs[i].apply(&tabs[j].apply(&f))).sup());
            }
        }
        levels.push((g.h2(), defect, wall));
    }
    Ok(levels)
}

pub fn semigroup_bench(p: &SemigroupParams, seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();

    let worst = duality_check(&p.duality, seed)?;
    out.metrics.insert("duality_worst_relative".into(), worst);
    out.checks.push(Check::at_most("duality", "duality residual ≤ 1e-6", worst, 1e-6));

    let levels = semigroup_levels(&p.semigroup)?;
    let h: Vec<f64> = levels.iter().map(|l| l.0).collect();
    let defect: Vec<f64> = levels.iter().map(|l| l.1).collect();
    let wall: Vec<f64> = levels.iter().map(|l| l.2).collect();
    for (n2, l) in p.semigroup.n2.iter().zip(&levels) {
        out.metrics.insert(format!("semigroup_defect_n2_{n2}"), l.1);
        out.metrics.insert(format!("wall_residual_n2_{n2}"), l.2);
    }
    let od = min_of(&observed_orders(&h, &defect));
    let ow = min_of(&observed_orders(&h, &wall));
    out.slopes.insert("semigroup_defect_order".into(), od);
    out.slopes.insert("wall_residual_order".into(), ow);
    out.checks.push(Check::at_least("semigroup", "semigroup defect order ≥ 1", od, 1.0));
    out.checks.push(Check::at_least("semigroup", "wall residual order ≥ 1", ow, 1.0));

    let sc = &p.scaling;
    let g = sc.grid.build()?;
    let half = 0.5 * g.l1();
    let square = move |x: f64| if x < half { 2.0 } else { 0.0 };
    let v = Vector64::new(Field64::from_fn(&g, |x, _| square(x)), Field64::zeros(&g))?;
    let wall_datum = Trace64::from_fn(&g, square);
    let gated = [
        ScalingOperator::T,
        ScalingOperator::AbsD1T,
        ScalingOperator::BoundarySource { k: 0, l: 0 },
        ScalingOperator::BoundarySource { k: 1, l: 0 },
        ScalingOperator::BoundarySource { k: 0, l: 1 },
        ScalingOperator::BoundarySource { k: 1, l: 1 },
        ScalingOperator::BoundarySource { k: 2, l: 0 },
    ];
    let extra = [ScalingOperator::Identity, ScalingOperator::TD1, ScalingOperator::AbsD1TD1];
    let ops: Vec<ScalingOperator> = gated.iter().chain(&extra).cloned().collect();
    let results = operator_scaling_suite(&ops, &v, &wall_datum, &log_times(sc.t0, sc.t1, sc.samples))?;
    for r in &results {
        let name = r.operator.name();
        out.slopes.insert(format!("{name} exponent"), r.fit.exponent);
        out.metrics.insert(format!("{name} fit residual"), r.fit.residual);
        if gated.contains(&r.operator) {
            let e = r.operator.expected_exponent();
            let tol = r.operator.tolerance();
            out.checks.push(Check::within("scaling", format!("{name} slope {e:+} ± {tol}"), r.fit.exponent, e, tol));
            out.checks.push(Check::at_most("scaling", format!("{name} fit residual ≤ 0.05"), r.fit.residual, 0.05));
        }
    }

    let c = &p.compat;
    let g = c.grid.build()?;
    let bs = BiotSavart::new(&g);
    let omega = presets::stream_poly(&g, 1.0);
    let b0 = bs.trace(&omega);
    let mut series = vec![];
    for t in log_times(c.t0, c.t1, c.samples) {
        let w = KernelTable::new(&g, t)?.apply(&omega);
        series.push((t, w.sub(&omega).sup()));
        out.rows.push(field_row(&bs, t, &w, Some(&b0)));
    }
    let fit = diagnostics::slope_fit(&series)?;
    out.slopes.insert("compat_order".into(), fit.exponent);
    out.metrics.insert("compat_fit_residual".into(), fit.residual);
    out.checks.push(Check::at_least("compat", "compatible data order ≥ 0.45", fit.exponent, 0.45));
    Ok(out)
}
