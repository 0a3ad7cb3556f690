//! Scaling fits, conserved-trace and envelope monitors, smoothing rates.

use serde::Serialize;

use crate::dynamics::FundamentalSolution;
use crate::error::{Result, VhpError};
use crate::field::{BoundaryTrace, ScalarField, Spectrum, VectorField};
use crate::grid::Grid;
use crate::kernels::KernelTable;
use crate::scalar::Real;
use crate::spectral_ops::{spectral_d1, spectral_vertical, vertical_ho};

/// Least-squares power law value ~ C t^exponent in log-log space.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeFit {
    pub exponent: f64,
    /// ln C
    pub intercept: f64,
    /// RMS of the natural-log residuals
    pub residual: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
}

pub const MIN_SAMPLES: usize = 8;

pub fn slope_fit(series: &[(f64, f64)]) -> Result<SlopeFit> {
    if series.len() < MIN_SAMPLES {
        return Err(VhpError::InvalidArgument(format!("slope fit needs {MIN_SAMPLES} samples, got {}", series.len())));
    }
    if series.iter().any(|&(t, v)| !(t > 0.0) || !(v > 0.0) || !t.is_finite() || !v.is_finite()) {
        return Err(VhpError::InvalidArgument("slope fit needs positive finite samples".into()));
    }
    let n = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(VhpError::InvalidArgument("slope fit needs distinct times".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let res = (xs.iter().zip(&ys).map(|(x, y)| (y - a - b * x).powi(2)).sum::<f64>() / n).sqrt();
    let (t_min, t_max) = series.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    Ok(SlopeFit { exponent: b, intercept: a, residual: res, t_min, t_max, samples: series.len() })
}

/// Half-dyadic times t0 2^{j/2} in [t0, t1].
pub fn dyadic_times(t0: f64, t1: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut j = 0;
    loop {
        let t = t0 * 2f64.powf(0.5 * j as f64);
        if t > t1 * (1.0 + 1e-12) {
            break;
        }
        v.push(t);
        j += 1;
    }
    v
}

/// Operators whose sup-norm decay is benchmarked against t^{exponent}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScalingOperator {
    Identity,
    /// T(t) v
    T,
    /// |d1| T(t) v
    AbsD1T,
    /// T(t) d1 v
    TD1,
    /// |d1| T(t) d1 v
    AbsD1TD1,
    /// d1^k d2^l of the boundary action of e^{tB} on a wall datum
    BoundarySource { k: u8, l: u8 },
}

impl ScalingOperator {
    pub fn expected_exponent(self) -> f64 {
        match self {
            ScalingOperator::Identity => 0.0,
            ScalingOperator::T => -0.5,
            ScalingOperator::AbsD1T | ScalingOperator::TD1 => -1.0,
            ScalingOperator::AbsD1TD1 => -1.5,
            ScalingOperator::BoundarySource { k, l } => -(1.0 + k as f64 + l as f64) / 2.0,
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            ScalingOperator::Identity => 0.05,
            ScalingOperator::T => 0.1,
            _ => 0.15,
        }
    }

    pub fn name(self) -> String {
        match self {
            ScalingOperator::Identity => "identity".into(),
            ScalingOperator::T => "T".into(),
            ScalingOperator::AbsD1T => "|d1|T".into(),
            ScalingOperator::TD1 => "T d1".into(),
            ScalingOperator::AbsD1TD1 => "|d1|T d1".into(),
            ScalingOperator::BoundarySource { k, l } => format!("boundary source ({k},{l})"),
        }
    }
}

fn abs_d1<T: Real>(grid: &Grid<T>, s: &mut Spectrum<T>) {
    for i in 0..grid.n1() {
        let k = grid.kabs_odd(i);
        s.column_mut(i).mapv_inplace(|c| c * k);
    }
}

fn d1_trace<T: Real>(grid: &Grid<T>, g: &mut ndarray::Array1<num_complex::Complex<T>>) {
    for i in 0..grid.n1() {
        g[i] = g[i] * grid.ik(i);
    }
}

fn operator_sup<T: Real>(
    op: ScalingOperator,
    tab: &KernelTable<T>,
    v: &VectorField<T>,
    g: &BoundaryTrace<T>,
) -> Result<f64> {
    let grid = v.grid();
    Ok(match op {
        ScalingOperator::Identity => v.sup().f64(),
        ScalingOperator::BoundarySource { k, l } => {
            let mut gs = g.to_spectral();
            for _ in 0..k {
                d1_trace(grid, &mut gs);
            }
            let gk = BoundaryTrace::from_spectral(grid, &gs);
            let f = match l {
                0 => tab.boundary_apply(&gk),
                1 => tab.boundary_apply_dz(&gk),
                _ => return Err(VhpError::InvalidArgument("boundary source supports l <= 1".into())),
            };
            f.sup().f64()
        }
        _ => {
            let mut v1 = v.u1.to_spectral();
            let mut v2 = v.u2.to_spectral();
            if matches!(op, ScalingOperator::TD1 | ScalingOperator::AbsD1TD1) {
                spectral_d1(grid, &mut v1);
                spectral_d1(grid, &mut v2);
            }
            let mut w = tab.t_spec(&v1, &v2);
            if matches!(op, ScalingOperator::AbsD1T | ScalingOperator::AbsD1TD1) {
                abs_d1(grid, &mut w);
            }
            ScalarField::from_spectral(grid, &w).sup().f64()
        }
    })
}

/// One bench entry: the fit and the raw (t, sup) series.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingResult {
    pub operator: ScalingOperator,
    pub fit: SlopeFit,
    pub series: Vec<(f64, f64)>,
}

impl ScalingResult {
    /// Slope inside the tolerance window and log-log residual <= 0.05.
    pub fn pass(&self) -> bool {
        (self.fit.exponent - self.operator.expected_exponent()).abs() <= self.operator.tolerance()
            && self.fit.residual <= 0.05
    }
}

/// sup-norms of several operators applied to (v, g) at `times`, sharing one
/// kernel table per time, each fitted in log-log.
pub fn operator_scaling_suite<T: Real>(
    ops: &[ScalingOperator],
    v: &VectorField<T>,
    g: &BoundaryTrace<T>,
    times: &[f64],
) -> Result<Vec<ScalingResult>> {
    let mut series = vec![Vec::with_capacity(times.len()); ops.len()];
    for &t in times {
        let tab = KernelTable::new(v.grid(), t)?;
        for (s, &op) in series.iter_mut().zip(ops) {
            s.push((t, operator_sup(op, &tab, v, g)?));
        }
    }
    ops.iter()
        .zip(series)
        .map(|(&operator, series)| Ok(ScalingResult { operator, fit: slope_fit(&series)?, series }))
        .collect()
}

pub fn operator_scaling_bench<T: Real>(
    op: ScalingOperator,
    v: &VectorField<T>,
    g: &BoundaryTrace<T>,
    times: &[f64],
) -> Result<ScalingResult> {
    Ok(operator_scaling_suite(&[op], v, g, times)?.remove(0))
}

/// n log-uniform times spanning [t0, t1].
pub fn log_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| t0 * (t1 / t0).powf(j as f64 / (n - 1) as f64)).collect()
}

/// max_t sup_x1 |b(t) - b(t0)| over a run's trace history.
#[derive(Clone, Debug, Serialize)]
pub struct TraceDrift {
    pub max_drift: f64,
    pub series: Vec<(f64, f64)>,
}

pub fn conserved_trace_monitor<T: Real>(history: &[(f64, BoundaryTrace<T>)]) -> TraceDrift {
    let mut series = Vec::with_capacity(history.len());
    let mut max_drift = 0.0f64;
    if let Some((_, b0)) = history.first() {
        for (t, b) in history {
            let d = b.values().iter().zip(b0.values()).map(|(x, y)| (*x - *y).abs().f64()).fold(0.0, f64::max);
            max_drift = max_drift.max(d);
            series.push((*t, d));
        }
    }
    TraceDrift { max_drift, series }
}

/// Gaussian envelope C1 / t exp(-C2 ((|x - y| - D)_+)^2 / t); the Carlen-Loss
/// form has C1 = 1 / (4 pi), C2 = 1 / 4 and D the drift integral.
#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeParams {
    /// type-I constant sup (T - t)^{1/2} |u(t)|_inf of the drift
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
    pub drift_integral: f64,
}

impl EnvelopeParams {
    pub fn carlen_loss(sol: &FundamentalSolution, m: f64) -> Self {
        Self { m, c1: 0.25 / std::f64::consts::PI, c2: 0.25, drift_integral: sol.drift_integral }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeReport {
    pub max_ratio: f64,
    /// area of {w > threshold, w > envelope}
    pub violation_measure: f64,
    /// |recorded drift integral - quadrature of the stored sup|u| series|
    pub drift_integral_error: f64,
    pub threshold: f64,
}

pub fn gaussian_envelope_check(sol: &FundamentalSolution, p: &EnvelopeParams, threshold: f64) -> EnvelopeReport {
    let te = sol.t_eff();
    let cell = (sol.cfg.l1 / sol.cfg.n1 as f64) * (sol.cfg.height / (sol.cfg.n2 - 1) as f64);
    let mut max_ratio = 0.0f64;
    let mut bad = 0usize;
    for ((r, i), &w) in sol.w.indexed_iter() {
        if w <= threshold {
            continue;
        }
        let d = (sol.distance(i, r) - p.drift_integral).max(0.0);
        let env = p.c1 / te * (-p.c2 * d * d / te).exp();
        let ratio = w / env;
        max_ratio = max_ratio.max(ratio);
        if ratio > 1.0 {
            bad += 1;
        }
    }
    let quad: f64 = sol.drift_sup.iter().sum::<f64>() * sol.cfg.dt;
    EnvelopeReport {
        max_ratio,
        violation_measure: bad as f64 * cell,
        drift_integral_error: (quad - p.drift_integral).abs(),
        threshold,
    }
}

/// sup over components of the first and second derivatives of u.
pub fn gradient_sups<T: Real>(u: &VectorField<T>) -> (f64, f64) {
    let grid = u.grid();
    let d2 = vertical_ho(grid);
    let mut g1 = 0.0f64;
    let mut g2 = 0.0f64;
    for c in [&u.u1, &u.u2] {
        let s = c.to_spectral();
        let mut a = s.clone();
        spectral_d1(grid, &mut a);
        let b = spectral_vertical(&d2, &s);
        let mut aa = a.clone();
        spectral_d1(grid, &mut aa);
        let ab = spectral_vertical(&d2, &a);
        let bb = spectral_vertical(&d2, &b);
        for (sp, first) in [(&a, true), (&b, true), (&aa, false), (&ab, false), (&bb, false)] {
            let v = ScalarField::from_spectral(grid, sp).sup().f64();
            if first {
                g1 = g1.max(v);
            } else {
                g2 = g2.max(v);
            }
        }
    }
    (g1, g2)
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothingReport {
    /// fits of |grad^m u|_inf against t, m = 1, 2
    pub grad: [SlopeFit; 2],
    /// fits of the compensated products t^{m/2} |grad^m u|_inf and t |d_t u|_inf
    pub products: [SlopeFit; 3],
    pub max_products: [f64; 3],
}

/// A velocity snapshot with sup |d_t u| measured alongside it (for instance by
/// differencing against the next step).
#[derive(Clone, Debug)]
pub struct SmoothingSample<T: Real> {
    pub t: f64,
    pub u: VectorField<T>,
    pub dudt_sup: f64,
}

pub fn smoothing_rate_check<T: Real>(samples: &[SmoothingSample<T>]) -> Result<SmoothingReport> {
    if samples.len() < MIN_SAMPLES {
        return Err(VhpError::InvalidArgument("smoothing check needs more samples".into()));
    }
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    let mut p = [Vec::new(), Vec::new(), Vec::new()];
    for s in samples {
        let t = s.t;
        let (g1, g2) = gradient_sups(&s.u);
        s1.push((t, g1));
        s2.push((t, g2));
        p[0].push((t, t.sqrt() * g1));
        p[1].push((t, t * g2));
        p[2].push((t, t * s.dudt_sup));
    }
    let max_products = [0, 1, 2].map(|m| p[m].iter().map(|q| q.1).fold(0.0, f64::max));
    Ok(SmoothingReport {
        grad: [slope_fit(&s1)?, slope_fit(&s2)?],
        products: [slope_fit(&p[0])?, slope_fit(&p[1])?, slope_fit(&p[2])?],
        max_products,
    })
}

/// int omega dx, trapezoid in x2.
pub fn mass<T: Real>(omega: &ScalarField<T>) -> f64 {
    let grid = omega.grid();
    let n2 = grid.n2();
    let mut m = 0.0;
    for (j, row) in omega.values().outer_iter().enumerate() {
        let w = if j == 0 || j == n2 - 1 { 0.5 } else { 1.0 };
        m += w * row.iter().map(|v| v.f64()).sum::<f64>();
    }
    m * grid.h1().f64() * grid.h2().f64()
}

/// Fit of sup_x1 |omega(., x2)| against x2 over the upper half of the strip.
pub fn spatial_decay_fit<T: Real>(omega: &ScalarField<T>) -> Result<SlopeFit> {
    let grid = omega.grid();
    let n2 = grid.n2();
    let series: Vec<(f64, f64)> = (n2 / 2..n2 - 1)
        .map(|j| (grid.z(j).f64(), omega.values().row(j).iter().map(|v| v.abs().f64()).fold(0.0, f64::max)))
        .filter(|p| p.1 > 0.0)
        .collect();
    slope_fit(&series)
}

pub fn positivity_monitor<T: Real>(omega: &ScalarField<T>) -> bool {
    omega.values().iter().all(|v| *v >= T::zero())
}

/// sup_{x2 > 0.9 H} |omega|.
pub fn top_leakage_monitor<T: Real>(omega: &ScalarField<T>) -> f64 {
    omega.sup_above(T::of(0.9)).f64()
}
