//! Fundamental solution of d_t w - Delta w + u.grad w = 0 on the doubled strip
//! (x1 periodic, -H <= x2 <= H, zero flux at x2 = +-H) for a shear drift
//! u = (U(t) phi(x2), 0), which is divergence free and even in x2.
//!
//! Strang splitting: x2 diffusion (cosine series) for dt/2, then x1 diffusion
//! and the row-wise shift by U phi(x2) dt together in Fourier space, then x2
//! diffusion for dt/2. Every substep is exact on the trigonometric
//! interpolant, so mass is conserved to rounding.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, VhpError};
use crate::series::TimeSeries;

/// Amplitude U(t) of the drift.
#[derive(Clone, Debug)]
pub enum DriftSeries {
    None,
    /// U(t) = min(m (t_blow - t)^{-1/2}, cap): a type-I profile capped for the grid.
    TypeI { m: f64, t_blow: f64, cap: f64 },
    Series(TimeSeries),
}

impl DriftSeries {
    pub fn amplitude(&self, t: f64) -> f64 {
        match self {
            DriftSeries::None => 0.0,
            DriftSeries::TypeI { m, t_blow, cap } => {
                let r = t_blow - t;
                if r <= 0.0 {
                    *cap
                } else {
                    (m / r.sqrt()).min(*cap)
                }
            }
            DriftSeries::Series(s) => s.at(t),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HeatTransportConfig {
    pub l1: f64,
    pub n1: usize,
    /// half height H of the doubled strip
    pub height: f64,
    /// nodes on [0, H]; the doubled strip has 2 n2 - 1
    pub n2: usize,
    /// width of the Gaussian that stands in for the delta at time s
    pub sigma0: f64,
    pub source: (f64, f64),
    pub s: f64,
    pub t: f64,
    pub dt: f64,
    pub drift: DriftSeries,
    /// the drift profile is phi(x2) = (x2/ell)^2 exp(1 - (x2/ell)^2), max 1
    pub ell: f64,
}

impl Default for HeatTransportConfig {
    fn default() -> Self {
        Self {
            l1: 8.0,
            n1: 128,
            height: 4.0,
            n2: 65,
            sigma0: 0.25,
            source: (4.0, 0.0),
            s: 0.0,
            t: 0.1,
            dt: 2.5e-3,
            drift: DriftSeries::None,
            ell: 0.5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FundamentalSolution {
    pub cfg: HeatTransportConfig,
    pub x1: Vec<f64>,
    /// doubled-strip nodes, -H..H
    pub x2: Vec<f64>,
    /// w[[r, i]] at (x1[i], x2[r])
    pub w: Array2<f64>,
    /// step midpoints and sup |u| there
    pub drift_times: Vec<f64>,
    pub drift_sup: Vec<f64>,
    /// int_s^t sup|u|, the midpoint quadrature of `drift_sup`
    pub drift_integral: f64,
    /// per step, starting with the initial datum
    pub mass: Vec<f64>,
    pub min_value: Vec<f64>,
    pub max_value: Vec<f64>,
}

struct Diffusion {
    n1: usize,
    rows: usize,
    fwd1: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
    k1: Vec<f64>,
    k2: Vec<f64>,
}

impl Diffusion {
    fn new(l1: f64, n1: usize, height: f64, rows: usize) -> Self {
        let mut p = FftPlanner::new();
        let m = 2 * (rows - 1);
        let wave = |i: usize, n: usize, len: f64| {
            let s = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            2.0 * PI * s / len
        };
        Self {
            n1,
            rows,
            fwd1: p.plan_fft_forward(n1),
            inv1: p.plan_fft_inverse(n1),
            fwd2: p.plan_fft_forward(m),
            inv2: p.plan_fft_inverse(m),
            k1: (0..n1).map(|i| wave(i, n1, l1)).collect(),
            // the even extension has period 4H
            k2: (0..m).map(|i| wave(i, m, 4.0 * height)).collect(),
        }
    }

    /// x1 heat flow for dt followed by the shift x1 -> x1 + shift[r] on row r.
    fn apply_x1(&self, w: &mut Array2<f64>, dt: f64, shift: &[f64]) {
        let mut buf = vec![Complex::new(0.0, 0.0); self.n1];
        for r in 0..self.rows {
            for i in 0..self.n1 {
                buf[i] = Complex::new(w[[r, i]], 0.0);
            }
            self.fwd1.process(&mut buf);
            for (i, (c, k)) in buf.iter_mut().zip(&self.k1).enumerate() {
                // the Nyquist mode is kept real
                let k_sh = if 2 * i == self.n1 { 0.0 } else { *k };
                *c *= Complex::from_polar((-k * k * dt).exp(), -k_sh * shift[r]);
            }
            self.inv1.process(&mut buf);
            for i in 0..self.n1 {
                w[[r, i]] = buf[i].re / self.n1 as f64;
            }
        }
    }

    fn apply_x2(&self, w: &mut Array2<f64>, dt: f64) {
        let m = 2 * (self.rows - 1);
        let mut col = vec![Complex::new(0.0, 0.0); m];
        for i in 0..self.n1 {
            for r in 0..self.rows {
                col[r] = Complex::new(w[[r, i]], 0.0);
            }
            for r in 1..self.rows - 1 {
                col[m - r] = col[r];
            }
            self.fwd2.process(&mut col);
            for (c, k) in col.iter_mut().zip(&self.k2) {
                *c *= (-k * k * dt).exp();
            }
            self.inv2.process(&mut col);
            for r in 0..self.rows {
                w[[r, i]] = col[r].re / m as f64;
            }
        }
    }
}

fn trapezoid_mass(w: &Array2<f64>, h1: f64, h2: f64) -> f64 {
    let rows = w.nrows();
    let mut m = 0.0;
    for r in 0..rows {
        let wt = if r == 0 || r == rows - 1 { 0.5 } else { 1.0 };
        m += wt * w.row(r).sum();
    }
    m * h1 * h2
}

fn profile(x2: f64, ell: f64) -> f64 {
    let q = (x2 / ell).powi(2);
    q * (1.0 - q).exp()
}

/// Periodic distance in x1.
fn dx1(a: f64, b: f64, l1: f64) -> f64 {
    let d = (a - b).rem_euclid(l1);
    d.min(l1 - d)
}

pub fn heat_transport_fundamental(cfg: &HeatTransportConfig) -> Result<FundamentalSolution> {
    if cfg.n1 < 8 || cfg.n2 < 9 || !(cfg.dt > 0.0) || !(cfg.t >= cfg.s) || !(cfg.sigma0 > 0.0) {
        return Err(VhpError::InvalidArgument("heat transport: bad grid or times".into()));
    }
    let rows = 2 * cfg.n2 - 1;
    let h1 = cfg.l1 / cfg.n1 as f64;
    let h2 = cfg.height / (cfg.n2 - 1) as f64;
    if cfg.sigma0 < 2.0 * h1.max(h2) - 1e-12 {
        return Err(VhpError::InvalidArgument("heat transport: sigma0 must span two cells".into()));
    }
    let x1: Vec<f64> = (0..cfg.n1).map(|i| i as f64 * h1).collect();
    let x2: Vec<f64> = (0..rows).map(|r| -cfg.height + r as f64 * h2).collect();
    let (y1, y2) = cfg.source;
    let s2 = cfg.sigma0 * cfg.sigma0;
    let mut w = Array2::from_shape_fn((rows, cfg.n1), |(r, i)| {
        let d2 = dx1(x1[i], y1, cfg.l1).powi(2) + (x2[r] - y2).powi(2);
        (-d2 / (2.0 * s2)).exp()
    });
    let m0 = trapezoid_mass(&w, h1, h2);
    w.mapv_inplace(|v| v / m0);

    let diff = Diffusion::new(cfg.l1, cfg.n1, cfg.height, rows);
    let phi: Vec<f64> = x2.iter().map(|&z| profile(z, cfg.ell)).collect();
    let steps = ((cfg.t - cfg.s) / cfg.dt).round() as usize;
    let mut sol = FundamentalSolution {
        cfg: cfg.clone(),
        x1,
        x2,
        w: Array2::zeros((rows, cfg.n1)),
        drift_times: Vec::with_capacity(steps),
        drift_sup: Vec::with_capacity(steps),
        drift_integral: 0.0,
        mass: vec![1.0],
        min_value: vec![w.iter().cloned().fold(f64::INFINITY, f64::min)],
        max_value: vec![w.iter().cloned().fold(f64::NEG_INFINITY, f64::max)],
    };
    for n in 0..steps {
        let tm = cfg.s + (n as f64 + 0.5) * cfg.dt;
        let amp = cfg.drift.amplitude(tm);
        if !amp.is_finite() {
            return Err(VhpError::NonFinite("drift amplitude"));
        }
        if amp.abs() * cfg.dt > h1 {
            return Err(VhpError::Cfl { dt: cfg.dt, bound: h1 / amp.abs() });
        }
        sol.drift_times.push(tm);
        sol.drift_sup.push(amp.abs());
        sol.drift_integral += amp.abs() * cfg.dt;

        diff.apply_x2(&mut w, 0.5 * cfg.dt);
        let shift: Vec<f64> = phi.iter().map(|p| amp * p * cfg.dt).collect();
        diff.apply_x1(&mut w, cfg.dt, &shift);
        diff.apply_x2(&mut w, 0.5 * cfg.dt);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(VhpError::Blowup { t: tm + 0.5 * cfg.dt, step: n + 1 });
        }
        sol.mass.push(trapezoid_mass(&w, h1, h2));
        sol.min_value.push(w.iter().cloned().fold(f64::INFINITY, f64::min));
        sol.max_value.push(w.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }
    sol.w = w;
    Ok(sol)
}

impl FundamentalSolution {
    /// Effective elapsed time: the initial Gaussian is the heat kernel at sigma0^2 / 2.
    pub fn t_eff(&self) -> f64 {
        self.cfg.t - self.cfg.s + 0.5 * self.cfg.sigma0 * self.cfg.sigma0
    }

    /// |x - y| with the periodic distance in x1.
    pub fn distance(&self, i: usize, r: usize) -> f64 {
        let (y1, y2) = self.cfg.source;
        (dx1(self.x1[i], y1, self.cfg.l1).powi(2) + (self.x2[r] - y2).powi(2)).sqrt()
    }

    /// (4 pi t)^{-1} exp(-((|x - y| - D)_+)^2 / 4t) with D the drift integral.
    pub fn envelope(&self, i: usize, r: usize) -> f64 {
        let te = self.t_eff();
        let d = (self.distance(i, r) - self.drift_integral).max(0.0);
        (-d * d / (4.0 * te)).exp() / (4.0 * PI * te)
    }

    /// max w / envelope over nodes with w > threshold.
    pub fn envelope_ratio(&self, threshold: f64) -> f64 {
        let mut best = 0.0f64;
        for ((r, i), &v) in self.w.indexed_iter() {
            if v > threshold {
                best = best.max(v / self.envelope(i, r));
            }
        }
        best
    }

    /// The drift-free solution: the Gaussian with periodic images in x1 and
    /// mirror images across x2 = +-H.
    pub fn heat_exact(&self, i: usize, r: usize) -> f64 {
        let te = self.t_eff();
        let (y1, y2) = self.cfg.source;
        let h = self.cfg.height;
        let l1 = self.cfg.l1;
        let mut s = 0.0;
        for p in -2i32..=2 {
            let d1 = self.x1[i] - y1 + p as f64 * l1;
            for y in [y2, 2.0 * h - y2, -2.0 * h - y2] {
                let d2 = self.x2[r] - y;
                s += (-(d1 * d1 + d2 * d2) / (4.0 * te)).exp();
            }
        }
        s / (4.0 * PI * te)
    }

    pub fn min(&self) -> f64 {
        self.min_value.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_mass_drift(&self) -> f64 {
        self.mass.iter().map(|m| (m - 1.0).abs()).fold(0.0, f64::max)
    }
}
