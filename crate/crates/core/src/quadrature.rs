//! Gauss rules, adaptive Gauss-Kronrod, and the vertical product quadrature.

use crate::grid::Grid;
use crate::scalar::Real;

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let d = r * XK[j];
        let s = f(c - d) + f(c + d);
        k += WK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * r, ((k - g) * r).abs())
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive G7-K15 on [a, b] until the summed error estimate is below `tol`.
pub fn adaptive_gk15(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_intervals: usize) -> Integral {
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    let mut evals = 15;
    loop {
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= tol || parts.len() >= max_intervals {
            let value = parts.iter().map(|p| p.2 .0).sum();
            return Integral { value, error: err, evaluations: evals };
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.2 .1 > best.1 { (i, p.2 .1) } else { best });
        let (lo, hi, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
        evals += 30;
    }
}

/// Composite Gauss-Legendre with `panels` equal panels of `n` nodes.
pub fn composite_gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(c + 0.5 * h * xi);
        }
    }
    0.5 * h * s
}

/// Product quadrature on the x2 nodes: on every cell the integrand's density is
/// replaced by its Lagrange interpolant through `order` nearby nodes, and the
/// kernel is integrated against each basis function with `ng` Gauss points.
#[derive(Clone, Debug)]
pub struct CellRule<T> {
    pub n2: usize,
    pub order: usize,
    pub ng: usize,
    h: f64,
    /// Gauss point offsets within a cell, and weights (already scaled by h/2).
    offsets: Vec<f64>,
    gw: Vec<f64>,
    /// First stencil node of each cell.
    lo: Vec<usize>,
    /// basis[c][g*order + a]: value of the a-th Lagrange basis at Gauss point g of cell c.
    basis: Vec<Vec<T>>,
}

impl<T: Real> CellRule<T> {
    pub fn new(grid: &Grid<T>, ng: usize) -> Self {
        let n2 = grid.n2();
        let p = grid.order();
        let h = grid.h2().f64();
        let (x, w) = gauss_legendre(ng);
        let offsets: Vec<f64> = x.iter().map(|xi| 0.5 * h * (xi + 1.0)).collect();
        let gw: Vec<f64> = w.iter().map(|wi| 0.5 * h * wi).collect();
        let mut lo = Vec::with_capacity(n2 - 1);
        let mut basis = Vec::with_capacity(n2 - 1);
        for c in 0..n2 - 1 {
            let l = (c + 1).saturating_sub(p / 2).min(n2 - p);
            lo.push(l);
            let mut b = Vec::with_capacity(ng * p);
            for s in &offsets {
                let t = c as f64 + s / h;
                for a in 0..p {
                    let mut v = 1.0;
                    for q in 0..p {
                        if q != a {
                            v *= (t - (l + q) as f64) / (a as f64 - q as f64);
                        }
                    }
                    b.push(T::of(v));
                }
            }
            basis.push(b);
        }
        Self { n2, order: p, ng, h, offsets, gw, lo, basis }
    }

    /// Gauss point count resolving a kernel of width sqrt(t) on cells of size h2.
    pub fn points_for_width(grid: &Grid<T>, width: f64) -> usize {
        let h = grid.h2().f64();
        ((4.0 * h / width).ceil() as usize).clamp(10, 96)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Node weights w_j = sum over cells of the integral of kernel(y) * l_j(y).
    pub fn moments(&self, kernel: impl Fn(f64) -> f64) -> Vec<T> {
        let mut out = vec![T::zero(); self.n2];
        let mut kv = vec![T::zero(); self.ng];
        self.moments_into(&kernel, &mut kv, &mut out);
        out
    }

    pub fn moments_into(&self, kernel: &impl Fn(f64) -> f64, scratch: &mut [T], out: &mut [T]) {
        out.iter_mut().for_each(|v| *v = T::zero());
        let p = self.order;
        for c in 0..self.n2 - 1 {
            let z0 = c as f64 * self.h;
            for g in 0..self.ng {
                scratch[g] = T::of(kernel(z0 + self.offsets[g]) * self.gw[g]);
            }
            let b = &self.basis[c];
            let l = self.lo[c];
            for g in 0..self.ng {
                let kg = scratch[g];
                for a in 0..p {
                    out[l + a] += kg * b[g * p + a];
                }
            }
        }
    }

    /// Plain integration weights (kernel = 1).
    pub fn weights(&self) -> Vec<T> {
        self.moments(|_| 1.0)
    }

    /// Per-cell weights of the exponentially weighted cell integrals used by the
    /// cumulative recursions: for each cell c, a[c][a] = int_0^h e^{-kappa (h - s)} l_a(z_c + s) ds
    /// (forward) and b[c][a] = int_0^h e^{-kappa s} l_a(z_c + s) ds (backward).
    pub fn exp_cell_weights(&self, kappa: f64) -> (Vec<T>, Vec<T>) {
        let p = self.order;
        let mut fwd = vec![T::zero(); (self.n2 - 1) * p];
        let mut bwd = vec![T::zero(); (self.n2 - 1) * p];
        for c in 0..self.n2 - 1 {
            for g in 0..self.ng {
                let s = self.offsets[g];
                let ef = T::of((-kappa * (self.h - s)).exp() * self.gw[g]);
                let eb = T::of((-kappa * s).exp() * self.gw[g]);
                for a in 0..p {
                    let b = self.basis[c][g * p + a];
                    fwd[c * p + a] += ef * b;
                    bwd[c * p + a] += eb * b;
                }
            }
        }
        (fwd, bwd)
    }

    pub fn cell_start(&self, c: usize) -> usize {
        self.lo[c]
    }
}
