use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, VhpError};
use crate::scalar::Real;

/// Periodic in x1 on [0, L1) with N1 samples, uniform nodes z_j = j*h2 on [0, H].
///
/// Spectral arrays use FFT ordering: column i holds mode m = i for i <= N1/2
/// and m = i - N1 above that.
#[derive(Clone)]
pub struct Grid<T: Real> {
    l1: T,
    n1: usize,
    h: T,
    n2: usize,
    h2: T,
    order: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("l1", &self.l1)
            .field("n1", &self.n1)
            .field("h", &self.h)
            .field("n2", &self.n2)
            .field("order", &self.order)
            .finish()
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, o: &Self) -> bool {
        self.l1 == o.l1 && self.n1 == o.n1 && self.h == o.h && self.n2 == o.n2
    }
}

/// Default interpolation order of the vertical quadrature and high-order stencils.
pub const DEFAULT_ORDER: usize = 8;

impl<T: Real> Grid<T> {
    pub fn new(l1: T, n1: usize, h: T, n2: usize) -> Result<Self> {
        Self::with_order(l1, n1, h, n2, DEFAULT_ORDER)
    }

    /// `order` is the number of nodes in the local Lagrange stencils used by the
    /// vertical product quadrature and the high-order vertical derivative.
    pub fn with_order(l1: T, n1: usize, h: T, n2: usize, order: usize) -> Result<Self> {
        if !n1.is_power_of_two() || n1 < 8 {
            return Err(VhpError::InvalidGrid(format!("N1 = {n1} must be a power of two >= 8")));
        }
        if n2 < 9 {
            return Err(VhpError::InvalidGrid(format!("N2 = {n2} must be >= 9")));
        }
        if !(l1 > T::zero() && h > T::zero()) || !l1.is_finite() || !h.is_finite() {
            return Err(VhpError::InvalidGrid("L1 and H must be positive".into()));
        }
        if order < 2 || order > n2 - 1 {
            return Err(VhpError::InvalidGrid(format!("stencil order {order} unsupported for N2 = {n2}")));
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n1);
        let inv = planner.plan_fft_inverse(n1);
        let h2 = h / T::of_usize(n2 - 1);
        Ok(Self { l1, n1, h, n2, h2, order, fwd, inv })
    }

    pub fn l1(&self) -> T {
        self.l1
    }
    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn height(&self) -> T {
        self.h
    }
    pub fn n2(&self) -> usize {
        self.n2
    }
    pub fn h2(&self) -> T {
        self.h2
    }
    pub fn h1(&self) -> T {
        self.l1 / T::of_usize(self.n1)
    }
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn x1(&self, i: usize) -> T {
        T::of_usize(i) * self.h1()
    }
    pub fn z(&self, j: usize) -> T {
        T::of_usize(j) * self.h2
    }
    pub fn z_nodes(&self) -> Vec<T> {
        (0..self.n2).map(|j| self.z(j)).collect()
    }

    /// Signed mode number of FFT column i.
    pub fn mode(&self, i: usize) -> i64 {
        if i <= self.n1 / 2 {
            i as i64
        } else {
            i as i64 - self.n1 as i64
        }
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n1 / 2
    }

    /// Wavenumber 2*pi*m/L1 of column i.
    pub fn k(&self, i: usize) -> T {
        T::TAU() * T::of(self.mode(i) as f64) / self.l1
    }

    /// |k|, with the Nyquist column carrying pi*N1/L1. Used by the Poisson
    /// multiplier and the vertical kernels, which keep the Nyquist mode.
    pub fn kabs(&self, i: usize) -> T {
        self.k(i).abs()
    }

    /// Multiplier of d/dx1: ik, zero at Nyquist.
    pub fn ik(&self, i: usize) -> Complex<T> {
        if self.is_nyquist(i) {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(T::zero(), self.k(i))
        }
    }

    /// Multiplier of (-d11)^{1/2} as an odd-symbol operator: |k|, zero at Nyquist.
    pub fn kabs_odd(&self, i: usize) -> T {
        if self.is_nyquist(i) {
            T::zero()
        } else {
            self.kabs(i)
        }
    }

    /// Columns with distinct |k|: 0..=N1/2.
    pub fn n_distinct(&self) -> usize {
        self.n1 / 2 + 1
    }

    /// Index into the distinct-|k| tables for FFT column i.
    pub fn distinct_index(&self, i: usize) -> usize {
        self.mode(i).unsigned_abs() as usize
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex<T>]) {
        self.fwd.process(buf);
        let s = T::one() / T::of_usize(self.n1);
        for c in buf.iter_mut() {
            *c = *c * s;
        }
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex<T>]) {
        self.inv.process(buf);
    }

    /// Grid with N2 doubled in resolution (h2 halved), same order.
    pub fn refined_vertical(&self) -> Result<Self> {
        Self::with_order(self.l1, self.n1, self.h, 2 * self.n2 - 1, self.order)
    }
}
