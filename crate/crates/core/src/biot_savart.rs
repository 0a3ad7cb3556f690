//! Velocity from vorticity in the half plane, and the wall trace functional.
//!
//! Per mode the stream function solves (d22 - k^2) psi = -omega with psi(0) = 0
//! and the decaying branch at the top. With the Dirichlet Green function
//! (e^{-k|x-y|} - e^{-k(x+y)}) / 2k this is
//! psi = (L + R - e^{-kx} S) / 2k, where L(x) = int_0^x e^{-k(x-y)} omega,
//! R(x) = int_x^H e^{-k(y-x)} omega and S = R(0) is the trace functional.
//! L and R are accumulated cell by cell with exponentially weighted
//! interpolatory quadrature, so large k never overflows.

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex;

use crate::field::{BoundaryTrace, ScalarField, Spectrum, VectorField};
use crate::grid::Grid;
use crate::quadrature::CellRule;
use crate::scalar::Real;
use crate::spectral_ops::{spectral_vertical, vertical_ho};
use crate::stencil::Stencil;

#[derive(Clone, Debug)]
struct ModeWeights<T> {
    decay: T,
    fwd: Vec<T>,
    bwd: Vec<T>,
    /// trace weights int_0^H e^{-|k| y} l_j(y) dy
    trace: Vec<T>,
}

/// Reusable Biot-Savart operator for one grid.
#[derive(Clone, Debug)]
pub struct BiotSavart<T: Real> {
    grid: Grid<T>,
    rule: CellRule<T>,
    d2: Stencil<T>,
    modes: Vec<ModeWeights<T>>,
}

/// Velocity, stream function and the top-leakage monitor of one reconstruction.
#[derive(Clone, Debug)]
pub struct Reconstruction<T: Real> {
    pub u: VectorField<T>,
    pub psi: ScalarField<T>,
    /// sup of |omega| above 0.9 H times H: bound on the committed truncation error.
    pub leakage: T,
    pub truncation_warning: bool,
}

/// Leakage above which a reconstruction is flagged as domain-truncated.
pub const LEAKAGE_WARN: f64 = 1e-6;

impl<T: Real> BiotSavart<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        let rule = CellRule::new(grid, 12);
        let p = rule.order;
        let h = grid.h2().f64();
        let modes = (0..grid.n_distinct())
            .map(|d| {
                let k = grid.kabs(d).f64();
                let (fwd, bwd) = rule.exp_cell_weights(k);
                let mut trace = vec![T::zero(); grid.n2()];
                for c in 0..grid.n2() - 1 {
                    let e = T::of((-k * c as f64 * h).exp());
                    let lo = rule.cell_start(c);
                    for a in 0..p {
                        trace[lo + a] += e * bwd[c * p + a];
                    }
                }
                ModeWeights { decay: T::of((-k * h).exp()), fwd, bwd, trace }
            })
            .collect();
        Self { grid: grid.clone(), d2: vertical_ho(grid), rule, modes }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    fn cumulate(&self, d: usize, f: ndarray::ArrayView1<Complex<T>>) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let n = self.grid.n2();
        let p = self.rule.order;
        let m = &self.modes[d];
        let zero = Complex::new(T::zero(), T::zero());
        let mut l = vec![zero; n];
        let mut r = vec![zero; n];
        for c in 0..n - 1 {
            let lo = self.rule.cell_start(c);
            let mut inc = zero;
            for a in 0..p {
                inc = inc + f[lo + a] * m.fwd[c * p + a];
            }
            l[c + 1] = l[c] * m.decay + inc;
        }
        for c in (0..n - 1).rev() {
            let lo = self.rule.cell_start(c);
            let mut inc = zero;
            for a in 0..p {
                inc = inc + f[lo + a] * m.bwd[c * p + a];
            }
            r[c] = r[c + 1] * m.decay + inc;
        }
        (l, r)
    }

    /// Stream-function spectrum of omega, plus the k = 0 velocity profile.
    fn stream_spec(&self, w: &Spectrum<T>) -> (Spectrum<T>, Array1<Complex<T>>) {
        let n2 = self.grid.n2();
        let mut psi = Array2::zeros(w.dim());
        let mut u10 = Array1::zeros(n2);
        for i in 0..self.grid.n1() {
            let d = self.grid.distinct_index(i);
            let (l, r) = self.cumulate(d, w.column(i));
            if d == 0 {
                // u1 = int_x^H omega, psi = int_0^x u1
                u10.assign(&Array1::from(r.clone()));
                let (lp, _) = self.cumulate(0, u10.view());
                psi.column_mut(i).assign(&Array1::from(lp));
                continue;
            }
            let k = self.grid.kabs(i);
            let two_k = k + k;
            let s = r[0];
            for j in 0..n2 {
                let e = (-k * self.grid.z(j)).exp();
                psi[[j, i]] = (l[j] + r[j] - s * e) / two_k;
            }
            // exact wall zero
            psi[[0, i]] = (l[0] + r[0] - s) / two_k;
        }
        (psi, u10)
    }

    /// Velocity spectra (u1, u2) and stream function of a vorticity spectrum.
    pub fn velocity_spec(&self, w: &Spectrum<T>) -> (Spectrum<T>, Spectrum<T>, Spectrum<T>) {
        let (psi, u10) = self.stream_spec(w);
        let mut u1 = spectral_vertical(&self.d2, &psi);
        u1.column_mut(0).assign(&u10);
        let mut u2 = psi.clone();
        for (i, mut col) in u2.axis_iter_mut(Axis(1)).enumerate() {
            let m = -self.grid.ik(i);
            col.mapv_inplace(|c| c * m);
        }
        (u1, u2, psi)
    }

    pub fn reconstruct(&self, omega: &ScalarField<T>) -> Reconstruction<T> {
        let (u1, u2, psi) = self.velocity_spec(&omega.to_spectral());
        let leakage = omega.sup_above(T::of(0.9)) * self.grid.height();
        let u = VectorField {
            u1: ScalarField::from_spectral(&self.grid, &u1),
            u2: ScalarField::from_spectral(&self.grid, &u2),
        };
        Reconstruction {
            u,
            psi: ScalarField::from_spectral(&self.grid, &psi),
            leakage,
            truncation_warning: leakage.f64() > LEAKAGE_WARN,
        }
    }

    pub fn apply(&self, omega: &ScalarField<T>) -> VectorField<T> {
        self.reconstruct(omega).u
    }

    /// Spectrum of the trace functional: b(k) = int_0^H e^{-|k| y} omega(k, y) dy.
    pub fn trace_spec(&self, w: &Spectrum<T>) -> Array1<Complex<T>> {
        Array1::from_shape_fn(self.grid.n1(), |i| {
            let tw = &self.modes[self.grid.distinct_index(i)].trace;
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, wt) in tw.iter().enumerate() {
                acc = acc + w[[j, i]] * *wt;
            }
            acc
        })
    }

    pub fn trace(&self, omega: &ScalarField<T>) -> BoundaryTrace<T> {
        BoundaryTrace::from_spectral(&self.grid, &self.trace_spec(&omega.to_spectral()))
    }

    /// kappa[j, i]: contribution of omega at (x1 = 0 + offset i, x2 = z_j) to b at x1 = 0,
    /// so that b(x1_a) = sum_{i,j} kappa[j, (a - i) mod N1] omega[j, i].
    pub fn trace_kernel_weights(&self) -> Array2<T> {
        let n1 = self.grid.n1();
        let n2 = self.grid.n2();
        let mut out = Array2::zeros((n2, n1));
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n1];
        for j in 0..n2 {
            for (i, b) in buf.iter_mut().enumerate() {
                let w = self.modes[self.grid.distinct_index(i)].trace[j];
                *b = Complex::new(w / T::of_usize(n1), T::zero());
            }
            self.grid.fft_inverse(&mut buf);
            for i in 0..n1 {
                out[[j, i]] = buf[i].re;
            }
        }
        out
    }
}

/// One-off reconstruction.
pub fn biot_savart<T: Real>(omega: &ScalarField<T>) -> VectorField<T> {
    BiotSavart::new(omega.grid()).apply(omega)
}

pub fn trace_functional<T: Real>(omega: &ScalarField<T>) -> BoundaryTrace<T> {
    BiotSavart::new(omega.grid()).trace(omega)
}

/// curl u = d1 u2 - d2 u1 with the same high-order vertical stencil as the
/// reconstruction.
pub fn curl<T: Real>(u: &VectorField<T>) -> ScalarField<T> {
    let g = u.grid();
    let d = vertical_ho(g);
    let mut a = u.u2.to_spectral();
    crate::spectral_ops::spectral_d1(g, &mut a);
    let b = spectral_vertical(&d, &u.u1.to_spectral());
    ScalarField::from_spectral(g, &(a - b))
}

/// Discrete divergence d1 u1 + d2 u2 with the reconstruction's stencil.
pub fn divergence<T: Real>(u: &VectorField<T>) -> ScalarField<T> {
    let g = u.grid();
    let d = vertical_ho(g);
    let mut a = u.u1.to_spectral();
    crate::spectral_ops::spectral_d1(g, &mut a);
    let b = spectral_vertical(&d, &u.u2.to_spectral());
    ScalarField::from_spectral(g, &(a + b))
}
