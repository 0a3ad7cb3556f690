//! Fourier multipliers in x1 and finite differences in x2.

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex;

use crate::error::{Result, VhpError};
use crate::field::{BoundaryTrace, ScalarField, Spectrum};
use crate::grid::Grid;
use crate::scalar::Real;
use crate::stencil::Stencil;

/// Multiplies every column of a spectrum by `m(i)`.
pub fn scale_columns<T: Real>(spec: &mut Spectrum<T>, m: impl Fn(usize) -> Complex<T>) {
    for (i, mut col) in spec.axis_iter_mut(Axis(1)).enumerate() {
        let s = m(i);
        col.mapv_inplace(|c| c * s);
    }
}

fn field_multiplier<T: Real>(f: &ScalarField<T>, m: impl Fn(usize) -> Complex<T>) -> ScalarField<T> {
    let mut s = f.to_spectral();
    scale_columns(&mut s, m);
    ScalarField::from_spectral(f.grid(), &s)
}

fn trace_multiplier<T: Real>(g: &BoundaryTrace<T>, m: impl Fn(usize) -> Complex<T>) -> BoundaryTrace<T> {
    let mut s = g.to_spectral();
    for (i, c) in s.iter_mut().enumerate() {
        *c = *c * m(i);
    }
    BoundaryTrace::from_spectral(g.grid(), &s)
}

fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Anything a tangential multiplier can act on.
pub trait Tangential<T: Real>: Sized {
    fn multiply(&self, m: impl Fn(usize) -> Complex<T>) -> Self;
    fn grid_ref(&self) -> &Grid<T>;
}

impl<T: Real> Tangential<T> for ScalarField<T> {
    fn multiply(&self, m: impl Fn(usize) -> Complex<T>) -> Self {
        field_multiplier(self, m)
    }
    fn grid_ref(&self) -> &Grid<T> {
        self.grid()
    }
}

impl<T: Real> Tangential<T> for BoundaryTrace<T> {
    fn multiply(&self, m: impl Fn(usize) -> Complex<T>) -> Self {
        trace_multiplier(self, m)
    }
    fn grid_ref(&self) -> &Grid<T> {
        self.grid()
    }
}

/// (-d11)^{1/2}: multiplier |k|, zero on the mean and the Nyquist column.
pub fn frac_laplacian_half<T: Real, F: Tangential<T>>(f: &F) -> F {
    let g = f.grid_ref().clone();
    f.multiply(|i| real(g.kabs_odd(i)))
}

/// Periodic Hilbert transform, multiplier -i sign(k).
pub fn hilbert<T: Real, F: Tangential<T>>(f: &F) -> F {
    let g = f.grid_ref().clone();
    f.multiply(|i| {
        let m = g.mode(i);
        if m == 0 || g.is_nyquist(i) {
            Complex::new(T::zero(), T::zero())
        } else if m > 0 {
            Complex::new(T::zero(), -T::one())
        } else {
            Complex::new(T::zero(), T::one())
        }
    })
}

/// Poisson semigroup e^{-a|k|}; keeps the Nyquist column so that a = 0 is the identity.
pub fn poisson_semigroup<T: Real>(g: &BoundaryTrace<T>, a: T) -> Result<BoundaryTrace<T>> {
    if !(a >= T::zero()) {
        return Err(VhpError::InvalidArgument(format!("negative Poisson depth {a}")));
    }
    let grid = g.grid().clone();
    Ok(trace_multiplier(g, |i| real((-a * grid.kabs(i)).exp())))
}

/// d/dx1 by the ik multiplier.
pub fn d_tangential<T: Real, F: Tangential<T>>(f: &F) -> F {
    let g = f.grid_ref().clone();
    f.multiply(|i| g.ik(i))
}

/// d/dx1 applied to every row of a spectrum in place.
pub fn spectral_d1<T: Real>(grid: &Grid<T>, spec: &mut Spectrum<T>) {
    scale_columns(spec, |i| grid.ik(i));
}

fn apply_columns<T: Real>(st: &Stencil<T>, v: &Array2<T>) -> Array2<T> {
    let mut out = Array2::zeros(v.dim());
    for (col, ocol) in v.axis_iter(Axis(1)).zip(out.axis_iter_mut(Axis(1))) {
        st.apply_into(col, ocol);
    }
    out
}

/// d/dx2, second order: centered interior, one-sided at both ends.
pub fn d_vertical<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let g = f.grid();
    let st = Stencil::d1_second_order(g.n2(), g.h2());
    ScalarField::new(g, apply_columns(&st, f.values())).expect("finite input stays finite")
}

/// d^2/dx2^2, second order.
pub fn d_vertical2<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let g = f.grid();
    let st = Stencil::d2_second_order(g.n2(), g.h2());
    ScalarField::new(g, apply_columns(&st, f.values())).expect("finite input stays finite")
}

/// High-order d/dx2 with the grid's stencil width; the Biot-Savart and
/// semigroup paths use it.
pub fn vertical_ho<T: Real>(grid: &Grid<T>) -> Stencil<T> {
    Stencil::derivative(grid.n2(), grid.h2(), 1, grid.order() + 1)
}

pub fn d_vertical_ho<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let st = vertical_ho(f.grid());
    ScalarField::new(f.grid(), apply_columns(&st, f.values())).expect("finite input stays finite")
}

/// Applies a vertical stencil to every column of a spectrum.
pub fn spectral_vertical<T: Real>(st: &Stencil<T>, spec: &Spectrum<T>) -> Spectrum<T> {
    let mut out = Array2::zeros(spec.dim());
    for (col, ocol) in spec.axis_iter(Axis(1)).zip(out.axis_iter_mut(Axis(1))) {
        st.apply_into(col, ocol);
    }
    out
}

/// Dense N1 x N1 matrix of the periodic Hilbert transform composed with d/dx1,
/// built from the DFT of its symbol (used as an independent check of |k|).
pub fn dense_multiplier_matrix<T: Real>(grid: &Grid<T>, symbol: impl Fn(usize) -> Complex<T>) -> Array2<T> {
    let n = grid.n1();
    let mut m = Array2::zeros((n, n));
    for a in 0..n {
        for b in 0..n {
            let mut s = Complex::new(T::zero(), T::zero());
            for i in 0..n {
                let ph = T::TAU() * T::of_usize(i * ((a + n - b) % n) % n) / T::of_usize(n);
                s = s + symbol(i) * Complex::new(ph.cos(), ph.sin());
            }
            m[[a, b]] = s.re / T::of_usize(n);
        }
    }
    m
}

pub fn dense_apply<T: Real>(m: &Array2<T>, g: &BoundaryTrace<T>) -> Array1<T> {
    m.dot(g.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid<f64> {
        Grid::new(2.0 * PI, 32, 1.0, 17).unwrap()
    }

    #[test]
    fn frac_laplacian_on_cosine_and_constant() {
        let g = grid();
        let c = BoundaryTrace::from_fn(&g, |_| 2.5);
        assert!(frac_laplacian_half(&c).sup() < 1e-13);
        let f = BoundaryTrace::from_fn(&g, |x| (3.0 * x).cos());
        let r = frac_laplacian_half(&f);
        for i in 0..g.n1() {
            assert!((r.values()[i] - 3.0 * (3.0 * g.x1(i)).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_semigroup_basics() {
        let g = grid();
        let f = BoundaryTrace::from_fn(&g, |x| (2.0 * x).sin() + 0.3 * (16.0 * x).cos());
        let id = poisson_semigroup(&f, 0.0).unwrap();
        assert!((id.values() - f.values()).iter().all(|v| v.abs() < 1e-13));
        assert!(poisson_semigroup(&f, -0.1).is_err());
        let c = BoundaryTrace::from_fn(&g, |x| x.cos());
        let p = poisson_semigroup(&c, 0.7).unwrap();
        for i in 0..g.n1() {
            assert!((p.values()[i] - (-0.7f64).exp() * g.x1(i).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn second_order_vertical_is_exact_on_quadratics() {
        let g = grid();
        let f = ScalarField::from_fn(&g, |x, z| z * z * (1.0 + x.sin()));
        let d = d_vertical(&f);
        for j in 0..g.n2() {
            for i in 0..g.n1() {
                let e = 2.0 * g.z(j) * (1.0 + g.x1(i).sin());
                assert!((d.values()[[j, i]] - e).abs() < 1e-12);
            }
        }
    }
}
