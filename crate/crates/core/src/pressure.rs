//! The two pressure constituents: p_F solving the Neumann problem
//! Delta p_F = div div F, and the harmonic p_H whose normal derivative on the
//! wall is d1 g.

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex;

use crate::error::Result;
use crate::field::{BoundaryTrace, ScalarField, Spectrum, TensorField, VectorField};
use crate::grid::Grid;
use crate::scalar::Real;
use crate::spectral_ops::{scale_columns, spectral_d1, spectral_vertical};
use crate::stencil::Stencil;
use crate::tridiag::{Tridiag, TridiagLu};

#[derive(Clone, Debug)]
pub struct PressureParts<T: Real> {
    pub p_f: ScalarField<T>,
    pub grad_pf: VectorField<T>,
    pub grad_ph: VectorField<T>,
    pub wall_d1pf: BoundaryTrace<T>,
}

/// Factored per-mode Neumann-Poisson operators for one grid.
#[derive(Clone, Debug)]
pub struct PoissonSolver<T: Real> {
    grid: Grid<T>,
    lus: Vec<Option<TridiagLu<T>>>,
    d1: Stencil<T>,
    d2: Stencil<T>,
}

impl<T: Real> PoissonSolver<T> {
    pub fn new(grid: &Grid<T>) -> Result<Self> {
        let n = grid.n2();
        let h = grid.h2();
        let ih2 = T::one() / (h * h);
        let two = T::of(2.0);
        let mut lus = Vec::with_capacity(grid.n_distinct());
        for d in 0..grid.n_distinct() {
            if d == 0 {
                lus.push(None);
                continue;
            }
            let k = grid.kabs(d);
            let mut a = Tridiag::new(n);
            for j in 0..n {
                a.sub[j] = ih2;
                a.sup[j] = ih2;
                a.diag[j] = -two * ih2 - k * k;
            }
            // wall: ghost p_{-1} = p_1 (zero normal derivative)
            a.sup[0] = two * ih2;
            a.sub[0] = T::zero();
            // top: ghost from dp/dz + |k| p = 0
            a.sub[n - 1] = two * ih2;
            a.diag[n - 1] = -two * ih2 - two * k / h - k * k;
            a.sup[n - 1] = T::zero();
            lus.push(Some(a.factor()?));
        }
        Ok(Self {
            grid: grid.clone(),
            lus,
            d1: Stencil::d1_second_order(n, h),
            d2: Stencil::d2_second_order(n, h),
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// div div F in spectral form (spectral d1, second-order d2).
    pub fn div_div_spec(&self, f: &TensorField<T>) -> Spectrum<T> {
        let mut a = f.f11.to_spectral();
        spectral_d1(&self.grid, &mut a);
        spectral_d1(&self.grid, &mut a);
        let mut b = f.f12.to_spectral() + f.f21.to_spectral();
        spectral_d1(&self.grid, &mut b);
        let b = spectral_vertical(&self.d1, &b);
        let c = spectral_vertical(&self.d2, &f.f22.to_spectral());
        a + b + c
    }

    /// p_F spectrum from div div F and the F22 zero-mode profile.
    pub fn solve_spec(&self, rhs: &Spectrum<T>, f22_mean: ndarray::ArrayView1<Complex<T>>) -> Spectrum<T> {
        let n = self.grid.n2();
        let mut p = Array2::zeros(rhs.dim());
        for i in 0..self.grid.n1() {
            let d = self.grid.distinct_index(i);
            match &self.lus[d] {
                None => {
                    let mean = f22_mean.iter().fold(Complex::new(T::zero(), T::zero()), |s, v| s + *v)
                        / T::of_usize(n);
                    for j in 0..n {
                        p[[j, i]] = f22_mean[j] - mean;
                    }
                }
                Some(lu) => {
                    let mut col: Vec<Complex<T>> = rhs.column(i).to_vec();
                    lu.solve(&mut col);
                    p.column_mut(i).assign(&Array1::from(col));
                }
            }
        }
        p
    }

    pub fn p_f_spec(&self, f: &TensorField<T>) -> Spectrum<T> {
        let rhs = self.div_div_spec(f);
        let f22 = f.f22.to_spectral();
        self.solve_spec(&rhs, f22.column(0))
    }

    /// Wall values of d1 p_F, spectral.
    pub fn wall_d1_spec(&self, p: &Spectrum<T>) -> Array1<Complex<T>> {
        Array1::from_shape_fn(self.grid.n1(), |i| p[[0, i]] * self.grid.ik(i))
    }

    pub fn solve(&self, f: &TensorField<T>) -> PressureParts<T> {
        let p = self.p_f_spec(f);
        let mut g1 = p.clone();
        spectral_d1(&self.grid, &mut g1);
        let g2 = spectral_vertical(&self.d1, &p);
        let wall = self.wall_d1_spec(&p);
        let grid = &self.grid;
        PressureParts {
            p_f: ScalarField::from_spectral(grid, &p),
            grad_pf: VectorField {
                u1: ScalarField::from_spectral(grid, &g1),
                u2: ScalarField::from_spectral(grid, &g2),
            },
            grad_ph: VectorField::zeros(grid),
            wall_d1pf: BoundaryTrace::from_spectral(grid, &wall),
        }
    }
}

/// p_F for a stress tensor F; the harmonic part is left zero.
pub fn pf_solve<T: Real>(f: &TensorField<T>) -> Result<PressureParts<T>> {
    Ok(PoissonSolver::new(f.f11.grid())?.solve(f))
}

/// Gradient of p_H: d1 p_H = |k| e^{-|k| x2} g, d2 p_H = ik e^{-|k| x2} g.
pub fn ph_gradient<T: Real>(g: &BoundaryTrace<T>) -> VectorField<T> {
    let grid = g.grid();
    let gs = g.to_spectral();
    let n2 = grid.n2();
    let decay = |j: usize, i: usize| (-grid.kabs_odd(i) * grid.z(j)).exp();
    let s1 = Array2::from_shape_fn((n2, grid.n1()), |(j, i)| gs[i] * (grid.kabs_odd(i) * decay(j, i)));
    let s2 = Array2::from_shape_fn((n2, grid.n1()), |(j, i)| gs[i] * grid.ik(i) * decay(j, i));
    VectorField { u1: ScalarField::from_spectral(grid, &s1), u2: ScalarField::from_spectral(grid, &s2) }
}

/// A potential of grad p_H: p_H = -i sign(k) e^{-|k| x2} g.
pub fn ph_potential<T: Real>(g: &BoundaryTrace<T>) -> ScalarField<T> {
    let grid = g.grid();
    let gs = g.to_spectral();
    let mut s = Array2::from_shape_fn((grid.n2(), grid.n1()), |(j, i)| {
        gs[i] * (-grid.kabs_odd(i) * grid.z(j)).exp()
    });
    scale_columns(&mut s, |i| {
        let m = grid.mode(i);
        if m == 0 || grid.is_nyquist(i) {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(T::zero(), if m > 0 { -T::one() } else { T::one() })
        }
    });
    ScalarField::from_spectral(grid, &s)
}

/// Full (C2) assembly: p_F from F = -u (x) u and p_H from g = omega on the wall.
pub fn pressure_total_gradient<T: Real>(
    solver: &PoissonSolver<T>,
    u: &VectorField<T>,
    omega: &ScalarField<T>,
) -> PressureParts<T> {
    let mut parts = solver.solve(&TensorField::neg_outer(u));
    parts.grad_ph = ph_gradient(&omega.wall());
    parts
}

/// Sum of the two pressure gradients.
pub fn total_gradient<T: Real>(parts: &PressureParts<T>) -> VectorField<T> {
    VectorField {
        u1: parts.grad_pf.u1.add(&parts.grad_ph.u1),
        u2: parts.grad_pf.u2.add(&parts.grad_ph.u2),
    }
}

/// Discrete Laplacian (spectral d11 + second-order d22) of a field, in physical space.
pub fn laplacian<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let g = f.grid();
    let mut s = f.to_spectral();
    let d2 = Stencil::d2_second_order(g.n2(), g.h2());
    let v = spectral_vertical(&d2, &s);
    for (i, mut col) in s.axis_iter_mut(Axis(1)).enumerate() {
        let k = g.ik(i);
        col.mapv_inplace(|c| c * k * k);
    }
    ScalarField::from_spectral(g, &(s + v))
}
