//! Adams-Bashforth / Crank-Nicolson stepper for
//! d_t omega - Delta omega = -div(u omega) with the Robin wall row
//! d2 omega + |k| omega = -ik p_F(k, 0) and omega(H) = 0.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use super::{Closure, Forcing, Physics, SimState};
use crate::biot_savart::BiotSavart;
use crate::error::{Result, VhpError};
use crate::field::{ScalarField, Spectrum, TensorField, VectorField};
use crate::grid::Grid;
use crate::pressure::PoissonSolver;
use crate::scalar::Real;
use crate::spectral_ops::{spectral_d1, spectral_vertical};
use crate::stencil::Stencil;
use crate::tridiag::{Tridiag, TridiagLu};

pub struct ImexStepper<T: Real> {
    grid: Grid<T>,
    pub bs: BiotSavart<T>,
    pub poisson: PoissonSolver<T>,
    pub physics: Physics,
    pub forcing: Option<Forcing<T>>,
    d1: Stencil<T>,
    cache: Option<(f64, Vec<(Tridiag<T>, TridiagLu<T>)>)>,
}

impl<T: Real> ImexStepper<T> {
    pub fn new(grid: &Grid<T>, physics: Physics) -> Result<Self> {
        Ok(Self {
            grid: grid.clone(),
            bs: BiotSavart::new(grid),
            poisson: PoissonSolver::new(grid)?,
            physics,
            forcing: None,
            d1: Stencil::d1_second_order(grid.n2(), grid.h2()),
            cache: None,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    fn robin_kappa(&self, d: usize) -> T {
        match self.physics.closure {
            Closure::C2 => self.grid.kabs(d),
            Closure::NeumannAblation => T::zero(),
        }
    }

    /// The operator A = d22 - k^2 on the unknowns z_0..z_{N2-2} with the wall
    /// ghost eliminated (its inhomogeneous part handled separately).
    fn operator(&self, d: usize) -> Tridiag<T> {
        let n = self.grid.n2() - 1;
        let h = self.grid.h2();
        let ih2 = T::one() / (h * h);
        let two = T::of(2.0);
        let k = self.grid.kabs(d);
        let kap = self.robin_kappa(d);
        let mut a = Tridiag::new(n);
        for j in 0..n {
            a.sub[j] = ih2;
            a.sup[j] = ih2;
            a.diag[j] = -two * ih2 - k * k;
        }
        a.sub[0] = T::zero();
        a.sup[0] = two * ih2;
        a.diag[0] = -two * ih2 + two * kap / h - k * k;
        a.sup[n - 1] = T::zero();
        a
    }

    fn systems(&mut self, dt: f64) -> Result<&Vec<(Tridiag<T>, TridiagLu<T>)>> {
        let fresh = !matches!(&self.cache, Some((c, _)) if *c == dt);
        if fresh {
            let half = T::of(0.5 * dt);
            let mut v = Vec::with_capacity(self.grid.n_distinct());
            for d in 0..self.grid.n_distinct() {
                let a = self.operator(d);
                let mut m = a.clone();
                for j in 0..m.len() {
                    m.sub[j] = -half * m.sub[j];
                    m.sup[j] = -half * m.sup[j];
                    m.diag[j] = T::one() - half * m.diag[j];
                }
                v.push((a, m.factor()?));
            }
            self.cache = Some((dt, v));
        }
        Ok(&self.cache.as_ref().expect("filled above").1)
    }

    pub fn ensure_velocity(&self, state: &mut SimState<T>) {
        if !state.u_valid {
            state.u = self.bs.apply(&state.omega);
            state.u_valid = true;
        }
    }

    /// -div(u omega) as a spectrum.
    pub fn nonlinear_spec(&self, u: &VectorField<T>, omega: &ScalarField<T>) -> Spectrum<T> {
        let f1 = u.u1.zip_with(omega, |a, b| a * b).to_spectral();
        let f2 = u.u2.zip_with(omega, |a, b| a * b).to_spectral();
        let mut a = f1;
        spectral_d1(&self.grid, &mut a);
        let b = spectral_vertical(&self.d1, &f2);
        (a + b).mapv(|c| -c)
    }

    /// Wall source s(k) = -ik p_F(k, 0) of the Robin row.
    pub fn wall_source(&self, u: &VectorField<T>) -> Array1<Complex<T>> {
        let p = self.poisson.p_f_spec(&TensorField::neg_outer(u));
        Array1::from_shape_fn(self.grid.n1(), |i| -(p[[0, i]] * self.grid.ik(i)))
    }

    pub fn cfl_bound(&self, u: &VectorField<T>) -> f64 {
        let umax = u.sup().f64();
        let dx = self.grid.h2().f64().min(self.grid.h1().f64());
        if umax > 0.0 {
            0.4 * dx / umax
        } else {
            f64::INFINITY
        }
    }

    /// Advances `state` by dt.
    pub fn step(&mut self, state: &mut SimState<T>, dt: f64) -> Result<()> {
        self.ensure_velocity(state);
        if self.physics.convection {
            let bound = self.cfl_bound(&state.u);
            if dt > bound {
                return Err(VhpError::Cfl { dt, bound });
            }
        }
        let n1 = self.grid.n1();
        let n2 = self.grid.n2();
        let zero = Complex::new(T::zero(), T::zero());
        let nl = if self.physics.convection {
            self.nonlinear_spec(&state.u, &state.omega)
        } else {
            Array2::from_elem((n2, n1), zero)
        };
        let src = if self.physics.pressure_source && self.physics.closure == Closure::C2 {
            self.wall_source(&state.u)
        } else {
            Array1::from_elem(n1, zero)
        };
        let th = T::of(1.5);
        let hf = T::of(0.5);
        let (nl_ab, src_ab) = match (&state.prev_nl, &state.prev_src) {
            (Some(pn), Some(ps)) => (nl.mapv(|c| c * th) - pn.mapv(|c| c * hf), src.mapv(|c| c * th) - ps.mapv(|c| c * hf)),
            _ => (nl.clone(), src.clone()),
        };
        // manufactured forcing
        let t0 = state.t;
        let (body, wall_extra) = match &self.forcing {
            Some(f) => {
                let tm = t0 + 0.5 * dt;
                let b = ScalarField::from_fn(&self.grid, |x, z| (f.body)(tm, x, z)).to_spectral();
                let g0 = crate::field::BoundaryTrace::from_fn(&self.grid, |x| (f.wall)(t0, x)).to_spectral();
                let g1 = crate::field::BoundaryTrace::from_fn(&self.grid, |x| (f.wall)(t0 + dt, x)).to_spectral();
                (Some(b), Some((g0 + g1).mapv(|c| c * hf)))
            }
            None => (None, None),
        };
        let w = state.omega.to_spectral();
        let h = self.grid.h2();
        let dtt = T::of(dt);
        let half = T::of(0.5 * dt);
        let two = T::of(2.0);
        let grid = self.grid.clone();
        let closure = self.physics.closure;
        let sys = self.systems(dt)?;
        let mut out = Array2::from_elem((n2, n1), zero);
        for i in 0..n1 {
            let d = grid.distinct_index(i);
            let (a, lu) = &sys[d];
            let col: Vec<Complex<T>> = w.column(i).iter().take(n2 - 1).cloned().collect();
            let aw = a.mul(&col);
            let mut rhs: Vec<Complex<T>> = (0..n2 - 1)
                .map(|j| col[j] + aw[j] * half + nl_ab[[j, i]] * dtt)
                .collect();
            if let Some(b) = &body {
                for (j, r) in rhs.iter_mut().enumerate() {
                    *r = *r + b[[j, i]] * dtt;
                }
            }
            // wall row: ghost contributes -2 s / h per unit time
            let mut s = if closure == Closure::C2 { src_ab[i] } else { zero };
            if let Some(g) = &wall_extra {
                s = s + g[i];
            }
            rhs[0] = rhs[0] - s * (two / h) * dtt;
            lu.solve(&mut rhs);
            for (j, v) in rhs.into_iter().enumerate() {
                out[[j, i]] = v;
            }
        }
        let omega = ScalarField::from_spectral(&grid, &out);
        if !omega.is_finite() {
            return Err(VhpError::Blowup { t: state.t + dt, step: state.step + 1 });
        }
        state.omega = omega;
        state.prev_nl = Some(nl);
        state.prev_src = Some(src);
        state.t += dt;
        state.step += 1;
        state.u_valid = false;
        Ok(())
    }

    /// One Euler-explicit / Crank-Nicolson step of size dt from `state` that
    /// leaves the state's history untouched (used for provisional midpoints).
    pub fn provisional(&mut self, state: &SimState<T>, dt: f64) -> Result<SimState<T>> {
        let mut s = state.clone();
        s.prev_nl = None;
        s.prev_src = None;
        self.step(&mut s, dt)?;
        Ok(s)
    }
}
