//! One-step form of the integral equation
//! omega(t) = T(t-s) u(s) + int T(t-tau) div F + int e^{(t-tau)B}(d1 p_F delta):
//! omega(t+dt) = T(dt) u(t) + [int_0^dt T] div F* + [int_0^dt e^{tau B}](d1 p_F* delta),
//! with the forcing frozen at a provisional IMEX half step (starred) and the
//! kernels integrated in time exactly up to quadrature.

use std::sync::Arc;

use super::imex::ImexStepper;
use super::{Physics, SimState};
use crate::error::{Result, VhpError};
use crate::field::{ScalarField, Spectrum, TensorField};
use crate::grid::Grid;
use crate::kernels::KernelTable;
use crate::scalar::Real;
use crate::spectral_ops::{spectral_d1, spectral_vertical, vertical_ho};
use crate::stencil::Stencil;

/// Gauss nodes for the time integrals of the kernels.
const TIME_NODES: usize = 8;

pub struct DuhamelStepper<T: Real> {
    imex: ImexStepper<T>,
    d2: Stencil<T>,
    tables: Option<(f64, Arc<KernelTable<T>>, Arc<KernelTable<T>>)>,
}

impl<T: Real> DuhamelStepper<T> {
    pub fn new(grid: &Grid<T>, physics: Physics) -> Result<Self> {
        Ok(Self { imex: ImexStepper::new(grid, physics)?, d2: vertical_ho(grid), tables: None })
    }

    pub fn physics(&self) -> Physics {
        self.imex.physics
    }

    fn tables(&mut self, dt: f64) -> Result<(Arc<KernelTable<T>>, Arc<KernelTable<T>>)> {
        let fresh = !matches!(&self.tables, Some((c, _, _)) if *c == dt);
        if fresh {
            let grid = self.imex.grid().clone();
            let full = Arc::new(KernelTable::new(&grid, dt)?);
            let integ = Arc::new(KernelTable::time_integrated(&grid, dt, TIME_NODES)?);
            self.tables = Some((dt, full, integ));
        }
        let (_, a, b) = self.tables.as_ref().expect("filled above");
        Ok((a.clone(), b.clone()))
    }

    /// div F for F = -u (x) u, as spectra of its two components.
    fn div_f(&self, f: &TensorField<T>) -> (Spectrum<T>, Spectrum<T>) {
        let grid = self.imex.grid();
        let mut a1 = f.f11.to_spectral();
        spectral_d1(grid, &mut a1);
        let b1 = spectral_vertical(&self.d2, &f.f12.to_spectral());
        let mut a2 = f.f21.to_spectral();
        spectral_d1(grid, &mut a2);
        let b2 = spectral_vertical(&self.d2, &f.f22.to_spectral());
        (a1 + b1, a2 + b2)
    }

    pub fn step(&mut self, state: &mut SimState<T>, dt: f64) -> Result<()> {
        let (full, integ) = self.tables(dt)?;
        let grid = self.imex.grid().clone();
        self.imex.ensure_velocity(state);
        let physics = self.imex.physics;
        if physics.convection {
            let bound = self.imex.cfl_bound(&state.u);
            if dt > bound {
                return Err(VhpError::Cfl { dt, bound });
            }
        }
        let mut w = full.t_spec(&state.u.u1.to_spectral(), &state.u.u2.to_spectral());
        if physics.convection || physics.pressure_source {
            let mid = self.imex.provisional(state, 0.5 * dt)?;
            let um = self.imex.bs.apply(&mid.omega);
            let f = TensorField::neg_outer(&um);
            if physics.convection {
                let (v1, v2) = self.div_f(&f);
                w = w + integ.t_spec(&v1, &v2);
            }
            if physics.pressure_source {
                let p = self.imex.poisson.p_f_spec(&f);
                let g = self.imex.poisson.wall_d1_spec(&p);
                w = w + integ.boundary_spec(&g);
            }
        }
        let omega = ScalarField::from_spectral(&grid, &w);
        if !omega.is_finite() {
            return Err(VhpError::Blowup { t: state.t + dt, step: state.step + 1 });
        }
        state.omega = omega;
        state.t += dt;
        state.step += 1;
        state.u_valid = false;
        Ok(())
    }
}
