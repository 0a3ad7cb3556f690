//! Unidirectional flows u = (u1(t, x2), 0) driven by d_t u1 - d22 u1 = f(t).

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{Result, VhpError};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::pressure::{pressure_total_gradient, total_gradient, PoissonSolver};
use crate::scalar::Real;
use crate::series::TimeSeries;
use crate::stencil::Stencil;
use crate::tridiag::Tridiag;

#[derive(Clone, Debug)]
pub struct ShearFlow<T: Real> {
    pub z: Vec<T>,
    pub dt: f64,
    pub times: Vec<f64>,
    /// profiles[n][j] = u1(times[n], z[j]); the wall value is always 0.
    pub profiles: Vec<Array1<T>>,
    pub forcing: TimeSeries,
}

/// Crank-Nicolson in time, second-order differences in x2, u1 = 0 at the wall
/// and zero gradient at x2 = H.
pub fn shear_flow_solve<T: Real>(
    f: &TimeSeries,
    u0: &Array1<T>,
    height: T,
    dt: f64,
    t_end: f64,
) -> Result<ShearFlow<T>> {
    let n = u0.len();
    if n < 9 || !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(VhpError::InvalidArgument("shear solve needs >= 9 nodes and positive dt".into()));
    }
    if u0.iter().any(|v| !v.is_finite()) {
        return Err(VhpError::NonFinite("shear profile"));
    }
    let h = height / T::of_usize(n - 1);
    let ih2 = T::one() / (h * h);
    let two = T::of(2.0);
    let m = n - 1;
    // operator on unknowns z_1..z_{N-1}
    let mut a = Tridiag::new(m);
    for j in 0..m {
        a.sub[j] = ih2;
        a.sup[j] = ih2;
        a.diag[j] = -two * ih2;
    }
    a.sub[0] = T::zero();
    a.sub[m - 1] = two * ih2;
    a.sup[m - 1] = T::zero();
    let half = T::of(0.5 * dt);
    let mut lhs = a.clone();
    for j in 0..m {
        lhs.sub[j] = -half * lhs.sub[j];
        lhs.sup[j] = -half * lhs.sup[j];
        lhs.diag[j] = T::one() - half * lhs.diag[j];
    }
    let lu = lhs.factor()?;
    let steps = (t_end / dt).round() as usize;
    let mut u = u0.clone();
    u[0] = T::zero();
    let mut profiles = vec![u.clone()];
    let mut times = vec![0.0];
    let z: Vec<T> = (0..n).map(|j| T::of_usize(j) * h).collect();
    for s in 0..steps {
        let t0 = s as f64 * dt;
        let fa = T::of(0.5 * (f.at(t0) + f.at(t0 + dt)));
        let col: Vec<Complex<T>> = u.iter().skip(1).map(|v| Complex::new(*v, T::zero())).collect();
        let au = a.mul(&col);
        let mut rhs: Vec<Complex<T>> = (0..m).map(|j| col[j] + au[j] * half + Complex::new(fa * T::of(dt), T::zero())).collect();
        lu.solve(&mut rhs);
        for j in 0..m {
            u[j + 1] = rhs[j].re;
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(VhpError::Blowup { t: t0 + dt, step: s + 1 });
        }
        profiles.push(u.clone());
        times.push(t0 + dt);
    }
    Ok(ShearFlow { z, dt, times, profiles, forcing: f.clone() })
}

/// Summary of r = d_t u + div(u (x) u) - Delta u + grad p_F + grad p_H on a window.
#[derive(Clone, Debug)]
pub struct ResidualStats {
    /// sup over the window and interior nodes of |r1 - f(t)|
    pub r1_minus_f: f64,
    /// sup |r1|
    pub r1_sup: f64,
    /// sup |r2|
    pub r2_sup: f64,
    /// sup of the assembled (C2) pressure gradient
    pub grad_p_sup: f64,
}

/// Residual of a shear flow under the (C2) pressure, evaluated on the 2D grid
/// with `n1` samples in x1. Time derivatives are centered differences of the
/// stored profiles on t in [t_from, t_end - dt].
pub fn c2_residual_shear<T: Real>(flow: &ShearFlow<T>, l1: T, n1: usize, t_from: f64) -> Result<ResidualStats> {
    let n2 = flow.z.len();
    let height = flow.z[n2 - 1];
    let grid = Grid::with_order(l1, n1, height, n2, 2)?;
    let solver = PoissonSolver::new(&grid)?;
    let d2 = Stencil::<T>::d2_second_order(n2, grid.h2());
    let d1 = Stencil::<T>::d1_second_order(n2, grid.h2());
    let mut stats = ResidualStats { r1_minus_f: 0.0, r1_sup: 0.0, r2_sup: 0.0, grad_p_sup: 0.0 };
    let dt = flow.dt;
    let last = flow.profiles.len() - 1;
    for n in 1..last {
        let t = flow.times[n];
        if t < t_from - 1e-12 {
            continue;
        }
        let prof = &flow.profiles[n];
        let u1 = ScalarField::new(&grid, Array2::from_shape_fn((n2, n1), |(j, _)| prof[j]))?;
        let u = VectorField { u1: u1.clone(), u2: ScalarField::zeros(&grid) };
        // omega = d1 u2 - d2 u1
        let du = d1.apply(prof.view());
        let omega = ScalarField::new(&grid, Array2::from_shape_fn((n2, n1), |(j, _)| -du[j]))?;
        let parts = pressure_total_gradient(&solver, &u, &omega);
        let gp = total_gradient(&parts);
        // convection div(u (x) u): d1(u1 u1) + d2(u1 u2), d1(u2 u1) + d2(u2 u2)
        let f = crate::field::TensorField::neg_outer(&u);
        let mut c1 = f.f11.to_spectral();
        crate::spectral_ops::spectral_d1(&grid, &mut c1);
        let c1 = ScalarField::from_spectral(&grid, &c1);
        let lap = d2.apply(prof.view());
        let ft = flow.forcing.at(t);
        for j in 1..n2 - 1 {
            let dudt = (flow.profiles[n + 1][j] - flow.profiles[n - 1][j]).f64() / (2.0 * dt);
            for i in 0..n1 {
                let r1 = dudt - c1.values()[[j, i]].f64() - lap[j].f64() + gp.u1.values()[[j, i]].f64();
                // the convective part of r2, d1(u1 u2) + d2(u2 u2), vanishes with u2
                let r2 = gp.u2.values()[[j, i]].f64();
                stats.r1_minus_f = stats.r1_minus_f.max((r1 - ft).abs());
                stats.r1_sup = stats.r1_sup.max(r1.abs());
                stats.r2_sup = stats.r2_sup.max(r2.abs());
            }
        }
        stats.grad_p_sup = stats.grad_p_sup.max(gp.sup().f64());
    }
    Ok(stats)
}
