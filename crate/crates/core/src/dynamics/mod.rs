//! Time stepping: IMEX and Duhamel vorticity steppers, the shear family, and
//! the heat-transport fundamental solution.

pub mod duhamel;
pub mod heat_transport;
pub mod imex;
pub mod shear;

use ndarray::Array1;
use num_complex::Complex;

use crate::field::{ScalarField, Spectrum, VectorField};
use crate::scalar::Real;

pub use duhamel::DuhamelStepper;
pub use heat_transport::{heat_transport_fundamental, DriftSeries, FundamentalSolution, HeatTransportConfig};
pub use imex::ImexStepper;
pub use shear::{c2_residual_shear, shear_flow_solve, ShearFlow};

/// Wall closure of the vorticity equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    /// d2 omega + |d1| omega = -d1 p_F, the no-slip condition in vorticity form.
    C2,
    /// Homogeneous Neumann wall: the ablation control.
    NeumannAblation,
}

/// Vorticity plus the history the multistep schemes need.
#[derive(Clone, Debug)]
pub struct SimState<T: Real> {
    pub t: f64,
    pub step: usize,
    pub omega: ScalarField<T>,
    /// Biot-Savart velocity of `omega`, valid when `u_valid`.
    pub u: VectorField<T>,
    pub u_valid: bool,
    /// Nonlinear term and wall source of the previous step (Adams-Bashforth).
    pub prev_nl: Option<Spectrum<T>>,
    pub prev_src: Option<Array1<Complex<T>>>,
}

impl<T: Real> SimState<T> {
    pub fn new(omega: ScalarField<T>) -> Self {
        let u = VectorField::zeros(omega.grid());
        Self { t: 0.0, step: 0, omega, u, u_valid: false, prev_nl: None, prev_src: None }
    }
}

/// Optional manufactured-solution forcing: body source f(t, x1, x2) added to
/// the vorticity equation and an extra wall source q(t, x1) added to the
/// right side of the Robin condition.
pub struct Forcing<T> {
    pub body: Box<dyn Fn(f64, T, T) -> T + Send + Sync>,
    pub wall: Box<dyn Fn(f64, T) -> T + Send + Sync>,
}

/// Switches for the linear and nonlinear parts of a step.
#[derive(Clone, Copy, Debug)]
pub struct Physics {
    pub convection: bool,
    pub pressure_source: bool,
    pub closure: Closure,
}

impl Default for Physics {
    fn default() -> Self {
        Self { convection: true, pressure_source: true, closure: Closure::C2 }
    }
}

impl Physics {
    pub fn stokes() -> Self {
        Self { convection: false, pressure_source: false, closure: Closure::C2 }
    }
}
