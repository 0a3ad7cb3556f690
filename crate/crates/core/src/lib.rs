//! Numerical laboratory for 2D Navier-Stokes in the half plane, vorticity form,
//! no-slip wall. Periodic Fourier modes in x1, uniform nodes in x2.

pub mod biot_savart;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod grid;
pub mod kernels;
pub mod lab;
pub mod pressure;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod spectral_ops;
pub mod stencil;
pub mod tridiag;

pub use error::{Result, VhpError};
pub use field::{BoundaryTrace, DoubledField, DoubledVector, ScalarField, Spectrum, TensorField, VectorField};
pub use grid::Grid;
pub use scalar::Real;

pub type Grid64 = grid::Grid<f64>;
pub type Grid32 = grid::Grid<f32>;
pub type Field64 = field::ScalarField<f64>;
pub type Field32 = field::ScalarField<f32>;
pub type Vector64 = field::VectorField<f64>;
pub type Vector32 = field::VectorField<f32>;
pub type Trace64 = field::BoundaryTrace<f64>;
pub type KernelTable64 = kernels::KernelTable<f64>;
pub type BiotSavart64 = biot_savart::BiotSavart<f64>;
