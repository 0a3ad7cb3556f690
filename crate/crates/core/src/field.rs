use ndarray::{Array1, Array2, Axis, Zip};
use num_complex::Complex;

use crate::error::{Result, VhpError};
use crate::grid::Grid;
use crate::scalar::Real;

/// Per-mode spectral view, [N2 x N1] in FFT column order.
pub type Spectrum<T> = Array2<Complex<T>>;

/// Real field sampled on the grid, rows are x2 nodes, columns x1 samples.
#[derive(Clone, Debug)]
pub struct ScalarField<T: Real> {
    grid: Grid<T>,
    values: Array2<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        Self { grid: grid.clone(), values: Array2::zeros((grid.n2(), grid.n1())) }
    }

    pub fn new(grid: &Grid<T>, values: Array2<T>) -> Result<Self> {
        if values.dim() != (grid.n2(), grid.n1()) {
            return Err(VhpError::InvalidArgument(format!(
                "field shape {:?} does not match grid ({}, {})",
                values.dim(),
                grid.n2(),
                grid.n1()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(VhpError::NonFinite("scalar field"));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    /// Samples f(x1, x2) at every grid point.
    pub fn from_fn(grid: &Grid<T>, f: impl Fn(T, T) -> T) -> Self {
        let values = Array2::from_shape_fn((grid.n2(), grid.n1()), |(j, i)| f(grid.x1(i), grid.z(j)));
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    pub fn values(&self) -> &Array2<T> {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut Array2<T> {
        &mut self.values
    }
    pub fn into_values(self) -> Array2<T> {
        self.values
    }

    pub fn to_spectral(&self) -> Spectrum<T> {
        let n1 = self.grid.n1();
        let mut out = Array2::zeros((self.grid.n2(), n1));
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n1];
        for (row, mut orow) in self.values.outer_iter().zip(out.outer_iter_mut()) {
            for (b, v) in buf.iter_mut().zip(row.iter()) {
                *b = Complex::new(*v, T::zero());
            }
            self.grid.fft_forward(&mut buf);
            for (o, b) in orow.iter_mut().zip(buf.iter()) {
                *o = *b;
            }
        }
        out
    }

    /// Inverse transform keeping the real part (the Hermitian projection).
    pub fn from_spectral(grid: &Grid<T>, spec: &Spectrum<T>) -> Self {
        let n1 = grid.n1();
        let mut values = Array2::zeros((grid.n2(), n1));
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n1];
        for (srow, mut vrow) in spec.outer_iter().zip(values.outer_iter_mut()) {
            buf.copy_from_slice(srow.as_slice().expect("contiguous rows"));
            grid.fft_inverse(&mut buf);
            for (v, b) in vrow.iter_mut().zip(buf.iter()) {
                *v = b.re;
            }
        }
        Self { grid: grid.clone(), values }
    }

    pub fn sup(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Wall row x2 = 0.
    pub fn wall(&self) -> BoundaryTrace<T> {
        BoundaryTrace { grid: self.grid.clone(), values: self.values.row(0).to_owned() }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { grid: self.grid.clone(), values: self.values.mapv(f) }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let mut values = self.values.clone();
        Zip::from(&mut values).and(&other.values).for_each(|a, &b| *a = f(*a, b));
        Self { grid: self.grid.clone(), values }
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Plain Riemann mean square over the grid points, (1/(N1 N2)) sum f^2.
    pub fn mean_square(&self) -> T {
        let n = T::of_usize(self.values.len());
        self.values.iter().fold(T::zero(), |s, v| s + *v * *v) / n
    }

    /// Supremum of |f| over rows with x2 > frac * H.
    pub fn sup_above(&self, frac: T) -> T {
        let cut = frac * self.grid.height();
        self.values
            .axis_iter(Axis(0))
            .enumerate()
            .filter(|(j, _)| self.grid.z(*j) > cut)
            .fold(T::zero(), |m, (_, row)| row.iter().fold(m, |m, v| m.max(v.abs())))
    }
}

#[derive(Clone, Debug)]
pub struct VectorField<T: Real> {
    pub u1: ScalarField<T>,
    pub u2: ScalarField<T>,
}

impl<T: Real> VectorField<T> {
    pub fn new(u1: ScalarField<T>, u2: ScalarField<T>) -> Result<Self> {
        if u1.grid() != u2.grid() {
            return Err(VhpError::InvalidArgument("component grids differ".into()));
        }
        Ok(Self { u1, u2 })
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self { u1: ScalarField::zeros(grid), u2: ScalarField::zeros(grid) }
    }

    pub fn grid(&self) -> &Grid<T> {
        self.u1.grid()
    }

    /// Pointwise sup of the Euclidean norm.
    pub fn sup(&self) -> T {
        let mut m = T::zero();
        Zip::from(self.u1.values()).and(self.u2.values()).for_each(|&a, &b| {
            m = m.max((a * a + b * b).sqrt());
        });
        m
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { u1: self.u1.scaled(s), u2: self.u2.scaled(s) }
    }
}

/// Components F_ij of a 2x2 tensor field.
#[derive(Clone, Debug)]
pub struct TensorField<T: Real> {
    pub f11: ScalarField<T>,
    pub f12: ScalarField<T>,
    pub f21: ScalarField<T>,
    pub f22: ScalarField<T>,
}

impl<T: Real> TensorField<T> {
    /// F = -u (x) u, the convective stress of the Navier-Stokes equations.
    pub fn neg_outer(u: &VectorField<T>) -> Self {
        let f11 = u.u1.zip_with(&u.u1, |a, b| -a * b);
        let f12 = u.u1.zip_with(&u.u2, |a, b| -a * b);
        let f22 = u.u2.zip_with(&u.u2, |a, b| -a * b);
        Self { f21: f12.clone(), f11, f12, f22 }
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        let z = ScalarField::zeros(grid);
        Self { f11: z.clone(), f12: z.clone(), f21: z.clone(), f22: z }
    }
}

/// Function of x1 on the wall x2 = 0.
#[derive(Clone, Debug)]
pub struct BoundaryTrace<T: Real> {
    grid: Grid<T>,
    values: Array1<T>,
}

impl<T: Real> BoundaryTrace<T> {
    pub fn new(grid: &Grid<T>, values: Array1<T>) -> Result<Self> {
        if values.len() != grid.n1() {
            return Err(VhpError::InvalidArgument("trace length does not match N1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(VhpError::NonFinite("boundary trace"));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn from_fn(grid: &Grid<T>, f: impl Fn(T) -> T) -> Self {
        Self { grid: grid.clone(), values: Array1::from_shape_fn(grid.n1(), |i| f(grid.x1(i))) }
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self { grid: grid.clone(), values: Array1::zeros(grid.n1()) }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    pub fn values(&self) -> &Array1<T> {
        &self.values
    }

    pub fn to_spectral(&self) -> Array1<Complex<T>> {
        let mut buf: Vec<Complex<T>> = self.values.iter().map(|v| Complex::new(*v, T::zero())).collect();
        self.grid.fft_forward(&mut buf);
        Array1::from(buf)
    }

    pub fn from_spectral(grid: &Grid<T>, spec: &Array1<Complex<T>>) -> Self {
        let mut buf = spec.to_vec();
        grid.fft_inverse(&mut buf);
        Self { grid: grid.clone(), values: buf.iter().map(|c| c.re).collect() }
    }

    pub fn sup(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, v| m.min(*v))
    }
}

/// Field on the doubled strip x2 in [-H, H]; row r sits at x2 = (r - (N2-1)) h2.
#[derive(Clone, Debug)]
pub struct DoubledField<T: Real> {
    grid: Grid<T>,
    values: Array2<T>,
}

impl<T: Real> DoubledField<T> {
    pub fn from_values(grid: &Grid<T>, values: Array2<T>) -> Result<Self> {
        if values.dim() != (2 * grid.n2() - 1, grid.n1()) {
            return Err(VhpError::InvalidArgument("doubled field shape mismatch".into()));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    pub fn values(&self) -> &Array2<T> {
        &self.values
    }

    pub fn z(&self, r: usize) -> T {
        (T::of_usize(r) - T::of_usize(self.grid.n2() - 1)) * self.grid.h2()
    }

    /// Upper half x2 >= 0 as an ordinary field.
    pub fn restrict(&self) -> ScalarField<T> {
        let n = self.grid.n2();
        let values = self.values.slice(ndarray::s![n - 1.., ..]).to_owned();
        ScalarField { grid: self.grid.clone(), values }
    }
}

#[derive(Clone, Debug)]
pub struct DoubledVector<T: Real> {
    pub u1: DoubledField<T>,
    pub u2: DoubledField<T>,
}

fn reflect<T: Real>(f: &ScalarField<T>, sign: T) -> DoubledField<T> {
    let n2 = f.grid().n2();
    let mut values = Array2::zeros((2 * n2 - 1, f.grid().n1()));
    for r in 0..2 * n2 - 1 {
        let (src, s) = if r >= n2 - 1 { (r - (n2 - 1), T::one()) } else { ((n2 - 1) - r, sign) };
        let row = f.values().row(src).mapv(|v| v * s);
        values.row_mut(r).assign(&row);
    }
    DoubledField { grid: f.grid().clone(), values }
}

/// Even extension of u1 and odd extension of u2 across the wall.
pub fn extend_even_odd<T: Real>(u: &VectorField<T>) -> Result<DoubledVector<T>> {
    let wall = u.u2.values().row(0).iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if wall.f64() > 1e-10 {
        return Err(VhpError::WallTrace(wall.f64()));
    }
    let mut u2 = reflect(&u.u2, -T::one());
    // the wall row of an odd function is zero
    u2.values.row_mut(u.grid().n2() - 1).fill(T::zero());
    Ok(DoubledVector { u1: reflect(&u.u1, T::one()), u2 })
}

/// Even extension of a scalar field.
pub fn extend_even<T: Real>(f: &ScalarField<T>) -> DoubledField<T> {
    reflect(f, T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid<f64> {
        Grid::new(2.0, 16, 1.0, 9).unwrap()
    }

    #[test]
    fn constant_and_cosine_coefficients() {
        let g = grid();
        let c = ScalarField::from_fn(&g, |_, _| 3.0).to_spectral();
        assert!((c[[0, 0]].re - 3.0).abs() < 1e-14);
        assert!(c.row(0).iter().skip(1).all(|v| v.norm() < 1e-14));
        let w = std::f64::consts::PI;
        let s = ScalarField::from_fn(&g, |x, _| (w * x).cos()).to_spectral();
        assert!((s[[2, 1]].re - 0.5).abs() < 1e-14);
        assert!((s[[2, 15]].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn extension_symmetry() {
        let g = grid();
        let u = VectorField::new(
            ScalarField::from_fn(&g, |_, _| 1.0),
            ScalarField::from_fn(&g, |x, z| z * (3.0 * x).sin()),
        )
        .unwrap();
        let e = extend_even_odd(&u).unwrap();
        let n = g.n2() - 1;
        for r in 0..n {
            let m = 2 * n - r;
            for i in 0..g.n1() {
                assert_eq!(e.u1.values()[[r, i]], e.u1.values()[[m, i]]);
                assert_eq!(e.u2.values()[[r, i]], -e.u2.values()[[m, i]]);
            }
        }
        assert!(e.u1.values().iter().all(|v| *v == 1.0));
        let back = e.u2.restrict();
        assert_eq!(back.values(), u.u2.values());
    }

    #[test]
    fn extension_rejects_wall_flux() {
        let g = grid();
        let u = VectorField::new(ScalarField::zeros(&g), ScalarField::from_fn(&g, |_, _| 1.0)).unwrap();
        assert!(extend_even_odd(&u).is_err());
    }
}
