//! Per-mode kernels of the half-plane vorticity semigroup e^{tB} and the
//! operator T(t).
//!
//! For a tangential wavenumber k the semigroup acts on the vertical profile by
//! the kernel K(x2, y2) = G(x2 - y2) + G(x2 + y2) + Gamma(x2 + y2), where
//! G(t,k,z) = e^{-k^2 t} (4 pi t)^{-1/2} e^{-z^2/4t} and
//! Gamma(t,k,z) = -|k| e^{-|k| z} erfc(|k| sqrt(t) - z / (2 sqrt(t))).
//! The erfc form is the closed-form value of
//! 2 int_t^inf e^{-k^2 s} (-k^2 + |k| d/dz) (4 pi s)^{-1/2} e^{-z^2/4s} ds.

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Result, VhpError};
use crate::field::{BoundaryTrace, ScalarField, Spectrum, VectorField};
use crate::grid::Grid;
use crate::quadrature::{adaptive_gk15, composite_gauss, CellRule, Integral};
use crate::scalar::Real;

const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(VhpError::InvalidArgument(format!("kernel time must be positive, got {t}")))
    }
}

/// Per-mode Gaussian e^{-k^2 t} (4 pi t)^{-1/2} e^{-z^2 / 4t}.
pub fn gaussian_hat(t: f64, k: f64, z: f64) -> f64 {
    (-k * k * t - z * z / (4.0 * t)).exp() * 0.5 * INV_SQRT_PI / t.sqrt()
}

pub fn dgaussian_hat_dz(t: f64, k: f64, z: f64) -> f64 {
    -z / (2.0 * t) * gaussian_hat(t, k, z)
}

/// Gamma-hat by the erfc closed form; valid for t >= 0, z >= 0.
pub fn gamma_hat(t: f64, k: f64, z: f64) -> f64 {
    let ka = k.abs();
    if ka == 0.0 {
        return 0.0;
    }
    if t == 0.0 {
        return -2.0 * ka * (-ka * z).exp();
    }
    let st = t.sqrt();
    -ka * (-ka * z).exp() * libm::erfc(ka * st - z / (2.0 * st))
}

pub fn dgamma_hat_dz(t: f64, k: f64, z: f64) -> f64 {
    let ka = k.abs();
    if ka == 0.0 {
        return 0.0;
    }
    if t == 0.0 {
        return 2.0 * ka * ka * (-ka * z).exp();
    }
    let st = t.sqrt();
    ka * ka * (-ka * z).exp() * libm::erfc(ka * st - z / (2.0 * st))
        - ka * INV_SQRT_PI / st * (-ka * ka * t - z * z / (4.0 * t)).exp()
}

/// Integrand of Gamma-hat after the substitution sigma = s^2.
fn gamma_integrand(k: f64, z: f64) -> impl Fn(f64) -> f64 {
    let ka = k.abs();
    move |s: f64| {
        if s <= 0.0 {
            // s -> 0 limit: only the k^2 term survives at z = 0
            return if z == 0.0 { -2.0 * ka * ka * INV_SQRT_PI } else { 0.0 };
        }
        let sig = s * s;
        let g = (-ka * ka * sig - z * z / (4.0 * sig)).exp() * 0.5 * INV_SQRT_PI / s;
        -2.0 * g * (ka * ka + ka * z / (2.0 * sig)) * 2.0 * s
    }
}

fn gamma_cutoff(t: f64, k: f64) -> f64 {
    let ka = k.abs();
    (45.0 / (ka * ka)).max(2.0 * t + 1e-300)
}

/// Analytic bound of the neglected tail beyond sigma_max.
fn gamma_tail(k: f64, z: f64, smax: f64) -> f64 {
    let ka = k.abs();
    2.0 * 0.5 * INV_SQRT_PI / smax.sqrt() * (1.0 + z / (2.0 * ka * smax)) * (-ka * ka * smax).exp()
}

/// Gamma-hat by adaptive quadrature of its sigma-integral, with error estimate
/// (quadrature estimate plus the analytic tail bound).
pub fn gamma_hat_quadrature(t: f64, k: f64, z: f64, tol: f64) -> Result<Integral> {
    if t < 0.0 {
        return Err(VhpError::InvalidArgument(format!("negative time {t}")));
    }
    if k == 0.0 {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let smax = gamma_cutoff(t, k);
    let f = gamma_integrand(k, z);
    let mut r = adaptive_gk15(&f, t.sqrt(), smax.sqrt(), 0.5 * tol, 2000);
    r.error += gamma_tail(k, z, smax);
    if r.error > tol {
        return Err(VhpError::Quadrature { achieved: r.error });
    }
    Ok(r)
}

/// Gamma-hat by fixed composite Gauss-Legendre with `panels` panels.
pub fn gamma_hat_fixed(t: f64, k: f64, z: f64, panels: usize) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    let smax = gamma_cutoff(t, k);
    composite_gauss(gamma_integrand(k, z), t.sqrt(), smax.sqrt(), panels, 8)
}

/// K(x, y) of one mode, and its derivatives in the first and second argument.
fn kern(t: f64, k: f64, x: f64, y: f64) -> (f64, f64, f64) {
    let d = x - y;
    let s = x + y;
    let gd = gaussian_hat(t, k, d);
    let gs = gaussian_hat(t, k, s);
    let dgd = -d / (2.0 * t) * gd;
    let dgs = -s / (2.0 * t) * gs;
    let gam = gamma_hat(t, k, s);
    let dgam = dgamma_hat_dz(t, k, s);
    (gd + gs + gam, dgd + dgs + dgam, -dgd + dgs + dgam)
}

/// Dense per-mode quadrature matrices of e^{tB} at one time.
#[derive(Clone, Debug)]
struct ModeMatrices<T> {
    /// (E f)(x_i) = sum_j e[i, j] f_j
    e: Array2<T>,
    /// d/dx2 (E f)(x_i)
    dx: Array2<T>,
    /// int d/dy K(x_i, y) f(y) dy, the first-argument derivative used by T(t)
    dy: Array2<T>,
    /// boundary kernel (2G + Gamma)(t, k, x_i) and its x2-derivative
    wall: Array1<T>,
    dwall: Array1<T>,
}

impl<T: Real> ModeMatrices<T> {
    fn scale(&mut self, c: T) {
        self.e.mapv_inplace(|v| v * c);
        self.dx.mapv_inplace(|v| v * c);
        self.dy.mapv_inplace(|v| v * c);
        self.wall.mapv_inplace(|v| v * c);
        self.dwall.mapv_inplace(|v| v * c);
    }

    fn add_scaled(&mut self, o: &Self, c: T) {
        self.e.scaled_add(c, &o.e);
        self.dx.scaled_add(c, &o.dx);
        self.dy.scaled_add(c, &o.dy);
        self.wall.scaled_add(c, &o.wall);
        self.dwall.scaled_add(c, &o.dwall);
    }
}

/// Quadrature tables of e^{tB}, T(t) and the boundary action for one t.
#[derive(Clone, Debug)]
pub struct KernelTable<T: Real> {
    grid: Grid<T>,
    t: f64,
    points: usize,
    modes: Vec<ModeMatrices<T>>,
}

impl<T: Real> KernelTable<T> {
    pub fn new(grid: &Grid<T>, t: f64) -> Result<Self> {
        check_t(t)?;
        let points = CellRule::points_for_width(grid, t.sqrt());
        let rule = CellRule::new(grid, points);
        let n2 = grid.n2();
        let z: Vec<f64> = grid.z_nodes().iter().map(|v| v.f64()).collect();
        let modes = (0..grid.n_distinct())
            .into_par_iter()
            .map(|d| {
                let k = grid.kabs(d).f64();
                let mut e = Array2::zeros((n2, n2));
                let mut dx = Array2::zeros((n2, n2));
                let mut dy = Array2::zeros((n2, n2));
                let mut scratch = vec![T::zero(); rule.ng];
                let mut row = vec![T::zero(); n2];
                for i in 0..n2 {
                    let x = z[i];
                    rule.moments_into(&|y| kern(t, k, x, y).0, &mut scratch, &mut row);
                    e.row_mut(i).assign(&Array1::from(row.clone()));
                    rule.moments_into(&|y| kern(t, k, x, y).1, &mut scratch, &mut row);
                    dx.row_mut(i).assign(&Array1::from(row.clone()));
                    rule.moments_into(&|y| kern(t, k, x, y).2, &mut scratch, &mut row);
                    dy.row_mut(i).assign(&Array1::from(row.clone()));
                }
                let wall = Array1::from_shape_fn(n2, |i| {
                    T::of(2.0 * gaussian_hat(t, k, z[i]) + gamma_hat(t, k, z[i]))
                });
                let dwall = Array1::from_shape_fn(n2, |i| {
                    T::of(2.0 * dgaussian_hat_dz(t, k, z[i]) + dgamma_hat_dz(t, k, z[i]))
                });
                ModeMatrices { e, dx, dy, wall, dwall }
            })
            .collect();
        Ok(Self { grid: grid.clone(), t, points, modes })
    }

    /// Tables of the time integrals int_0^dt (.)(tau) dtau, by Gauss-Legendre
    /// in s with tau = dt s^2 (removes the tau^{-1/2} endpoint behaviour).
    /// `t()` of the result reports dt.
    pub fn time_integrated(grid: &Grid<T>, dt: f64, nodes: usize) -> Result<Self> {
        check_t(dt)?;
        let (s, w) = crate::quadrature::gauss_legendre(nodes);
        let mut acc: Option<Self> = None;
        for (sq, wq) in s.iter().zip(&w) {
            let s01 = 0.5 * (sq + 1.0);
            let weight = T::of(0.5 * wq * 2.0 * dt * s01);
            let tab = Self::new(grid, dt * s01 * s01)?;
            match acc.as_mut() {
                None => {
                    let mut first = tab;
                    for m in first.modes.iter_mut() {
                        m.scale(weight);
                    }
                    first.t = dt;
                    acc = Some(first);
                }
                Some(a) => {
                    a.points = a.points.max(tab.points);
                    for (m, n) in a.modes.iter_mut().zip(&tab.modes) {
                        m.add_scaled(n, weight);
                    }
                }
            }
        }
        Ok(acc.expect("at least one node"))
    }

    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    /// Gauss points per cell used for the kernel moments.
    pub fn points_per_cell(&self) -> usize {
        self.points
    }

    fn column_apply(m: &Array2<T>, col: ndarray::ArrayView1<Complex<T>>, out: &mut ndarray::ArrayViewMut1<Complex<T>>) {
        for (i, r) in m.axis_iter(Axis(0)).enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (w, c) in r.iter().zip(col.iter()) {
                acc = acc + *c * *w;
            }
            out[i] = acc;
        }
    }

    fn apply_spec(&self, spec: &Spectrum<T>, pick: impl Fn(&ModeMatrices<T>) -> &Array2<T>) -> Spectrum<T> {
        let mut out = Array2::zeros(spec.dim());
        for (i, mut ocol) in out.axis_iter_mut(Axis(1)).enumerate() {
            let m = pick(&self.modes[self.grid.distinct_index(i)]);
            Self::column_apply(m, spec.column(i), &mut ocol);
        }
        out
    }

    /// e^{tB} on a spectrum.
    pub fn e_spec(&self, spec: &Spectrum<T>) -> Spectrum<T> {
        self.apply_spec(spec, |m| &m.e)
    }

    /// d/dx2 of e^{tB}, from the differentiated kernel.
    pub fn e_dz_spec(&self, spec: &Spectrum<T>) -> Spectrum<T> {
        self.apply_spec(spec, |m| &m.dx)
    }

    pub fn apply(&self, f: &ScalarField<T>) -> ScalarField<T> {
        ScalarField::from_spectral(&self.grid, &self.e_spec(&f.to_spectral()))
    }

    pub fn apply_dz(&self, f: &ScalarField<T>) -> ScalarField<T> {
        ScalarField::from_spectral(&self.grid, &self.e_dz_spec(&f.to_spectral()))
    }

    /// T(t) on spectra of (v1, v2): int dK/dy(y, x) v1 + ik K(y, x) v2 dy.
    pub fn t_spec(&self, v1: &Spectrum<T>, v2: &Spectrum<T>) -> Spectrum<T> {
        let a = self.apply_spec(v1, |m| &m.dy);
        let mut b = self.e_spec(v2);
        crate::spectral_ops::scale_columns(&mut b, |i| self.grid.ik(i));
        a + b
    }

    pub fn t_apply(&self, v: &VectorField<T>) -> ScalarField<T> {
        let s = self.t_spec(&v.u1.to_spectral(), &v.u2.to_spectral());
        ScalarField::from_spectral(&self.grid, &s)
    }

    /// e^{tB}(g delta_wall): per mode (2G + Gamma)(t, k, x2) g(k).
    pub fn boundary_spec(&self, g: &Array1<Complex<T>>) -> Spectrum<T> {
        let n2 = self.grid.n2();
        Array2::from_shape_fn((n2, self.grid.n1()), |(j, i)| g[i] * self.modes[self.grid.distinct_index(i)].wall[j])
    }

    pub fn boundary_apply(&self, g: &BoundaryTrace<T>) -> ScalarField<T> {
        ScalarField::from_spectral(&self.grid, &self.boundary_spec(&g.to_spectral()))
    }

    /// d/dx2 of the boundary action.
    pub fn boundary_apply_dz(&self, g: &BoundaryTrace<T>) -> ScalarField<T> {
        let gs = g.to_spectral();
        let n2 = self.grid.n2();
        let s = Array2::from_shape_fn((n2, self.grid.n1()), |(j, i)| {
            gs[i] * self.modes[self.grid.distinct_index(i)].dwall[j]
        });
        ScalarField::from_spectral(&self.grid, &s)
    }

    /// Both sides of <T(t)v, f> = <v1, d2 e^{tB} f> - <v2, d1 e^{tB} f>.
    /// The left side uses the y-derivative moments, the right side the
    /// x-derivative moments, so the two are independent quadratures.
    pub fn duality(&self, v: &VectorField<T>, f: &ScalarField<T>) -> Duality {
        let g = &self.grid;
        let w: Vec<f64> = CellRule::<T>::new(g, 12).weights().iter().map(|x| x.f64()).collect();
        let h1 = g.h1().f64();
        let inner = |a: &ScalarField<T>, b: &ScalarField<T>| -> f64 {
            let mut s = 0.0;
            for ((j, i), x) in a.values().indexed_iter() {
                s += w[j] * x.f64() * b.values()[[j, i]].f64();
            }
            s * h1
        };
        let lhs = inner(&self.t_apply(v), f);
        let fs = f.to_spectral();
        let d2 = ScalarField::from_spectral(g, &self.e_dz_spec(&fs));
        let mut e = self.e_spec(&fs);
        crate::spectral_ops::spectral_d1(g, &mut e);
        let d1 = ScalarField::from_spectral(g, &e);
        let rhs = inner(&v.u1, &d2) - inner(&v.u2, &d1);
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        Duality { lhs, rhs, relative: (lhs - rhs).abs() / scale }
    }

    /// sup_x1 |(d2 + |d1|) e^{tB} f| at x2 = 0, with d2 the one-sided
    /// second-order difference of the computed field. The differentiated
    /// kernel satisfies the condition to rounding, so this measures the grid.
    pub fn wall_residual(&self, f: &ScalarField<T>) -> f64 {
        let e = self.e_spec(&f.to_spectral());
        let n1 = self.grid.n1();
        let h = self.grid.h2();
        let c = |v: f64| T::of(v);
        let r = Array1::from_shape_fn(n1, |i| {
            let dz = (e[[0, i]] * c(-3.0) + e[[1, i]] * c(4.0) - e[[2, i]]) / (h + h);
            dz + e[[0, i]] * self.grid.kabs(i)
        });
        BoundaryTrace::from_spectral(&self.grid, &r).sup().f64()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Duality {
    pub lhs: f64,
    pub rhs: f64,
    pub relative: f64,
}

/// e^{tB} f, building a one-off table.
pub fn eb_apply<T: Real>(t: f64, f: &ScalarField<T>) -> Result<ScalarField<T>> {
    Ok(KernelTable::new(f.grid(), t)?.apply(f))
}

pub fn eb_boundary_apply<T: Real>(t: f64, g: &BoundaryTrace<T>) -> Result<ScalarField<T>> {
    Ok(KernelTable::new(g.grid(), t)?.boundary_apply(g))
}

pub fn t_apply<T: Real>(t: f64, v: &VectorField<T>) -> Result<ScalarField<T>> {
    Ok(KernelTable::new(v.grid(), t)?.t_apply(v))
}

/// Physical-space kernel K(t, x, y) of e^{tB}, assembled from its modes on the
/// periodic x1 line of the grid: (1/L1) sum_k K_k(x2, y2) e^{ik(x1 - y1)}.
pub fn physical_kernel<T: Real>(grid: &Grid<T>, t: f64, dx1: f64, x2: f64, y2: f64, heat_only: bool) -> f64 {
    let l1 = grid.l1().f64();
    let mut s = 0.0;
    for i in 0..grid.n1() {
        let k = grid.k(i).f64();
        let mut v = gaussian_hat(t, k, x2 - y2) + gaussian_hat(t, k, x2 + y2);
        if !heat_only {
            v += gamma_hat(t, k, x2 + y2);
        }
        s += v * (k * dx1).cos();
    }
    s / l1
}

/// Outcome of comparing |K| with the anisotropic bound shape.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub calibration: f64,
    pub max_ratio: f64,
    pub ratios: Vec<f64>,
}

/// Bound shape t^{-1} (1 + r1^2 / log(e + r1^2) + r2^2)^{-1}, r = (x - y)/sqrt(t).
pub fn bound_shape(t: f64, dx1: f64, dx2: f64) -> f64 {
    let r1 = dx1 * dx1 / t;
    let r2 = dx2 * dx2 / t;
    1.0 / (t * (1.0 + r1 / (std::f64::consts::E + r1).ln() + r2))
}

/// Samples are (x1 - y1, x2, y2). The constant is calibrated so the first
/// sample, taken at x = y, has ratio 1.
pub fn kernel_pointwise_bound_check<T: Real>(
    grid: &Grid<T>,
    t: f64,
    samples: &[(f64, f64, f64)],
    heat_only: bool,
) -> Result<BoundReport> {
    check_t(t)?;
    let (d0, a0, b0) = *samples.first().ok_or_else(|| VhpError::InvalidArgument("no samples".into()))?;
    let calibration = physical_kernel(grid, t, d0, a0, b0, heat_only).abs() / bound_shape(t, d0, a0 - b0);
    let ratios: Vec<f64> = samples
        .iter()
        .map(|&(d, x2, y2)| {
            physical_kernel(grid, t, d, x2, y2, heat_only).abs() / (calibration * bound_shape(t, d, x2 - y2))
        })
        .collect();
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(BoundReport { calibration, max_ratio, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_normalization() {
        let t = 1.0 / (4.0 * std::f64::consts::PI);
        assert!((gaussian_hat(t, 0.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_zero_mode_vanishes() {
        assert_eq!(gamma_hat(0.3, 0.0, 0.2), 0.0);
        assert_eq!(gamma_hat_quadrature(0.3, 0.0, 0.2, 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn gamma_initial_value() {
        let k = 1.7;
        let z = 0.4;
        assert!((gamma_hat(1e-14, k, z) + 2.0 * k * (-k * z).exp()).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonpositive_time() {
        let g = Grid::<f64>::new(1.0, 8, 1.0, 17).unwrap();
        assert!(KernelTable::new(&g, 0.0).is_err());
        assert!(KernelTable::new(&g, -1.0).is_err());
    }
}
