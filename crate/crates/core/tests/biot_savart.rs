use std::f64::consts::PI;

use vhp_core::biot_savart::{biot_savart, trace_functional, BiotSavart};
use vhp_core::{Grid64, ScalarField};

#[test]
fn zero_vorticity() {
    let g = Grid64::new(2.0 * PI, 16, 4.0, 33).unwrap();
    let w = ScalarField::zeros(&g);
    assert_eq!(biot_savart(&w).sup(), 0.0);
    assert_eq!(trace_functional(&w).sup(), 0.0);
}

// psi = A(x1) q(x2) with q = x2^3 exp(-x2^2); omega = -Laplacian psi.
#[test]
fn recovers_velocity_of_a_stream_function() {
    let a = |x: f64| x.cos() + 0.3 * (2.0 * x).sin();
    let da = |x: f64| -x.sin() + 0.6 * (2.0 * x).cos();
    let dda = |x: f64| -x.cos() - 1.2 * (2.0 * x).sin();
    let q = |z: f64| z.powi(3) * (-z * z).exp();
    let dq = |z: f64| (3.0 * z * z - 2.0 * z.powi(4)) * (-z * z).exp();
    let ddq = |z: f64| (6.0 * z - 14.0 * z.powi(3) + 4.0 * z.powi(5)) * (-z * z).exp();
    let mut errs = vec![];
    for n2 in [17, 33, 65] {
        let g = Grid64::new(2.0 * PI, 16, 6.0, n2).unwrap();
        let w = ScalarField::from_fn(&g, |x, z| -(dda(x) * q(z) + a(x) * ddq(z)));
        let u = biot_savart(&w);
        let e1 = u.u1.sub(&ScalarField::from_fn(&g, |x, z| a(x) * dq(z))).sup();
        let e2 = u.u2.sub(&ScalarField::from_fn(&g, |x, z| -da(x) * q(z))).sup();
        errs.push(e1.max(e2));
        assert!(u.u2.values().row(0).iter().all(|v| *v == 0.0));
    }
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.8, "{errs:?}");
    }
}

/// int e^{-k|z - y|} N(y; a, eps) dy over the line, N the unit Gaussian.
fn laplace_gauss(k: f64, z: f64, a: f64, eps: f64) -> f64 {
    let d = z - a;
    let s = std::f64::consts::SQRT_2 * eps;
    0.5 * (k * k * eps * eps / 2.0).exp()
        * ((-k * d).exp() * libm::erfc((k * eps * eps - d) / s) + (k * d).exp() * libm::erfc((k * eps * eps + d) / s))
}

// A vorticity sheet cos(k x1) at height a, smeared by a narrow Gaussian:
// psi = cos(k x1) int G(z, y) N(y) dy with the Dirichlet Green function
// G = (e^{-k|z - y|} - e^{-k(z + y)}) / 2k.
#[test]
fn sheet_matches_dirichlet_green_function() {
    let (k, a, eps) = (2.0, 1.5, 0.1);
    let g = Grid64::new(2.0 * PI, 16, 6.0, 257).unwrap();
    let w = ScalarField::from_fn(&g, |x, z| {
        (k * x).cos() * (-(z - a) * (z - a) / (2.0 * eps * eps)).exp() / (eps * (2.0 * PI).sqrt())
    });
    let rec = BiotSavart::new(&g).reconstruct(&w);
    let image = (-k * a + k * k * eps * eps / 2.0).exp();
    let prof = |z: f64| (laplace_gauss(k, z, a, eps) - (-k * z).exp() * image) / (2.0 * k);
    let psi = ScalarField::from_fn(&g, |x, z| (k * x).cos() * prof(z));
    let u2 = ScalarField::from_fn(&g, |x, z| k * (k * x).sin() * prof(z));
    assert!(rec.psi.sub(&psi).sup() <= 1e-6, "{}", rec.psi.sub(&psi).sup());
    assert!(rec.u.u2.sub(&u2).sup() <= 1e-6, "{}", rec.u.u2.sub(&u2).sup());
    assert!(!rec.truncation_warning);
}

#[test]
fn nonnegative_vorticity_has_positive_trace() {
    let g = Grid64::new(2.0 * PI, 64, 4.0, 65).unwrap();
    let w = ScalarField::from_fn(&g, |x, z| (-((x - 3.0).powi(2) + (z - 1.5).powi(2)) / 0.05).exp());
    let b = trace_functional(&w);
    assert!(b.min() > 0.0, "{}", b.min());
}

// psi = (1 - r^2)^8 on the unit disc around (3, 1.5): omega = -Laplacian psi
// has zero Poisson trace.
#[test]
fn compact_stream_vorticity_has_zero_trace() {
    let g = Grid64::new(2.0 * PI, 128, 4.0, 257).unwrap();
    let w = ScalarField::from_fn(&g, |x, z| {
        let r2 = (x - 3.0).powi(2) + (z - 1.5).powi(2);
        if r2 >= 1.0 {
            0.0
        } else {
            let s = 1.0 - r2;
            // the Laplacian of s^8 is 224 r^2 s^6 - 32 s^7
            -(224.0 * r2 * s.powi(6) - 32.0 * s.powi(7))
        }
    });
    let b = trace_functional(&w);
    assert!(b.sup() <= 1e-6, "{}", b.sup());
}

// b(x1) = int int P(x1 - y1, y2) omega(y) dy with the periodized Poisson
// kernel (1/L) sinh(c y2) / (cosh(c y2) - cos(c x1)), c = 2 pi / L, summed
// directly over the x1 nodes and integrated in x2 by adaptive quadrature.
#[test]
fn spectral_trace_matches_physical_kernel() {
    let l = 2.0 * PI;
    let g = Grid64::new(l, 32, 4.0, 129).unwrap();
    let prof = |x: f64, z: f64| (1.0 + (x - 3.0).cos()).powi(2) * (-(z - 1.5).powi(2) / 0.08).exp();
    let w = ScalarField::from_fn(&g, prof);
    let b = trace_functional(&w);
    let c = 2.0 * PI / l;
    let kernel = |d: f64, y: f64| (c * y).sinh() / ((c * y).cosh() - (c * d).cos()) / l;
    let h1 = g.h1();
    let mut worst = 0.0f64;
    for a in 0..g.n1() {
        let mut s = 0.0;
        for i in 0..g.n1() {
            let d = g.x1(a) - g.x1(i);
            let x = g.x1(i);
            s += h1 * vhp_core::quadrature::adaptive_gk15(|y| kernel(d, y) * prof(x, y), 0.3, 4.0, 1e-12, 400).value;
        }
        worst = worst.max((s - b.values()[a]).abs());
    }
    assert!(worst <= 1e-6, "{worst}");
}
