use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vhp_core::spectral_ops::{d_tangential, d_vertical, frac_laplacian_half, hilbert, poisson_semigroup};
use vhp_core::{BoundaryTrace, Grid64, ScalarField};

fn random_trace(grid: &Grid64, seed: u64) -> BoundaryTrace<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BoundaryTrace::new(grid, Array1::from_shape_fn(grid.n1(), |_| rng.random_range(-1.0..1.0))).unwrap()
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

/// Closed-form trigonometric-interpolation matrices (even N): the periodic
/// Hilbert transform and the Fourier differentiation matrix.
fn hilbert_matrix(n: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(a, b)| {
        let m = a as i64 - b as i64;
        if m.rem_euclid(2) == 1 {
            2.0 / n as f64 * cot(PI * m as f64 / n as f64)
        } else {
            0.0
        }
    })
}

fn derivative_matrix(n: usize, l1: f64) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(a, b)| {
        let m = a as i64 - b as i64;
        if m == 0 {
            0.0
        } else {
            let s = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            PI / l1 * s * cot(PI * m as f64 / n as f64)
        }
    })
}

#[test]
fn frac_laplacian_matches_dense_hilbert_derivative() {
    let g = Grid64::new(3.0, 32, 1.0, 9).unwrap();
    let f = random_trace(&g, 3);
    let m = hilbert_matrix(32).dot(&derivative_matrix(32, 3.0));
    let oracle = m.dot(f.values());
    let got = frac_laplacian_half(&f);
    let err = (&oracle - got.values()).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!(err <= 1e-10, "{err}");
    let h = hilbert(&f);
    let err = (&hilbert_matrix(32).dot(f.values()) - h.values()).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!(err <= 1e-10, "{err}");
}

#[test]
fn multipliers_commute_and_compose() {
    let g = Grid64::new(2.0 * PI, 64, 1.0, 9).unwrap();
    let f = random_trace(&g, 5);
    let a = hilbert(&d_tangential(&f));
    let b = d_tangential(&hilbert(&f));
    let c = frac_laplacian_half(&f);
    let p = poisson_semigroup(&c, 0.3).unwrap();
    let q = frac_laplacian_half(&poisson_semigroup(&f, 0.3).unwrap());
    for i in 0..g.n1() {
        assert!((a.values()[i] - b.values()[i]).abs() <= 1e-12);
        assert!((a.values()[i] - c.values()[i]).abs() <= 1e-12);
        assert!((p.values()[i] - q.values()[i]).abs() <= 1e-12);
    }
}

/// Periodized Poisson kernel sum_n a / (pi ((x + nL)^2 + a^2)) with the tail
/// beyond |n| = m replaced by its midpoint integral.
fn periodized_poisson(x: f64, a: f64, l: f64, m: i64) -> f64 {
    let mut s = 0.0;
    for n in -m..=m {
        let y = x + n as f64 * l;
        s += a / (PI * (y * y + a * a));
    }
    let c = (m as f64 + 0.5) * l;
    s + (0.5 * PI - ((x + c) / a).atan()) / (PI * l) + (0.5 * PI - ((c - x) / a).atan()) / (PI * l)
}

#[test]
fn poisson_semigroup_matches_kernel_quadrature() {
    let l = 2.0 * PI;
    let g = Grid64::new(l, 128, 1.0, 9).unwrap();
    let step = |x: f64| (4.0 * x.sin()).tanh();
    let tr = BoundaryTrace::from_fn(&g, step);
    for a in [0.1, 0.5, 2.0] {
        let p = poisson_semigroup(&tr, a).unwrap();
        let fine = 4096;
        let hq = l / fine as f64;
        let mut worst = 0.0f64;
        for i in (0..g.n1()).step_by(5) {
            let x = g.x1(i);
            let q: f64 = (0..fine)
                .map(|j| {
                    let y = j as f64 * hq;
                    periodized_poisson(x - y, a, l, 400) * step(y) * hq
                })
                .sum();
            worst = worst.max((q - p.values()[i]).abs());
        }
        assert!(worst <= 1e-6, "a = {a}: {worst}");
    }
}

#[test]
fn d_tangential_of_cosine() {
    let g = Grid64::new(4.0, 32, 1.0, 9).unwrap();
    let k0 = 2.0 * PI / 4.0;
    let f = ScalarField::from_fn(&g, |x, z| (k0 * x).cos() * (1.0 + z));
    let d = d_tangential(&f);
    for ((j, i), v) in d.values().indexed_iter() {
        assert!((v + k0 * (k0 * g.x1(i)).sin() * (1.0 + g.z(j))).abs() < 1e-12);
    }
}

#[test]
fn d_vertical_converges_at_second_order() {
    let exact = |x: f64, z: f64| x.sin() * (-z).exp() * (-(z).cos() - z.sin());
    let mut errs = vec![];
    for n2 in [33, 65, 129, 257] {
        let g = Grid64::new(2.0 * PI, 16, 2.0, n2).unwrap();
        let f = ScalarField::from_fn(&g, |x, z| x.sin() * (-z).exp() * z.cos());
        let d = d_vertical(&f);
        let e = ScalarField::from_fn(&g, exact);
        errs.push(d.sub(&e).sup());
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.9, "{errs:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn poisson_semigroup_is_a_contraction(seed in any::<u64>(), a in 0.0f64..3.0) {
        let g = Grid64::new(2.0 * PI, 64, 1.0, 9).unwrap();
        let f = random_trace(&g, seed);
        let p = poisson_semigroup(&f, a).unwrap();
        prop_assert!(p.sup() <= f.sup() + 1e-10);
    }

    #[test]
    fn poisson_semigroup_composes(seed in any::<u64>(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let g = Grid64::new(2.0 * PI, 32, 1.0, 9).unwrap();
        let f = random_trace(&g, seed);
        let two = poisson_semigroup(&poisson_semigroup(&f, a).unwrap(), b).unwrap();
        let one = poisson_semigroup(&f, a + b).unwrap();
        for i in 0..g.n1() {
            prop_assert!((two.values()[i] - one.values()[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn transform_round_trip(seed in any::<u64>()) {
        let g = Grid64::new(1.0, 16, 1.0, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = Array2::from_shape_fn((9, 16), |_| rng.random_range(-1.0..1.0));
        let f = ScalarField::new(&g, v).unwrap();
        let back = ScalarField::from_spectral(&g, &f.to_spectral());
        prop_assert!(back.sub(&f).sup() <= 1e-12);
    }
}
