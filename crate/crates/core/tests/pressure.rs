use std::f64::consts::PI;

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vhp_core::biot_savart::biot_savart;
use vhp_core::pressure::{
    laplacian, pf_solve, ph_gradient, ph_potential, pressure_total_gradient, total_gradient, PoissonSolver,
};
use vhp_core::quadrature::adaptive_gk15;
use vhp_core::spectral_ops::d_tangential;
use vhp_core::{BoundaryTrace, Grid64, ScalarField, TensorField, VectorField};

fn orders(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn zero_stress_gives_zero_pressure() {
    let g = Grid64::new(2.0 * PI, 16, 4.0, 33).unwrap();
    let p = pf_solve(&TensorField::zeros(&g)).unwrap();
    assert_eq!(p.p_f.sup(), 0.0);
    assert_eq!(p.grad_pf.sup(), 0.0);
    assert_eq!(p.wall_d1pf.sup(), 0.0);
    let solver = PoissonSolver::new(&g).unwrap();
    let parts = pressure_total_gradient(&solver, &VectorField::zeros(&g), &ScalarField::zeros(&g));
    assert_eq!(total_gradient(&parts).sup(), 0.0);
}

#[test]
fn shear_flow_has_no_pressure_gradient() {
    let g = Grid64::new(2.0 * PI, 16, 8.0, 65).unwrap();
    let u1 = ScalarField::from_fn(&g, |_, z| z * (-z).exp());
    let omega = ScalarField::from_fn(&g, |_, z| (z - 1.0) * (-z).exp());
    let u = VectorField::new(u1, ScalarField::zeros(&g)).unwrap();
    let solver = PoissonSolver::new(&g).unwrap();
    let parts = pressure_total_gradient(&solver, &u, &omega);
    assert!(parts.grad_pf.sup() <= 1e-12, "{}", parts.grad_pf.sup());
    assert!(parts.grad_ph.sup() <= 1e-12);
    assert!(total_gradient(&parts).sup() <= 1e-12);
}

/// p for F12 = F21 = sin(x1) phi(x2): the even extension solves the
/// whole-plane problem with source 2 cos(x1) phi~'(x2), phi~ the odd
/// extension of phi, so per mode
/// P(z) = int sign(z - y) e^{-|z - y|} phi~(y) dy.
fn whole_plane_mode(phi: impl Fn(f64) -> f64 + Copy, z: f64) -> f64 {
    let q = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| adaptive_gk15(f, a, b, 1e-13, 400).value;
    let below = q(&|y| (-(z - y)).exp() * phi(y), 0.0, z);
    let above = q(&|y| (-(y - z)).exp() * phi(y), z, 12.0);
    let image = q(&|y| (-(z + y)).exp() * phi(y), 0.0, 12.0);
    below - above - image
}

#[test]
fn neumann_pressure_matches_doubled_domain_oracle() {
    let phi = |z: f64| z * z * (-z * z).exp();
    let mut errs = vec![];
    let mut wall = vec![];
    for n2 in [65, 129, 257] {
        let g = Grid64::new(2.0 * PI, 16, 8.0, n2).unwrap();
        let mut f = TensorField::zeros(&g);
        f.f12 = ScalarField::from_fn(&g, |x, z| x.sin() * phi(z));
        f.f21 = f.f12.clone();
        let parts = pf_solve(&f).unwrap();
        let prof: Vec<f64> = (0..n2).map(|j| whole_plane_mode(phi, g.z(j))).collect();
        let exact = ScalarField::from_fn(&g, |x, z| x.cos() * prof[(z / g.h2()).round() as usize]);
        errs.push(parts.p_f.sub(&exact).sup());
        let p = parts.p_f.values();
        let h = g.h2();
        let r = (0..g.n1()).map(|i| ((-3.0 * p[[0, i]] + 4.0 * p[[1, i]] - p[[2, i]]) / (2.0 * h)).abs());
        wall.push(r.fold(0.0, f64::max));
    }
    assert!(orders(&errs).iter().all(|o| *o >= 1.8), "{errs:?}");
    assert!(orders(&wall).iter().all(|o| *o >= 1.8), "{wall:?}");
}

#[test]
fn harmonic_part_constant_and_single_mode() {
    let g = Grid64::new(4.0, 32, 3.0, 49).unwrap();
    let c = ph_gradient(&BoundaryTrace::from_fn(&g, |_| 1.3));
    assert!(c.sup() <= 1e-14);
    let k0 = 2.0 * PI / 4.0;
    let gp = ph_gradient(&BoundaryTrace::from_fn(&g, |x| (k0 * x).cos()));
    for ((j, i), v) in gp.u1.values().indexed_iter() {
        let (x, z) = (g.x1(i), g.z(j));
        assert!((v - k0 * (-k0 * z).exp() * (k0 * x).cos()).abs() <= 1e-12);
        assert!((gp.u2.values()[[j, i]] + k0 * (-k0 * z).exp() * (k0 * x).sin()).abs() <= 1e-12);
    }
}

#[test]
fn harmonic_part_weighted_bound_is_resolution_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let coef: Vec<(f64, f64)> = (1..=8).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let datum = |x: f64| coef.iter().enumerate().map(|(m, (a, b))| {
        let k = (m + 1) as f64;
        a * (k * x).cos() + b * (k * x).sin()
    }).sum::<f64>();
    let mut ratios = vec![];
    for (n1, n2) in [(64, 257), (128, 513)] {
        let g = Grid64::new(2.0 * PI, n1, 2.0, n2).unwrap();
        let tr = BoundaryTrace::from_fn(&g, datum);
        let gp = ph_gradient(&tr);
        let mut s = 0.0f64;
        for j in 0..n2 {
            for i in 0..n1 {
                let m = gp.u1.values()[[j, i]].hypot(gp.u2.values()[[j, i]]);
                s = s.max(g.z(j) * m);
            }
        }
        ratios.push(s / tr.sup());
    }
    assert!(ratios[0].is_finite() && ratios[0] > 0.0);
    assert!((ratios[0] / ratios[1] - 1.0).abs() <= 0.05, "{ratios:?}");
}

#[test]
fn harmonic_potential_is_consistent_and_discretely_harmonic() {
    let datum = |x: f64| x.cos() + 0.5 * (2.0 * x).sin();
    let mut res = vec![];
    for n2 in [33, 65, 129] {
        let g = Grid64::new(2.0 * PI, 16, 4.0, n2).unwrap();
        let tr = BoundaryTrace::from_fn(&g, datum);
        let pot = ph_potential(&tr);
        let gp = ph_gradient(&tr);
        assert!(d_tangential(&pot).sub(&gp.u1).sup() <= 1e-12);
        let lap = laplacian(&pot);
        let interior = (1..n2 - 1).flat_map(|j| lap.values().row(j).to_vec()).fold(0.0f64, |a, v| a.max(v.abs()));
        res.push(interior);
    }
    assert!(orders(&res).iter().all(|o| *o >= 1.8), "{res:?}");
}

#[test]
fn total_assembly_matches_component_sums() {
    let g = Grid64::new(2.0 * PI, 32, 8.0, 65).unwrap();
    let omega = ScalarField::from_fn(&g, |x, z| (x.cos() + 0.4 * (2.0 * x).sin()) * (z - 1.0) * (-z * z).exp());
    let u = biot_savart(&omega);
    let solver = PoissonSolver::new(&g).unwrap();
    let parts = pressure_total_gradient(&solver, &u, &omega);
    let pf = pf_solve(&TensorField::neg_outer(&u)).unwrap().grad_pf;
    let wall = BoundaryTrace::new(&g, Array1::from(omega.values().row(0).to_vec())).unwrap();
    let ph = ph_gradient(&wall);
    let total = total_gradient(&parts);
    assert!(total.u1.sub(&pf.u1.add(&ph.u1)).sup() <= 1e-10);
    assert!(total.u2.sub(&pf.u2.add(&ph.u2)).sup() <= 1e-10);
}
