use std::f64::consts::PI;

use ndarray::{Array1, Array2};

use vhp_core::diagnostics::{gaussian_envelope_check, EnvelopeParams};
use vhp_core::dynamics::{
    heat_transport_fundamental, shear_flow_solve, DriftSeries, DuhamelStepper, Forcing, HeatTransportConfig,
    ImexStepper, Physics, SimState,
};
use vhp_core::quadrature::adaptive_gk15;
use vhp_core::series::TimeSeries;
use vhp_core::{Grid64, ScalarField};

fn orders(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn zero_state_stays_zero() {
    let g = Grid64::new(2.0 * PI, 8, 4.0, 17).unwrap();
    let mut imex = ImexStepper::new(&g, Physics::default()).unwrap();
    let mut s = SimState::new(ScalarField::zeros(&g));
    for _ in 0..5 {
        imex.step(&mut s, 0.01).unwrap();
    }
    assert_eq!(s.omega.sup(), 0.0);
    let mut duh = DuhamelStepper::new(&g, Physics::default()).unwrap();
    let mut s = SimState::new(ScalarField::zeros(&g));
    for _ in 0..3 {
        duh.step(&mut s, 0.01).unwrap();
    }
    assert_eq!(s.omega.sup(), 0.0);
}

/// Crank-Nicolson for w_t = w_zz with a mirrored ghost at z = 0 and w = 0 at
/// z = H, solved by dense Gaussian elimination.
fn heat_1d(w0: &[f64], h: f64, dt: f64, steps: usize) -> Vec<f64> {
    let n = w0.len() - 1;
    let mut a = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        a[[j, j]] = -2.0 / (h * h);
        if j + 1 < n {
            a[[j, j + 1]] = 1.0 / (h * h);
        }
        if j > 0 {
            a[[j, j - 1]] = 1.0 / (h * h);
        }
    }
    a[[0, 1]] = 2.0 / (h * h);
    let lhs = Array2::<f64>::eye(n) - &a * (0.5 * dt);
    let rhs_m = Array2::<f64>::eye(n) + &a * (0.5 * dt);
    let mut w = Array1::from(w0[..n].to_vec());
    for _ in 0..steps {
        let mut m = lhs.clone();
        let mut b = rhs_m.dot(&w);
        for c in 0..n {
            let p = (c..n).max_by(|&x, &y| m[[x, c]].abs().total_cmp(&m[[y, c]].abs())).unwrap();
            for k in 0..n {
                m.swap([c, k], [p, k]);
            }
            b.swap(c, p);
            for r in c + 1..n {
                let f = m[[r, c]] / m[[c, c]];
                for k in c..n {
                    m[[r, k]] -= f * m[[c, k]];
                }
                b[r] -= f * b[c];
            }
        }
        for c in (0..n).rev() {
            let s: f64 = (c + 1..n).map(|k| m[[c, k]] * b[k]).sum();
            b[c] = (b[c] - s) / m[[c, c]];
        }
        w = b;
    }
    let mut out = w.to_vec();
    out.push(0.0);
    out
}

#[test]
fn mean_mode_is_neumann_heat_flow() {
    let g = Grid64::new(2.0 * PI, 16, 3.0, 49).unwrap();
    let prof = |z: f64| (-(z - 0.7) * (z - 0.7)).exp() * (1.0 - z / 3.0);
    let w0 = ScalarField::from_fn(&g, |_, z| prof(z));
    let (dt, steps) = (5e-3, 60);
    let mut imex = ImexStepper::new(&g, Physics::default()).unwrap();
    let mut s = SimState::new(w0);
    for _ in 0..steps {
        imex.step(&mut s, dt).unwrap();
    }
    let z0: Vec<f64> = (0..g.n2()).map(|j| prof(g.z(j))).collect();
    let oracle = heat_1d(&z0, g.h2(), dt, steps);
    let mut worst = 0.0f64;
    for ((j, _), v) in s.omega.values().indexed_iter() {
        worst = worst.max((v - oracle[j]).abs());
    }
    assert!(worst <= 1e-8, "{worst}");
}

// omega = e^{-t} cos(x1) cos(pi x2 / 2H) with the body source and the wall
// source of the Robin condition d2 omega + |d1| omega = q that it implies.
fn manufactured(n2: usize, dt: f64, t_end: f64) -> f64 {
    let h = 2.0;
    let c = PI / (2.0 * h);
    let g = Grid64::new(2.0 * PI, 8, h, n2).unwrap();
    let exact = move |t: f64, x: f64, z: f64| (-t).exp() * x.cos() * (c * z).cos();
    let mut imex = ImexStepper::new(&g, Physics::stokes()).unwrap();
    imex.forcing = Some(Forcing {
        body: Box::new(move |t, x, z| c * c * exact(t, x, z)),
        wall: Box::new(move |t, x| (-t).exp() * x.cos()),
    });
    let mut s = SimState::new(ScalarField::from_fn(&g, |x, z| exact(0.0, x, z)));
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        imex.step(&mut s, dt).unwrap();
    }
    s.omega.sub(&ScalarField::from_fn(&g, |x, z| exact(s.t, x, z))).sup()
}

#[test]
fn manufactured_solution_converges_in_space_and_time() {
    let space: Vec<f64> = [17, 33, 65].iter().map(|&n2| manufactured(n2, 1e-3, 0.2)).collect();
    assert!(orders(&space).iter().all(|o| *o >= 1.8), "{space:?}");
    let time: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&dt| manufactured(513, dt, 0.4)).collect();
    assert!(orders(&time).iter().all(|o| *o >= 1.8), "{time:?}");
}

#[test]
fn shear_at_rest_stays_at_rest() {
    let flow = shear_flow_solve(&TimeSeries::constant(0.0), &Array1::<f64>::zeros(33), 4.0, 1e-2, 0.5).unwrap();
    assert!(flow.profiles.iter().all(|p| p.iter().all(|v| *v == 0.0)));
}

#[test]
fn unforced_shear_matches_image_kernel_quadrature() {
    let (h, n2, t) = (8.0, 257, 0.1);
    let u0 = Array1::from_shape_fn(n2, |j| (PI * j as f64 / (n2 - 1) as f64).sin());
    let flow = shear_flow_solve(&TimeSeries::constant(0.0), &u0, h, 1e-3, t).unwrap();
    let last = flow.profiles.last().unwrap();
    let gauss = |s: f64| (-s * s / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
    let mut worst = 0.0f64;
    for j in 0..n2 / 2 {
        let z = j as f64 * h / (n2 - 1) as f64;
        let q = adaptive_gk15(|y| (gauss(z - y) - gauss(z + y)) * (PI * y / h).sin(), 0.0, h, 1e-13, 400).value;
        worst = worst.max((q - last[j]).abs());
    }
    assert!(worst <= 1e-6, "{worst}");
}

/// u_t = u_zz + 1 on the half line, u(0) = 0, u(t, 0) = 0:
/// u = t - 4t i^2erfc(z / 2 sqrt t).
fn forced_half_line(t: f64, z: f64) -> f64 {
    let e = z / (2.0 * t.sqrt());
    let i2 = 0.25 * ((1.0 + 2.0 * e * e) * libm::erfc(e) - 2.0 * e * (-e * e).exp() / PI.sqrt());
    t - 4.0 * t * i2
}

#[test]
fn forced_shear_richardson_reference() {
    let (h, t) = (8.0, 0.5);
    let f = TimeSeries::constant(1.0);
    let run = |n2: usize, dt: f64| {
        let flow = shear_flow_solve(&f, &Array1::<f64>::zeros(n2), h, dt, t).unwrap();
        flow.profiles.last().unwrap().clone()
    };
    let coarse = run(257, 2e-3);
    let fine = run(513, 1e-3);
    let mut worst = 0.0f64;
    for j in 0..257 {
        let z = j as f64 * h / 256.0;
        let rich = (4.0 * fine[2 * j] - coarse[j]) / 3.0;
        worst = worst.max((rich - forced_half_line(t, z)).abs());
    }
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn envelope_with_doubled_rate_is_violated() {
    let cfg = HeatTransportConfig {
        drift: DriftSeries::TypeI { m: 1.0, t_blow: 0.1, cap: 20.0 },
        ..HeatTransportConfig::default()
    };
    let sol = heat_transport_fundamental(&cfg).unwrap();
    let p = EnvelopeParams::carlen_loss(&sol, 1.0);
    let base = gaussian_envelope_check(&sol, &p, 1e-8);
    let doubled = gaussian_envelope_check(&sol, &EnvelopeParams { c2: 2.0 * p.c2, ..p.clone() }, 1e-8);
    assert!(base.max_ratio <= 1.05, "{}", base.max_ratio);
    assert!(doubled.max_ratio > base.max_ratio);
    assert!(doubled.max_ratio > 1.0, "{}", doubled.max_ratio);
    assert!(sol.max_mass_drift() <= 1e-6);
    assert!(sol.min() >= -1e-10);
}
