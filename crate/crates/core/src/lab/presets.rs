//! Initial data shared by the scenarios. Vorticities are built from stream
//! functions with analytic Laplacians so that no finite differencing enters
//! the data.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Field64, Grid64, Vector64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// psi = A(x1) x2^4 exp(-x2^2 / 2) / 4 with A = 1 + cos/2 + 3 sin(2.)/10
    StreamPoly,
    /// psi = A(x1) x2^2 exp(-x2^2 / 2) with A a random trigonometric
    /// polynomial of degree kmax, coefficients ~ k^-2
    StreamRandom,
    /// non-negative (1 - r^2/R^2)^3 blob of unit mass
    Blob,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub preset: Preset,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "default_kmax")]
    pub kmax: usize,
    /// blob centre and radius
    #[serde(default = "default_center")]
    pub center: [f64; 2],
    #[serde(default = "one")]
    pub radius: f64,
}

fn one() -> f64 {
    1.0
}
fn default_kmax() -> usize {
    16
}
fn default_center() -> [f64; 2] {
    [3.0, 1.5]
}

impl InitialSpec {
    pub fn of(preset: Preset) -> Self {
        Self { preset, amplitude: 1.0, kmax: default_kmax(), center: default_center(), radius: 1.0 }
    }

    pub fn vorticity(&self, grid: &Grid64, seed: u64) -> Field64 {
        match self.preset {
            Preset::StreamPoly => stream_poly(grid, self.amplitude),
            Preset::StreamRandom => stream_random(grid, self.amplitude, self.kmax, seed),
            Preset::Blob => blob(grid, self.center, self.radius, self.amplitude),
        }
    }
}

fn wavenumber(grid: &Grid64) -> f64 {
    2.0 * PI / grid.l1()
}

pub fn stream_poly(grid: &Grid64, amp: f64) -> Field64 {
    let k = wavenumber(grid);
    Field64::from_fn(grid, |x, z| {
        let a = 1.0 + 0.5 * (k * x).cos() + 0.3 * (2.0 * k * x).sin();
        let axx = -k * k * (0.5 * (k * x).cos() + 1.2 * (2.0 * k * x).sin());
        let e = (-z * z / 2.0).exp() / 4.0;
        let q = z.powi(4) * e;
        let qzz = (12.0 * z * z - 9.0 * z.powi(4) + z.powi(6)) * e;
        -amp * (axx * q + a * qzz)
    })
}

pub fn stream_random(grid: &Grid64, amp: f64, kmax: usize, seed: u64) -> Field64 {
    let k = wavenumber(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a0: f64 = rng.random_range(-1.0..1.0);
    let modes: Vec<(f64, f64, f64)> = (1..=kmax)
        .map(|m| {
            let c = rng.random_range(-1.0..1.0) / (m * m) as f64;
            (m as f64 * k, c, rng.random_range(0.0..2.0 * PI))
        })
        .collect();
    Field64::from_fn(grid, |x, z| {
        let (mut a, mut axx) = (a0, 0.0);
        for &(km, c, p) in &modes {
            let v = c * (km * x + p).cos();
            a += v;
            axx -= km * km * v;
        }
        let e = (-z * z / 2.0).exp();
        let q = z * z * e;
        let qzz = (2.0 - 5.0 * z * z + z.powi(4)) * e;
        -amp * (axx * q + a * qzz)
    })
}

pub fn blob(grid: &Grid64, center: [f64; 2], radius: f64, mass: f64) -> Field64 {
    let norm = 4.0 * mass / (PI * radius * radius);
    Field64::from_fn(grid, |x, z| {
        let r2 = ((x - center[0]).powi(2) + (z - center[1]).powi(2)) / (radius * radius);
        if r2 < 1.0 {
            norm * (1.0 - r2).powi(3)
        } else {
            0.0
        }
    })
}

/// Random test pair for the duality identity: v vanishing at the wall,
/// f a Gaussian layer in x2, both low-degree in x1.
pub fn duality_pair(grid: &Grid64, rng: &mut ChaCha8Rng) -> (Vector64, Field64) {
    let k = wavenumber(grid);
    let c: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
    let f = Field64::from_fn(grid, |x, z| {
        (c[0] + c[1] * (k * x).cos() + c[2] * (2.0 * k * x).sin()) * (-(z - 1.0 - 2.0 * c[3].abs()).powi(2)).exp()
    });
    let v1 = Field64::from_fn(grid, |x, z| (c[4] + c[5] * (k * x + c[6]).sin()) * z * (-z).exp());
    let v2 = Field64::from_fn(grid, |x, z| {
        (c[8] * (3.0 * k * x).cos() + c[9]) * z * z * (-z * c[10].abs() - z * z / 4.0).exp()
    });
    (Vector64::new(v1, v2).expect("same grid"), f)
}
