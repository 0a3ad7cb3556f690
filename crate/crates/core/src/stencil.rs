//! Finite-difference stencils on the uniform x2 nodes.

use ndarray::{ArrayView1, ArrayViewMut1};
use num_traits::Zero;
use std::ops::{Add, Mul};

use crate::scalar::Real;

/// Fornberg's recursion: weights of the `deriv`-th derivative at `x0` from
/// samples at `xs`.
pub fn fd_weights(x0: f64, xs: &[f64], deriv: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; deriv + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[deriv]).collect()
}

/// Row-wise stencil: output node j reads `width` inputs starting at `start[j]`.
#[derive(Clone, Debug)]
pub struct Stencil<T> {
    start: Vec<usize>,
    width: usize,
    coef: Vec<T>,
}

impl<T: Real> Stencil<T> {
    /// Derivative of order `deriv` on `n` nodes of spacing `h`, using `width`
    /// nodes per row, centered where possible and one-sided near the ends.
    pub fn derivative(n: usize, h: T, deriv: usize, width: usize) -> Self {
        assert!(width <= n && width > deriv);
        let mut start = Vec::with_capacity(n);
        let mut coef = Vec::with_capacity(n * width);
        let scale = h.f64().powi(deriv as i32);
        for j in 0..n {
            let lo = j.saturating_sub(width / 2).min(n - width);
            let xs: Vec<f64> = (lo..lo + width).map(|m| m as f64 - j as f64).collect();
            start.push(lo);
            coef.extend(fd_weights(0.0, &xs, deriv).into_iter().map(|w| T::of(w / scale)));
        }
        Self { start, width, coef }
    }

    /// Second-order first derivative: centered interior, 3-point one-sided ends.
    pub fn d1_second_order(n: usize, h: T) -> Self {
        Self::derivative(n, h, 1, 3)
    }

    /// Second-order second derivative: centered interior, 4-point one-sided ends.
    pub fn d2_second_order(n: usize, h: T) -> Self {
        let mut s = Self::derivative(n, h, 2, 4);
        // interior rows use the compact 3-point form
        let c = T::one() / (h * h);
        let two = T::of(2.0);
        for j in 1..n - 1 {
            let row = &mut s.coef[j * 4..j * 4 + 4];
            if j + 2 < n {
                s.start[j] = j - 1;
                row.copy_from_slice(&[c, -two * c, c, T::zero()]);
            } else {
                s.start[j] = j - 2;
                row.copy_from_slice(&[T::zero(), c, -two * c, c]);
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.start.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, j: usize) -> (usize, &[T]) {
        (self.start[j], &self.coef[j * self.width..(j + 1) * self.width])
    }

    pub fn apply_into<S>(&self, x: ArrayView1<S>, mut out: ArrayViewMut1<S>)
    where
        S: Copy + Zero + Add<Output = S> + Mul<T, Output = S>,
    {
        for j in 0..self.len() {
            let (lo, w) = self.row(j);
            let mut acc = S::zero();
            for (a, &c) in w.iter().enumerate() {
                acc = acc + x[lo + a] * c;
            }
            out[j] = acc;
        }
    }

    pub fn apply<S>(&self, x: ArrayView1<S>) -> ndarray::Array1<S>
    where
        S: Copy + Zero + Add<Output = S> + Mul<T, Output = S>,
    {
        let mut out = ndarray::Array1::from_elem(self.len(), S::zero());
        self.apply_into(x, out.view_mut());
        out
    }
}
