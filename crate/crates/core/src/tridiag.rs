use num_complex::Complex;

use crate::error::{Result, VhpError};
use crate::scalar::Real;

/// Tridiagonal matrix with real coefficients; row j reads sub[j], diag[j], sup[j].
#[derive(Clone, Debug)]
pub struct Tridiag<T> {
    pub sub: Vec<T>,
    pub diag: Vec<T>,
    pub sup: Vec<T>,
}

/// LU factors of a tridiagonal matrix, reusable across right-hand sides.
#[derive(Clone, Debug)]
pub struct TridiagLu<T> {
    sub: Vec<T>,
    inv_piv: Vec<T>,
    sup: Vec<T>,
}

impl<T: Real> Tridiag<T> {
    pub fn new(n: usize) -> Self {
        Self { sub: vec![T::zero(); n], diag: vec![T::zero(); n], sup: vec![T::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn factor(&self) -> Result<TridiagLu<T>> {
        let n = self.len();
        let mut inv_piv = vec![T::zero(); n];
        let mut sup = self.sup.clone();
        let mut piv = self.diag[0];
        for j in 0..n {
            if j > 0 {
                piv = self.diag[j] - self.sub[j] * sup[j - 1];
            }
            if piv.abs() <= T::epsilon() * (self.diag[j].abs() + T::one()) {
                return Err(VhpError::InvalidArgument(format!("singular tridiagonal system at row {j}")));
            }
            inv_piv[j] = T::one() / piv;
            sup[j] = self.sup[j] * inv_piv[j];
        }
        Ok(TridiagLu { sub: self.sub.clone(), inv_piv, sup })
    }

    pub fn mul(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.len();
        (0..n)
            .map(|j| {
                let mut v = x[j] * self.diag[j];
                if j > 0 {
                    v = v + x[j - 1] * self.sub[j];
                }
                if j + 1 < n {
                    v = v + x[j + 1] * self.sup[j];
                }
                v
            })
            .collect()
    }
}

impl<T: Real> TridiagLu<T> {
    pub fn solve(&self, rhs: &mut [Complex<T>]) {
        let n = rhs.len();
        rhs[0] = rhs[0] * self.inv_piv[0];
        for j in 1..n {
            rhs[j] = (rhs[j] - rhs[j - 1] * self.sub[j]) * self.inv_piv[j];
        }
        for j in (0..n - 1).rev() {
            rhs[j] = rhs[j] - rhs[j + 1] * self.sup[j];
        }
    }
}
