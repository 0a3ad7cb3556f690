//! Scalar time series (t, value) with linear interpolation, read from CSV.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Result, VhpError};

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    t: Vec<f64>,
    v: Vec<f64>,
}

#[derive(Deserialize)]
struct Row {
    t: f64,
    value: f64,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != v.len() {
            return Err(VhpError::InvalidArgument("time series needs matching, non-empty columns".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(VhpError::InvalidArgument("time series times must increase".into()));
        }
        if t.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(VhpError::NonFinite("time series"));
        }
        Ok(Self { t, v })
    }

    pub fn constant(c: f64) -> Self {
        Self { t: vec![0.0], v: vec![c] }
    }

    /// Reads a CSV with header columns `t` and `value`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let bad = |msg: String| VhpError::Config { path: path.to_path_buf(), msg };
        let mut rd = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
        let (mut t, mut v) = (Vec::new(), Vec::new());
        for row in rd.deserialize::<Row>() {
            let row = row.map_err(|e| bad(e.to_string()))?;
            t.push(row.t);
            v.push(row.value);
        }
        Self::new(t, v).map_err(|e| bad(e.to_string()))
    }

    /// Linear interpolation, constant extrapolation outside the samples.
    pub fn at(&self, t: f64) -> f64 {
        let n = self.t.len();
        if t <= self.t[0] {
            return self.v[0];
        }
        if t >= self.t[n - 1] {
            return self.v[n - 1];
        }
        let j = self.t.partition_point(|&s| s <= t) - 1;
        let a = (t - self.t[j]) / (self.t[j + 1] - self.t[j]);
        self.v[j] * (1.0 - a) + self.v[j + 1] * a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_and_extrapolates() {
        let s = TimeSeries::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(s.at(-1.0), 0.0);
        assert_eq!(s.at(0.5), 1.0);
        assert_eq!(s.at(2.0), 1.0);
        assert_eq!(s.at(9.0), 0.0);
        assert!(TimeSeries::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }
}
