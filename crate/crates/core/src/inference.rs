//! Confidence interval result type shared by both pipelines.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::two_sided_critical;
use crate::scalar::Real;

/// A point estimate with its standard error and two-sided interval.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult<T> {
    pub point: T,
    pub s_hat: T,
    pub lower: T,
    pub upper: T,
    pub alpha: f64,
    /// Named intermediate quantities. Vector entries carry a one-based
    /// suffix, e.g. `lambda_check_2`.
    pub diagnostics: BTreeMap<String, T>,
}

impl<T: Real> InferenceResult<T> {
    /// `point ± Φ⁻¹(1 − α/2)·s_hat`.
    pub fn new(point: T, s_hat: T, alpha: f64, diagnostics: BTreeMap<String, T>) -> Result<Self> {
        let z = T::lit(two_sided_critical(alpha)?);
        let half = z * s_hat;
        Ok(Self {
            point,
            s_hat,
            lower: point - half,
            upper: point + half,
            alpha,
            diagnostics,
        })
    }

    pub fn contains(&self, value: T) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// `j < r`.
pub(crate) fn check_component(j: usize, r: usize) -> Result<()> {
    if j < r {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: j, bound: r })
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Relative separation guard `|x − y| ≥ 1e−10·max(1, |x|)`.
pub(crate) fn separated<T: Real>(x: T, y: T) -> bool {
    (x - y).abs() >= T::lit(1e-10) * x.abs().max(T::one())
}

pub(crate) fn push_vector<T: Real>(map: &mut BTreeMap<String, T>, name: &str, values: &[T]) {
    for (k, &v) in values.iter().enumerate() {
        map.insert(format!("{name}_{}", k + 1), v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_is_symmetric() {
        let res = InferenceResult::new(0.5_f64, 0.1, 0.05, BTreeMap::new()).unwrap();
        assert!(((res.point - res.lower) - (res.upper - res.point)).abs() < 1e-12);
        let z = crate::linalg::normal_quantile(0.975).unwrap();
        assert!((res.width() - 2.0 * z * 0.1).abs() < 1e-12);
        assert!(res.contains(0.5));
    }
}
