//! One-sample Kolmogorov–Smirnov distance to the standard normal.

use crate::error::{Error, Result};
use crate::linalg::normal_cdf;

/// `max_i max(|i/N − Φ(x_(i))|, |(i−1)/N − Φ(x_(i))|)` over the sorted
/// sample.
pub fn ks_to_normal(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter("sample contains NaN".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(idx, &x)| {
            let phi = normal_cdf(x);
            let i = (idx + 1) as f64;
            (i / n - phi).abs().max(((i - 1.0) / n - phi).abs())
        })
        .fold(0.0, f64::max))
}
