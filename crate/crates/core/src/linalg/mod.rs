//! Dense linear algebra shared by every other module.

pub mod eigen;
pub mod io;
pub mod lu;
pub mod matrix;
pub mod normal;
pub mod sign;

pub use eigen::{rank_r_truncation, sym_eig, OrderingMode, SpectralDecomposition};
pub use matrix::{dot, norm, Matrix, SymMatrix};
pub use normal::{normal_cdf, normal_pdf, normal_quantile, two_sided_critical};
pub use sign::{canonical_sign, sign_align, sign_of_inner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Checks `‖a‖ = 1` to within `1e-8`.
pub fn require_unit<T: Real>(a: &[T]) -> Result<()> {
    let n = norm(a);
    if (n - T::one()).abs() > T::lit(1e-8) || !n.is_finite() {
        return Err(Error::NotUnitVector(n.as_f64()));
    }
    Ok(())
}

/// `e_i` in dimension `n`.
pub fn basis_vector<T: Real>(n: usize, i: usize) -> Result<Vec<T>> {
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, bound: n });
    }
    let mut e = vec![T::zero(); n];
    e[i] = T::one();
    Ok(e)
}

/// The all-`1/√n` unit vector.
pub fn constant_unit_vector<T: Real>(n: usize) -> Vec<T> {
    vec![T::one() / T::from_usize_lossy(n).sqrt(); n]
}
