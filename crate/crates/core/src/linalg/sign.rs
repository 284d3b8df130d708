//! Eigenvector sign conventions.

use crate::linalg::matrix::dot;
use crate::scalar::Real;

/// Returns `v_hat` flipped if needed so that `⟨v_hat, reference⟩ ≥ 0`.
/// An exactly orthogonal pair keeps `v_hat` unchanged.
pub fn sign_align<T: Real>(v_hat: &[T], reference: &[T]) -> Vec<T> {
    if dot(v_hat, reference) < T::zero() {
        v_hat.iter().map(|&x| -x).collect()
    } else {
        v_hat.to_vec()
    }
}

/// Deterministic sign without a reference: the entry of largest magnitude
/// (lowest index on ties) is made positive.
pub fn canonical_sign<T: Real>(v: &[T]) -> Vec<T> {
    if needs_flip_for_canonical(v) {
        v.iter().map(|&x| -x).collect()
    } else {
        v.to_vec()
    }
}

pub(crate) fn needs_flip_for_canonical<T: Real>(v: &[T]) -> bool {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    v.get(best).is_some_and(|&x| x < T::zero())
}

/// `+1` if `⟨a, b⟩ ≥ 0`, else `-1`.
pub fn sign_of_inner<T: Real>(a: &[T], b: &[T]) -> T {
    if dot(a, b) < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}
