//! Data-driven inference for eigenvectors under matrix denoising.
//!
//! Indices `j`, `k` and coordinates `i` are zero-based.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::inference::{
    check_alpha, check_component, check_len, push_vector, separated, InferenceResult,
};
use crate::linalg::{
    basis_vector, rank_r_truncation, require_unit, sym_eig, OrderingMode, SpectralDecomposition,
    SymMatrix,
};
use crate::scalar::Real;

/// Mean of the squared strictly upper triangular entries of `Ŝ − Ŝ_r`.
pub fn estimate_noise_md<T: Real>(s_hat: &SymMatrix<T>, r: usize) -> Result<T> {
    let dec = sym_eig(s_hat, OrderingMode::ByMagnitudeDesc)?;
    estimate_noise_md_with(s_hat, &dec, r)
}

/// As [`estimate_noise_md`] with a precomputed decomposition of `Ŝ`.
pub fn estimate_noise_md_with<T: Real>(
    s_hat: &SymMatrix<T>,
    dec: &SpectralDecomposition<T>,
    r: usize,
) -> Result<T> {
    let n = s_hat.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    if r > n {
        return Err(Error::RankOutOfRange { rank: r, dim: n });
    }
    if r == n {
        return Ok(T::zero());
    }
    let low_rank = rank_r_truncation(dec, r)?;
    let mut total = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let e = s_hat.get(i, j) - low_rank.get(i, j);
            total += e * e;
        }
    }
    Ok(total / T::from_usize_lossy(n * (n - 1) / 2))
}

fn check_rank<T: Real>(dec: &SpectralDecomposition<T>, r: usize) -> Result<()> {
    if r > dec.dim() || r > dec.computed_vectors() {
        return Err(Error::RankOutOfRange {
            rank: r,
            dim: dec.dim(),
        });
    }
    Ok(())
}

/// `Σ_{k≥r} 1/(λ̂_j − λ̂_k)^p` over the non-leading eigenvalues.
fn tail_power_sum<T: Real>(
    dec: &SpectralDecomposition<T>,
    r: usize,
    j: usize,
    power: i32,
) -> Result<T> {
    check_rank(dec, r)?;
    check_component(j, r)?;
    let ev = dec.eigenvalues();
    let lj = ev[j];
    let mut sum = T::zero();
    for (k, &lk) in ev.iter().enumerate().skip(r) {
        if !separated(lj, lk) {
            return Err(Error::DegenerateGap { j, k });
        }
        sum += (lj - lk).powi(power).recip();
    }
    Ok(sum)
}

/// `b_j = σ² Σ_{k≥r} 1/(λ̂_j − λ̂_k)²`.
pub fn bias_md<T: Real>(
    dec: &SpectralDecomposition<T>,
    r: usize,
    j: usize,
    sigma2: T,
) -> Result<T> {
    Ok(sigma2 * tail_power_sum(dec, r, j, 2)?)
}

/// `λ̌_k = λ̂_k − σ̂² Σ_{i≥r} 1/(λ̂_k − λ̂_i)`.
pub fn debias_eigenvalue_md<T: Real>(
    dec: &SpectralDecomposition<T>,
    r: usize,
    k: usize,
    sigma2_hat: T,
) -> Result<T> {
    Ok(dec.eigenvalue(k) - sigma2_hat * tail_power_sum(dec, r, k, 1)?)
}

/// `γ̂(λ̂_j) = σ̂² Σ_{k≥r} 1/(λ̂_j − λ̂_k)`, the estimated eigenvalue shift.
pub fn gamma_hat_md<T: Real>(
    dec: &SpectralDecomposition<T>,
    r: usize,
    j: usize,
    sigma2_hat: T,
) -> Result<T> {
    Ok(sigma2_hat * tail_power_sum(dec, r, j, 1)?)
}

/// Everything the interval construction needs from one observation.
#[derive(Debug, Clone)]
pub struct MdEstimates<T> {
    pub sigma2_hat: T,
    pub b_hat: Vec<T>,
    pub lambda_check: Vec<T>,
    pub dec: SpectralDecomposition<T>,
    pub r: usize,
}

impl<T: Real> MdEstimates<T> {
    /// Full pipeline on `Ŝ`: decomposition (leading signs canonical), noise
    /// estimate, bias parameters and debiased eigenvalues.
    pub fn estimate(s_hat: &SymMatrix<T>, r: usize) -> Result<Self> {
        let n = s_hat.dim();
        if r == 0 || r >= n {
            return Err(Error::RankOutOfRange { rank: r, dim: n });
        }
        let mut dec = sym_eig(s_hat, OrderingMode::ByMagnitudeDesc)?;
        dec.canonicalize_signs(r);
        let sigma2_hat = estimate_noise_md_with(s_hat, &dec, r)?;
        Self::from_decomposition(dec, r, sigma2_hat)
    }

    /// Builds the estimates for a given decomposition and noise variance,
    /// e.g. a known `σ²`.
    pub fn from_decomposition(
        dec: SpectralDecomposition<T>,
        r: usize,
        sigma2_hat: T,
    ) -> Result<Self> {
        check_rank(&dec, r)?;
        let b_hat = (0..r)
            .map(|k| bias_md(&dec, r, k, sigma2_hat))
            .collect::<Result<Vec<_>>>()?;
        let lambda_check = (0..r)
            .map(|k| debias_eigenvalue_md(&dec, r, k, sigma2_hat))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sigma2_hat,
            b_hat,
            lambda_check,
            dec,
            r,
        })
    }

    /// Assembles estimates from explicit parts without recomputation.
    pub fn from_parts(
        dec: SpectralDecomposition<T>,
        r: usize,
        sigma2_hat: T,
        b_hat: Vec<T>,
        lambda_check: Vec<T>,
    ) -> Result<Self> {
        check_rank(&dec, r)?;
        check_len(r, b_hat.len())?;
        check_len(r, lambda_check.len())?;
        Ok(Self {
            sigma2_hat,
            b_hat,
            lambda_check,
            dec,
            r,
        })
    }

    pub fn n(&self) -> usize {
        self.dec.dim()
    }
}

/// `ŝ` for `aᵀu_j`:
/// `ŝ² = 2σ̂² Σ_{k≠j} (û_kᵀa)²(1 + b̂_k)/(λ̌_j − λ̌_k)² + 2σ̂²‖Û⊥ᵀa‖²/λ̌_j²`,
/// with `‖Û⊥ᵀa‖² = ‖a‖² − ‖Ûᵀa‖²`.
pub fn variance_md<T: Real>(est: &MdEstimates<T>, a: &[T], j: usize) -> Result<T> {
    check_len(est.n(), a.len())?;
    require_unit(a)?;
    check_component(j, est.r)?;
    let proj = est.dec.leading_projections(a, est.r);
    let lj = est.lambda_check[j];
    if lj == T::zero() {
        return Err(Error::ZeroEigenvalue(j));
    }
    let mut within = T::zero();
    for k in (0..est.r).filter(|&k| k != j) {
        let lk = est.lambda_check[k];
        if !separated(lj, lk) {
            return Err(Error::DegenerateGap { j, k });
        }
        within += proj[k] * proj[k] * (T::one() + est.b_hat[k]) / ((lj - lk) * (lj - lk));
    }
    let perp = perp_mass(a, &proj);
    let two = T::lit(2.0);
    let s2 = two * est.sigma2_hat * within + two * est.sigma2_hat * perp / (lj * lj);
    Ok(s2.max(T::zero()).sqrt())
}

/// `‖a‖² − Σ_k (û_kᵀa)²`, clamped at zero.
pub(crate) fn perp_mass<T: Real>(a: &[T], proj: &[T]) -> T {
    let total: T = a.iter().map(|&x| x * x).sum();
    let inside: T = proj.iter().map(|&x| x * x).sum();
    (total - inside).max(T::zero())
}

/// Interval for `aᵀu_j` centered at `ûⱼᵀa·√(1 + b̂_j)`.
pub fn ci_md<T: Real>(
    s_hat: &SymMatrix<T>,
    r: usize,
    j: usize,
    a: &[T],
    alpha: f64,
) -> Result<InferenceResult<T>> {
    check_alpha(alpha)?;
    check_component(j, r)?;
    check_len(s_hat.dim(), a.len())?;
    require_unit(a)?;
    let est = MdEstimates::estimate(s_hat, r)?;
    ci_md_from(&est, j, a, alpha)
}

/// [`ci_md`] on precomputed estimates.
pub fn ci_md_from<T: Real>(
    est: &MdEstimates<T>,
    j: usize,
    a: &[T],
    alpha: f64,
) -> Result<InferenceResult<T>> {
    check_alpha(alpha)?;
    let s = variance_md(est, a, j)?;
    let proj = est.dec.leading_projections(a, est.r)[j];
    let point = proj * (T::one() + est.b_hat[j]).sqrt();
    InferenceResult::new(point, s, alpha, md_diagnostics(est, j, s))
}

/// Interval for `u_j(i)` centered at `û_j(i)` with no bias correction.
pub fn ci_md_entrywise<T: Real>(
    s_hat: &SymMatrix<T>,
    r: usize,
    j: usize,
    i: usize,
    alpha: f64,
) -> Result<InferenceResult<T>> {
    check_alpha(alpha)?;
    check_component(j, r)?;
    if i >= s_hat.dim() {
        return Err(Error::IndexOutOfRange {
            index: i,
            bound: s_hat.dim(),
        });
    }
    let est = MdEstimates::estimate(s_hat, r)?;
    ci_md_entrywise_from(&est, j, i, alpha)
}

/// [`ci_md_entrywise`] on precomputed estimates.
pub fn ci_md_entrywise_from<T: Real>(
    est: &MdEstimates<T>,
    j: usize,
    i: usize,
    alpha: f64,
) -> Result<InferenceResult<T>> {
    check_alpha(alpha)?;
    let e = basis_vector(est.n(), i)?;
    let s = variance_md(est, &e, j)?;
    let point = est.dec.eigenvectors()[(i, j)];
    InferenceResult::new(point, s, alpha, md_diagnostics(est, j, s))
}

fn md_diagnostics<T: Real>(est: &MdEstimates<T>, j: usize, s: T) -> BTreeMap<String, T> {
    let mut d = BTreeMap::new();
    d.insert("sigma2_hat".to_string(), est.sigma2_hat);
    d.insert("b_hat_j".to_string(), est.b_hat[j]);
    d.insert("s_hat".to_string(), s);
    push_vector(&mut d, "lambda_check", &est.lambda_check);
    push_vector(&mut d, "lambda_hat", &est.dec.eigenvalues()[..est.r]);
    d
}
