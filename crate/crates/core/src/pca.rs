//! Data-driven inference for principal components under the spiked
//! covariance model.
//!
//! Indices `j`, `k` and coordinates `i` are zero-based. The sample covariance
//! is `Σ̂ = XXᵀ/n` for a `p × n` data matrix `X`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::inference::{
    check_alpha, check_component, check_len, push_vector, separated, InferenceResult,
};
use crate::linalg::{
    basis_vector, require_unit, sym_eig, Matrix, OrderingMode, SpectralDecomposition, SymMatrix,
};
use crate::md::perp_mass;
use crate::scalar::Real;

/// `XXᵀ/n`.
pub fn sample_covariance<T: Real>(x: &Matrix<T>) -> Result<SymMatrix<T>> {
    if x.cols() == 0 {
        return Err(Error::InvalidDimension("data matrix has no columns".into()));
    }
    let mut g = x.gram_rows();
    g.scale(T::from_usize_lossy(x.cols()).recip());
    SymMatrix::from_matrix(g)
}

/// Descending eigendecomposition of `XXᵀ/n` with all `p` eigenvalues.
///
/// When `n < p` the `n × n` matrix `XᵀX/n` is decomposed instead; its
/// eigenvalues are padded with `p − n` zeros and each eigenvector `v` with
/// positive eigenvalue `μ` is lifted to `Xv/√(nμ)`. Only those lifted vectors
/// are stored.
pub fn covariance_decomposition<T: Real>(x: &Matrix<T>) -> Result<SpectralDecomposition<T>> {
    let (p, n) = (x.rows(), x.cols());
    if n == 0 || p == 0 {
        return Err(Error::InvalidDimension("data matrix is empty".into()));
    }
    if n >= p {
        return sym_eig(&sample_covariance(x)?, OrderingMode::ByValueDesc);
    }
    let mut g = x.gram_cols();
    g.scale(T::from_usize_lossy(n).recip());
    let small = sym_eig(&SymMatrix::from_matrix(g)?, OrderingMode::ByValueDesc)?;
    let top = small.eigenvalues()[0].max(T::zero());
    let floor = T::lit(1e-12) * top;
    let kept = small
        .eigenvalues()
        .iter()
        .take_while(|&&mu| mu > floor)
        .count();
    let mut columns = Vec::with_capacity(kept);
    for k in 0..kept {
        let mut u = x.mul_vec(&small.eigenvector(k));
        let len = crate::linalg::norm(&u);
        u.iter_mut().for_each(|v| *v /= len);
        columns.push(u);
    }
    let mut eigenvalues: Vec<T> = small
        .eigenvalues()
        .iter()
        .map(|&mu| mu.max(T::zero()))
        .collect();
    eigenvalues.resize(p, T::zero());
    let vectors = if kept == 0 {
        Matrix::zeros(p, 0)
    } else {
        Matrix::from_columns(&columns)?
    };
    SpectralDecomposition::from_parts(eigenvalues, vectors, OrderingMode::ByValueDesc)
}

/// Which noise estimator applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseRegime {
    /// `p ≥ n / ln⁴(n ∨ p)`: average of the trailing eigenvalues.
    Trace,
    /// `p < n / ln⁴(n ∨ p)`: the `(r+1)`-th eigenvalue.
    Eigenvalue,
}

impl NoiseRegime {
    pub fn select(n: usize, p: usize) -> Self {
        let l = (n.max(p) as f64).ln();
        if p as f64 >= n as f64 / l.powi(4) {
            NoiseRegime::Trace
        } else {
            NoiseRegime::Eigenvalue
        }
    }
}

/// Regime-dependent estimate of `σ²`.
pub fn estimate_noise_pca<T: Real>(
    dec: &SpectralDecomposition<T>,
    r: usize,
    n: usize,
    p: usize,
) -> Result<T> {
    estimate_noise_pca_in(dec, r, p, NoiseRegime::select(n, p))
}

/// [`estimate_noise_pca`] with the regime fixed by the caller.
pub fn estimate_noise_pca_in<T: Real>(
    dec: &SpectralDecomposition<T>,
    r: usize,
    p: usize,
    regime: NoiseRegime,
) -> Result<T> {
    check_len(p, dec.dim())?;
    if r >= p {
        return Err(Error::RankOutOfRange { rank: r, dim: p });
    }
    let ev = dec.eigenvalues();
    Ok(match regime {
        NoiseRegime::Trace => ev[r..].iter().copied().sum::<T>() / T::from_usize_lossy(p - r),
        NoiseRegime::Eigenvalue => ev[r],
    })
}

/// `γ̂(λ̂_k) = (1/n) Σ λ̂_i/(λ̂_k − λ̂_i)` over one-based `i = r+1, …, min(p−r, n)`.
pub fn gamma_hat_pca<T: Real>(
    dec: &SpectralDecomposition<T>,
    r: usize,
    k: usize,
    n: usize,
    p: usize,
) -> Result<T> {
    check_len(p, dec.dim())?;
    check_component(k, r)?;
    let upper = (p.saturating_sub(r)).min(n);
    let ev = dec.eigenvalues();
    let lk = ev[k];
    let mut sum = T::zero();
    for (i, &li) in ev.iter().enumerate().take(upper).skip(r) {
        if !separated(lk, li) {
            return Err(Error::DegenerateGap { j: k, k: i });
        }
        sum += li / (lk - li);
    }
    Ok(sum / T::from_usize_lossy(n))
}

/// `λ̌_k = λ̂_k / (1 + γ̂(λ̂_k))`, an estimate of `λ_k + σ²`.
pub fn debias_eigenvalue_pca<T: Real>(
    dec: &SpectralDecomposition<T>,
    r: usize,
    k: usize,
    n: usize,
    p: usize,
) -> Result<T> {
    let gamma = gamma_hat_pca(dec, r, k, n, p)?;
    apply_gamma(dec.eigenvalue(k), gamma)
}

fn apply_gamma<T: Real>(lambda: T, gamma: T) -> Result<T> {
    let denom = T::one() + gamma;
    if !(denom > T::lit(1e-10)) {
        return Err(Error::DegenerateCorrection(format!("1 + gamma = {denom}")));
    }
    Ok(lambda / denom)
}

/// Bias parameter `b̂_j`.
///
/// With `λ̂_i` for one-based `r < i ≤ n` (zero beyond `p`) and
/// `τ = σ̂² p/n`:
/// for `n ≥ p`, `b = λ̂_j/(n + Σ λ̂_i/(λ̂_j − λ̂_i)) · Σ λ̂_i/(λ̂_j − λ̂_i)²`;
/// for `n < p`,
/// `b = τ/(λ̂_j − τ) + λ̂_j/(λ̂_j − τ) · λ̂_j/(n + Σ λ̂_i/(λ̂_j − λ̂_i)) · Σ (λ̂_i − τ)/(λ̂_j − λ̂_i)²`.
pub fn bias_pca<T: Real>(
    dec: &SpectralDecomposition<T>,
    r: usize,
    j: usize,
    n: usize,
    p: usize,
    sigma2_hat: T,
) -> Result<T> {
    check_len(p, dec.dim())?;
    check_component(j, r)?;
    if r >= p {
        return Err(Error::RankOutOfRange { rank: r, dim: p });
    }
    let ev = dec.eigenvalues();
    let tail: Vec<T> = (r..n)
        .map(|i| if i < p { ev[i] } else { T::zero() })
        .collect();
    if n >= p {
        bias_pca_large_n(ev[j], &tail, n, j, r)
    } else {
        let tau = sigma2_hat * T::from_usize_lossy(p) / T::from_usize_lossy(n);
        bias_pca_shifted(ev[j], &tail, n, tau, j, r)
    }
}

/// The `n ≥ p` expression on an explicit tail `λ̂_{r+1}, …, λ̂_n`.
pub fn bias_pca_large_n<T: Real>(lj: T, tail: &[T], n: usize, j: usize, r: usize) -> Result<T> {
    let (first, second) = bias_sums(lj, tail, T::zero(), j, r)?;
    let denom = T::from_usize_lossy(n) + first;
    check_correction(denom, "n + sum")?;
    Ok(lj / denom * second)
}

/// The `n < p` expression with shift `τ` on an explicit tail.
pub fn bias_pca_shifted<T: Real>(
    lj: T,
    tail: &[T],
    n: usize,
    tau: T,
    j: usize,
    r: usize,
) -> Result<T> {
    let (first, second) = bias_sums(lj, tail, tau, j, r)?;
    let denom = T::from_usize_lossy(n) + first;
    check_correction(denom, "n + sum")?;
    let gap = lj - tau;
    if !separated(lj, tau) {
        return Err(Error::DegenerateCorrection(format!(
            "lambda_hat_j - sigma2_hat p / n = {gap}"
        )));
    }
    Ok(tau / gap + lj / gap * (lj / denom) * second)
}

/// `(Σ λ̂_i/(λ̂_j − λ̂_i), Σ (λ̂_i − τ)/(λ̂_j − λ̂_i)²)`.
fn bias_sums<T: Real>(lj: T, tail: &[T], tau: T, j: usize, r: usize) -> Result<(T, T)> {
    let mut first = T::zero();
    let mut second = T::zero();
    for (offset, &li) in tail.iter().enumerate() {
        if !separated(lj, li) {
            return Err(Error::DegenerateGap { j, k: r + offset });
        }
        let gap = lj - li;
        first += li / gap;
        second += (li - tau) / (gap * gap);
    }
    Ok((first, second))
}

fn check_correction<T: Real>(denom: T, what: &str) -> Result<()> {
    if denom.abs() <= T::lit(1e-10) * T::one().max(denom.abs()) || !denom.is_finite() {
        return Err(Error::DegenerateCorrection(format!("{what} = {denom}")));
    }
    Ok(())
}

/// Everything the interval construction needs from one data set.
#[derive(Debug, Clone)]
pub struct PcaEstimates<T> {
    pub sigma2_hat: T,
    pub gamma_hat: Vec<T>,
    pub b_hat: Vec<T>,
    pub lambda_check: Vec<T>,
    pub dec: SpectralDecomposition<T>,
    pub regime: NoiseRegime,
    pub r: usize,
    pub n: usize,
    pub p: usize,
}

impl<T: Real> PcaEstimates<T> {
    /// Full pipeline on a `p × n` data matrix, with leading signs canonical.
    pub fn estimate(x: &Matrix<T>, r: usize) -> Result<Self> {
        let (p, n) = (x.rows(), x.cols());
        if r == 0 || r >= p {
            return Err(Error::RankOutOfRange { rank: r, dim: p });
        }
        let mut dec = covariance_decomposition(x)?;
        if dec.computed_vectors() < r {
            return Err(Error::RankOutOfRange {
                rank: r,
                dim: dec.computed_vectors(),
            });
        }
        dec.canonicalize_signs(r);
        let regime = NoiseRegime::select(n, p);
        let sigma2_hat = estimate_noise_pca_in(&dec, r, p, regime)?;
        Self::from_decomposition(dec, r, n, sigma2_hat, regime)
    }

    /// Estimates for a given decomposition of `Σ̂` and noise variance.
    pub fn from_decomposition(
        dec: SpectralDecomposition<T>,
        r: usize,
        n: usize,
        sigma2_hat: T,
        regime: NoiseRegime,
    ) -> Result<Self> {
        let p = dec.dim();
        if r == 0 || r >= p || r > dec.computed_vectors() {
            return Err(Error::RankOutOfRange { rank: r, dim: p });
        }
        let gamma_hat = (0..r)
            .map(|k| gamma_hat_pca(&dec, r, k, n, p))
            .collect::<Result<Vec<_>>>()?;
        let lambda_check = gamma_hat
            .iter()
            .enumerate()
            .map(|(k, &g)| apply_gamma(dec.eigenvalue(k), g))
            .collect::<Result<Vec<_>>>()?;
        let b_hat = (0..r)
            .map(|k| bias_pca(&dec, r, k, n, p, sigma2_hat))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sigma2_hat,
            gamma_hat,
            b_hat,
            lambda_check,
            dec,
            regime,
            r,
            n,
            p,
        })
    }

    /// Assembles estimates from explicit parts without recomputation.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        dec: SpectralDecomposition<T>,
        r: usize,
        n: usize,
        sigma2_hat: T,
        gamma_hat: Vec<T>,
        b_hat: Vec<T>,
        lambda_check: Vec<T>,
    ) -> Result<Self> {
        let p = dec.dim();
        if r > dec.computed_vectors() {
            return Err(Error::RankOutOfRange { rank: r, dim: p });
        }
        check_len(r, gamma_hat.len())?;
        check_len(r, b_hat.len())?;
        check_len(r, lambda_check.len())?;
        Ok(Self {
            sigma2_hat,
            gamma_hat,
            b_hat,
            lambda_check,
            dec,
            regime: NoiseRegime::select(n, p),
            r,
            n,
            p,
        })
    }
}

/// `ŝ` for `aᵀu_j`:
/// `ŝ² = Σ_{k≠j} λ̌_kλ̌_j(aᵀû_k)²(1 + b̂_k)/(n(λ̌_j − λ̌_k)²) + σ̂²λ̌_j‖Û⊥ᵀa‖²/(n(λ̌_j − σ̂²)²)`.
pub fn variance_pca<T: Real>(est: &PcaEstimates<T>, a: &[T], j: usize) -> Result<T> {
    check_len(est.p, a.len())?;
    require_unit(a)?;
    check_component(j, est.r)?;
    let proj = est.dec.leading_projections(a, est.r);
    let nf = T::from_usize_lossy(est.n);
    let lj = est.lambda_check[j];
    let mut within = T::zero();
    for k in (0..est.r).filter(|&k| k != j) {
        let lk = est.lambda_check[k];
        if !separated(lj, lk) {
            return Err(Error::DegenerateGap { j, k });
        }
        within +=
            lk * lj * proj[k] * proj[k] * (T::one() + est.b_hat[k]) / (nf * (lj - lk) * (lj - lk));
    }
    let perp = perp_mass(a, &proj);
    let outside = if perp == T::zero() || est.sigma2_hat == T::zero() {
        T::zero()
    } else {
        let gap = lj - est.sigma2_hat;
        if !separated(lj, est.sigma2_hat) {
            return Err(Error::DegenerateCorrection(format!(
                "lambda_check_j - sigma2_hat = {gap}"
            )));
        }
        est.sigma2_hat * lj * perp / (nf * gap * gap)
    };
    Ok((within + outside).max(T::zero()).sqrt())
}

/// Interval for `aᵀu_j` centered at `ûⱼᵀa·√(1 + b̂_j)`.
pub fn ci_pca<T: Real>(
    x: &Matrix<T>,
    r: usize,
    j: usize,
    a: &[T],
    alpha: f64,
) -> Result<InferenceResult<T>> {
    check_alpha(alpha)?;
    check_component(j, r)?;
    check_len(x.rows(), a.len())?;
    require_unit(a)?;
    let est = PcaEstimates::estimate(x, r)?;
    ci_pca_from(&est, j, a, alpha)
}

/// [`ci_pca`] on precomputed estimates.
pub fn ci_pca_from<T: Real>(
    est: &PcaEstimates<T>,
    j: usize,
    a: &[T],
    alpha: f64,
) -> Result<InferenceResult<T>> {
    check_alpha(alpha)?;
    let s = variance_pca(est, a, j)?;
    let proj = est.dec.leading_projections(a, est.r)[j];
    let point = proj * (T::one() + est.b_hat[j]).sqrt();
    InferenceResult::new(point, s, alpha, pca_diagnostics(est, j, s))
}

/// Interval for `u_j(i)` centered at `û_j(i)` with no bias correction.
pub fn ci_pca_entrywise<T: Real>(
    x: &Matrix<T>,
    r: usize,
    j: usize,
    i: usize,
    alpha: f64,
) -> Result<InferenceResult<T>> {
    check_alpha(alpha)?;
    check_component(j, r)?;
    if i >= x.rows() {
        return Err(Error::IndexOutOfRange {
            index: i,
            bound: x.rows(),
        });
    }
    let est = PcaEstimates::estimate(x, r)?;
    ci_pca_entrywise_from(&est, j, i, alpha)
}

/// [`ci_pca_entrywise`] on precomputed estimates.
pub fn ci_pca_entrywise_from<T: Real>(
    est: &PcaEstimates<T>,
    j: usize,
    i: usize,
    alpha: f64,
) -> Result<InferenceResult<T>> {
    check_alpha(alpha)?;
    let e = basis_vector(est.p, i)?;
    let s = variance_pca(est, &e, j)?;
    let point = est.dec.eigenvectors()[(i, j)];
    InferenceResult::new(point, s, alpha, pca_diagnostics(est, j, s))
}

fn pca_diagnostics<T: Real>(est: &PcaEstimates<T>, j: usize, s: T) -> BTreeMap<String, T> {
    let mut d = BTreeMap::new();
    d.insert("sigma2_hat".to_string(), est.sigma2_hat);
    d.insert("b_hat_j".to_string(), est.b_hat[j]);
    d.insert("s_hat".to_string(), s);
    push_vector(&mut d, "gamma_hat", &est.gamma_hat);
    push_vector(&mut d, "lambda_check", &est.lambda_check);
    push_vector(&mut d, "lambda_hat", &est.dec.eigenvalues()[..est.r]);
    d
}
