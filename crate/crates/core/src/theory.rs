//! Ground-truth quantities used to validate the estimators: theoretical
//! standard deviations, Berry–Esseen style error rates (implicit constants
//! set to one, natural logarithms) and eigenvalue-shift oracles.
//!
//! Indices are zero-based.

use crate::error::{Error, Result};
use crate::linalg::lu::Lu;
use crate::linalg::{require_unit, sym_eig, Matrix, OrderingMode, SymMatrix};
use crate::models::{GroundTruthMd, GroundTruthPca};
use crate::pca::sample_covariance;
use crate::scalar::Real;

const GROUP_TOL: f64 = 1e-10;

/// A ground truth, a unit direction `a ≠ ±u_j` and a component `j`.
#[derive(Debug, Clone, Copy)]
pub struct TheoryContext<'a, G, T> {
    pub truth: &'a G,
    pub a: &'a [T],
    pub j: usize,
}

pub type TheoryContextMd<'a, T> = TheoryContext<'a, GroundTruthMd<T>, T>;

/// The PCA context additionally carries the sample size.
#[derive(Debug, Clone, Copy)]
pub struct TheoryContextPca<'a, T> {
    pub truth: &'a GroundTruthPca<T>,
    pub a: &'a [T],
    pub j: usize,
    pub n: usize,
}

fn validate<T: Real>(u: &Matrix<T>, a: &[T], j: usize) -> Result<Vec<T>> {
    if a.len() != u.rows() {
        return Err(Error::DimensionMismatch {
            expected: u.rows(),
            got: a.len(),
        });
    }
    if j >= u.cols() {
        return Err(Error::IndexOutOfRange {
            index: j,
            bound: u.cols(),
        });
    }
    require_unit(a)?;
    let proj = u.tr_mul_vec(a);
    if proj[j].abs() > T::one() - T::lit(1e-10) {
        return Err(Error::InvalidParameter(format!(
            "direction a coincides with ±u_{} (inner product {})",
            j + 1,
            proj[j]
        )));
    }
    Ok(proj)
}

impl<'a, T: Real> TheoryContextMd<'a, T> {
    pub fn new(truth: &'a GroundTruthMd<T>, a: &'a [T], j: usize) -> Result<Self> {
        validate(truth.u(), a, j)?;
        Ok(Self { truth, a, j })
    }
}

impl<'a, T: Real> TheoryContextPca<'a, T> {
    pub fn new(truth: &'a GroundTruthPca<T>, a: &'a [T], j: usize, n: usize) -> Result<Self> {
        validate(truth.u(), a, j)?;
        if n == 0 {
            return Err(Error::InvalidDimension(
                "sample size must be positive".into(),
            ));
        }
        Ok(Self { truth, a, j, n })
    }
}

/// Eigenspace blocks `(λ, ‖aᵀU^{(k)}‖²)` for the distinct eigenvalues other
/// than `λ_j`, plus `‖U⊥ᵀa‖²`.
fn grouped_mass<T: Real>(lambda: &[T], proj: &[T], j: usize) -> Result<(Vec<(T, T)>, T)> {
    let close =
        |x: T, y: T| (x - y).abs() <= T::lit(GROUP_TOL) * x.abs().max(y.abs()).max(T::one());
    let mut groups: Vec<(T, T)> = Vec::new();
    for (k, (&lk, &pk)) in lambda.iter().zip(proj).enumerate() {
        if k == j {
            continue;
        }
        if close(lk, lambda[j]) {
            return Err(Error::EigenvalueNotUnique(j));
        }
        match groups.iter_mut().find(|(l, _)| close(*l, lk)) {
            Some(g) => g.1 += pk * pk,
            None => groups.push((lk, pk * pk)),
        }
    }
    let inside: T = proj.iter().map(|&x| x * x).sum();
    Ok((groups, (T::one() - inside).max(T::zero())))
}

/// `s² = 2σ² Σ_{k≠j} ‖aᵀU^{(k)}‖²/(λ_j − λ_k)² + 2σ²‖U⊥ᵀa‖²/λ_j²`.
pub fn s_md_theoretical<T: Real>(ctx: &TheoryContextMd<'_, T>) -> Result<T> {
    let truth = ctx.truth;
    let proj = truth.u().tr_mul_vec(ctx.a);
    let lambda = truth.lambda();
    let (groups, perp) = grouped_mass(lambda, &proj, ctx.j)?;
    let lj = lambda[ctx.j];
    let s2 = truth.sigma() * truth.sigma();
    let two = T::lit(2.0);
    let within: T = groups
        .iter()
        .map(|&(lk, m)| two * s2 * m / ((lj - lk) * (lj - lk)))
        .sum();
    Ok((within + two * s2 * perp / (lj * lj)).sqrt())
}

/// `s² = Σ_{k≠j} (λ_j + σ²)(λ_k + σ²)‖aᵀU^{(k)}‖²/(n(λ_j − λ_k)²) + (λ_j + σ²)σ²‖U⊥ᵀa‖²/(nλ_j²)`.
pub fn s_pca_theoretical<T: Real>(ctx: &TheoryContextPca<'_, T>) -> Result<T> {
    let truth = ctx.truth;
    let proj = truth.u().tr_mul_vec(ctx.a);
    let lambda = truth.lambda();
    let (groups, perp) = grouped_mass(lambda, &proj, ctx.j)?;
    let lj = lambda[ctx.j];
    let s2 = truth.sigma2();
    let nf = T::from_usize_lossy(ctx.n);
    let within: T = groups
        .iter()
        .map(|&(lk, m)| (lj + s2) * (lk + s2) * m / (nf * (lj - lk) * (lj - lk)))
        .sum();
    Ok((within + (lj + s2) * s2 * perp / (nf * lj * lj)).sqrt())
}

/// `r√(n ln n)·σ/λ_min + r^{3/2} ln n·σ/Δ_j + n^{−9}`.
pub fn err_md<T: Real>(ctx: &TheoryContextMd<'_, T>) -> T {
    let t = ctx.truth;
    let n = T::from_usize_lossy(t.n());
    let r = T::from_usize_lossy(t.r());
    let ln = n.ln();
    let sigma = t.sigma();
    r * (n * ln).sqrt() * sigma / t.lambda_min()
        + r.powf(T::lit(1.5)) * ln * sigma / t.eigengap(ctx.j)
        + n.powi(-9)
}

/// `σ² r ln n/Δ_j² + σ²√(n ln n)/λ_j²`.
pub fn err_bias_md<T: Real>(ctx: &TheoryContextMd<'_, T>) -> T {
    let t = ctx.truth;
    let n = T::from_usize_lossy(t.n());
    let r = T::from_usize_lossy(t.r());
    let ln = n.ln();
    let s2 = t.sigma() * t.sigma();
    let gap = t.eigengap(ctx.j);
    let lj = t.lambda()[ctx.j];
    s2 * r * ln / (gap * gap) + s2 * (n * ln).sqrt() / (lj * lj)
}

/// Sum of the subspace estimation, small eigengap and parametric terms,
/// with `L = ln(n ∨ p)`.
pub fn err_pca<T: Real>(ctx: &TheoryContextPca<'_, T>) -> T {
    let t = ctx.truth;
    let n = T::from_usize_lossy(ctx.n);
    let p = T::from_usize_lossy(t.p());
    let r = T::from_usize_lossy(t.r());
    let l = n.max(p).ln();
    let kappa = t.kappa();
    let s2 = t.sigma2();
    let sigma = s2.sqrt();
    let lj = t.lambda()[ctx.j];
    let ratio = p / n;
    let subspace = kappa.powf(T::lit(1.5))
        * r
        * l.powi(3)
        * (s2 / lj * (ratio + ratio.sqrt() + (l / n).sqrt()) + sigma / lj.sqrt() * ratio.sqrt());
    let half5 = l.powf(T::lit(2.5));
    let gap = kappa * r.powf(T::lit(2.5)) * half5 * (t.lambda_max() + s2)
        / (t.eigengap(ctx.j) * n.sqrt());
    let parametric = kappa * kappa * r.powf(T::lit(1.5)) * half5 / n.sqrt();
    subspace + gap + parametric
}

/// Bias rate for the debiased PCA statistic, `L = ln(n ∨ p)`.
pub fn err_bias_pca<T: Real>(ctx: &TheoryContextPca<'_, T>) -> T {
    let t = ctx.truth;
    let n = T::from_usize_lossy(ctx.n);
    let p = T::from_usize_lossy(t.p());
    let r = T::from_usize_lossy(t.r());
    let l = n.max(p).ln();
    let kappa = t.kappa();
    let s2 = t.sigma2();
    let sigma = s2.sqrt();
    let lj = t.lambda()[ctx.j];
    let lmin = t.lambda_min();
    let gap = t.eigengap(ctx.j);
    let root_ratio = (p / n).sqrt();
    let first = (t.lambda_max() + s2) * (lj + s2) * r * l / (gap * gap * n);
    let inner = sigma * kappa * r.sqrt() * l * l / lmin.sqrt() * root_ratio
        + s2 * (r * kappa).sqrt() * l * l / lmin * root_ratio;
    first + sigma * (lj + s2).sqrt() / (lj * n.sqrt()) * inner
}

/// Orthonormal basis of the complement of the columns of `u`, taken from
/// the unit eigenspace of `I − UUᵀ`.
pub fn orthogonal_complement<T: Real>(u: &Matrix<T>) -> Result<Matrix<T>> {
    let (n, r) = (u.rows(), u.cols());
    let proj = SymMatrix::from_outer_products(u, &vec![T::one(); r])?;
    let complement = SymMatrix::identity(n).sub(&proj)?;
    let dec = sym_eig(&complement, OrderingMode::ByValueDesc)?;
    dec.leading_frame(n - r)
}

fn resolvent_guard<T: Real>(lambda_hat: T, mu: &[T]) -> Result<()> {
    let tol = T::lit(1e-10) * lambda_hat.abs();
    if mu.iter().any(|&m| (lambda_hat - m).abs() <= tol) {
        return Err(Error::SingularResolvent);
    }
    Ok(())
}

/// `σ² Tr((λ̂ I − U⊥ᵀNU⊥)⁻¹) = Σ_k σ²/(λ̂ − μ_k)`, evaluated through the
/// eigenvalues `μ_k` of `U⊥ᵀNU⊥`.
pub fn gamma_md_oracle<T: Real>(
    lambda_hat_j: T,
    truth: &GroundTruthMd<T>,
    noise: &SymMatrix<T>,
) -> Result<T> {
    let perp = orthogonal_complement(truth.u())?;
    gamma_md_oracle_in(lambda_hat_j, truth.sigma() * truth.sigma(), noise, &perp)
}

/// [`gamma_md_oracle`] with a precomputed complement frame.
pub fn gamma_md_oracle_in<T: Real>(
    lambda_hat_j: T,
    sigma2: T,
    noise: &SymMatrix<T>,
    perp: &Matrix<T>,
) -> Result<T> {
    let c = noise.compress(perp)?;
    let mu = sym_eig(&c, OrderingMode::ByValueDesc)?;
    resolvent_guard(lambda_hat_j, mu.eigenvalues())?;
    Ok(mu
        .eigenvalues()
        .iter()
        .map(|&m| sigma2 / (lambda_hat_j - m))
        .sum())
}

/// [`gamma_md_oracle_in`] through an LU solve of the resolvent.
pub fn gamma_md_oracle_resolvent<T: Real>(
    lambda_hat_j: T,
    sigma2: T,
    noise: &SymMatrix<T>,
    perp: &Matrix<T>,
) -> Result<T> {
    let c = noise.compress(perp)?;
    let m = shifted(lambda_hat_j, &c);
    let lu = Lu::new(&m, T::lit(1e-300))?;
    Ok(sigma2 * lu.inverse_trace())
}

/// `(1/n) Σ_k μ_k/(λ̂ − μ_k)` over the eigenvalues of `U⊥ᵀ(XXᵀ/n)U⊥`.
pub fn gamma_pca_oracle<T: Real>(
    lambda_hat_j: T,
    truth: &GroundTruthPca<T>,
    x: &Matrix<T>,
) -> Result<T> {
    let perp = orthogonal_complement(truth.u())?;
    gamma_pca_oracle_in(lambda_hat_j, x, &perp)
}

/// [`gamma_pca_oracle`] with a precomputed complement frame.
pub fn gamma_pca_oracle_in<T: Real>(lambda_hat_j: T, x: &Matrix<T>, perp: &Matrix<T>) -> Result<T> {
    let c = sample_covariance(x)?.compress(perp)?;
    let mu = sym_eig(&c, OrderingMode::ByValueDesc)?;
    resolvent_guard(lambda_hat_j, mu.eigenvalues())?;
    let sum: T = mu
        .eigenvalues()
        .iter()
        .map(|&m| m / (lambda_hat_j - m))
        .sum();
    Ok(sum / T::from_usize_lossy(x.cols()))
}

/// [`gamma_pca_oracle_in`] as `Tr(R·C)/n` with `R = (λ̂I − C)⁻¹`,
/// `C = U⊥ᵀ(XXᵀ/n)U⊥`, solved by LU.
pub fn gamma_pca_oracle_resolvent<T: Real>(
    lambda_hat_j: T,
    x: &Matrix<T>,
    perp: &Matrix<T>,
) -> Result<T> {
    let c = sample_covariance(x)?.compress(perp)?;
    let m = shifted(lambda_hat_j, &c);
    let lu = Lu::new(&m, T::lit(1e-300))?;
    let rc = lu.solve_matrix(c.as_matrix());
    let trace: T = (0..rc.rows()).map(|i| rc[(i, i)]).sum();
    Ok(trace / T::from_usize_lossy(x.cols()))
}

fn shifted<T: Real>(lambda: T, c: &SymMatrix<T>) -> Matrix<T> {
    let m = c.dim();
    Matrix::from_fn(m, m, |i, k| {
        let v = -c.get(i, k);
        if i == k {
            v + lambda
        } else {
            v
        }
    })
}
