//! Synthetic data for the matrix denoising and spiked covariance models.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sym_eig, Matrix, OrderingMode, SymMatrix};
use crate::rng::{Seed, SeededRng};
use crate::scalar::Real;

const ORTHONORMAL_TOL: f64 = 1e-10;
const FRAME_REDRAWS: usize = 16;

/// Symmetric GOE noise: off-diagonal entries `N(0, σ²)`, diagonal entries
/// `N(0, 2σ²)`. The upper triangle is drawn in row order.
pub fn goe_sample<T: Real>(n: usize, sigma: T, seed: Seed) -> Result<SymMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "GOE dimension must be positive".into(),
        ));
    }
    if !(sigma >= T::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise level must be finite and nonnegative, got {sigma}"
        )));
    }
    if sigma == T::zero() {
        return Ok(SymMatrix::zeros(n));
    }
    let mut rng = SeededRng::new(seed);
    let diag_sd = sigma * T::lit(std::f64::consts::SQRT_2);
    Ok(SymMatrix::from_upper_fn(n, |i, j| {
        rng.normal(if i == j { diag_sd } else { sigma })
    }))
}

/// Ground truth `S = UΛUᵀ` and noise level for matrix denoising.
#[derive(Debug, Clone)]
pub struct GroundTruthMd<T> {
    s: SymMatrix<T>,
    u: Matrix<T>,
    lambda: Vec<T>,
    sigma: T,
}

impl<T: Real> GroundTruthMd<T> {
    /// Builds `S = UΛUᵀ`. `U` must be orthonormal and every `λ_k` nonzero.
    pub fn new(u: Matrix<T>, lambda: Vec<T>, sigma: T) -> Result<Self> {
        if u.cols() != lambda.len() {
            return Err(Error::DimensionMismatch {
                expected: u.cols(),
                got: lambda.len(),
            });
        }
        if u.cols() == 0 || u.cols() > u.rows() {
            return Err(Error::RankOutOfRange {
                rank: u.cols(),
                dim: u.rows(),
            });
        }
        check_orthonormal(&u)?;
        if let Some(k) = lambda
            .iter()
            .position(|l| *l == T::zero() || !l.is_finite())
        {
            return Err(Error::ZeroEigenvalue(k));
        }
        if !(sigma >= T::zero()) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise level must be finite and nonnegative, got {sigma}"
            )));
        }
        let s = SymMatrix::from_outer_products(&u, &lambda)?;
        Ok(Self {
            s,
            u,
            lambda,
            sigma,
        })
    }

    pub fn s(&self) -> &SymMatrix<T> {
        &self.s
    }

    pub fn u(&self) -> &Matrix<T> {
        &self.u
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn r(&self) -> usize {
        self.u.cols()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<T> {
        self.u.column(k)
    }

    pub fn lambda_min(&self) -> T {
        spectrum_extreme(&self.lambda, |a, b| a < b)
    }

    pub fn lambda_max(&self) -> T {
        spectrum_extreme(&self.lambda, |a, b| a > b)
    }

    /// `κ = λ_max / λ_min`.
    pub fn kappa(&self) -> T {
        self.lambda_max() / self.lambda_min()
    }

    /// `Δ_j = min_{k≠j} |λ_j − λ_k|`, or `λ_min` when `r = 1`.
    pub fn eigengap(&self, j: usize) -> T {
        eigengap(&self.lambda, j, self.lambda_min())
    }

    /// `Δ_min = min_j Δ_j`.
    pub fn min_eigengap(&self) -> T {
        (0..self.r())
            .map(|j| self.eigengap(j))
            .fold(T::infinity(), T::min)
    }
}

/// `Ŝ = S + N` with fresh GOE noise.
pub fn md_observation<T: Real>(truth: &GroundTruthMd<T>, seed: Seed) -> Result<SymMatrix<T>> {
    Ok(md_observation_with_noise(truth, seed)?.0)
}

/// As [`md_observation`], also returning the noise `N`.
pub fn md_observation_with_noise<T: Real>(
    truth: &GroundTruthMd<T>,
    seed: Seed,
) -> Result<(SymMatrix<T>, SymMatrix<T>)> {
    let noise = goe_sample(truth.n(), truth.sigma, seed)?;
    Ok((truth.s.add(&noise)?, noise))
}

/// `r` orthonormal columns built one at a time: draw a `U(−1, 1)` vector,
/// remove its projection on the earlier columns (two passes), normalize.
pub fn random_orthonormal_frame<T: Real>(n: usize, r: usize, seed: Seed) -> Result<Matrix<T>> {
    if r == 0 || r > n {
        return Err(Error::RankOutOfRange { rank: r, dim: n });
    }
    let mut rng = SeededRng::new(seed);
    let mut columns: Vec<Vec<T>> = Vec::with_capacity(r);
    for _ in 0..r {
        let mut accepted = None;
        for _ in 0..FRAME_REDRAWS {
            let mut v: Vec<T> = (0..n)
                .map(|_| T::lit(rng.uniform_range(-1.0, 1.0)))
                .collect();
            let scale = norm(&v);
            for _ in 0..2 {
                for c in &columns {
                    let proj = dot(c, &v);
                    v.iter_mut().zip(c).for_each(|(x, &ci)| *x -= proj * ci);
                }
            }
            let len = norm(&v);
            if len > T::lit(1e-12) * scale.max(T::one()) {
                v.iter_mut().for_each(|x| *x /= len);
                accepted = Some(v);
                break;
            }
        }
        columns.push(accepted.ok_or(Error::DegenerateDraw {
            attempts: FRAME_REDRAWS,
        })?);
    }
    Matrix::from_columns(&columns)
}

/// Rank-two signal `S = (1/n) Z B Zᵀ` with `B = V diag(λ + ε, λ) Vᵀ`.
///
/// `Z` has `⌊(1−α)n/2⌋` rows `(1, 0)`, as many rows `(0, 1)`, and the
/// remaining rows `(½, ½)`. The eigenvectors are `Q W` where
/// `Q = Z (ZᵀZ)^{-1/2}` and `W` diagonalizes `(1/n)(ZᵀZ)^{1/2} B (ZᵀZ)^{1/2}`;
/// this reduces to `Q V` whenever `ZᵀZ` commutes with `B`, e.g. at `α = 0`.
pub fn gmmb_signal<T: Real>(
    n: usize,
    alpha: T,
    lambda: T,
    eps: T,
    v: &Matrix<T>,
    sigma: T,
) -> Result<GroundTruthMd<T>> {
    if !(alpha >= T::zero() && alpha < T::one()) {
        return Err(Error::InvalidPartition(format!(
            "alpha must lie in [0, 1), got {alpha}"
        )));
    }
    if v.rows() != 2 || v.cols() != 2 {
        return Err(Error::InvalidDimension("V must be 2 x 2".into()));
    }
    check_orthonormal(v)?;
    let pure = ((T::one() - alpha) * T::from_usize_lossy(n) / T::lit(2.0))
        .floor()
        .to_usize()
        .unwrap_or(0);
    if pure == 0 || 2 * pure > n {
        return Err(Error::InvalidPartition(format!(
            "n = {n} and alpha = {alpha} leave an empty pure block"
        )));
    }
    let half = T::lit(0.5);
    let z = Matrix::from_fn(n, 2, |i, c| {
        if i < pure {
            if c == 0 {
                T::one()
            } else {
                T::zero()
            }
        } else if i < 2 * pure {
            if c == 1 {
                T::one()
            } else {
                T::zero()
            }
        } else {
            half
        }
    });
    let gram = SymMatrix::from_matrix(z.gram_cols())?;
    let gdec = sym_eig(&gram, OrderingMode::ByValueDesc)?;
    let gvecs = gdec.eigenvectors();
    let root = SymMatrix::from_outer_products(
        gvecs,
        &gdec
            .eigenvalues()
            .iter()
            .map(|x| x.sqrt())
            .collect::<Vec<_>>(),
    )?;
    let inv_root = SymMatrix::from_outer_products(
        gvecs,
        &gdec
            .eigenvalues()
            .iter()
            .map(|x| x.sqrt().recip())
            .collect::<Vec<_>>(),
    )?;
    let b = SymMatrix::from_outer_products(v, &[lambda + eps, lambda])?;
    let mut m = root
        .as_matrix()
        .matmul(b.as_matrix())?
        .matmul(root.as_matrix())?;
    m.scale(T::from_usize_lossy(n).recip());
    let mdec = sym_eig(&SymMatrix::from_matrix(m)?, OrderingMode::ByMagnitudeDesc)?;
    let q = z.matmul(inv_root.as_matrix())?;
    let u = q.matmul(mdec.eigenvectors())?;
    GroundTruthMd::new(u, mdec.eigenvalues().to_vec(), sigma)
}

/// Ground truth for the spiked covariance model `Σ = UΛUᵀ + σ²I`.
#[derive(Debug, Clone)]
pub struct GroundTruthPca<T> {
    sigma0: SymMatrix<T>,
    u: Matrix<T>,
    lambda: Vec<T>,
    sigma2: T,
}

/// Builds a spiked covariance. `Λ` must be positive and non-increasing;
/// `σ² = 0` is accepted and gives a singular `Σ`.
pub fn spiked_cov<T: Real>(u: Matrix<T>, lambda: Vec<T>, sigma2: T) -> Result<GroundTruthPca<T>> {
    if u.cols() != lambda.len() {
        return Err(Error::DimensionMismatch {
            expected: u.cols(),
            got: lambda.len(),
        });
    }
    if u.cols() == 0 || u.cols() > u.rows() {
        return Err(Error::RankOutOfRange {
            rank: u.cols(),
            dim: u.rows(),
        });
    }
    check_orthonormal(&u)?;
    if lambda.iter().any(|l| !(*l > T::zero()) || !l.is_finite()) {
        return Err(Error::InvalidParameter(
            "spike eigenvalues must be positive".into(),
        ));
    }
    if lambda.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::NonDescendingSpectrum);
    }
    if !(sigma2 >= T::zero()) || !sigma2.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise variance must be finite and nonnegative, got {sigma2}"
        )));
    }
    let sigma0 = SymMatrix::from_outer_products(&u, &lambda)?;
    Ok(GroundTruthPca {
        sigma0,
        u,
        lambda,
        sigma2,
    })
}

/// Diagonal model `U = (e₁, e₂)`, `Λ = (λ + ε, λ)`.
pub fn diagonal_spiked_cov<T: Real>(
    p: usize,
    lambda: T,
    eps: T,
    sigma2: T,
) -> Result<GroundTruthPca<T>> {
    if p < 2 {
        return Err(Error::DimensionTooSmall(p));
    }
    let u = Matrix::from_fn(p, 2, |i, k| if i == k { T::one() } else { T::zero() });
    spiked_cov(u, vec![lambda + eps, lambda], sigma2)
}

/// Dense model: `u₁ ≡ 1/√p`, `u₂ = +1/√p` on the first `p/2` coordinates
/// and `−1/√p` on the rest. `p` must be even.
pub fn dense_spiked_cov<T: Real>(
    p: usize,
    lambda: T,
    eps: T,
    sigma2: T,
) -> Result<GroundTruthPca<T>> {
    if p < 2 || p % 2 != 0 {
        return Err(Error::InvalidDimension(format!(
            "dense model needs an even dimension, got {p}"
        )));
    }
    let c = T::from_usize_lossy(p).sqrt().recip();
    let u = Matrix::from_fn(p, 2, |i, k| if k == 1 && i >= p / 2 { -c } else { c });
    spiked_cov(u, vec![lambda + eps, lambda], sigma2)
}

impl<T: Real> GroundTruthPca<T> {
    pub fn sigma0(&self) -> &SymMatrix<T> {
        &self.sigma0
    }

    /// `Σ = Σ₀ + σ²I`.
    pub fn covariance(&self) -> SymMatrix<T> {
        self.sigma0.add_diagonal(self.sigma2)
    }

    pub fn u(&self) -> &Matrix<T> {
        &self.u
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    pub fn sigma2(&self) -> T {
        self.sigma2
    }

    pub fn p(&self) -> usize {
        self.u.rows()
    }

    pub fn r(&self) -> usize {
        self.u.cols()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<T> {
        self.u.column(k)
    }

    pub fn lambda_min(&self) -> T {
        self.lambda[self.lambda.len() - 1]
    }

    pub fn lambda_max(&self) -> T {
        self.lambda[0]
    }

    pub fn kappa(&self) -> T {
        self.lambda_max() / self.lambda_min()
    }

    /// `Δ_j`, or `λ_min` when `r = 1`.
    pub fn eigengap(&self, j: usize) -> T {
        eigengap(&self.lambda, j, self.lambda_min())
    }
}

/// `n` i.i.d. `N(0, Σ)` columns as a `p × n` matrix, via
/// `Σ^{1/2} = σI + U diag(√(λ_k + σ²) − σ) Uᵀ`. Column `i` uses the
/// `p` normals drawn `i`-th.
pub fn pca_sample<T: Real>(truth: &GroundTruthPca<T>, n: usize, seed: Seed) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "sample size must be positive".into(),
        ));
    }
    let p = truth.p();
    let r = truth.r();
    let sigma = truth.sigma2.sqrt();
    let lift: Vec<T> = truth
        .lambda
        .iter()
        .map(|&l| (l + truth.sigma2).sqrt() - sigma)
        .collect();
    let mut rng = SeededRng::new(seed);
    let mut x = Matrix::zeros(p, n);
    let mut y = vec![T::zero(); p];
    let mut coef = vec![T::zero(); r];
    for col in 0..n {
        y.iter_mut()
            .for_each(|v| *v = T::lit(rng.standard_normal()));
        coef.iter_mut().for_each(|c| *c = T::zero());
        for (i, &yi) in y.iter().enumerate() {
            for (c, &uik) in coef.iter_mut().zip(truth.u.row(i)) {
                *c += uik * yi;
            }
        }
        coef.iter_mut().zip(&lift).for_each(|(c, &l)| *c *= l);
        for i in 0..p {
            x[(i, col)] = sigma * y[i] + dot(truth.u.row(i), &coef);
        }
    }
    Ok(x)
}

fn check_orthonormal<T: Real>(u: &Matrix<T>) -> Result<()> {
    let defect = u.orthonormality_defect();
    if !(defect <= T::lit(ORTHONORMAL_TOL)) {
        return Err(Error::InvalidParameter(format!(
            "frame is not orthonormal (defect {defect})"
        )));
    }
    Ok(())
}

fn spectrum_extreme<T: Real>(lambda: &[T], better: impl Fn(T, T) -> bool) -> T {
    lambda
        .iter()
        .map(|l| l.abs())
        .reduce(|a, b| if better(b, a) { b } else { a })
        .unwrap_or_else(T::zero)
}

fn eigengap<T: Real>(lambda: &[T], j: usize, lambda_min: T) -> T {
    if lambda.len() == 1 {
        return lambda_min;
    }
    lambda
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, &l)| (lambda[j] - l).abs())
        .fold(T::infinity(), T::min)
}
