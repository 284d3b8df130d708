//! Dense symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! iteration with Wilkinson-style shifts (the EISPACK `tred2`/`tql2` pair).
//! The routine is deterministic for a fixed input and needs `O(n³)` work.

use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, Matrix, SymMatrix};
use crate::scalar::Real;

/// How eigenpairs are ordered in a [`SpectralDecomposition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderingMode {
    /// Largest `|λ|` first. Used for matrix denoising, where the signal may
    /// carry negative eigenvalues.
    ByMagnitudeDesc,
    /// Largest `λ` first. Used for covariance matrices.
    ByValueDesc,
}

/// Ordered eigenpairs of a symmetric matrix.
///
/// `eigenvalues` always holds the full spectrum. `eigenvectors` has one
/// orthonormal column per computed eigenvector; this is the full square
/// basis for [`sym_eig`] and a thin leading block for decompositions built
/// from a Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<T> {
    eigenvalues: Vec<T>,
    eigenvectors: Matrix<T>,
    ordering: OrderingMode,
}

impl<T: Real> SpectralDecomposition<T> {
    /// Assembles a decomposition from parts. Eigenvalues must already follow
    /// `ordering`; the caller guarantees orthonormal columns.
    pub fn from_parts(
        eigenvalues: Vec<T>,
        eigenvectors: Matrix<T>,
        ordering: OrderingMode,
    ) -> Result<Self> {
        if eigenvectors.rows() != eigenvalues.len() {
            return Err(Error::DimensionMismatch {
                expected: eigenvalues.len(),
                got: eigenvectors.rows(),
            });
        }
        if eigenvectors.cols() > eigenvalues.len() {
            return Err(Error::DimensionMismatch {
                expected: eigenvalues.len(),
                got: eigenvectors.cols(),
            });
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
            ordering,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    #[inline]
    pub fn ordering(&self) -> OrderingMode {
        self.ordering
    }

    #[inline]
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    #[inline]
    pub fn eigenvalue(&self, k: usize) -> T {
        self.eigenvalues[k]
    }

    #[inline]
    pub fn eigenvectors(&self) -> &Matrix<T> {
        &self.eigenvectors
    }

    /// Number of eigenvectors actually stored.
    #[inline]
    pub fn computed_vectors(&self) -> usize {
        self.eigenvectors.cols()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<T> {
        self.eigenvectors.column(k)
    }

    /// The first `r` eigenvectors as an `n × r` frame.
    pub fn leading_frame(&self, r: usize) -> Result<Matrix<T>> {
        if r > self.computed_vectors() {
            return Err(Error::RankOutOfRange {
                rank: r,
                dim: self.computed_vectors(),
            });
        }
        let v = &self.eigenvectors;
        Ok(Matrix::from_fn(v.rows(), r, |i, k| v[(i, k)]))
    }

    /// `(v_1ᵀa, …, v_rᵀa)` for the first `r` eigenvectors.
    pub fn leading_projections(&self, a: &[T], r: usize) -> Vec<T> {
        let v = &self.eigenvectors;
        let mut out = vec![T::zero(); r];
        for (i, &ai) in a.iter().enumerate() {
            let row = v.row(i);
            for (o, &x) in out.iter_mut().zip(&row[..r]) {
                *o += x * ai;
            }
        }
        out
    }

    /// Flips eigenvector `k` in place.
    pub fn negate_eigenvector(&mut self, k: usize) {
        for i in 0..self.eigenvectors.rows() {
            let v = self.eigenvectors[(i, k)];
            self.eigenvectors[(i, k)] = -v;
        }
    }

    /// Applies [`canonical_sign`](crate::linalg::canonical_sign) to the first
    /// `r` eigenvectors.
    pub fn canonicalize_signs(&mut self, r: usize) {
        for k in 0..r.min(self.computed_vectors()) {
            let v = self.eigenvector(k);
            if crate::linalg::sign::needs_flip_for_canonical(&v) {
                self.negate_eigenvector(k);
            }
        }
    }

    /// `‖A − VΛVᵀ‖_F`; only meaningful for a full decomposition.
    pub fn reconstruction_error(&self, a: &SymMatrix<T>) -> Result<T> {
        let rebuilt = SymMatrix::from_outer_products(&self.eigenvectors, &self.eigenvalues)?;
        Ok(a.sub(&rebuilt)?.frobenius_norm())
    }
}

/// Eigendecomposition of a symmetric matrix with the requested ordering.
///
/// Ties are broken by the ascending order produced by the QL sweep, so the
/// output is a deterministic function of the input.
pub fn sym_eig<T: Real>(
    a: &SymMatrix<T>,
    ordering: OrderingMode,
) -> Result<SpectralDecomposition<T>> {
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            if !a.get(i, j).is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    if n == 0 {
        return SpectralDecomposition::from_parts(Vec::new(), Matrix::zeros(0, 0), ordering);
    }

    let mut v = a.as_matrix().clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, &mut d, &mut e);
    // The QL sweep rotates pairs of columns; work on the transpose so those
    // become contiguous rows.
    let mut vt = v.transpose();
    ql_implicit(&mut d, &mut e, &mut vt, 30 * n.max(1))?;

    let mut order: Vec<usize> = (0..n).collect();
    match ordering {
        OrderingMode::ByMagnitudeDesc => order.sort_by(|&x, &y| {
            d[y].abs()
                .partial_cmp(&d[x].abs())
                .expect("finite eigenvalues")
        }),
        OrderingMode::ByValueDesc => {
            order.sort_by(|&x, &y| d[y].partial_cmp(&d[x]).expect("finite eigenvalues"))
        }
    }
    let eigenvalues = order.iter().map(|&k| d[k]).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, col| vt[(order[col], i)]);
    SpectralDecomposition::from_parts(eigenvalues, eigenvectors, ordering)
}

/// Best rank-`r` approximation `Σ_{k<r} λ_k v_k v_kᵀ` under the
/// decomposition's own ordering.
pub fn rank_r_truncation<T: Real>(
    dec: &SpectralDecomposition<T>,
    r: usize,
) -> Result<SymMatrix<T>> {
    if r > dec.dim() || r > dec.computed_vectors() {
        return Err(Error::RankOutOfRange {
            rank: r,
            dim: dec.dim(),
        });
    }
    let frame = dec.leading_frame(r)?;
    SymMatrix::from_outer_products(&frame, &dec.eigenvalues()[..r])
}

/// Householder tridiagonalization. On exit `v` holds the accumulated
/// orthogonal transform, `d` the diagonal and `e[1..]` the subdiagonal.
fn tridiagonalize<T: Real>(v: &mut Matrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for &dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = zero;
                v[(j, i)] = zero;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = zero;
            }

            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[(k, j)] -= upd;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = zero;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[(k, j)] -= upd;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = zero;
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = zero;
}

/// Implicit QL on the tridiagonal `(d, e)`, rotating the rows of `vt`
/// (eigenvectors stored as rows).
fn ql_implicit<T: Real>(d: &mut [T], e: &mut [T], vt: &mut Matrix<T>, budget: usize) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    let mut iterations = 0usize;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            loop {
                iterations += 1;
                if iterations > budget {
                    return Err(Error::ConvergenceFailure { budget });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[(l + 2)..n] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotate_rows(vt, i, c, s);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    Ok(())
}

#[inline]
fn rotate_rows<T: Real>(vt: &mut Matrix<T>, i: usize, c: T, s: T) {
    let cols = vt.cols();
    let data = vt.as_mut_slice();
    let (head, tail) = data.split_at_mut((i + 1) * cols);
    let row_i = &mut head[i * cols..];
    let row_next = &mut tail[..cols];
    for (a, b) in row_i.iter_mut().zip(row_next.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

/// Rayleigh quotient `vᵀAv`.
pub fn rayleigh<T: Real>(a: &SymMatrix<T>, v: &[T]) -> T {
    dot(v, &a.mul_vec(v))
}
