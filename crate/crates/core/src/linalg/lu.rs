//! LU factorization with partial pivoting, used for resolvent traces.

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;
use crate::scalar::Real;

pub struct Lu<T> {
    factors: Matrix<T>,
    pivots: Vec<usize>,
}

impl<T: Real> Lu<T> {
    /// Factors a square matrix. A pivot smaller than `tol` is reported as
    /// [`Error::SingularResolvent`].
    pub fn new(a: &Matrix<T>, tol: T) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut f = a.clone();
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            let mut p = k;
            for i in (k + 1)..n {
                if f[(i, k)].abs() > f[(p, k)].abs() {
                    p = i;
                }
            }
            if f[(p, k)].abs() <= tol {
                return Err(Error::SingularResolvent);
            }
            if p != k {
                for j in 0..n {
                    let tmp = f[(k, j)];
                    f[(k, j)] = f[(p, j)];
                    f[(p, j)] = tmp;
                }
            }
            pivots.push(p);
            let pivot = f[(k, k)];
            for i in (k + 1)..n {
                let factor = f[(i, k)] / pivot;
                f[(i, k)] = factor;
                if factor != T::zero() {
                    for j in (k + 1)..n {
                        let upd = factor * f[(k, j)];
                        f[(i, j)] -= upd;
                    }
                }
            }
        }
        Ok(Self { factors: f, pivots })
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.pivots.len();
        let f = &self.factors;
        for (k, &p) in self.pivots.iter().enumerate() {
            b.swap(k, p);
        }
        for i in 0..n {
            let mut acc = b[i];
            for j in 0..i {
                acc -= f[(i, j)] * b[j];
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in (i + 1)..n {
                acc -= f[(i, j)] * b[j];
            }
            b[i] = acc / f[(i, i)];
        }
    }

    /// Solves `A Z = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let mut col = b.column(j);
            self.solve_in_place(&mut col);
            out.set_column(j, &col);
        }
        out
    }

    /// `Tr(A⁻¹)`.
    pub fn inverse_trace(&self) -> T {
        let n = self.pivots.len();
        let mut total = T::zero();
        let mut e = vec![T::zero(); n];
        for i in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[i] = T::one();
            self.solve_in_place(&mut e);
            total += e[i];
        }
        total
    }
}
