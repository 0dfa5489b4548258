//! Dense square matrices and direct solvers.
//!
//! The systems here are small (a few hundred unknowns at most), so a dense
//! row-major layout with an in-place Cholesky factorisation for the symmetric
//! plate systems and partial-pivoting LU for the non-symmetric rod systems is
//! all that is needed.

use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error(
        "singular or indefinite system: pivot {pivot:e} at row {row} \
         (largest diagonal {max_diagonal:e}, pivot ratio {ratio:e})"
    )]
    NotPositiveDefinite {
        row: usize,
        pivot: f64,
        max_diagonal: f64,
        ratio: f64,
    },
    #[error("singular system: no usable pivot in column {column} (largest candidate {pivot:e})")]
    Singular { column: usize, pivot: f64 },
    #[error("dimension mismatch: matrix is {rows}x{rows}, vector has length {len}")]
    DimensionMismatch { rows: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds from rows; panics if they are not all of length `rows.len()`.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has the wrong length");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: T, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + s * b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Cholesky factorisation `A = L L^T`, reading only the lower triangle.
    pub fn cholesky(&self) -> Result<Cholesky<T>, LinalgError> {
        let n = self.n;
        let max_diagonal = (0..n).fold(T::zero(), |m, i| m.max(self[(i, i)].abs()));
        // A pivot this small relative to the diagonal means the matrix is
        // singular to working precision.
        let threshold = max_diagonal * T::epsilon() * T::from_count(n.max(1)) * T::lit(64.0);
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d = d - l[j * n + k] * l[j * n + k];
            }
            if !(d > threshold) {
                let to_f64 = |v: T| v.to_f64().unwrap_or(f64::NAN);
                let md = to_f64(max_diagonal);
                return Err(LinalgError::NotPositiveDefinite {
                    row: j,
                    pivot: to_f64(d),
                    max_diagonal: md,
                    ratio: if md > 0.0 { to_f64(d) / md } else { f64::NAN },
                });
            }
            let ljj = d.sqrt();
            l[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Cholesky { n, l })
    }

    /// LU factorisation with partial pivoting, `P A = L U`.
    pub fn lu(&self) -> Result<Lu<T>, LinalgError> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = self.max_abs() * T::epsilon() * T::from_count(n.max(1)) * T::lit(64.0);
        for col in 0..n {
            let (piv, pval) =
                (col..n)
                    .map(|r| (r, a[r * n + col].abs()))
                    .fold(
                        (col, -T::one()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if !(pval > threshold) {
                return Err(LinalgError::Singular {
                    column: col,
                    pivot: pval.to_f64().unwrap_or(f64::NAN),
                });
            }
            if piv != col {
                for k in 0..n {
                    a.swap(piv * n + k, col * n + k);
                }
                perm.swap(piv, col);
            }
            let d = a[col * n + col];
            for r in (col + 1)..n {
                let factor = a[r * n + col] / d;
                a[r * n + col] = factor;
                if factor == T::zero() {
                    continue;
                }
                for k in (col + 1)..n {
                    a[r * n + k] = a[r * n + k] - factor * a[col * n + k];
                }
            }
        }
        Ok(Lu { n, lu: a, perm })
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    pub fn lu_solve(&self, b: &[T]) -> Result<Vec<T>, LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                rows: self.n,
                len: b.len(),
            });
        }
        self.lu()?.solve(b)
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Lower-triangular Cholesky factor.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, LinalgError> {
        let n = self.n;
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                rows: n,
                len: b.len(),
            });
        }
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s = s - self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        Ok(y)
    }
}

/// Packed LU factors with the row permutation.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, LinalgError> {
        let n = self.n;
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                rows: n,
                len: b.len(),
            });
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s = s - self.lu[i * n + k] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s = s - self.lu[i * n + k] * x[k];
            }
            x[i] = s / self.lu[i * n + i];
        }
        Ok(x)
    }
}

/// Euclidean norm.
pub fn norm2<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}
