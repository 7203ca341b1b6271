//! Dense row-major matrices over a [`Scalar`], with the elimination routines
//! shared by both backends.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArguments(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
            return Err(Error::InvalidArguments(format!(
                "row {} has {} entries, expected {ncols}",
                bad + 1,
                rows[bad].len()
            )));
        }
        Ok(Self { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidArguments(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                for c in 0..rhs.cols {
                    let v = out[(r, c)].clone() + a.clone() * rhs[(k, c)].clone();
                    out[(r, c)] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if self.cols != v.len() {
            return Err(Error::InvalidArguments(format!(
                "cannot apply a {}x{} matrix to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// Rows then columns of `other` appended below.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::InvalidArguments(format!(
                "cannot stack {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Submatrix on the given zero-based rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self[(r, c)].clone());
            }
        }
        Self { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(S::to_f64)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(S::magnitude).fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> Result<S> {
        if !self.is_square() {
            return Err(Error::InvalidArguments(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(S::determinant(self))
    }

    /// Reduced row echelon form. Returns the reduced matrix and the pivot
    /// columns. In floating mode entries with `|x| <= tol * max|entry|` count
    /// as zero; exact mode ignores `tol`.
    pub fn rref(&self, tol: f64) -> (Self, Vec<usize>) {
        let mut a = self.clone();
        let scale = self.max_magnitude();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..a.cols {
            if row == a.rows {
                break;
            }
            let best = (row..a.rows)
                .max_by(|&x, &y| a[(x, col)].pivot_weight().total_cmp(&a[(y, col)].pivot_weight()))
                .unwrap();
            // exact mode: max_by keeps the last maximum, any nonzero pivot is fine
            if a[(best, col)].is_negligible(scale, tol) {
                continue;
            }
            a.swap_rows(best, row);
            let p = a[(row, col)].clone();
            for c in col..a.cols {
                let v = a[(row, c)].clone() / p.clone();
                a[(row, c)] = v;
            }
            for r in 0..a.rows {
                if r == row {
                    continue;
                }
                let factor = a[(r, col)].clone();
                if factor == S::zero() {
                    continue;
                }
                for c in col..a.cols {
                    let v = a[(r, c)].clone() - factor.clone() * a[(row, c)].clone();
                    a[(r, c)] = v;
                }
                // clears roundoff left in the pivot column
                a[(r, col)] = S::zero();
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.rref(tol).1.len()
    }

    /// Basis of `{x : self * x = 0}`, one vector per free column.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![S::zero(); self.cols];
                x[f] = S::one();
                for (prow, &pc) in pivots.iter().enumerate() {
                    x[pc] = -r[(prow, f)].clone();
                }
                x
            })
            .collect()
    }
}

impl Matrix<f64> {
    /// Orthonormal rows spanning the same row space (modified Gram-Schmidt,
    /// applied twice). Rows that vanish to roundoff are dropped.
    pub fn orthonormal_rows(&self) -> Self {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut v = self.row(r).to_vec();
            let original = norm(&v);
            for _ in 0..2 {
                for q in &out {
                    let d = dot(q, &v);
                    v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
                }
            }
            let len = norm(&v);
            if len > 1e-14 * original && len > 0.0 {
                v.iter_mut().for_each(|x| *x /= len);
                out.push(v);
            }
        }
        let rows = out.len();
        Matrix { rows, cols: self.cols, data: out.into_iter().flatten().collect() }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_bigint::BigInt;

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::<f64>::from_rows(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn exact_rank_and_nullspace() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(0.0), 2);
        let ns = m.nullspace(0.0);
        assert_eq!(ns.len(), 1);
        let image = m.mul_vec(&ns[0]).unwrap();
        assert!(image.iter().all(|x| *x == Rational::from_integer(BigInt::from(0))));
    }

    #[test]
    fn float_rank_uses_relative_tolerance() {
        let m = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-13]]).unwrap();
        assert_eq!(m.rank(1e-9), 1);
        assert_eq!(m.rank(0.0), 2);
    }

    #[test]
    fn orthonormalization_preserves_row_space() {
        let m = Matrix::from_rows(vec![vec![1.0, 1.0, 0.0], vec![1.0, 2.0, 3.0]]).unwrap();
        let q = m.orthonormal_rows();
        assert_eq!(q.rows(), 2);
        assert!((dot(q.row(0), q.row(1))).abs() < 1e-15);
        assert_eq!(m.vstack(&q).unwrap().rank(1e-12), 2);
    }

    #[test]
    fn product_and_transpose() {
        let a = qm(&[&[1, 2], &[3, 4]]);
        let b = qm(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), qm(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.transpose(), qm(&[&[1, 3], &[2, 4]]));
        assert!(a.mul(&qm(&[&[1, 2, 3]])).is_err());
    }
}
