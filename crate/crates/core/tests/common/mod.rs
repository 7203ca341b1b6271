#![allow(dead_code)]

use grasspos_core::{Matrix, Rational, Scalar, Subspace};
use proptest::prelude::*;

pub fn q(x: i64) -> Rational {
    Rational::from_i64(x)
}

pub fn qmat(rows: usize, cols: usize, entries: &[i64]) -> Matrix<Rational> {
    Matrix::new(rows, cols, entries.iter().map(|&x| q(x)).collect()).unwrap()
}

/// (n, k) with 2 <= n <= max_n and 1 <= k <= n - 1.
pub fn ambient(max_n: usize) -> impl Strategy<Value = (usize, usize)> {
    (2..=max_n).prop_flat_map(|n| (Just(n), 1..n))
}

/// Integer k x n matrices with entries in [-bound, bound].
pub fn int_matrix(rows: usize, cols: usize, bound: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-bound..=bound, rows * cols)
}

/// Full-rank exact subspace, or `None` when the draw is degenerate.
pub fn exact_subspace(n: usize, k: usize, entries: &[i64]) -> Option<Subspace<Rational>> {
    Subspace::new(qmat(k, n, entries)).ok()
}
