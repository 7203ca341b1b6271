use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::matrix::norm;
use crate::{Error, Matrix, Result, Scalar};

/// Adjacency matrix of the path on `N` vertices:
/// `A e_1 = e_2`, `A e_i = e_{i-1} + e_{i+1}`, `A e_N = e_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOperator {
    n: usize,
    matrix: Matrix<f64>,
}

impl PathOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.matrix
    }

    /// The same operator over any scalar type.
    pub fn matrix_as<S: Scalar>(&self) -> Matrix<S> {
        self.matrix.map(|&x| S::from_i64(x as i64))
    }
}

pub fn matrix_a(n: usize) -> Result<PathOperator> {
    if n < 2 {
        return Err(Error::InvalidArguments(format!("N = {n} must be at least 2")));
    }
    let mut matrix = Matrix::zeros(n, n);
    for i in 0..n - 1 {
        matrix[(i, i + 1)] = 1.0;
        matrix[(i + 1, i)] = 1.0;
    }
    Ok(PathOperator { n, matrix })
}

/// `2 cos(jπ/(N+1))`, the `j`-th largest eigenvalue of `A` (1-based `j`).
pub fn path_eigenvalue(n: usize, j: usize) -> f64 {
    2.0 * libm::cos(j as f64 * PI / (n as f64 + 1.0))
}

/// Closed-form spectrum of `A`, eigenvalues decreasing, eigenvectors of unit
/// length with `v_j(i) ∝ sin(ijπ/(N+1))`. Each pair is checked against
/// `‖Av - λv‖ <= 1e-12 ‖v‖`.
pub fn eigensystem_a(n: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let a = matrix_a(n)?;
    let h = PI / (n as f64 + 1.0);
    (1..=n)
        .map(|j| {
            let lambda = path_eigenvalue(n, j);
            let mut v: Vec<f64> = (1..=n).map(|i| libm::sin((i * j) as f64 * h)).collect();
            let len = norm(&v);
            v.iter_mut().for_each(|x| *x /= len);
            let av = a.matrix.mul_vec(&v)?;
            let residual: Vec<f64> = av.iter().zip(&v).map(|(x, y)| x - lambda * y).collect();
            if norm(&residual) > 1e-12 {
                return Err(Error::Internal(format!(
                    "eigenpair {j} of the path operator has residual {:e}",
                    norm(&residual)
                )));
            }
            Ok((lambda, v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn small_operators() {
        let a3 = matrix_a(3).unwrap();
        assert_eq!(
            a3.matrix().to_rows(),
            vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]
        );
        assert_eq!(matrix_a(2).unwrap().matrix().to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matrix_a(1).is_err());
    }

    #[test]
    fn operator_shape() {
        for n in 2..=9 {
            let a = matrix_a(n).unwrap();
            let m = a.matrix();
            assert_eq!(m, &m.transpose());
            for r in 0..n {
                for c in 0..n {
                    let expected = if r.abs_diff(c) == 1 { 1.0 } else { 0.0 };
                    assert_eq!(m[(r, c)], expected);
                }
            }
        }
    }

    #[test]
    fn hand_diagonalizations() {
        let e2 = eigensystem_a(2).unwrap();
        assert!((e2[0].0 - 1.0).abs() < 1e-15 && (e2[1].0 + 1.0).abs() < 1e-15);
        let s = 1.0 / libm::sqrt(2.0);
        assert!((e2[0].1[0] - s).abs() < 1e-15 && (e2[0].1[1] - s).abs() < 1e-15);

        let e3 = eigensystem_a(3).unwrap();
        let r2 = libm::sqrt(2.0);
        assert!((e3[0].0 - r2).abs() < 1e-15);
        assert!(e3[1].0.abs() < 1e-15);
        assert!((e3[2].0 + r2).abs() < 1e-15);
        // v_2 ∝ (1, 0, -1)
        assert!((e3[1].1[0] - s).abs() < 1e-15 && e3[1].1[1].abs() < 1e-15);
        assert!((e3[1].1[2] + s).abs() < 1e-15);
    }

    #[test]
    fn n4_eigenvalues_golden_ratio() {
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        let got: Vec<f64> = eigensystem_a(4).unwrap().iter().map(|p| p.0).collect();
        let expected = [phi, phi - 1.0, 1.0 - phi, -phi];
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-14, "{g} vs {e}");
        }
    }

    #[test]
    fn residuals_n8() {
        let a = matrix_a(8).unwrap();
        for (lambda, v) in eigensystem_a(8).unwrap() {
            let av = a.matrix().mul_vec(&v).unwrap();
            let worst = av.iter().zip(&v).map(|(x, y)| (x - lambda * y).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-12);
        }
    }
}
