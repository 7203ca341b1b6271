//! The two scalar backends: exact rationals and `f64`.

use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::Matrix;

pub type Rational = num_rational::BigRational;

/// Relative zero tolerance used by floating-mode tests unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Which backend a subspace lives in, and for floating point the relative
/// zero tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "mode"))]
pub enum ScalarMode {
    Exact,
    Floating { tolerance: f64 },
}

/// Field operations plus the handful of backend-specific hooks the shared
/// linear algebra needs.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + core::fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact backends never round; zero tests ignore tolerances.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// `|self|` as a float, used for scales and pivot choice.
    fn magnitude(&self) -> f64;

    /// Zero test: exact equality for exact scalars, `|x| <= tol * scale` otherwise.
    fn is_negligible(&self, scale: f64, tol: f64) -> bool;

    /// Strict sign test with the same tolerance convention.
    fn is_positive_beyond(&self, scale: f64, tol: f64) -> bool;

    /// Weight used to choose elimination pivots; larger is better, zero means unusable.
    fn pivot_weight(&self) -> f64;

    fn determinant(m: &Matrix<Self>) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_negligible(&self, scale: f64, tol: f64) -> bool {
        self.abs() <= tol * scale
    }
    fn is_positive_beyond(&self, scale: f64, tol: f64) -> bool {
        *self > tol * scale
    }
    fn pivot_weight(&self) -> f64 {
        self.abs()
    }

    /// LU with partial pivoting.
    fn determinant(m: &Matrix<f64>) -> f64 {
        let n = m.rows();
        assert_eq!(n, m.cols(), "determinant of a non-square matrix");
        let mut a = m.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].abs().total_cmp(&a[(y, col)].abs()))
                .unwrap();
            let p = a[(pivot, col)];
            if p == 0.0 {
                return 0.0;
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            det *= p;
            for r in col + 1..n {
                let factor = a[(r, col)] / p;
                if factor != 0.0 {
                    for c in col + 1..n {
                        let v = a[(col, c)];
                        a[(r, c)] -= factor * v;
                    }
                }
            }
        }
        det
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        // numerator and denominator separately overflow long before the ratio does
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(900);
                let n = (self.numer() >> shift).to_f64().unwrap_or(0.0);
                let d = (self.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
                n / d
            }
        }
    }
    fn magnitude(&self) -> f64 {
        Scalar::to_f64(self).abs()
    }
    fn is_negligible(&self, _scale: f64, _tol: f64) -> bool {
        self.is_zero()
    }
    fn is_positive_beyond(&self, _scale: f64, _tol: f64) -> bool {
        self.is_positive()
    }
    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    /// Fraction-free (Bareiss) elimination on the integer matrix obtained by
    /// clearing each row's denominators.
    fn determinant(m: &Matrix<Rational>) -> Rational {
        let n = m.rows();
        assert_eq!(n, m.cols(), "determinant of a non-square matrix");
        if n == 0 {
            return <Rational as One>::one();
        }
        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|r| {
                let lcm = m
                    .row(r)
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                scale *= &lcm;
                m.row(r)
                    .iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect()
            })
            .collect();

        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return <Rational as Zero>::zero();
            };
            if pivot != col {
                a.swap(pivot, col);
                sign = -sign;
            }
            for r in col + 1..n {
                for c in col + 1..n {
                    let v = &a[r][c] * &a[col][col] - &a[r][col] * &a[col][c];
                    // exact by Sylvester's identity
                    a[r][c] = v / &prev;
                }
                a[r][col] = BigInt::zero();
            }
            prev = a[col][col].clone();
        }
        Rational::new(sign * &a[n - 1][n - 1], scale)
    }
}
