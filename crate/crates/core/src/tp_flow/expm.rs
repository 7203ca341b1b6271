use alloc::format;

use super::path::matrix_a;
use crate::{Error, Matrix, Result};

/// Truncation order of the Taylor polynomial.
pub const TAYLOR_ORDER: usize = 30;

/// Largest 1-norm handed to the Taylor polynomial; larger arguments are
/// halved and the result squared back.
pub const THETA_MAX: f64 = 4.0;

/// Bound on `‖ΔX‖ / ‖X‖` where `T_m(X) = exp(X + ΔX)` and `‖X‖_1 <= theta`.
///
/// The tail of the exponential series past order `m` is at most
/// `theta^{m+1} / (m+1)! / (1 - theta/(m+2))`, and pulling it back through
/// `exp(-X)` costs another factor `e^theta`.
pub fn taylor_backward_error_bound(theta: f64, m: usize) -> f64 {
    let mut term = 1.0;
    for j in 1..=m + 1 {
        term *= theta / j as f64;
    }
    // term = theta^{m+1} / (m+1)!, divide by theta for the relative version
    libm::exp(theta) * term / theta / (1.0 - theta / (m as f64 + 2.0))
}

fn one_norm(m: &Matrix<f64>) -> f64 {
    (0..m.cols())
        .map(|c| (0..m.rows()).map(|r| m[(r, c)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a fixed-order Taylor
/// polynomial. Meant for nonnegative matrices, where every term is
/// nonnegative and entries keep their relative accuracy.
pub fn expm(m: &Matrix<f64>) -> Result<Matrix<f64>> {
    if !m.is_square() {
        return Err(Error::InvalidArguments(format!(
            "exponential of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let norm = one_norm(m);
    if !norm.is_finite() {
        return Err(Error::InvalidArguments("matrix has non-finite entries".into()));
    }
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > THETA_MAX {
        scaled_norm /= 2.0;
        squarings += 1;
    }
    let factor = libm::ldexp(1.0, -(squarings as i32));
    let x = m.map(|v| v * factor);

    // Horner: I + X/1 (I + X/2 (I + ... (I + X/m)))
    let n = m.rows();
    let identity = Matrix::<f64>::identity(n);
    let mut t = identity.clone();
    for j in (1..=TAYLOR_ORDER).rev() {
        let xt = x.mul(&t)?;
        t = Matrix::new(
            n,
            n,
            (0..n * n)
                .map(|idx| identity[(idx / n, idx % n)] + xt[(idx / n, idx % n)] / j as f64)
                .collect(),
        )?;
    }
    for _ in 0..squarings {
        t = t.mul(&t)?;
    }
    Ok(t)
}

/// `g_r = exp(rA)` for the path operator on `N` vertices, `r >= 0`.
pub fn exp_ra(n: usize, r: f64) -> Result<Matrix<f64>> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidArguments(format!("flow time r = {r} must be finite and >= 0")));
    }
    let a = matrix_a(n)?;
    let g = expm(&a.matrix().map(|v| v * r))?;
    // A is symmetric; remove the roundoff asymmetry of the Horner products
    let gt = g.transpose();
    Matrix::new(n, n, (0..n * n).map(|i| 0.5 * (g[(i / n, i % n)] + gt[(i / n, i % n)])).collect())
}
