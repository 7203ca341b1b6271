use alloc::format;
use alloc::vec::Vec;

use super::expm::exp_ra;
use super::flow::{apply_flow, grassmann_distance, plucker_angle};
use super::path::{eigensystem_a, path_eigenvalue};
use crate::exterior::{compound_matrix, normalize_sign, plucker_vector, Ambient, PluckerVector, Subspace};
use crate::matrix::{dot, norm};
use crate::{Error, Matrix, Result};

/// Iteration cap for [`perron_line`]: ten times the default flow cap.
pub const PERRON_MAX_ITERATIONS: usize = 2000;

const PERRON_STEP_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct PerronLine {
    /// Unit vector with positive entries.
    pub vector: Vec<f64>,
    /// Rayleigh-quotient estimate of the dominant eigenvalue.
    pub eigenvalue: f64,
    pub iterations: usize,
}

/// Power iteration for the dominant eigenline of a matrix with positive
/// entries. Stops once successive unit iterates differ by less than `1e-13`.
pub fn perron_line(c: &Matrix<f64>, max_iterations: usize) -> Result<PerronLine> {
    if !c.is_square() || c.rows() == 0 {
        return Err(Error::InvalidArguments("Perron line of a non-square matrix".into()));
    }
    if let Some(r) = (0..c.rows()).find(|&r| c.row(r).iter().any(|&x| !(x > 0.0))) {
        return Err(Error::InvalidArguments(format!(
            "matrix has a non-positive entry in row {}",
            r + 1
        )));
    }
    let m = c.rows();
    let mut x = alloc::vec![1.0 / libm::sqrt(m as f64); m];
    for iteration in 1..=max_iterations {
        let mut y = c.mul_vec(&x)?;
        let len = norm(&y);
        y.iter_mut().for_each(|v| *v /= len);
        let step = norm(&y.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>());
        x = y;
        if step < PERRON_STEP_TOLERANCE {
            let cx = c.mul_vec(&x)?;
            return Ok(PerronLine { eigenvalue: dot(&x, &cx), vector: x, iterations: iteration });
        }
    }
    Err(Error::ConvergenceFailure(max_iterations))
}

/// The fixed point `E_1` of the flow together with the Perron data of
/// `Λ^k g_1`.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub ambient: Ambient,
    /// Unit Perron vector of `compound(g_1, k)`, all entries positive.
    pub perron_vector: PluckerVector<f64>,
    /// Dominant eigenvalue estimate, `≈ exp(λ_1 + ... + λ_k)`.
    pub eigenvalue: f64,
    /// `E_1`, spanned by the top `k` eigenvectors of `A`, orthonormal rows.
    pub fixed_subspace: Subspace<f64>,
    /// `exp(λ_{k+1} - λ_k)`, the per-step contraction toward `E_1`.
    pub gap_ratio: f64,
}

/// Builds `E_1` from the closed-form spectrum and checks that
/// (a) `g_1 E_1 = E_1` to distance `1e-10`, (b) its Plücker vector is
/// strictly positive after sign normalization, and (c) it agrees with the
/// power-iteration Perron line of `compound(g_1, k)` to `1e-8`.
pub fn fixed_subspace_e1(n: usize, k: usize) -> Result<PerronData> {
    let ambient = Ambient::new(n, k)?;
    let eig = eigensystem_a(n)?;
    let rows = Matrix::from_rows(eig.iter().take(k).map(|(_, v)| v.clone()).collect())?;
    let e1 = Subspace::new(rows)?;

    let moved = apply_flow(&e1, 1.0)?;
    let drift = grassmann_distance(&moved, &e1);
    if drift >= 1e-10 {
        return Err(Error::Internal(format!("g_1 moves E_1 by {drift:e}")));
    }

    let p = normalize_sign(&plucker_vector(&e1))?;
    if let Some((set, v)) = p.entries().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::Internal(format!("E_1 has Plücker coordinate p_{set} = {v:e}")));
    }

    let compound = compound_matrix(&exp_ra(n, 1.0)?, k)?;
    let line = perron_line(&compound, PERRON_MAX_ITERATIONS)?;
    let perron_vector = PluckerVector::from_coords(ambient, line.vector, e1.tolerance())?;
    let angle = plucker_angle(&perron_vector, &p);
    if angle >= 1e-8 {
        return Err(Error::Internal(format!(
            "Perron line of compound(g_1, {k}) is {angle:e} away from Λ^k E_1"
        )));
    }

    let gap_ratio = libm::exp(path_eigenvalue(n, k + 1) - path_eigenvalue(n, k));
    Ok(PerronData {
        ambient,
        perron_vector,
        eigenvalue: line.eigenvalue,
        fixed_subspace: e1,
        gap_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tp_flow::exp_ra;
    use alloc::vec;

    #[test]
    fn symmetric_circulant() {
        let c = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let line = perron_line(&c, 100).unwrap();
        let s = 1.0 / libm::sqrt(2.0);
        assert!((line.vector[0] - s).abs() < 1e-13 && (line.vector[1] - s).abs() < 1e-13);
        assert!((line.eigenvalue - 3.0).abs() < 1e-12);
    }

    #[test]
    fn first_compound_of_two_by_two_flow() {
        let c = compound_matrix(&exp_ra(2, 1.0).unwrap(), 1).unwrap();
        let line = perron_line(&c, 100).unwrap();
        let s = 1.0 / libm::sqrt(2.0);
        assert!(line.vector.iter().all(|v| (v - s).abs() < 1e-13));
    }

    #[test]
    fn rejects_nonpositive_and_reports_nonconvergence() {
        let c = Matrix::from_rows(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(perron_line(&c, 100), Err(Error::InvalidArguments(_))));
        let slow = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        // the uniform start is not an eigenvector and one step cannot reach 1e-13
        assert_eq!(perron_line(&slow, 1).unwrap_err(), Error::ConvergenceFailure(1));
    }

    #[test]
    fn dominant_eigenvalue_is_exp_of_top_sum() {
        for n in 2..=6 {
            for k in 1..n {
                let c = compound_matrix(&exp_ra(n, 1.0).unwrap(), k).unwrap();
                let line = perron_line(&c, PERRON_MAX_ITERATIONS).unwrap();
                let expected = libm::exp((1..=k).map(|j| path_eigenvalue(n, j)).sum());
                assert!(((line.eigenvalue - expected) / expected).abs() < 1e-9, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn e1_small_cases() {
        let d = fixed_subspace_e1(2, 1).unwrap();
        let p = normalize_sign(&plucker_vector(&d.fixed_subspace)).unwrap();
        assert!((p.coords()[0] - p.coords()[1]).abs() < 1e-15);

        // N=3, k=2: Plücker ∝ (1, √2, 1)
        let d = fixed_subspace_e1(3, 2).unwrap();
        let p = normalize_sign(&plucker_vector(&d.fixed_subspace)).unwrap();
        let c = p.coords();
        assert!((c[1] / c[0] - libm::sqrt(2.0)).abs() < 1e-14);
        assert!((c[2] / c[0] - 1.0).abs() < 1e-14);

        let d = fixed_subspace_e1(3, 1).unwrap();
        assert!((d.gap_ratio - libm::exp(-libm::sqrt(2.0))).abs() < 1e-15);
        assert!((d.gap_ratio - 0.2431).abs() < 1e-4);
    }

    #[test]
    fn e1_verifies_up_to_n8() {
        for n in 2..=8 {
            for k in 1..n {
                let d = fixed_subspace_e1(n, k).unwrap();
                assert!(d.perron_vector.coords().iter().all(|&v| v > 0.0));
                assert!((d.perron_vector.norm() - 1.0).abs() < 1e-14);
            }
        }
    }
}
