use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use super::expm::expm;
use super::path::{eigensystem_a, matrix_a};
use super::perron::{fixed_subspace_e1, PerronData};
use crate::exterior::{additive_compound, normalize_sign, plucker_vector, Ambient, PluckerVector, Subspace};
use crate::matrix::norm;
use crate::membership::sign_classify;
use crate::{Error, Matrix, Result, Scalar};

/// Runtime knobs of the flow pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlowConfig {
    /// Grid spacing for path sampling in `r`.
    pub r_step: f64,
    /// Convergence threshold on the distance to `E_1`.
    pub epsilon: f64,
    /// Iteration cap.
    pub n_max: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { r_step: 0.1, epsilon: 1e-9, n_max: 200 }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_step > 0.0) || !self.r_step.is_finite() {
            return Err(Error::InvalidArguments(format!("r_step = {} must be positive", self.r_step)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArguments(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidArguments("n_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Angle between the lines spanned by two Plücker vectors, in `[0, π/2]`.
///
/// Equal to `arccos(|<p, q>| / (|p| |q|))` but computed as
/// `2 asin(|u - s v| / 2)` on unit vectors, which stays accurate for tiny
/// angles where `arccos` near 1 does not.
pub fn plucker_angle(p: &PluckerVector<f64>, q: &PluckerVector<f64>) -> f64 {
    assert_eq!(p.ambient(), q.ambient(), "Plücker vectors from different Grassmannians");
    let u = p.normalized();
    let v = q.normalized();
    let inner: f64 = u.coords().iter().zip(v.coords()).map(|(a, b)| a * b).sum();
    let s = if inner < 0.0 { -1.0 } else { 1.0 };
    let chord = norm(&u.coords().iter().zip(v.coords()).map(|(a, b)| a - s * b).collect::<Vec<_>>());
    (2.0 * libm::asin((chord / 2.0).min(1.0))).clamp(0.0, FRAC_PI_2)
}

/// Projective angle between `Λ^k E` and `Λ^k F`.
///
/// # Panics
///
/// If the two subspaces live in different Grassmannians.
pub fn grassmann_distance<S: Scalar, T: Scalar>(e: &Subspace<S>, f: &Subspace<T>) -> f64 {
    plucker_angle(&plucker_vector(e).to_f64(), &plucker_vector(f).to_f64())
}

/// Relative tolerance for choosing pivots among eigen-coordinates, which
/// have magnitude at most one.
const EIGEN_PIVOT_TOLERANCE: f64 = 1e-12;

/// Row space of `E.rows * exp_rA(N, r)^T`.
///
/// Computed in the eigenbasis of `A`: the coefficient rows are brought to
/// echelon form with columns ordered by decreasing eigenvalue, then each row
/// is scaled by `exp(r (λ_j - λ_pivot))`. Every factor is at most one, so
/// large `r` neither overflows nor collapses the rows onto each other.
/// Exact inputs are refused since the result is irrational.
pub fn apply_flow<S: Scalar>(e: &Subspace<S>, r: f64) -> Result<Subspace<f64>> {
    if S::EXACT {
        return Err(Error::ModeMismatch("exp(rA) is irrational; flows need floating mode"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidArguments(format!("flow time r = {r} must be finite and >= 0")));
    }
    let n = e.n();
    let eig = eigensystem_a(n)?;
    let lambdas: Vec<f64> = eig.iter().map(|(l, _)| *l).collect();
    // columns of `basis` are the eigenvectors
    let basis = Matrix::from_rows(eig.into_iter().map(|(_, v)| v).collect())?.transpose();

    let q = e.to_f64().orthonormalized();
    let coeffs = q.rows().mul(&basis)?;
    let (mut echelon, pivots) = coeffs.rref(EIGEN_PIVOT_TOLERANCE);
    if pivots.len() != e.k() {
        return Err(Error::Internal(format!(
            "eigen-coordinates of a rank-{} subspace have rank {}",
            e.k(),
            pivots.len()
        )));
    }
    for (row, &p) in pivots.iter().enumerate() {
        for col in 0..n {
            echelon[(row, col)] = if col < p {
                0.0
            } else {
                echelon[(row, col)] * libm::exp(r * (lambdas[col] - lambdas[p]))
            };
        }
    }
    let echelon = echelon.select(&(0..e.k()).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>());
    let rows = echelon.mul(&basis.transpose())?;
    Subspace::with_tolerance(rows, e.tolerance())?.orthonormalized_checked()
}

impl Subspace<f64> {
    fn orthonormalized_checked(&self) -> Result<Self> {
        let q = self.orthonormalized();
        if q.rows().rows() != self.k() {
            return Err(Error::Internal("flowed generators lost rank".into()));
        }
        Ok(q)
    }
}

/// One recorded iterate of the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FlowStep {
    pub n: usize,
    pub distance: f64,
    pub min_margin: f64,
    pub sign_ok: bool,
}

/// The sampled trajectory `n -> g_n E`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FlowTrace {
    pub steps: Vec<FlowStep>,
    pub converged_at: Option<usize>,
    /// Geometric mean of the last (up to) five distance ratios; `None` when
    /// the start was already converged.
    pub rate_estimate: Option<f64>,
    pub gap_ratio: f64,
}

/// Cached, immutable data for flowing in a fixed `(N, k)`: the additive
/// compound `D_k` of `A`, the one-step map `Λ^k g_1 = exp(D_k)` and the
/// verified fixed point `E_1`. Shareable across threads.
#[derive(Debug, Clone)]
pub struct FlowContext {
    ambient: Ambient,
    derivation: Matrix<f64>,
    unit_step: Matrix<f64>,
    perron: PerronData,
    target: PluckerVector<f64>,
}

impl FlowContext {
    pub fn new(ambient: Ambient) -> Result<Self> {
        let perron = fixed_subspace_e1(ambient.n(), ambient.k())?;
        let a = matrix_a(ambient.n())?;
        let derivation = additive_compound(a.matrix(), ambient.k())?;
        let unit_step = expm(&derivation)?;
        let target = normalize_sign(&plucker_vector(&perron.fixed_subspace))?.normalized();
        Ok(Self { ambient, derivation, unit_step, perron, target })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn perron(&self) -> &PerronData {
        &self.perron
    }

    /// `Λ^k g_1`.
    pub fn unit_step(&self) -> &Matrix<f64> {
        &self.unit_step
    }

    /// Unit, positive Plücker vector of `E_1`.
    pub fn target(&self) -> &PluckerVector<f64> {
        &self.target
    }

    /// `Λ^k g_r = exp(r D_k)`, entrywise nonnegative.
    pub fn propagator(&self, r: f64) -> Result<Matrix<f64>> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidArguments(format!("flow time r = {r} must be finite and >= 0")));
        }
        expm(&self.derivation.map(|v| v * r))
    }

    /// Applies a propagator to a Plücker vector and rescales to unit length.
    pub fn advance(&self, propagator: &Matrix<f64>, p: &PluckerVector<f64>) -> Result<PluckerVector<f64>> {
        let next = propagator.mul_vec(p.coords())?;
        Ok(PluckerVector::from_coords(self.ambient, next, p.tolerance())?.normalized())
    }

    /// Iterates `Λ^k E -> Λ^k g_1 Λ^k E` toward the Perron line, recording the
    /// distance to `E_1` and the sign margin at each step.
    pub fn iterate<S: Scalar>(&self, e: &Subspace<S>, cfg: &FlowConfig) -> Result<FlowTrace> {
        let run = self.run(e, cfg)?;
        match run.contact {
            Some(step) => Err(Error::BoundaryContact { step: step.n, margin: step.min_margin }),
            None => Ok(run.trace),
        }
    }

    /// Like [`FlowContext::iterate`] but a boundary contact ends the trace
    /// instead of discarding it. The offending step is the last one recorded.
    pub fn run<S: Scalar>(&self, e: &Subspace<S>, cfg: &FlowConfig) -> Result<FlowRun> {
        if S::EXACT {
            return Err(Error::ModeMismatch("exp(rA) is irrational; flows need floating mode"));
        }
        self.run_plucker(&plucker_vector(e).to_f64(), e.ambient(), cfg)
    }

    /// [`FlowContext::run`] from a Plücker vector, which may come from an
    /// exact subspace or from an accurate propagation.
    pub fn run_plucker(&self, start: &PluckerVector<f64>, ambient: Ambient, cfg: &FlowConfig) -> Result<FlowRun> {
        cfg.validate()?;
        if ambient != self.ambient {
            return Err(Error::InvalidArguments(format!(
                "subspace lives in Gr({}, {}), flow context in Gr({}, {})",
                ambient.k(),
                ambient.n(),
                self.ambient.k(),
                self.ambient.n()
            )));
        }
        let tol = start.tolerance();
        let mut p = start.normalized();
        let sign = sign_classify(&p)?;
        if !sign.all_nonzero || sign.margin.is_some_and(|m| m <= tol) {
            return Err(Error::HypothesisNotMet(format!(
                "flow start has a Plücker coordinate within tolerance of zero (margin {:e})",
                sign.margin.unwrap_or(0.0)
            )));
        }

        let mut steps = Vec::new();
        let mut converged_at = None;
        let mut contact = None;
        for n in 0..=cfg.n_max {
            if n > 0 {
                p = self.advance(&self.unit_step, &p)?;
            }
            let margin = p.margin();
            let distance = plucker_angle(&p, &self.target);
            let step = FlowStep { n, distance, min_margin: margin, sign_ok: margin > tol };
            steps.push(step);
            if !step.sign_ok {
                contact = Some(step);
                break;
            }
            if distance < cfg.epsilon {
                converged_at = Some(n);
                break;
            }
        }
        let trace = FlowTrace {
            rate_estimate: rate_estimate(&steps),
            steps,
            converged_at,
            gap_ratio: self.perron.gap_ratio,
        };
        Ok(FlowRun { trace, contact })
    }
}

/// A trace together with the step, if any, where a coordinate came within
/// tolerance of zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun {
    pub trace: FlowTrace,
    pub contact: Option<FlowStep>,
}

fn rate_estimate(steps: &[FlowStep]) -> Option<f64> {
    let tail = &steps[steps.len().saturating_sub(6)..];
    let logs: Vec<f64> = tail
        .windows(2)
        .filter(|w| w[0].distance > 0.0 && w[1].distance > 0.0)
        .map(|w| libm::log(w[1].distance / w[0].distance))
        .collect();
    if logs.is_empty() {
        return None;
    }
    Some(libm::exp(logs.iter().sum::<f64>() / logs.len() as f64))
}

/// [`FlowContext::iterate`] with a freshly built context.
pub fn flow_iterate<S: Scalar>(e: &Subspace<S>, cfg: &FlowConfig) -> Result<FlowTrace> {
    FlowContext::new(e.ambient())?.iterate(e, cfg)
}
