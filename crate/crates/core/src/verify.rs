//! End-to-end pipelines: the flow certificate for positive subspaces, the
//! closure check at coordinate subspaces, and the inclusion suite.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::exterior::{plucker_vector, Ambient, PluckerVector, Subspace};
use crate::membership::{classify, is_generic, scan_gr_prime, sign_classify, Classification, Condition};
use crate::samplers::{
    coordinate_subspace, flow_coordinate, mixed_sign_subspace, random_index_set, random_nodes,
    random_rational_subspace, rng_from_seed, sample_seed, vandermonde_subspace, DEFAULT_ENTRY_BOUND,
};
use crate::scalar::ScalarMode;
use crate::tp_flow::{plucker_angle, FlowConfig, FlowContext, FlowTrace};
use crate::{Error, IndexSet, Rational, Result, Scalar};

/// What was fed to a pipeline.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InputSummary {
    pub n: usize,
    pub k: usize,
    /// `"exact"` or `"float"`.
    pub mode: String,
    /// Zero tolerance, floating mode only.
    pub tolerance: Option<f64>,
    pub rows: Vec<Vec<String>>,
    pub plucker: Vec<String>,
}

impl InputSummary {
    pub fn of<S: Scalar>(e: &Subspace<S>) -> Self {
        Self {
            n: e.n(),
            k: e.k(),
            mode: match e.mode() {
                ScalarMode::Exact => "exact".into(),
                ScalarMode::Floating { .. } => "float".into(),
            },
            tolerance: match e.mode() {
                ScalarMode::Exact => None,
                ScalarMode::Floating { tolerance } => Some(tolerance),
            },
            rows: e.rows().to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect(),
            plucker: plucker_vector(e).coords().iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Verdict {
    pub pass: bool,
    pub reason: String,
}

/// One grid point `r` of the path `r -> g_r E`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PathPoint {
    pub r: f64,
    pub all_nonzero: bool,
    pub min_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TheoremCertificate {
    pub input: InputSummary,
    pub classification: Classification,
    pub trace: FlowTrace,
    /// First step at which the iterate is positive; the start already is.
    pub n0: usize,
    pub path_check: Vec<PathPoint>,
    pub verdict: Verdict,
}

/// Flows a positive subspace to `E_1` and samples the path `r -> g_r E` on
/// the grid `0, r_step, 2 r_step, ...` up to the convergence step (or
/// `n_max` without convergence), checking every Plücker coordinate stays
/// away from zero.
pub fn verify_theorem<S: Scalar>(e: &Subspace<S>, cfg: &FlowConfig) -> Result<TheoremCertificate> {
    let ctx = FlowContext::new(e.ambient())?;
    verify_theorem_with(&ctx, e, cfg)
}

/// [`verify_theorem`] with a prebuilt, shareable flow context.
pub fn verify_theorem_with<S: Scalar>(
    ctx: &FlowContext,
    e: &Subspace<S>,
    cfg: &FlowConfig,
) -> Result<TheoremCertificate> {
    cfg.validate()?;
    let classification = classify(e)?;
    if !classification.positive {
        return Err(Error::HypothesisNotMet(format!(
            "start is not positive{}",
            classification.witness.as_ref().map_or_else(String::new, |w| format!(" (witness {w})"))
        )));
    }
    let start = plucker_vector(e).to_f64();
    let run = ctx.run_plucker(&start, e.ambient(), cfg)?;

    let upper = match (run.contact, run.trace.converged_at) {
        (Some(step), _) => step.n,
        (None, Some(n)) => n,
        (None, None) => cfg.n_max,
    };
    let path_check = sample_path(ctx, &start, upper as f64, cfg.r_step)?;

    let verdict = if let Some(step) = run.contact {
        fail(format!("boundary contact at flow step {} (margin {:e})", step.n, step.min_margin))
    } else if let Some(bad) = path_check.iter().find(|p| !p.all_nonzero) {
        fail(format!("boundary contact at r = {} (margin {:e})", bad.r, bad.min_margin))
    } else if let Some(n) = run.trace.converged_at {
        Verdict {
            pass: true,
            reason: format!("converged at step {n}; {} path points nonvanishing", path_check.len()),
        }
    } else {
        fail(format!("no convergence to epsilon {:e} within {} steps", cfg.epsilon, cfg.n_max))
    };

    Ok(TheoremCertificate {
        input: InputSummary::of(e),
        classification,
        trace: run.trace,
        n0: 0,
        path_check,
        verdict,
    })
}

fn fail(reason: String) -> Verdict {
    Verdict { pass: false, reason }
}

fn sample_path(ctx: &FlowContext, start: &PluckerVector<f64>, upper: f64, r_step: f64) -> Result<Vec<PathPoint>> {
    let tol = start.tolerance();
    let count = libm::floor(upper / r_step + 1e-9) as usize;
    let step = ctx.propagator(r_step)?;
    let mut p = start.normalized();
    let mut out = Vec::with_capacity(count + 1);
    for j in 0..=count {
        if j > 0 {
            p = ctx.advance(&step, &p)?;
        }
        let margin = p.margin();
        out.push(PathPoint { r: j as f64 * r_step, all_nonzero: margin > tol, min_margin: margin });
    }
    Ok(out)
}

/// One `r` of a closure check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClosureItem {
    pub r: f64,
    pub positive: bool,
    pub margin: f64,
    /// Distance from `g_r V_I` to `V_I`.
    pub distance: f64,
    /// Smaller than the distance at the previous `r` (true for the first).
    pub decreasing: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClosureReport {
    pub n: usize,
    pub set: IndexSet,
    pub items: Vec<ClosureItem>,
    pub pass: bool,
}

/// Flows `V_I` for each `r` in a decreasing list and checks the result is
/// positive and approaches `V_I` as `r` shrinks.
pub fn verify_closure(set: &IndexSet, n: usize, r_list: &[f64]) -> Result<ClosureReport> {
    if r_list.is_empty() {
        return Err(Error::InvalidArguments("r list is empty".into()));
    }
    if r_list.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidArguments("flow times must be positive".into()));
    }
    if r_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArguments("flow times must be strictly decreasing".into()));
    }
    let ambient = Ambient::new(n, set.len())?;
    let indicator: Vec<f64> = ambient.index_sets().iter().map(|t| if t == set { 1.0 } else { 0.0 }).collect();
    let base = PluckerVector::from_coords(ambient, indicator, 0.0)?;

    let mut items: Vec<ClosureItem> = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let point = flow_coordinate(set, n, r)?;
        let distance = plucker_angle(&point.plucker, &base);
        let decreasing = items.last().is_none_or(|prev| distance < prev.distance);
        items.push(ClosureItem {
            r,
            positive: point.sign.positive,
            margin: point.sign.margin.unwrap_or(0.0),
            distance,
            decreasing,
        });
    }
    let pass = items.iter().all(|i| i.positive && i.decreasing);
    Ok(ClosureReport { n, set: set.clone(), items, pass })
}

/// Generator used for a suite sample; cycles with the sample index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SampleKind {
    Vandermonde,
    RandomRational,
    MixedSign,
    Coordinate,
}

impl SampleKind {
    pub fn for_index(index: usize) -> Self {
        match index % 4 {
            0 => SampleKind::Vandermonde,
            1 => SampleKind::RandomRational,
            2 => SampleKind::MixedSign,
            _ => SampleKind::Coordinate,
        }
    }
}

/// Implications and consistency checks run on every suite sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Check {
    /// Vandermonde samples classify positive.
    VandermondePositive,
    /// positive ⇒ all Plücker coordinates nonzero.
    PositiveImpliesAllNonzero,
    /// all coordinates nonzero ⇒ generic.
    AllNonzeroImpliesGeneric,
    /// Rank-based and minor-based `Gr'` agree, set by set.
    RankMatchesMinors,
    /// The sampler itself failed.
    Generation,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SuiteFailure {
    pub index: usize,
    pub check: Check,
    pub witness: String,
}

/// Raw verdicts on one sample; the input to [`SampleOutcome::evaluate`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SampleFacts {
    pub positive: bool,
    pub nonnegative: bool,
    pub all_nonzero: bool,
    pub generic: bool,
    pub failed_condition: Option<Condition>,
    pub rank_member: bool,
    pub rank_witness: Option<IndexSet>,
    pub mismatches: Vec<IndexSet>,
}

impl SampleFacts {
    pub fn of(e: &Subspace<Rational>) -> Result<Self> {
        let sign = sign_classify(&plucker_vector(e))?;
        let scan = scan_gr_prime(e)?;
        let generic = is_generic(e)?;
        Ok(Self {
            positive: sign.positive,
            nonnegative: sign.nonnegative,
            all_nonzero: sign.all_nonzero,
            generic: generic.generic,
            failed_condition: generic.failed,
            rank_member: scan.rank_member,
            rank_witness: scan.witness,
            mismatches: scan.mismatches,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SampleOutcome {
    pub index: usize,
    pub kind: SampleKind,
    pub seed: u64,
    pub plucker: Vec<String>,
    pub facts: Option<SampleFacts>,
    pub failures: Vec<SuiteFailure>,
}

impl SampleOutcome {
    /// Applies every check to `facts`. Pure, so failures can be injected by
    /// handing it inconsistent facts.
    pub fn evaluate(index: usize, kind: SampleKind, seed: u64, plucker: Vec<String>, facts: SampleFacts) -> Self {
        let mut failures = Vec::new();
        let mut flag = |check, witness: String| failures.push(SuiteFailure { index, check, witness });
        if kind == SampleKind::Vandermonde && !facts.positive {
            flag(Check::VandermondePositive, "Vandermonde sample not positive".into());
        }
        if facts.positive && !facts.all_nonzero {
            flag(Check::PositiveImpliesAllNonzero, format!("{:?}", facts.rank_witness.as_ref().map(ToString::to_string)));
        }
        if facts.all_nonzero && !facts.generic {
            flag(
                Check::AllNonzeroImpliesGeneric,
                facts.failed_condition.map_or_else(|| "condition ?".into(), |c| format!("condition {c}")),
            );
        }
        if facts.rank_member != facts.all_nonzero || !facts.mismatches.is_empty() {
            let sets: Vec<String> = facts.mismatches.iter().map(|s| format!("V_{s}")).collect();
            flag(Check::RankMatchesMinors, sets.join(" "));
        }
        Self { index, kind, seed, plucker, facts: Some(facts), failures }
    }

    fn generation_failure(index: usize, kind: SampleKind, seed: u64, err: &Error) -> Self {
        let failures = alloc::vec![SuiteFailure { index, check: Check::Generation, witness: err.to_string() }];
        Self { index, kind, seed, plucker: Vec::new(), facts: None, failures }
    }
}

/// The subspace the suite draws for sample `index`.
pub fn suite_subspace(n: usize, k: usize, master_seed: u64, index: usize) -> Result<(SampleKind, u64, Subspace<Rational>)> {
    let kind = SampleKind::for_index(index);
    let seed = sample_seed(master_seed, index as u64);
    let mut rng = rng_from_seed(seed);
    let e = match kind {
        SampleKind::Vandermonde => vandermonde_subspace(&random_nodes(k, &mut rng), n),
        // small entry bounds make degenerate subspaces common
        SampleKind::RandomRational => random_rational_subspace(n, k, 1 + (index / 4 % 3) as i64, seed),
        SampleKind::MixedSign => mixed_sign_subspace(n, k, DEFAULT_ENTRY_BOUND, seed),
        SampleKind::Coordinate => random_index_set(n, k, &mut rng).and_then(|s| coordinate_subspace(&s, n)),
    }?;
    Ok((kind, seed, e))
}

/// Draws and checks sample `index`. Independent of every other sample.
pub fn suite_sample(n: usize, k: usize, master_seed: u64, index: usize) -> SampleOutcome {
    let kind = SampleKind::for_index(index);
    let seed = sample_seed(master_seed, index as u64);
    let drawn = suite_subspace(n, k, master_seed, index).and_then(|(_, _, e)| Ok((SampleFacts::of(&e)?, e)));
    match drawn {
        Ok((facts, e)) => {
            let plucker = plucker_vector(&e).coords().iter().map(ToString::to_string).collect();
            SampleOutcome::evaluate(index, kind, seed, plucker, facts)
        }
        Err(err) => SampleOutcome::generation_failure(index, kind, seed, &err),
    }
}

/// How many samples each implication was actually exercised on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CheckCounts {
    pub vandermonde_positive: usize,
    pub positive_implies_all_nonzero: usize,
    pub all_nonzero_implies_generic: usize,
    pub rank_matches_minors: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SuiteReport {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub num_samples: usize,
    pub counts: CheckCounts,
    pub failures: Vec<SuiteFailure>,
    pub pass: bool,
    pub samples: Vec<SampleOutcome>,
}

impl SuiteReport {
    /// Orders outcomes by index and tallies them; the result does not depend
    /// on the order the outcomes arrive in.
    pub fn assemble(n: usize, k: usize, seed: u64, mut samples: Vec<SampleOutcome>) -> Self {
        samples.sort_by_key(|s| s.index);
        let mut counts = CheckCounts::default();
        for s in &samples {
            let Some(f) = &s.facts else { continue };
            counts.vandermonde_positive += usize::from(s.kind == SampleKind::Vandermonde);
            counts.positive_implies_all_nonzero += usize::from(f.positive);
            counts.all_nonzero_implies_generic += usize::from(f.all_nonzero);
            counts.rank_matches_minors += 1;
        }
        let failures: Vec<SuiteFailure> = samples.iter().flat_map(|s| s.failures.iter().cloned()).collect();
        Self { n, k, seed, num_samples: samples.len(), counts, pass: failures.is_empty(), failures, samples }
    }
}

/// Runs [`suite_sample`] for indices `0..num_samples` in order.
pub fn run_inclusion_suite(n: usize, k: usize, num_samples: usize, seed: u64) -> Result<SuiteReport> {
    if num_samples == 0 {
        return Err(Error::InvalidArguments("the suite needs at least one sample".into()));
    }
    Ambient::new(n, k)?;
    let samples = (0..num_samples).map(|i| suite_sample(n, k, seed, i)).collect();
    Ok(SuiteReport::assemble(n, k, seed, samples))
}
