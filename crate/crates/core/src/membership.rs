//! Classification of a subspace against the positive, nonnegative,
//! all-coordinates-nonzero and generic loci, and the two flags built from it.
//!
//! Every subspace test here reduces to a rank computation on stacked
//! generator matrices. Nothing compares bases directly.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::exterior::{normalize_sign, plucker_vector, PluckerVector, Subspace};
use crate::index_set::{enumerate_index_sets, IndexSet};
use crate::{Error, Matrix, Result, Scalar};

/// One of the genericity conditions, with its loop index where it has one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `E ∩ V_[1, N-k] = 0`
    I,
    /// `E ∩ V_[k+1, N] = 0`
    II,
    /// `E'_i ∩ E_{k-i} = 0`
    III(usize),
    /// `E'_{k+i} ∩ E_{N-i} = E`
    IV(usize),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::I => f.write_str("i"),
            Condition::II => f.write_str("ii"),
            Condition::III(i) => write!(f, "iii(i={i})"),
            Condition::IV(i) => write!(f, "iv(i={i})"),
        }
    }
}

/// Why a classification flag is false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `E ∩ V_I != 0` for this `I` with `|I| = N - k`; the coordinate at
    /// `[1, N] \ I` vanishes.
    Intersection(IndexSet),
    /// This coordinate is zero or has the wrong sign after normalization.
    Coordinate(IndexSet),
}

/// Rendered as `V_<set>` or `p_<set>`, e.g. `V_23` or `p_14`.
impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Intersection(set) => write!(f, "V_{set}"),
            Witness::Coordinate(set) => write!(f, "p_{set}"),
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Condition {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> core::result::Result<Ser::Ok, Ser::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Witness {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> core::result::Result<Ser::Ok, Ser::Error> {
        s.collect_str(self)
    }
}

/// Sign pattern of a Plücker vector after sign normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SignClass {
    pub positive: bool,
    pub nonnegative: bool,
    pub all_nonzero: bool,
    /// `min |p_I| / max |p_I|`, floating mode only.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Classification {
    pub positive: bool,
    pub nonnegative: bool,
    pub all_nonzero: bool,
    pub generic: bool,
    pub failed_condition: Option<Condition>,
    pub witness: Option<Witness>,
    pub margin: Option<f64>,
}

/// The chains `E_1 ⊂ ... ⊂ E_{N-1}` and `E'_1 ⊂ ... ⊂ E'_{N-1}`.
#[derive(Debug, Clone)]
pub struct FlagPair<S> {
    e_chain: Vec<Subspace<S>>,
    e_prime_chain: Vec<Subspace<S>>,
}

impl<S: Scalar> FlagPair<S> {
    /// `E_i` for `i` in `[1, N-1]`.
    pub fn e(&self, i: usize) -> &Subspace<S> {
        &self.e_chain[i - 1]
    }

    /// `E'_i` for `i` in `[1, N-1]`.
    pub fn e_prime(&self, i: usize) -> &Subspace<S> {
        &self.e_prime_chain[i - 1]
    }

    pub fn len(&self) -> usize {
        self.e_chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e_chain.is_empty()
    }
}

/// Rows of the coordinate subspace `V_I` in ambient dimension `n`.
fn coordinate_rows<S: Scalar>(set: &IndexSet, n: usize) -> Matrix<S> {
    let mut rows = Matrix::zeros(set.len(), n);
    for (r, &i) in set.elements().iter().enumerate() {
        rows[(r, i - 1)] = S::one();
    }
    rows
}

/// `dim(E ∩ V_I) = k + |I| - rank [E.rows; V_I]`.
pub fn intersection_dim<S: Scalar>(e: &Subspace<S>, set: &IndexSet) -> usize {
    if set.is_empty() {
        return 0;
    }
    let stacked = e.rows().vstack(&coordinate_rows(set, e.n())).expect("same ambient");
    e.k() + set.len() - stacked.rank(e.tolerance())
}

/// Outcome of the `Gr'` membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrPrimeVerdict {
    pub member: bool,
    /// First `I` in lexicographic order with `E ∩ V_I != 0`.
    pub witness: Option<IndexSet>,
}

/// Both `Gr'` criteria evaluated side by side for every `I`, with no
/// consistency enforcement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrPrimeScan {
    /// Every `E ∩ V_I` is zero (rank test).
    pub rank_member: bool,
    /// Every Plücker coordinate is nonzero (minor test).
    pub minor_member: bool,
    /// First `I` with `E ∩ V_I != 0`.
    pub witness: Option<IndexSet>,
    /// Sets where the two criteria disagree about `I` and `[1, N] \ I`.
    pub mismatches: Vec<IndexSet>,
}

pub fn scan_gr_prime<S: Scalar>(e: &Subspace<S>) -> Result<GrPrimeScan> {
    let n = e.n();
    let p = plucker_vector(e);
    let scale = p.scale();
    let mut scan = GrPrimeScan { rank_member: true, minor_member: true, witness: None, mismatches: Vec::new() };
    for set in enumerate_index_sets(n, n - e.k())? {
        let meets = intersection_dim(e, &set) > 0;
        let complement = set.complement(n);
        let vanishes = p.get(&complement).expect("complement has size k").is_negligible(scale, p.tolerance());
        if meets != vanishes {
            scan.mismatches.push(set.clone());
        }
        scan.minor_member &= !vanishes;
        if meets {
            scan.rank_member = false;
            if scan.witness.is_none() {
                scan.witness = Some(set);
            }
        }
    }
    Ok(scan)
}

/// Whether `E ∩ V_I = 0` for every `I` with `|I| = N - k`.
///
/// Each `I` is also checked against the minor criterion: `E ∩ V_I != 0`
/// exactly when the coordinate at `[1, N] \ I` vanishes. In exact mode a
/// disagreement is reported as [`Error::Internal`].
pub fn in_gr_prime<S: Scalar>(e: &Subspace<S>) -> Result<GrPrimeVerdict> {
    let scan = scan_gr_prime(e)?;
    if S::EXACT {
        if let Some(set) = scan.mismatches.first() {
            return Err(Error::Internal(format!(
                "rank and minor tests disagree on E ∩ V_{set} versus p_{}",
                set.complement(e.n())
            )));
        }
    }
    Ok(GrPrimeVerdict { member: scan.rank_member, witness: scan.witness })
}

/// Sign flags of `±p` with the first nonzero coordinate made positive.
pub fn sign_classify<S: Scalar>(p: &PluckerVector<S>) -> Result<SignClass> {
    let p = normalize_sign(p)?;
    let scale = p.scale();
    let tol = p.tolerance();
    let mut class = SignClass { positive: true, nonnegative: true, all_nonzero: true, margin: None };
    for c in p.coords() {
        if c.is_negligible(scale, tol) {
            class.positive = false;
            class.all_nonzero = false;
        } else if !c.is_positive_beyond(scale, tol) {
            class.positive = false;
            class.nonnegative = false;
        }
    }
    if !S::EXACT {
        class.margin = Some(p.to_f64().margin());
    }
    Ok(class)
}

/// First coordinate, in lexicographic order, that is not strictly positive
/// after sign normalization.
fn first_bad_coordinate<S: Scalar>(p: &PluckerVector<S>) -> Option<IndexSet> {
    let p = normalize_sign(p).ok()?;
    let scale = p.scale();
    let bad = p
        .entries()
        .find(|(_, c)| !c.is_positive_beyond(scale, p.tolerance()))
        .map(|(set, _)| set);
    bad
}

/// `E ∩ V_J` for a coordinate subspace, generated by `c * E.rows` with `c`
/// in the kernel of the columns of `E.rows` outside `J`.
fn intersect_coordinate<S: Scalar>(e: &Subspace<S>, set: &IndexSet, dim: usize) -> Result<Subspace<S>> {
    let outside = set.complement(e.n()).zero_based();
    let all_rows: Vec<usize> = (0..e.k()).collect();
    let constraints = e.rows().select(&all_rows, &outside).transpose();
    let kernel = constraints.nullspace(e.tolerance());
    if kernel.len() != dim {
        return Err(Error::Internal(format!(
            "E ∩ V_{set} has dimension {}, expected {dim}",
            kernel.len()
        )));
    }
    let coeffs = Matrix::from_rows(kernel)?;
    Subspace::with_tolerance(coeffs.mul(e.rows())?, e.tolerance())
}

/// `E ⊕ V_J`.
fn sum_coordinate<S: Scalar>(e: &Subspace<S>, set: &IndexSet) -> Result<Subspace<S>> {
    let rows = e.rows().vstack(&coordinate_rows(set, e.n()))?;
    Subspace::with_tolerance(rows, e.tolerance()).map_err(|err| match err {
        Error::RankDeficient { expected, found } => Error::Internal(format!(
            "E + V_{set} has dimension {found}, expected a direct sum of dimension {expected}"
        )),
        other => other,
    })
}

fn check_i_ii<S: Scalar>(e: &Subspace<S>) -> Option<Condition> {
    let (n, k) = (e.n(), e.k());
    if intersection_dim(e, &IndexSet::interval(1, n - k)) != 0 {
        Some(Condition::I)
    } else if intersection_dim(e, &IndexSet::interval(k + 1, n)) != 0 {
        Some(Condition::II)
    } else {
        None
    }
}

/// Builds both flags. Conditions (i) and (ii) are checked first; they are
/// what forces `dim E_i = dim E'_i = i`.
///
/// * `E_i = E ∩ V_[1, N-k+i]` and `E'_i = E ∩ V_[k-i+1, N]` for `i < k`,
/// * `E_k = E'_k = E`,
/// * `E_i = E ⊕ V_[1, i-k]` and `E'_i = E ⊕ V_[N-i+k+1, N]` for `i > k`.
pub fn build_flags<S: Scalar>(e: &Subspace<S>) -> Result<FlagPair<S>> {
    if let Some(failed) = check_i_ii(e) {
        return Err(Error::PreconditionViolation(failed));
    }
    let (n, k) = (e.n(), e.k());
    let mut e_chain = Vec::with_capacity(n - 1);
    let mut e_prime_chain = Vec::with_capacity(n - 1);
    for i in 1..n {
        if i < k {
            e_chain.push(intersect_coordinate(e, &IndexSet::interval(1, n - k + i), i)?);
            e_prime_chain.push(intersect_coordinate(e, &IndexSet::interval(k - i + 1, n), i)?);
        } else if i == k {
            e_chain.push(e.clone());
            e_prime_chain.push(e.clone());
        } else {
            e_chain.push(sum_coordinate(e, &IndexSet::interval(1, i - k))?);
            e_prime_chain.push(sum_coordinate(e, &IndexSet::interval(n - i + k + 1, n))?);
        }
    }
    Ok(FlagPair { e_chain, e_prime_chain })
}

/// Outcome of the genericity sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericVerdict {
    pub generic: bool,
    /// First failing condition in the order (i), (ii), (iii) by `i`, (iv) by `i`.
    pub failed: Option<Condition>,
}

fn stacked_rank<S: Scalar>(a: &Subspace<S>, b: &Subspace<S>) -> usize {
    a.rows().vstack(b.rows()).expect("same ambient").rank(a.tolerance())
}

/// Conditions (i)-(iv). Condition (iv) is tested as
/// `dim(E'_{k+i} ∩ E_{N-i}) = k` together with `E ⊆ E'_{k+i}` and `E ⊆ E_{N-i}`.
pub fn is_generic<S: Scalar>(e: &Subspace<S>) -> Result<GenericVerdict> {
    let fail = |c| Ok(GenericVerdict { generic: false, failed: Some(c) });
    if let Some(c) = check_i_ii(e) {
        return fail(c);
    }
    let (n, k) = (e.n(), e.k());
    let flags = build_flags(e)?;
    for i in 1..k {
        // dim E'_i + dim E_{k-i} = k, so the intersection is zero iff the sum has rank k
        if stacked_rank(flags.e_prime(i), flags.e(k - i)) != k {
            return fail(Condition::III(i));
        }
    }
    for i in 1..n.saturating_sub(k) {
        let upper = flags.e_prime(k + i);
        let lower = flags.e(n - i);
        let meet_dim = (k + i) + (n - i) - stacked_rank(upper, lower);
        if meet_dim != k || !e.is_contained_in(upper) || !e.is_contained_in(lower) {
            return fail(Condition::IV(i));
        }
    }
    Ok(GenericVerdict { generic: true, failed: None })
}

/// All four flags, with witnesses. In exact mode `all_nonzero ⇒ generic`
/// is enforced and a violation is an [`Error::Internal`].
pub fn classify<S: Scalar>(e: &Subspace<S>) -> Result<Classification> {
    let p = plucker_vector(e);
    let sign = sign_classify(&p)?;
    let gr_prime = in_gr_prime(e)?;
    let generic = is_generic(e)?;

    if S::EXACT && gr_prime.member != sign.all_nonzero {
        return Err(Error::Internal(
            "rank-based and minor-based membership in Gr' disagree".into(),
        ));
    }
    let all_nonzero = sign.all_nonzero;

    let witness = if !all_nonzero {
        gr_prime
            .witness
            .map(Witness::Intersection)
            .or_else(|| first_bad_coordinate(&p).map(Witness::Coordinate))
    } else if !sign.positive {
        first_bad_coordinate(&p).map(Witness::Coordinate)
    } else {
        None
    };

    if S::EXACT && all_nonzero && !generic.generic {
        return Err(Error::Internal(format!(
            "subspace has all Plücker coordinates nonzero but fails genericity condition ({})",
            generic.failed.map_or_else(|| "?".into(), |c| format!("{c}"))
        )));
    }

    Ok(Classification {
        positive: sign.positive,
        nonnegative: sign.nonnegative,
        all_nonzero,
        generic: generic.generic,
        failed_condition: generic.failed,
        witness,
        margin: sign.margin,
    })
}
