//! Seeded generators of test subspaces, one per stratum: Vandermonde (positive),
//! coordinate (boundary), random rational (anything), flowed coordinate
//! (positive, floating) and mixed sign (generic but not positive).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::{additive_compound, plucker_vector, Ambient, PluckerVector, Subspace};
use crate::membership::{sign_classify, SignClass};
use crate::tp_flow::{apply_flow, expm, matrix_a};
use crate::{Error, IndexSet, Matrix, Rational, Result, Scalar};

const RANK_RETRIES: usize = 100;
const MIXED_SIGN_RETRIES: usize = 1000;

/// Entry bound used by mixed-sign sampling unless overridden.
pub const DEFAULT_ENTRY_BOUND: i64 = 3;

/// Seed of sample `index` under `master` (splitmix64 finalizer over both).
pub fn sample_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rows `t_i^(j-1)`. Requires `0 < t_1 < ... < t_k`; positivity of every
/// Plücker coordinate is re-checked exactly.
pub fn vandermonde_subspace(nodes: &[Rational], n: usize) -> Result<Subspace<Rational>> {
    if nodes.is_empty() {
        return Err(Error::InvalidArguments("at least one node is required".into()));
    }
    if nodes.iter().any(|t| *t <= Rational::zero()) {
        return Err(Error::InvalidArguments("nodes must be positive".into()));
    }
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArguments("nodes must be strictly increasing".into()));
    }
    Ambient::new(n, nodes.len())?;
    let rows = nodes
        .iter()
        .map(|t| {
            let mut power = Rational::one();
            (0..n)
                .map(|_| {
                    let v = power.clone();
                    power = power.clone() * t.clone();
                    v
                })
                .collect()
        })
        .collect();
    let e = Subspace::new(Matrix::from_rows(rows)?)?;
    if !sign_classify(&plucker_vector(&e))?.positive {
        return Err(Error::Internal("Vandermonde subspace with a non-positive Plücker coordinate".into()));
    }
    Ok(e)
}

/// Denominator of the node grid. Prime, so a node and its reciprocal are
/// both on the grid only at 1; reciprocal-closed node sets give subspaces
/// fixed by the reversal `i -> N + 1 - i`, which miss the slowest flow mode.
const NODE_DENOMINATOR: i64 = 1009;

/// `k` distinct nodes drawn uniformly from `{1/d, 2/d, ..., 4}` with
/// `d = 1009`, sorted.
pub fn random_nodes(k: usize, rng: &mut impl Rng) -> Vec<Rational> {
    let m = 4 * NODE_DENOMINATOR as usize;
    let mut picks: Vec<usize> = sample_indices(rng, m, k).into_iter().map(|i| i + 1).collect();
    picks.sort_unstable();
    picks
        .into_iter()
        .map(|i| Rational::from_i64(i as i64) / Rational::from_i64(NODE_DENOMINATOR))
        .collect()
}

/// `V_I`, whose Plücker vector is the indicator of `I`.
pub fn coordinate_subspace<S: Scalar>(set: &IndexSet, n: usize) -> Result<Subspace<S>> {
    Ambient::new(n, set.len())?;
    Subspace::coordinate(set, n)
}

/// Uniform `k`-subset of `[1, n]`.
pub fn random_index_set(n: usize, k: usize, rng: &mut impl Rng) -> Result<IndexSet> {
    let mut picks: Vec<usize> = sample_indices(rng, n, k).into_iter().map(|i| i + 1).collect();
    picks.sort_unstable();
    IndexSet::new(picks, n)
}

/// Integer entries uniform in `[-bound, bound]`, redrawn until of rank `k`.
pub fn random_rational_subspace(n: usize, k: usize, entry_bound: i64, seed: u64) -> Result<Subspace<Rational>> {
    random_rational_with(n, k, entry_bound, &mut rng_from_seed(seed))
}

fn random_rational_with(n: usize, k: usize, entry_bound: i64, rng: &mut impl Rng) -> Result<Subspace<Rational>> {
    if entry_bound < 1 {
        return Err(Error::InvalidArguments(format!("entry bound {entry_bound} must be at least 1")));
    }
    Ambient::new(n, k)?;
    for _ in 0..RANK_RETRIES {
        let rows = (0..k)
            .map(|_| (0..n).map(|_| Rational::from_i64(rng.random_range(-entry_bound..=entry_bound))).collect())
            .collect();
        match Subspace::new(Matrix::from_rows(rows)?) {
            Ok(e) => return Ok(e),
            Err(Error::RankDeficient { .. }) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::GenerationFailure(RANK_RETRIES))
}

/// A rational subspace whose Plücker coordinates are all nonzero with both
/// signs present.
pub fn mixed_sign_subspace(n: usize, k: usize, entry_bound: i64, seed: u64) -> Result<Subspace<Rational>> {
    let mut rng = rng_from_seed(seed);
    for _ in 0..MIXED_SIGN_RETRIES {
        let e = random_rational_with(n, k, entry_bound, &mut rng)?;
        let sign = sign_classify(&plucker_vector(&e))?;
        if sign.all_nonzero && !sign.positive {
            return Ok(e);
        }
    }
    Err(Error::GenerationFailure(MIXED_SIGN_RETRIES))
}

/// `g_r V_I` with an accurately computed Plücker vector.
///
/// `subspace` carries generators for downstream use. `plucker` is
/// `exp(r D_k)` applied to the indicator of `I`, where `D_k` is the additive
/// compound of `A`: the matrix and the vector are nonnegative, so every
/// coordinate keeps full relative accuracy however small it is, and signs are
/// read off with zero tolerance.
#[derive(Debug, Clone)]
pub struct FlowedPoint {
    pub subspace: Subspace<f64>,
    pub plucker: PluckerVector<f64>,
    pub sign: SignClass,
}

/// [`flowed_coordinate_subspace`] without the positivity guarantee enforced.
pub fn flow_coordinate(set: &IndexSet, n: usize, r: f64) -> Result<FlowedPoint> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArguments(format!("flow time r = {r} must be positive")));
    }
    let ambient = Ambient::new(n, set.len())?;
    let subspace = apply_flow(&coordinate_subspace::<f64>(set, n)?, r)?;
    let d = additive_compound(matrix_a(n)?.matrix(), ambient.k())?;
    let propagator = expm(&d.map(|v| v * r))?;
    let column = set.lex_rank(n);
    let coords = (0..propagator.rows()).map(|row| propagator[(row, column)]).collect();
    let plucker = PluckerVector::from_coords(ambient, coords, 0.0)?;
    let sign = sign_classify(&plucker)?;
    Ok(FlowedPoint { subspace, plucker, sign })
}

/// `g_r V_I`, guaranteed strictly positive.
pub fn flowed_coordinate_subspace(set: &IndexSet, n: usize, r: f64) -> Result<FlowedPoint> {
    let point = flow_coordinate(set, n, r)?;
    if !point.sign.positive {
        return Err(Error::Internal(format!(
            "flowed coordinate subspace g_{r} V_{set} has a non-positive Plücker coordinate"
        )));
    }
    Ok(point)
}

/// Serializable description of a generator call.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplerSpec {
    pub n: usize,
    pub k: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: SamplerKind,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum SamplerKind {
    /// Explicit nodes as rational literals (`"3"`, `"1/2"`); drawn from the
    /// seed when absent.
    Vandermonde {
        #[cfg_attr(feature = "serde", serde(default))]
        nodes: Option<Vec<String>>,
    },
    /// Drawn from the seed when absent.
    Coordinate {
        #[cfg_attr(feature = "serde", serde(default))]
        set: Option<IndexSet>,
    },
    RandomRational { entry_bound: i64 },
    FlowedCoordinate {
        #[cfg_attr(feature = "serde", serde(default))]
        set: Option<IndexSet>,
        r: f64,
    },
    MixedSign { entry_bound: i64 },
}

/// Output of a [`SamplerSpec`].
#[derive(Debug, Clone)]
pub enum Sample {
    Exact(Subspace<Rational>),
    Flowed(FlowedPoint),
}

impl Sample {
    pub fn to_f64(&self) -> Subspace<f64> {
        match self {
            Sample::Exact(e) => e.to_f64(),
            Sample::Flowed(p) => p.subspace.clone(),
        }
    }
}

fn parse_node(text: &str) -> Result<Rational> {
    Rational::from_str(text.trim()).map_err(|_| Error::InvalidArguments(format!("node {text:?} is not a rational literal")))
}

impl SamplerSpec {
    pub fn generate(&self) -> Result<Sample> {
        let ambient = Ambient::new(self.n, self.k)?;
        let mut rng = rng_from_seed(self.seed);
        let pick_set = |set: &Option<IndexSet>, rng: &mut ChaCha8Rng| -> Result<IndexSet> {
            match set {
                Some(s) if s.len() != ambient.k() => Err(Error::InvalidArguments(format!(
                    "index set {s} has {} elements, expected k = {}",
                    s.len(),
                    ambient.k()
                ))),
                Some(s) => IndexSet::new(s.elements().to_vec(), self.n),
                None => random_index_set(self.n, self.k, rng),
            }
        };
        match &self.kind {
            SamplerKind::Vandermonde { nodes } => {
                let nodes = match nodes {
                    Some(text) => text.iter().map(|t| parse_node(t)).collect::<Result<Vec<_>>>()?,
                    None => random_nodes(self.k, &mut rng),
                };
                if nodes.len() != self.k {
                    return Err(Error::InvalidArguments(format!(
                        "{} nodes given, expected k = {}",
                        nodes.len(),
                        self.k
                    )));
                }
                vandermonde_subspace(&nodes, self.n).map(Sample::Exact)
            }
            SamplerKind::Coordinate { set } => {
                coordinate_subspace(&pick_set(set, &mut rng)?, self.n).map(Sample::Exact)
            }
            SamplerKind::RandomRational { entry_bound } => {
                random_rational_with(self.n, self.k, *entry_bound, &mut rng).map(Sample::Exact)
            }
            SamplerKind::FlowedCoordinate { set, r } => {
                flowed_coordinate_subspace(&pick_set(set, &mut rng)?, self.n, *r).map(Sample::Flowed)
            }
            SamplerKind::MixedSign { entry_bound } => {
                mixed_sign_subspace(self.n, self.k, *entry_bound, self.seed).map(Sample::Exact)
            }
        }
    }
}
