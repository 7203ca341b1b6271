//! Subspaces as row spaces, their Plücker vectors, and the matrices induced
//! on the exterior power `Λ^k V`.
//!
//! Conventions: vectors of `V` are coordinate columns against `e_1, ..., e_N`,
//! a subspace is the row space of a `k x N` generator matrix, and a linear map
//! `g` acts on a subspace by `rows -> rows * g^T`. Plücker coordinates are
//! listed in lexicographic order of their column sets.

use alloc::format;
use alloc::vec::Vec;

use crate::index_set::{binomial, enumerate_index_sets, IndexSet};
use crate::{Error, Matrix, Result, Scalar, ScalarMode, DEFAULT_TOLERANCE};

/// The pair `(N, k)`: `dim V = N >= 2` and `1 <= k <= N - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ambient {
    n: usize,
    k: usize,
}

impl Ambient {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArguments(format!("N = {n} must be at least 2")));
        }
        if k == 0 || k >= n {
            return Err(Error::InvalidArguments(format!("k = {k} must lie in [1, {}]", n - 1)));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `C(N, k)`, the number of Plücker coordinates.
    pub fn plucker_len(&self) -> usize {
        binomial(self.n, self.k)
    }

    pub fn index_sets(&self) -> Vec<IndexSet> {
        enumerate_index_sets(self.n, self.k).expect("k <= n by construction")
    }
}

/// A point of `Gr(k, N)` stored as a full-rank `k x N` generator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<S> {
    ambient: Ambient,
    rows: Matrix<S>,
    tol: f64,
}

impl<S: Scalar> Subspace<S> {
    /// Row space of `rows`, with the default floating tolerance.
    pub fn new(rows: Matrix<S>) -> Result<Self> {
        Self::with_tolerance(rows, DEFAULT_TOLERANCE)
    }

    /// `tol` is the relative zero tolerance of floating-mode tests; exact
    /// subspaces ignore it.
    pub fn with_tolerance(rows: Matrix<S>, tol: f64) -> Result<Self> {
        if !(tol >= 0.0) {
            return Err(Error::InvalidArguments(format!("tolerance {tol} must be nonnegative")));
        }
        let ambient = Ambient::new(rows.cols(), rows.rows())?;
        let rank = rows.rank(tol);
        if rank != ambient.k {
            return Err(Error::RankDeficient { expected: ambient.k, found: rank });
        }
        Ok(Self { ambient, rows, tol })
    }

    /// The coordinate subspace `V_I`.
    pub fn coordinate(set: &IndexSet, n: usize) -> Result<Self> {
        let mut rows = Matrix::zeros(set.len(), n);
        for (r, &i) in set.elements().iter().enumerate() {
            if i == 0 || i > n {
                return Err(Error::InvalidArguments(format!("index {i} outside [1, {n}]")));
            }
            rows[(r, i - 1)] = S::one();
        }
        Self::new(rows)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn n(&self) -> usize {
        self.ambient.n
    }

    pub fn k(&self) -> usize {
        self.ambient.k
    }

    pub fn rows(&self) -> &Matrix<S> {
        &self.rows
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn mode(&self) -> ScalarMode {
        if S::EXACT {
            ScalarMode::Exact
        } else {
            ScalarMode::Floating { tolerance: self.tol }
        }
    }

    pub fn to_f64(&self) -> Subspace<f64> {
        Subspace { ambient: self.ambient, rows: self.rows.to_f64(), tol: self.tol }
    }

    /// Row space of `rows * g^T`.
    pub fn transform(&self, g: &Matrix<S>) -> Result<Self> {
        if !g.is_square() || g.rows() != self.n() {
            return Err(Error::InvalidArguments(format!(
                "a {}x{} matrix cannot act on subspaces of dimension-{} space",
                g.rows(),
                g.cols(),
                self.n()
            )));
        }
        Self::with_tolerance(self.rows.mul(&g.transpose())?, self.tol)
    }

    /// `self ⊆ other`, decided by rank.
    pub fn is_contained_in(&self, other: &Self) -> bool {
        self.n() == other.n()
            && other.rows.vstack(&self.rows).expect("same ambient").rank(self.tol) == other.k()
    }

    /// Equality of row spaces.
    pub fn same_as(&self, other: &Self) -> bool {
        self.k() == other.k() && self.is_contained_in(other)
    }
}

impl Subspace<f64> {
    /// Same row space, orthonormal generators.
    pub fn orthonormalized(&self) -> Self {
        Self { ambient: self.ambient, rows: self.rows.orthonormal_rows(), tol: self.tol }
    }
}

/// Coordinates of `Λ^k E` against the basis `e_I`, lexicographic in `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct PluckerVector<S> {
    ambient: Ambient,
    coords: Vec<S>,
    tol: f64,
}

impl<S: Scalar> PluckerVector<S> {
    /// Wraps raw coordinates. `tol` is the relative zero tolerance used by
    /// sign tests in floating mode.
    pub fn from_coords(ambient: Ambient, coords: Vec<S>, tol: f64) -> Result<Self> {
        if coords.len() != ambient.plucker_len() {
            return Err(Error::InvalidArguments(format!(
                "{} coordinates given, Gr({}, {}) needs {}",
                coords.len(),
                ambient.k,
                ambient.n,
                ambient.plucker_len()
            )));
        }
        if coords.iter().all(|c| *c == S::zero()) {
            return Err(Error::InvalidState("all Plücker coordinates vanish".into()));
        }
        Ok(Self { ambient, coords, tol })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn get(&self, set: &IndexSet) -> Option<&S> {
        if set.len() != self.ambient.k || set.elements().last().is_some_and(|&e| e > self.ambient.n)
        {
            return None;
        }
        self.coords.get(set.lex_rank(self.ambient.n))
    }

    /// Index sets paired with their coordinates, in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (IndexSet, &S)> {
        self.ambient.index_sets().into_iter().zip(self.coords.iter())
    }

    /// Largest coordinate magnitude, the scale for relative zero tests.
    pub fn scale(&self) -> f64 {
        self.coords.iter().map(S::magnitude).fold(0.0, f64::max)
    }

    pub fn is_negligible(&self, c: &S) -> bool {
        c.is_negligible(self.scale(), self.tol)
    }

    pub fn to_f64(&self) -> PluckerVector<f64> {
        PluckerVector {
            ambient: self.ambient,
            coords: self.coords.iter().map(S::to_f64).collect(),
            tol: self.tol,
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            ambient: self.ambient,
            coords: self.coords.iter().cloned().map(|c| -c).collect(),
            tol: self.tol,
        }
    }
}

impl PluckerVector<f64> {
    pub fn norm(&self) -> f64 {
        crate::matrix::norm(&self.coords)
    }

    /// Unit-length representative with the same sign.
    pub fn normalized(&self) -> Self {
        let len = self.norm();
        Self {
            ambient: self.ambient,
            coords: self.coords.iter().map(|c| c / len).collect(),
            tol: self.tol,
        }
    }

    /// `min |p_I| / max |p_I|`.
    pub fn margin(&self) -> f64 {
        let min = self.coords.iter().map(|c| c.abs()).fold(f64::INFINITY, f64::min);
        min / self.scale()
    }
}

/// All maximal minors of the generator matrix.
pub fn plucker_vector<S: Scalar>(e: &Subspace<S>) -> PluckerVector<S> {
    let rows: Vec<usize> = (0..e.k()).collect();
    let coords = e
        .ambient
        .index_sets()
        .iter()
        .map(|cols| S::determinant(&e.rows.select(&rows, &cols.zero_based())))
        .collect();
    PluckerVector { ambient: e.ambient, coords, tol: e.tol }
}

/// `±p` with the first nonzero coordinate (lexicographic order) positive.
pub fn normalize_sign<S: Scalar>(p: &PluckerVector<S>) -> Result<PluckerVector<S>> {
    let scale = p.scale();
    let first = p
        .coords
        .iter()
        .find(|c| !c.is_negligible(scale, p.tol))
        .ok_or_else(|| Error::InvalidState("all Plücker coordinates vanish".into()))?;
    if first.is_positive_beyond(scale, p.tol) {
        Ok(p.clone())
    } else {
        Ok(p.negated())
    }
}

/// The `k`-th compound of a square matrix: entry `(J, I)` is the minor on
/// rows `J` and columns `I`. It is the matrix of `Λ^k g` in the `e_I` basis.
pub fn compound_matrix<S: Scalar>(g: &Matrix<S>, k: usize) -> Result<Matrix<S>> {
    let n = g.rows();
    if !g.is_square() {
        return Err(Error::InvalidArguments(format!(
            "compound of a non-square {}x{} matrix",
            g.rows(),
            g.cols()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArguments(format!("order {k} outside [1, {n}]")));
    }
    let sets: Vec<Vec<usize>> =
        enumerate_index_sets(n, k)?.iter().map(IndexSet::zero_based).collect();
    let m = sets.len();
    let mut out = Matrix::zeros(m, m);
    for (jr, rows) in sets.iter().enumerate() {
        for (ic, cols) in sets.iter().enumerate() {
            out[(jr, ic)] = S::determinant(&g.select(rows, cols));
        }
    }
    Ok(out)
}

/// The additive compound: the derivation `a` induces on `Λ^k V`,
/// `e_{i_1} ∧ ... ∧ e_{i_k} -> Σ_s e_{i_1} ∧ ... ∧ a e_{i_s} ∧ ... ∧ e_{i_k}`.
///
/// It satisfies `compound(exp(a), k) = exp(additive_compound(a, k))`. For a
/// nonnegative tridiagonal `a` it is itself nonnegative, so its exponential
/// can be summed without cancellation.
pub fn additive_compound<S: Scalar>(a: &Matrix<S>, k: usize) -> Result<Matrix<S>> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::InvalidArguments(format!(
            "additive compound of a non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArguments(format!("order {k} outside [1, {n}]")));
    }
    let sets = enumerate_index_sets(n, k)?;
    let mut out = Matrix::<S>::zeros(sets.len(), sets.len());
    for (col, set) in sets.iter().enumerate() {
        for &i in set.elements() {
            for j in 1..=n {
                let coeff = &a[(j - 1, i - 1)];
                if *coeff == S::zero() {
                    continue;
                }
                if j == i {
                    let v = out[(col, col)].clone() + coeff.clone();
                    out[(col, col)] = v;
                    continue;
                }
                if set.contains(j) {
                    continue;
                }
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                let between = set.elements().iter().filter(|&&x| x > lo && x < hi).count();
                let mut target: Vec<usize> =
                    set.elements().iter().map(|&x| if x == i { j } else { x }).collect();
                target.sort_unstable();
                let row = IndexSet::new(target, n)?.lex_rank(n);
                let term = if between % 2 == 0 { coeff.clone() } else { -coeff.clone() };
                let v = out[(row, col)].clone() + term;
                out[(row, col)] = v;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use alloc::vec;
    use num_bigint::BigInt;

    fn q(x: i64) -> Rational {
        Rational::from_integer(BigInt::from(x))
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    fn ints(p: &PluckerVector<Rational>) -> Vec<i64> {
        p.coords().iter().map(|c| i64::try_from(c.to_integer()).unwrap()).collect()
    }

    #[test]
    fn ambient_bounds() {
        assert!(Ambient::new(1, 1).is_err());
        assert!(Ambient::new(4, 0).is_err());
        assert!(Ambient::new(4, 4).is_err());
        assert_eq!(Ambient::new(4, 2).unwrap().plucker_len(), 6);
    }

    #[test]
    fn rank_deficient_rejected() {
        let err = Subspace::new(qm(&[&[1, 2, 3], &[2, 4, 6]])).unwrap_err();
        assert_eq!(err, Error::RankDeficient { expected: 2, found: 1 });
    }

    #[test]
    fn identity_block() {
        let e = Subspace::<Rational>::coordinate(&IndexSet::interval(1, 2), 4).unwrap();
        assert_eq!(ints(&plucker_vector(&e)), vec![1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn vandermonde_hand_oracle() {
        // minors of [[1,1,1,1],[1,2,4,8]]: 2-1, 4-1, 8-1, 4-2, 8-2, 8-4
        let e = Subspace::new(qm(&[&[1, 1, 1, 1], &[1, 2, 4, 8]])).unwrap();
        assert_eq!(ints(&plucker_vector(&e)), vec![1, 3, 7, 2, 6, 4]);
    }

    #[test]
    fn determinant_two_doubles_coordinates() {
        let rows = qm(&[&[1, 1, 1, 1], &[1, 2, 4, 8]]);
        let m = qm(&[&[1, 1], &[-1, 1]]);
        let e = Subspace::new(m.mul(&rows).unwrap()).unwrap();
        assert_eq!(ints(&plucker_vector(&e)), vec![2, 6, 14, 4, 12, 8]);
    }

    #[test]
    fn sign_normalization() {
        let amb = Ambient::new(3, 1).unwrap();
        let s = libm::sqrt(2.0);
        let p = PluckerVector::from_coords(amb, vec![-1.0, -s, -1.0], 1e-9).unwrap();
        assert_eq!(normalize_sign(&p).unwrap().coords(), &[1.0, s, 1.0]);
        let z = PluckerVector::from_coords(amb, vec![q(0), q(0), q(-5)], 0.0).unwrap();
        assert_eq!(normalize_sign(&z).unwrap().coords(), &[q(0), q(0), q(5)]);
        let amb42 = Ambient::new(4, 2).unwrap();
        let v = PluckerVector::from_coords(amb42, [1, 3, 7, 2, 6, 4].map(q).to_vec(), 0.0).unwrap();
        assert_eq!(normalize_sign(&v).unwrap(), v);
    }

    #[test]
    fn zero_vector_rejected() {
        let amb = Ambient::new(3, 1).unwrap();
        assert!(matches!(
            PluckerVector::from_coords(amb, vec![0.0; 3], 1e-9),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn compound_edge_orders() {
        let g = qm(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(compound_matrix(&g, 1).unwrap(), g);
        let top = compound_matrix(&g, 3).unwrap();
        assert_eq!(top, Matrix::from_rows(vec![vec![g.determinant().unwrap()]]).unwrap());
        assert_eq!(compound_matrix(&qm(&[&[1, 1], &[1, 2]]), 2).unwrap(), qm(&[&[1]]));
        assert!(compound_matrix(&qm(&[&[1, 2, 3]]), 1).is_err());
        assert!(compound_matrix(&g, 4).is_err());
    }

    #[test]
    fn additive_compound_is_derivative_of_compound() {
        // compound(I + t a, k) is a polynomial of degree <= k in t with
        // linear coefficient additive_compound(a, k); recover it by exact
        // Lagrange interpolation at t = 0..=k.
        let a = qm(&[&[1, -2, 0, 3], &[2, 0, 1, -1], &[0, 5, -3, 2], &[1, 1, 1, 0]]);
        for k in 1..=4 {
            let samples: Vec<(Rational, Matrix<Rational>)> = (0..=k as i64)
                .map(|t| {
                    let m = Matrix::identity(4).map(|x: &Rational| x.clone());
                    let shifted = Matrix::new(
                        4,
                        4,
                        (0..16)
                            .map(|idx| m[(idx / 4, idx % 4)].clone() + q(t) * a[(idx / 4, idx % 4)].clone())
                            .collect(),
                    )
                    .unwrap();
                    (q(t), compound_matrix(&shifted, k).unwrap())
                })
                .collect();
            let size = binomial(4, k);
            let mut linear = Matrix::<Rational>::zeros(size, size);
            // d/dt of the Lagrange basis at t = 0
            for (j, (tj, mj)) in samples.iter().enumerate() {
                let mut deriv = q(0);
                for (m_idx, (tm, _)) in samples.iter().enumerate() {
                    if m_idx == j {
                        continue;
                    }
                    let mut term = q(1) / (tj.clone() - tm.clone());
                    for (l, (tl, _)) in samples.iter().enumerate() {
                        if l != j && l != m_idx {
                            term = term * (q(0) - tl.clone()) / (tj.clone() - tl.clone());
                        }
                    }
                    deriv = deriv + term;
                }
                for r in 0..size {
                    for c in 0..size {
                        let v = linear[(r, c)].clone() + deriv.clone() * mj[(r, c)].clone();
                        linear[(r, c)] = v;
                    }
                }
            }
            assert_eq!(additive_compound(&a, k).unwrap(), linear, "k = {k}");
        }
    }

    #[test]
    fn transform_and_containment() {
        let e = Subspace::new(qm(&[&[1, 0, 1]])).unwrap();
        let swap = qm(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        let moved = e.transform(&swap).unwrap();
        assert_eq!(moved.rows(), &qm(&[&[0, 1, 1]]));
        let plane = Subspace::new(qm(&[&[1, 0, 1], &[0, 1, 0]])).unwrap();
        assert!(e.is_contained_in(&plane));
        assert!(!moved.is_contained_in(&plane));
        assert!(plane.same_as(&Subspace::new(qm(&[&[1, 1, 1], &[0, 2, 0]])).unwrap()));
    }
}
