//! Strictly increasing subsets of `[1, N]` and their lexicographic enumeration.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// A strictly increasing subset of `[1, N]` (1-based).
///
/// Index sets label the basis wedges `e_I` of the exterior power and the
/// coordinate subspaces `V_I` spanned by `e_i, i in I`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Validates that `elements` is strictly increasing and inside `[1, n]`.
    pub fn new(elements: Vec<usize>, n: usize) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArguments(format!(
                "index set {elements:?} is not strictly increasing"
            )));
        }
        if let Some(&bad) = elements.iter().find(|&&e| e == 0 || e > n) {
            return Err(Error::InvalidArguments(format!(
                "index {bad} lies outside [1, {n}]"
            )));
        }
        Ok(Self(elements))
    }

    /// The interval `[a, b]`; empty when `a > b`.
    pub fn interval(a: usize, b: usize) -> Self {
        if a > b {
            Self(Vec::new())
        } else {
            Self((a..=b).collect())
        }
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// `[1, n] \ self`.
    pub fn complement(&self, n: usize) -> Self {
        Self((1..=n).filter(|&i| !self.contains(i)).collect())
    }

    /// Zero-based positions, convenient for matrix indexing.
    pub fn zero_based(&self) -> Vec<usize> {
        self.0.iter().map(|&i| i - 1).collect()
    }

    /// Position of this set in the lexicographic list of all `|I|`-subsets of `[1, n]`.
    pub fn lex_rank(&self, n: usize) -> usize {
        let k = self.len();
        let mut rank = 0;
        let mut prev = 0;
        for (pos, &e) in self.0.iter().enumerate() {
            for skipped in prev + 1..e {
                rank += binomial(n - skipped, k - pos - 1);
            }
            prev = e;
        }
        rank
    }
}

/// Compact label: digits run together when every element is a single digit
/// (`{1,3}` prints as `13`), comma separated otherwise, `-` for the empty set.
impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        let compact = self.0.iter().all(|&e| e < 10);
        for (pos, e) in self.0.iter().enumerate() {
            if pos > 0 && !compact {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All `k`-subsets of `[1, n]` in lexicographic order.
pub fn enumerate_index_sets(n: usize, k: usize) -> Result<Vec<IndexSet>> {
    if k > n {
        return Err(Error::InvalidArguments(format!(
            "cannot choose {k} elements from [1, {n}]"
        )));
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut current: Vec<usize> = (1..=k).collect();
    loop {
        out.push(IndexSet(current.clone()));
        // rightmost position that can still advance
        let Some(pos) = (0..k).rev().find(|&p| current[p] < n - k + p + 1) else {
            break;
        };
        current[pos] += 1;
        for p in pos + 1..k {
            current[p] = current[p - 1] + 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lex_order_n4_k2() {
        let sets = enumerate_index_sets(4, 2).unwrap();
        let got: Vec<Vec<usize>> = sets.iter().map(|s| s.elements().to_vec()).collect();
        assert_eq!(
            got,
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
    }

    #[test]
    fn empty_choice() {
        let sets = enumerate_index_sets(3, 0).unwrap();
        assert_eq!(sets, vec![IndexSet::empty()]);
    }

    #[test]
    fn counts_match_brute_force() {
        // brute force: count bitmasks with the right popcount
        for n in 0..=9usize {
            for k in 0..=n {
                let brute = (0u32..1 << n).filter(|m| m.count_ones() as usize == k).count();
                assert_eq!(enumerate_index_sets(n, k).unwrap().len(), brute);
                assert_eq!(binomial(n, k), brute);
            }
        }
        assert_eq!(enumerate_index_sets(5, 2).unwrap().len(), 10);
    }

    #[test]
    fn too_many_elements_rejected() {
        assert!(matches!(enumerate_index_sets(3, 4), Err(Error::InvalidArguments(_))));
    }

    #[test]
    fn lex_rank_is_position() {
        for n in 1..=7 {
            for k in 0..=n {
                for (pos, s) in enumerate_index_sets(n, k).unwrap().iter().enumerate() {
                    assert_eq!(s.lex_rank(n), pos);
                }
            }
        }
    }

    #[test]
    fn validation() {
        assert!(IndexSet::new(vec![2, 1], 4).is_err());
        assert!(IndexSet::new(vec![1, 1], 4).is_err());
        assert!(IndexSet::new(vec![0, 2], 4).is_err());
        assert!(IndexSet::new(vec![1, 5], 4).is_err());
        assert!(IndexSet::new(vec![1, 4], 4).is_ok());
    }

    #[test]
    fn complement_and_labels() {
        let i = IndexSet::new(vec![2, 3], 5).unwrap();
        assert_eq!(i.complement(5).elements(), &[1, 4, 5]);
        assert_eq!(alloc::format!("{i}"), "23");
        let wide = IndexSet::new(vec![3, 11], 12).unwrap();
        assert_eq!(alloc::format!("{wide}"), "3,11");
        assert_eq!(IndexSet::interval(3, 2), IndexSet::empty());
    }
}
