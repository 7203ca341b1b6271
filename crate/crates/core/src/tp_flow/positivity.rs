use alloc::vec::Vec;

use crate::index_set::{enumerate_index_sets, IndexSet};
use crate::{Error, Matrix, Result, Scalar};

/// Absolute floor for floating-point minors: strict positivity means
/// `> TP_FLOOR`, nonnegativity means `>= -TP_FLOOR`. Exact mode uses 0.
pub const TP_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TotalPositivity<S> {
    pub holds: bool,
    pub min_minor: S,
    pub rows: IndexSet,
    pub cols: IndexSet,
}

/// Enumerates every minor of every order (`Σ_j C(N, j)^2` determinants) and
/// reports the smallest one. Limited to `N <= 8`.
pub fn is_totally_positive<S: Scalar>(m: &Matrix<S>, strict: bool) -> Result<TotalPositivity<S>> {
    if !m.is_square() {
        return Err(Error::InvalidArguments("total positivity needs a square matrix".into()));
    }
    let n = m.rows();
    if n > 8 {
        return Err(Error::SizeLimit(n));
    }
    if n == 0 {
        return Err(Error::InvalidArguments("empty matrix".into()));
    }
    let mut best: Option<(S, IndexSet, IndexSet)> = None;
    for order in 1..=n {
        let sets: Vec<IndexSet> = enumerate_index_sets(n, order)?;
        for rows in &sets {
            let r0 = rows.zero_based();
            for cols in &sets {
                let minor = S::determinant(&m.select(&r0, &cols.zero_based()));
                let smaller = match &best {
                    None => true,
                    Some((cur, _, _)) => (minor.clone() - cur.clone()).to_f64() < 0.0,
                };
                if smaller {
                    best = Some((minor, rows.clone(), cols.clone()));
                }
            }
        }
    }
    let (min_minor, rows, cols) = best.expect("at least one minor");
    let floor = if S::EXACT { 0.0 } else { TP_FLOOR };
    let v = min_minor.to_f64();
    let holds = if S::EXACT {
        let zero = S::zero();
        if strict {
            min_minor.is_positive_beyond(0.0, 0.0)
        } else {
            min_minor == zero || min_minor.is_positive_beyond(0.0, 0.0)
        }
    } else if strict {
        v > floor
    } else {
        v >= -floor
    };
    Ok(TotalPositivity { holds, min_minor, rows, cols })
}
