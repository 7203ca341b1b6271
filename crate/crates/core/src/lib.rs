//! Plücker coordinates, genericity tests and totally positive flows on the
//! real Grassmannian `Gr(k, N)`.
//!
//! A point `E` of the Grassmannian is stored as the row space of a `k x N`
//! generator matrix ([`Subspace`]). Its Plücker vector lists the `C(N, k)`
//! maximal minors in lexicographic order of column sets. The crate answers
//! four membership questions about `E`:
//!
//! * every Plücker coordinate positive (up to a global sign),
//! * every coordinate nonnegative,
//! * every coordinate nonzero, equivalently `E` meets every coordinate
//!   subspace of dimension `N - k` trivially,
//! * the flag genericity conditions (i)-(iv) built from `E` and the two
//!   standard coordinate flags.
//!
//! The [`tp_flow`] module drives a subspace along the flow `g_r = exp(rA)`
//! where `A` is the adjacency matrix of the path on `N` vertices, and the
//! [`verify`] module replays the flow and closure arguments numerically.
//!
//! Two scalar backends share one code path: exact rationals ([`Rational`])
//! for certification and `f64` for the transcendental flow.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line front end live in the `grasspos` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
pub mod exterior;
pub mod index_set;
pub mod matrix;
pub mod membership;
pub mod samplers;
pub mod scalar;
pub mod tp_flow;
pub mod verify;

pub use error::{Error, Result};
pub use exterior::{
    additive_compound, compound_matrix, normalize_sign, plucker_vector, Ambient, PluckerVector,
    Subspace,
};
pub use index_set::{binomial, enumerate_index_sets, IndexSet};
pub use matrix::Matrix;
pub use membership::{
    build_flags, classify, in_gr_prime, intersection_dim, is_generic, scan_gr_prime,
    sign_classify, Classification, Condition, FlagPair, GenericVerdict, GrPrimeScan,
    GrPrimeVerdict, SignClass, Witness,
};
pub use scalar::{Rational, Scalar, ScalarMode, DEFAULT_TOLERANCE};
