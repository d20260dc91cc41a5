//! Lower bounds for maximum induced forests, and the machinery to earn them.
//!
//! The crate computes exact-rational lower bounds on the largest vertex set
//! of a graph inducing a forest (and the linear variants where every
//! component must be a short path), constructs witnesses matching the
//! triangle-free potential bound, runs lexicographic exchange searches whose
//! local optima certify the clique-sensitive bounds, and validates all of it
//! against a branch-and-bound exact solver at small orders.

#![forbid(unsafe_code)]

pub mod bitset;
pub mod bounds;
pub mod constructive;
pub mod exact;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod ratio;
pub mod regularize;
pub mod search;
