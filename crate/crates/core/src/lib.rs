//! Skating System Single (SkS) and Bucklin voting for weighted elections.
//!
//! The crate is `no_std` (it needs `alloc`). It contains:
//!
//! * [`election`]: the election model, scoring primitives and validation,
//! * [`rules`]: staged tabulation for Bucklin and SkS with full traces,
//! * [`generators`]: the explicit election families used to separate the
//!   two rules, plus fixed fixture elections,
//! * [`axioms`]: executable axiom checkers and a seeded counterexample search,
//! * [`manipulation`] and [`control`]: decision solvers for coalitional
//!   manipulation and for control by deleting candidates / adding voters,
//!   each paired with a brute-force oracle.
//!
//! All iteration over candidates is in lexicographic order of their names, so
//! every result is deterministic.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod axioms;
pub mod control;
pub mod election;
mod error;
pub mod generators;
pub mod manipulation;
mod perm;
pub mod rules;
pub mod sampler;
mod tally;

pub use election::{Ballot, CandidateId, Election};
pub use error::{Error, Result};
pub use rules::{Outcome, Rule, StageRecord, TabulationTrace};
pub use tally::PositionCounts;

/// Node limit applied by the exhaustive solvers and oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum number of search nodes (ballot placements plus tabulations).
    pub node_limit: u64,
}

impl SearchLimits {
    pub const fn new(node_limit: u64) -> Self {
        SearchLimits { node_limit }
    }
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            node_limit: 20_000_000,
        }
    }
}

/// Whether an answer came from an exhaustively verified procedure or from a
/// polynomial candidate family whose completeness is only established at
/// desk scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Exhaustive,
    SketchFamily,
}
