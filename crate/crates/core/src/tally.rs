use alloc::vec;
use alloc::vec::Vec;

use crate::election::{check_total, Ballot, Election};
use crate::error::Result;

/// Weight placed on each (candidate, position) pair.
///
/// Both rules only ever read cumulative scores and position sums, which are
/// prefix sums of this matrix, so solvers that add or remove ballots work on
/// it directly instead of rebuilding elections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionCounts {
    m: usize,
    // Row-major: weights[c * m + (position - 1)].
    weights: Vec<u64>,
    total: u64,
}

impl PositionCounts {
    pub fn new(m: usize) -> Self {
        PositionCounts {
            m,
            weights: vec![0; m * m],
            total: 0,
        }
    }

    pub fn from_election(election: &Election) -> Self {
        let mut counts = PositionCounts::new(election.num_candidates());
        for ballot in election.ballots() {
            counts.add(ballot.ranking(), ballot.weight());
        }
        counts
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn total_weight(&self) -> u64 {
        self.total
    }

    pub fn at(&self, candidate: usize, position: usize) -> u64 {
        self.weights[candidate * self.m + position - 1]
    }

    pub fn add(&mut self, ranking: &[usize], weight: u64) {
        debug_assert_eq!(ranking.len(), self.m);
        for (p, &c) in ranking.iter().enumerate() {
            self.weights[c * self.m + p] += weight;
        }
        self.total += weight;
    }

    pub fn add_ballot(&mut self, ballot: &Ballot) {
        self.add(ballot.ranking(), ballot.weight());
    }

    pub fn remove(&mut self, ranking: &[usize], weight: u64) {
        for (p, &c) in ranking.iter().enumerate() {
            self.weights[c * self.m + p] -= weight;
        }
        self.total -= weight;
    }

    /// Fails with `InvalidInstance` when the counts cannot be tabulated.
    pub fn check(&self) -> Result<()> {
        check_total(self.total, self.m)
    }
}
