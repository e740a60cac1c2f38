//! Portable seeded sampling.
//!
//! The random stream is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`; trial `t` of a search reads stream number `t`, so
//! trials are independent of each other and of how they are scheduled.
//! Everything built on top of the raw 64-bit outputs is spelled out here so
//! another implementation can reproduce a corpus bit for bit:
//!
//! * `below(n)`: draw `x = next_u64()` until `x < n * floor(2^64 / n)`,
//!   then return `x % n`.
//! * `range(lo, hi)` (inclusive): `lo + below(hi - lo + 1)`.
//! * `shuffle`: Fisher-Yates from the back; for `i = len-1 ..= 1`, swap
//!   `i` with `below(i + 1)`.
//! * `election(bounds)`: `m = range(min(2, max_m), max_m)`,
//!   `n = range(1, max_n)`; then for each ballot in order a shuffle of
//!   `[0, m)` followed by a weight `range(1, max_weight)`.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::election::{Ballot, CandidateId, Election};
use crate::generators::default_names;

pub struct Sampler {
    rng: ChaCha8Rng,
}

/// Size limits for sampled elections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ElectionBounds {
    pub max_m: usize,
    pub max_n: usize,
    pub max_weight: u64,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = (u64::MAX / n) * n;
        loop {
            let x = self.rng.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    /// Uniform on `[lo, hi]`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    pub fn permutation(&mut self, m: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..m).collect();
        self.shuffle(&mut p);
        p
    }

    pub fn election(&mut self, bounds: &ElectionBounds) -> Election {
        let max_m = bounds.max_m.max(1);
        let m = self.range(max_m.min(2) as u64, max_m as u64) as usize;
        let n = self.range(1, bounds.max_n.max(1) as u64) as usize;
        self.election_with(m, n, bounds.max_weight)
    }

    /// `n` uniformly random ballots over `m` candidates named by
    /// [`default_names`].
    pub fn election_with(&mut self, m: usize, n: usize, max_weight: u64) -> Election {
        let ballots = self.ballots(m, n, max_weight);
        Election::new(names(m), ballots).expect("sampled election is valid")
    }

    pub fn ballots(&mut self, m: usize, n: usize, max_weight: u64) -> Vec<Ballot> {
        (0..n)
            .map(|_| {
                let ranking = self.permutation(m);
                let weight = self.range(1, max_weight.max(1));
                Ballot::new(ranking, weight)
            })
            .collect()
    }
}

pub(crate) fn names(m: usize) -> Vec<CandidateId> {
    default_names(m)
        .into_iter()
        .map(|n| CandidateId::new(n).expect("generated name is a valid token"))
        .collect()
}
