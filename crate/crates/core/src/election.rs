//! Election model: candidates, weighted strict rankings, and the per-stage
//! scoring primitives every rule is built from.
//!
//! Candidates are stored sorted by name and referred to by their index in
//! that order. Positions are 1-based.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A candidate name: a nonempty token without whitespace or any of
/// `>`, `,`, `:`, `#`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId(String);

impl CandidateId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let bad = name.is_empty()
            || name
                .chars()
                .any(|ch| ch.is_whitespace() || matches!(ch, '>' | ',' | ':' | '#'));
        if bad {
            return Err(Error::InvalidCandidateName(name));
        }
        Ok(CandidateId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One strict ranking (most preferred first) over candidate indices, with a
/// nonnegative integer weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ballot {
    ranking: Vec<usize>,
    weight: u64,
}

impl Ballot {
    pub fn new(ranking: Vec<usize>, weight: u64) -> Self {
        Ballot { ranking, weight }
    }

    pub fn unit(ranking: Vec<usize>) -> Self {
        Ballot::new(ranking, 1)
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    /// 1-based position of `candidate`, or `None` if it is not ranked.
    pub fn position_of(&self, candidate: usize) -> Option<usize> {
        self.ranking
            .iter()
            .position(|&c| c == candidate)
            .map(|p| p + 1)
    }

    /// The ranking with each index mapped through `map`.
    pub(crate) fn remapped(&self, map: &[usize]) -> Ballot {
        Ballot::new(self.ranking.iter().map(|&c| map[c]).collect(), self.weight)
    }
}

/// `floor(W / 2) + 1` for total weight `W`.
pub fn majority_threshold(total_weight: u64) -> u64 {
    total_weight / 2 + 1
}

/// A validated election. Construction enforces every invariant, so holders
/// of an `Election` never need to re-check them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Election {
    candidates: Vec<CandidateId>,
    ballots: Vec<Ballot>,
    total_weight: u64,
}

impl Election {
    /// Builds an election. `ballots` index into `candidates` as given; the
    /// candidates are then sorted by name and the rankings remapped.
    pub fn new(candidates: Vec<CandidateId>, ballots: Vec<Ballot>) -> Result<Self> {
        let (candidates, ballots) = normalize(candidates, ballots)?;
        let total_weight = total_weight(&ballots, candidates.len())?;
        Ok(Election {
            candidates,
            ballots,
            total_weight,
        })
    }

    /// Convenience constructor from names: `ballots` are `(weight, ranking)`.
    pub fn from_names(candidates: &[&str], ballots: &[(u64, &[&str])]) -> Result<Self> {
        let ids = candidates
            .iter()
            .map(|&c| CandidateId::new(c))
            .collect::<Result<Vec<_>>>()?;
        let mut parsed = Vec::with_capacity(ballots.len());
        for &(weight, ranking) in ballots {
            let ranking = ranking
                .iter()
                .map(|&name| {
                    candidates
                        .iter()
                        .position(|&c| c == name)
                        .ok_or_else(|| Error::UnknownCandidate(name.to_owned()))
                })
                .collect::<Result<Vec<_>>>()?;
            parsed.push(Ballot::new(ranking, weight));
        }
        Election::new(ids, parsed)
    }

    /// Re-checks every invariant of the election.
    pub fn validate(&self) -> Result<()> {
        let m = self.candidates.len();
        if m == 0 {
            return Err(invalid("no candidates"));
        }
        for pair in self.candidates.windows(2) {
            if pair[0] >= pair[1] {
                return Err(invalid("candidates not strictly sorted"));
            }
        }
        for (i, ballot) in self.ballots.iter().enumerate() {
            check_ranking(ballot.ranking(), m)
                .map_err(|why| invalid(&format!("ballot {}: {}", i + 1, why)))?;
        }
        if total_weight(&self.ballots, m)? != self.total_weight {
            return Err(invalid("cached total weight is stale"));
        }
        Ok(())
    }

    pub fn candidates(&self) -> &[CandidateId] {
        &self.candidates
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn name(&self, candidate: usize) -> &CandidateId {
        &self.candidates[candidate]
    }

    pub fn names(&self, candidates: &[usize]) -> Vec<&str> {
        candidates
            .iter()
            .map(|&c| self.candidates[c].as_str())
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.candidates
            .binary_search_by(|c| c.as_str().cmp(name))
            .map_err(|_| Error::UnknownCandidate(name.to_owned()))
    }

    pub fn majority_threshold(&self) -> u64 {
        majority_threshold(self.total_weight)
    }

    /// Weighted number of ballots ranking `candidate` within the top `stage`
    /// positions.
    pub fn score_at(&self, candidate: &str, stage: usize) -> Result<u64> {
        let c = self.index_of(candidate)?;
        self.check_stage(stage)?;
        Ok(self
            .ballots
            .iter()
            .filter(|b| b.ranking[..stage].contains(&c))
            .map(Ballot::weight)
            .sum())
    }

    /// Weighted sum of `candidate`'s positions over ballots ranking it within
    /// the top `stage` positions.
    pub fn sumpos_at(&self, candidate: &str, stage: usize) -> Result<u64> {
        let c = self.index_of(candidate)?;
        self.check_stage(stage)?;
        Ok(self
            .ballots
            .iter()
            .filter_map(|b| {
                b.ranking[..stage]
                    .iter()
                    .position(|&x| x == c)
                    .map(|p| (p as u64 + 1) * b.weight)
            })
            .sum())
    }

    fn check_stage(&self, stage: usize) -> Result<()> {
        if stage == 0 || stage > self.candidates.len() {
            return Err(Error::StageOutOfRange {
                stage,
                candidates: self.candidates.len(),
            });
        }
        Ok(())
    }

    /// Weight of ballots preferring `a` to `b`.
    pub fn pairwise_support(&self, a: usize, b: usize) -> u64 {
        self.ballots
            .iter()
            .filter(|ballot| ballot.position_of(a) < ballot.position_of(b))
            .map(Ballot::weight)
            .sum()
    }

    /// The candidate beating every other one in weighted pairwise majority.
    pub fn condorcet_winner(&self) -> Option<usize> {
        let m = self.candidates.len();
        (0..m).find(|&a| {
            (0..m)
                .filter(|&b| b != a)
                .all(|b| self.pairwise_support(a, b) > self.pairwise_support(b, a))
        })
    }

    /// Replaces every ballot of weight `w` by `w` unit copies; zero-weight
    /// ballots disappear.
    pub fn expand_weights(&self) -> Result<Election> {
        let ballots: Vec<Ballot> = self
            .ballots
            .iter()
            .flat_map(|b| (0..b.weight).map(move |_| Ballot::unit(b.ranking.clone())))
            .collect();
        if ballots.is_empty() {
            return Err(invalid("weight expansion produced no ballots"));
        }
        Ok(Election {
            candidates: self.candidates.clone(),
            total_weight: ballots.len() as u64,
            ballots,
        })
    }

    /// Deletes the given candidates and closes the resulting rank gaps.
    pub fn restrict(&self, deleted: &[usize]) -> Result<Election> {
        let m = self.candidates.len();
        let mut keep = vec![true; m];
        for &c in deleted {
            if c >= m {
                return Err(invalid("deleted candidate out of range"));
            }
            keep[c] = false;
        }
        let mut map = vec![usize::MAX; m];
        let mut candidates = Vec::new();
        for c in 0..m {
            if keep[c] {
                map[c] = candidates.len();
                candidates.push(self.candidates[c].clone());
            }
        }
        if candidates.is_empty() {
            return Err(invalid("every candidate deleted"));
        }
        let ballots = self
            .ballots
            .iter()
            .map(|b| {
                Ballot::new(
                    b.ranking
                        .iter()
                        .filter(|&&c| keep[c])
                        .map(|&c| map[c])
                        .collect(),
                    b.weight,
                )
            })
            .collect();
        Ok(Election {
            candidates,
            ballots,
            total_weight: self.total_weight,
        })
    }

    /// The same candidates with `extra` ballots appended.
    pub fn with_ballots(&self, extra: impl IntoIterator<Item = Ballot>) -> Result<Election> {
        let mut ballots = self.ballots.clone();
        ballots.extend(extra);
        Election::from_sorted(self.candidates.clone(), ballots)
    }

    /// Builds an election whose candidates are already sorted; the ballots
    /// index into that order.
    pub fn from_sorted(candidates: Vec<CandidateId>, ballots: Vec<Ballot>) -> Result<Election> {
        let election = Election {
            total_weight: 0,
            candidates,
            ballots,
        };
        let m = election.candidates.len();
        if m == 0 {
            return Err(invalid("no candidates"));
        }
        for pair in election.candidates.windows(2) {
            if pair[0] >= pair[1] {
                return Err(invalid("candidates not strictly sorted"));
            }
        }
        for (i, ballot) in election.ballots.iter().enumerate() {
            check_ranking(ballot.ranking(), m)
                .map_err(|why| invalid(&format!("ballot {}: {}", i + 1, why)))?;
        }
        let total_weight = total_weight(&election.ballots, m)?;
        Ok(Election {
            total_weight,
            ..election
        })
    }
}

fn invalid(reason: &str) -> Error {
    Error::InvalidInstance(reason.to_owned())
}

/// Sorts `candidates` by name, remaps the ballots accordingly and checks that
/// every ballot is a strict ranking of all candidates. Total weight is not
/// checked.
pub(crate) fn normalize(
    candidates: Vec<CandidateId>,
    ballots: Vec<Ballot>,
) -> Result<(Vec<CandidateId>, Vec<Ballot>)> {
    let m = candidates.len();
    if m == 0 {
        return Err(invalid("no candidates"));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| candidates[a].cmp(&candidates[b]));
    for pair in order.windows(2) {
        if candidates[pair[0]] == candidates[pair[1]] {
            return Err(invalid(&format!("duplicate candidate {}", candidates[pair[0]])));
        }
    }
    let mut old_to_new = vec![0; m];
    for (new, &old) in order.iter().enumerate() {
        old_to_new[old] = new;
    }
    for (i, ballot) in ballots.iter().enumerate() {
        check_ranking(ballot.ranking(), m)
            .map_err(|why| invalid(&format!("ballot {}: {}", i + 1, why)))?;
    }
    let ballots = ballots.iter().map(|b| b.remapped(&old_to_new)).collect();
    let mut sorted = candidates;
    sorted.sort();
    Ok((sorted, ballots))
}

fn check_ranking(ranking: &[usize], m: usize) -> core::result::Result<(), String> {
    if ranking.len() != m {
        return Err(format!("ranks {} of {} candidates", ranking.len(), m));
    }
    let mut seen = vec![false; m];
    for &c in ranking {
        if c >= m {
            return Err(format!("candidate index {c} out of range"));
        }
        if seen[c] {
            return Err(format!("candidate index {c} ranked twice"));
        }
        seen[c] = true;
    }
    Ok(())
}

/// Total weight, rejecting zero and anything that could overflow a
/// sum-of-positions accumulator.
pub(crate) fn total_weight(ballots: &[Ballot], m: usize) -> Result<u64> {
    let total = ballots
        .iter()
        .try_fold(0u64, |acc, b| acc.checked_add(b.weight))
        .ok_or_else(|| invalid("total weight overflows"))?;
    check_total(total, m)?;
    Ok(total)
}

pub(crate) fn check_total(total: u64, m: usize) -> Result<()> {
    if total == 0 {
        return Err(invalid("total weight is zero; the majority threshold is unreachable"));
    }
    if total.checked_mul(m as u64 + 1).is_none() {
        return Err(invalid("total weight too large"));
    }
    Ok(())
}
