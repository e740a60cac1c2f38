//! Seeded counterexample search.
//!
//! Known counterexamples are tried first, then trials `0..budget`. Trial `t`
//! draws everything from stream `t` of the seed (see [`crate::sampler`]),
//! so the witness returned is that of the lowest successful trial no matter
//! how trials are scheduled.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_witness, AxiomId, Lift, Modification, ViolationWitness};
use crate::election::{Ballot, CandidateId, Election};
use crate::error::{Error, Result};
use crate::generators::{fixtures, gen_cyclic};
use crate::rules::sks_winners;
use crate::sampler::{names, ElectionBounds, Sampler};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_m: usize,
    pub max_n: usize,
    pub max_weight: u64,
    /// Number of sampled trials.
    pub budget: u64,
    pub seed: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_m: 5,
            max_n: 8,
            max_weight: 3,
            budget: 10_000,
            seed: 0,
        }
    }
}

impl SearchBounds {
    pub fn validate(&self) -> Result<()> {
        if self.max_m == 0 || self.max_n == 0 || self.max_weight == 0 || self.budget == 0 {
            return Err(Error::InvalidParameter(
                "search bounds must be positive".into(),
            ));
        }
        Ok(())
    }

    fn election_bounds(&self) -> ElectionBounds {
        ElectionBounds {
            max_m: self.max_m,
            max_n: self.max_n,
            max_weight: self.max_weight,
        }
    }

    fn admits(&self, e: &Election) -> bool {
        e.num_candidates() <= self.max_m
            && e.ballots().len() <= self.max_n
            && e.ballots().iter().all(|b| b.weight() <= self.max_weight)
    }
}

/// The known counterexamples for an axiom (none for the satisfied ones).
pub fn fixture_witnesses(axiom: AxiomId) -> Vec<ViolationWitness> {
    let table2 = fixtures::table2_base;
    let modification = match axiom {
        AxiomId::Condorcet => {
            return vec![ViolationWitness::new(
                axiom,
                fixtures::table2_cloned(),
                Modification::None,
            )]
        }
        AxiomId::Resoluteness => {
            let cyclic = gen_cyclic(3).expect("three candidates");
            return vec![ViolationWitness::new(axiom, cyclic, Modification::None)];
        }
        AxiomId::IIA => Modification::Extend {
            modified: fixtures::table2_cloned(),
        },
        AxiomId::IndependenceOfClones => Modification::Clone {
            original: table2().index_of("Z").expect("Z is a candidate"),
            clone: CandidateId::new("Z'").expect("valid name"),
        },
        AxiomId::StrategyProofness => {
            let e = fixtures::example3();
            let [x, z, y] = ["X", "Z", "Y"].map(|n| e.index_of(n).expect("candidate"));
            let dave = e
                .ballots()
                .iter()
                .position(|b| b.ranking() == [z, x, y])
                .expect("a Z>X>Y ballot");
            return vec![ViolationWitness::new(
                axiom,
                e,
                Modification::Misreport {
                    voter: dave,
                    ranking: vec![x, z, y],
                },
            )];
        }
        _ => return Vec::new(),
    };
    vec![ViolationWitness::new(axiom, table2(), modification)]
}

/// The first known counterexample that fits the bounds and replays.
pub fn search_fixtures(axiom: AxiomId, bounds: &SearchBounds) -> Result<Option<ViolationWitness>> {
    for w in fixture_witnesses(axiom) {
        let modified = w.modified_election()?;
        let fits = bounds.admits(&w.base) && modified.as_ref().is_none_or(|e| bounds.admits(e));
        if fits && check_witness(&w)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Searches for a violation of `axiom`: known counterexamples first, then
/// `bounds.budget` sampled trials.
pub fn search_counterexample(
    axiom: AxiomId,
    bounds: &SearchBounds,
) -> Result<Option<ViolationWitness>> {
    bounds.validate()?;
    if let Some(w) = search_fixtures(axiom, bounds)? {
        return Ok(Some(w));
    }
    if axiom == AxiomId::Nondictatorship {
        return dictator_search(bounds);
    }
    for t in 0..bounds.budget {
        if let Some(w) = trial(axiom, bounds, t)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn found(w: ViolationWitness) -> Result<Option<ViolationWitness>> {
    Ok(check_witness(&w)?.then_some(w))
}

/// One sampled trial. Nondictatorship needs a whole corpus rather than a
/// single trial and always yields `None` here.
pub fn trial(axiom: AxiomId, bounds: &SearchBounds, t: u64) -> Result<Option<ViolationWitness>> {
    let mut s = Sampler::new(bounds.seed, t);
    let e = s.election(&bounds.election_bounds());
    let m = e.num_candidates();
    let n = e.ballots().len();
    match axiom {
        AxiomId::Condorcet | AxiomId::Resoluteness => {
            found(ViolationWitness::new(axiom, e, Modification::None))
        }
        AxiomId::Majority => {
            let x = s.index(m);
            let threshold = e.majority_threshold();
            let mut ballots = e.ballots().to_vec();
            let mut order: Vec<usize> = (0..n).collect();
            s.shuffle(&mut order);
            let mut top: u64 = ballots.iter().filter(|b| b.ranking()[0] == x).map(Ballot::weight).sum();
            for i in order {
                if top >= threshold {
                    break;
                }
                if ballots[i].ranking()[0] != x {
                    top += ballots[i].weight();
                    ballots[i] = to_front(&ballots[i], x);
                }
            }
            let base = Election::from_sorted(e.candidates().to_vec(), ballots)?;
            found(ViolationWitness::new(axiom, base, Modification::None))
        }
        AxiomId::CitizensSovereignty => {
            let x = s.index(m);
            let ballots = e.ballots().iter().map(|b| to_front(b, x)).collect();
            let base = Election::from_sorted(e.candidates().to_vec(), ballots)?;
            found(ViolationWitness::new(axiom, base, Modification::None))
        }
        AxiomId::Monotonicity | AxiomId::PositiveResponsiveness => {
            let winners = sks_winners(&e).winners;
            let w = winners[s.index(winners.len())];
            let count = s.range(1, n as u64) as usize;
            let mut positions: Vec<usize> = e.ballots().iter().map(|b| b.position_of(w).unwrap()).collect();
            let mut lifts = Vec::new();
            for _ in 0..count {
                let ballot = s.index(n);
                let current = positions[ballot];
                if current > 1 {
                    let position = s.range(1, current as u64 - 1) as usize;
                    positions[ballot] = position;
                    lifts.push(Lift { ballot, position });
                }
            }
            if lifts.is_empty() {
                return Ok(None);
            }
            found(ViolationWitness::new(axiom, e, Modification::Lift { candidate: w, lifts }))
        }
        AxiomId::StrongMonotonicity => {
            let winners = sks_winners(&e).winners;
            let w = winners[s.index(winners.len())];
            let mut ballots = e.ballots().to_vec();
            for b in ballots.iter_mut() {
                if s.below(2) == 0 {
                    continue;
                }
                let cut = b.position_of(w).unwrap() - 1;
                let mut above: Vec<usize> = b.ranking()[..cut].iter().copied().filter(|_| s.below(2) == 1).collect();
                let mut rest: Vec<usize> = b.ranking().iter().copied().filter(|c| *c != w && !above.contains(c)).collect();
                s.shuffle(&mut above);
                s.shuffle(&mut rest);
                above.push(w);
                above.extend(rest);
                *b = Ballot::new(above, b.weight());
            }
            let modified = Election::from_sorted(e.candidates().to_vec(), ballots)?;
            found(ViolationWitness::new(axiom, e, Modification::Replace { candidate: w, modified }))
        }
        AxiomId::IIA => {
            let z = s.index(m);
            let base = e.restrict(&[z])?;
            found(ViolationWitness::new(axiom, base, Modification::Extend { modified: e }))
        }
        AxiomId::IndependenceOfClones => {
            let original = s.index(m);
            let mut name = String::from(e.name(original).as_str());
            loop {
                name.push('\'');
                if e.index_of(&name).is_err() {
                    break;
                }
            }
            let clone = CandidateId::new(name)?;
            found(ViolationWitness::new(axiom, e, Modification::Clone { original, clone }))
        }
        AxiomId::Consistency => {
            let n2 = s.range(1, bounds.max_n as u64) as usize;
            let second = Election::new(names(m), s.ballots(m, n2, bounds.max_weight))?;
            found(ViolationWitness::new(axiom, e, Modification::Split { second }))
        }
        AxiomId::Participation => {
            if n < 2 {
                return Ok(None);
            }
            let voter = s.index(n);
            found(ViolationWitness::new(axiom, e, Modification::Abstain { voter }))
        }
        AxiomId::StrategyProofness => {
            let voter = s.index(n);
            let ranking = s.permutation(m);
            found(ViolationWitness::new(axiom, e, Modification::Misreport { voter, ranking }))
        }
        AxiomId::Nondictatorship => Ok(None),
    }
}

fn to_front(b: &Ballot, x: usize) -> Ballot {
    let mut ranking = vec![x];
    ranking.extend(b.ranking().iter().copied().filter(|&c| c != x));
    Ballot::new(ranking, b.weight())
}

/// Profile of nondictatorship trial `t`, if it has at least two voters.
fn dictator_profile(bounds: &SearchBounds, t: u64) -> Option<Election> {
    let e = Sampler::new(bounds.seed, t).election(&bounds.election_bounds());
    (e.ballots().len() >= 2).then_some(e)
}

/// Looks for a voter index that no sampled profile refutes as a dictator,
/// i.e. whose top choice is the unique winner of every profile it appears
/// in; the witness carries all those profiles.
fn dictator_search(bounds: &SearchBounds) -> Result<Option<ViolationWitness>> {
    let mut seen = vec![false; bounds.max_n];
    let mut refuted = vec![false; bounds.max_n];
    for t in 0..bounds.budget {
        let Some(e) = dictator_profile(bounds, t) else { continue };
        let winners = sks_winners(&e).winners;
        for (v, b) in e.ballots().iter().enumerate() {
            seen[v] = true;
            refuted[v] |= winners != [b.ranking()[0]];
        }
    }
    let Some(voter) = (0..bounds.max_n).find(|&v| seen[v] && !refuted[v]) else {
        return Ok(None);
    };
    let mut corpus = (0..bounds.budget)
        .filter_map(|t| dictator_profile(bounds, t))
        .filter(|e| e.ballots().len() > voter);
    let base = corpus.next().ok_or_else(|| Error::InvalidInstance(format!("voter {voter} never sampled")))?;
    let w = ViolationWitness::new(
        AxiomId::Nondictatorship,
        base,
        Modification::Dictator { voter, others: corpus.collect() },
    );
    found(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_replay() {
        for axiom in AxiomId::ALL {
            for w in fixture_witnesses(axiom) {
                assert!(check_witness(&w).unwrap(), "{axiom}");
            }
        }
        let c = search_counterexample(AxiomId::Condorcet, &SearchBounds::default()).unwrap().unwrap();
        assert_eq!(c.base, fixtures::table2_cloned());
        let r = search_counterexample(AxiomId::Resoluteness, &SearchBounds::default()).unwrap().unwrap();
        assert_eq!(sks_winners(&r.base).winners.len(), 3);
    }

    #[test]
    fn fixtures_respect_bounds() {
        let tight = SearchBounds { max_m: 3, budget: 1, ..SearchBounds::default() };
        assert_eq!(search_fixtures(AxiomId::Condorcet, &tight).unwrap(), None);
        assert!(search_fixtures(AxiomId::IndependenceOfClones, &tight).unwrap().is_none());
        assert!(search_fixtures(AxiomId::Resoluteness, &tight).unwrap().is_some());
    }

    #[test]
    fn trials_are_deterministic() {
        let b = SearchBounds::default();
        for t in 0..50 {
            assert_eq!(trial(AxiomId::Participation, &b, t).unwrap(), trial(AxiomId::Participation, &b, t).unwrap());
        }
    }

    #[test]
    fn zero_bounds_rejected() {
        let b = SearchBounds { budget: 0, ..SearchBounds::default() };
        assert!(search_counterexample(AxiomId::Majority, &b).is_err());
    }
}
