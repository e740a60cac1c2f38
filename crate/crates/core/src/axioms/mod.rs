//! Axiom checkers for SkS and a seeded counterexample search.
//!
//! A [`ViolationWitness`] records a base election and the operation applied
//! to it. [`check_witness`] re-derives the modified election from that
//! operation wherever it can (lifts, clones, abstentions, misreports) and
//! tabulates both sides, so a witness cannot misstate its own effect.
//!
//! Operational forms:
//!
//! * Condorcet: the base has a Condorcet winner outside the SkS winners.
//! * Majority: a candidate ranked first by ballots of total weight at least
//!   the majority threshold is not the unique winner.
//! * Monotonicity: lifting a winner (other candidates keep their relative
//!   order) makes it lose.
//! * Positive responsiveness: lifting a (possibly tied) winner at least once
//!   does not make it the unique winner.
//! * Strong monotonicity: a winner `w` loses after a profile change in which,
//!   on every ballot, the set of candidates above `w` weakly shrinks; all
//!   other order may change.
//! * IIA: extending the candidate set (each ballot keeps its relative order
//!   on the old candidates) changes the winners within the old set, and some
//!   old candidate still wins.
//! * Independence of clones: a clone inserted directly behind its original
//!   on every ballot changes whether some non-clone wins, or whether the
//!   clone group wins.
//! * Consistency: `W(V1) ∩ W(V2)` is nonempty but differs from `W(V1 + V2)`.
//! * Participation: a voter strictly prefers the outcome without its ballot.
//! * Strategy-proofness: a voter strictly prefers the outcome after
//!   replacing its ballot.
//! * Nondictatorship: a voter index whose top choice is the unique winner of
//!   every profile in a corpus (evidence, not proof).
//! * Citizens' sovereignty: a unanimous profile does not elect its common
//!   top choice uniquely.
//! * Resoluteness: an election with at least two winners.
//!
//! Participation and strategy-proofness compare winner sets by the voter's
//! favourite member: `B` is strictly better than `A` for voter `v` iff
//! `v` ranks its favourite winner in `B` above its favourite winner in `A`.

mod local;
mod search;

pub use local::check_election;

pub use search::{
    fixture_witnesses, search_counterexample, search_fixtures, trial, SearchBounds,
};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::election::{Ballot, CandidateId, Election};
use crate::error::{Error, Result};
use crate::generators::fixtures;
use crate::rules::{bucklin_winners, sks_winners};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomId {
    Condorcet,
    Majority,
    Monotonicity,
    PositiveResponsiveness,
    StrongMonotonicity,
    IIA,
    IndependenceOfClones,
    Consistency,
    Participation,
    Nondictatorship,
    CitizensSovereignty,
    Resoluteness,
    StrategyProofness,
}

impl AxiomId {
    pub const ALL: [AxiomId; 13] = [
        AxiomId::Condorcet,
        AxiomId::Majority,
        AxiomId::Monotonicity,
        AxiomId::PositiveResponsiveness,
        AxiomId::StrongMonotonicity,
        AxiomId::IIA,
        AxiomId::IndependenceOfClones,
        AxiomId::Consistency,
        AxiomId::Participation,
        AxiomId::Nondictatorship,
        AxiomId::CitizensSovereignty,
        AxiomId::Resoluteness,
        AxiomId::StrategyProofness,
    ];

    /// Whether SkS satisfies the axiom.
    pub fn satisfied_by_sks(self) -> bool {
        matches!(
            self,
            AxiomId::Majority
                | AxiomId::Monotonicity
                | AxiomId::PositiveResponsiveness
                | AxiomId::Nondictatorship
                | AxiomId::CitizensSovereignty
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AxiomId::Condorcet => "condorcet",
            AxiomId::Majority => "majority",
            AxiomId::Monotonicity => "monotonicity",
            AxiomId::PositiveResponsiveness => "positive-responsiveness",
            AxiomId::StrongMonotonicity => "strong-monotonicity",
            AxiomId::IIA => "iia",
            AxiomId::IndependenceOfClones => "independence-of-clones",
            AxiomId::Consistency => "consistency",
            AxiomId::Participation => "participation",
            AxiomId::Nondictatorship => "nondictatorship",
            AxiomId::CitizensSovereignty => "citizens-sovereignty",
            AxiomId::Resoluteness => "resoluteness",
            AxiomId::StrategyProofness => "strategy-proofness",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    /// Accepts the kebab-case names, ignoring case, `_` and `-`, and `clones`
    /// for independence of clones.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .map(|c| c.to_ascii_lowercase())
            .collect();
        if key == "clones" {
            return Ok(AxiomId::IndependenceOfClones);
        }
        AxiomId::ALL
            .into_iter()
            .find(|a| a.as_str().replace('-', "") == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown axiom `{s}`")))
    }
}

/// One lift: move `candidate` (fixed by the enclosing modification) on
/// ballot `ballot` to `position` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lift {
    pub ballot: usize,
    pub position: usize,
}

/// The operation a witness applies to its base election. Candidate and
/// voter indices refer to the base election.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Modification {
    /// The base election alone exhibits the violation.
    None,
    /// Lifts applied in order.
    Lift { candidate: usize, lifts: Vec<Lift> },
    /// A replacement profile over the same candidates and weights.
    Replace { candidate: usize, modified: Election },
    /// The same ballots over a strictly larger candidate set.
    Extend { modified: Election },
    /// `clone` inserted directly behind `original` on every ballot.
    Clone { original: usize, clone: CandidateId },
    /// A second vote list over the same candidates.
    Split { second: Election },
    /// The voter's ballot is removed.
    Abstain { voter: usize },
    /// The voter's ballot is replaced by `ranking` (same weight).
    Misreport { voter: usize, ranking: Vec<usize> },
    /// Further profiles of the corpus; the base is the first one.
    Dictator { voter: usize, others: Vec<Election> },
}

impl Modification {
    /// Lowercase keyword for the operation.
    pub fn name(&self) -> &'static str {
        match self {
            Modification::None => "none",
            Modification::Lift { .. } => "lift",
            Modification::Replace { .. } => "replace",
            Modification::Extend { .. } => "extend",
            Modification::Clone { .. } => "clone",
            Modification::Split { .. } => "split",
            Modification::Abstain { .. } => "abstain",
            Modification::Misreport { .. } => "misreport",
            Modification::Dictator { .. } => "dictator",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationWitness {
    pub axiom: AxiomId,
    pub base: Election,
    pub modification: Modification,
}

/// Winner names on both sides of a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub before: Vec<String>,
    pub after: Vec<String>,
    pub note: &'static str,
}

impl ViolationWitness {
    pub fn new(axiom: AxiomId, base: Election, modification: Modification) -> Self {
        ViolationWitness {
            axiom,
            base,
            modification,
        }
    }

    /// The election the modification produces, when it produces exactly one.
    pub fn modified_election(&self) -> Result<Option<Election>> {
        let base = &self.base;
        Ok(Some(match &self.modification {
            Modification::None | Modification::Dictator { .. } => return Ok(None),
            Modification::Lift { candidate, lifts } => apply_lifts(base, *candidate, lifts)?,
            Modification::Replace { modified, .. } | Modification::Extend { modified } => {
                modified.clone()
            }
            Modification::Clone { original, clone } => insert_clone(base, *original, clone)?,
            Modification::Split { second } => {
                same_candidates(base, second)?;
                base.with_ballots(second.ballots().iter().cloned())?
            }
            Modification::Abstain { voter } => {
                check_voter(base, *voter)?;
                let mut ballots = base.ballots().to_vec();
                ballots.remove(*voter);
                Election::from_sorted(base.candidates().to_vec(), ballots)
                    .map_err(|e| malformed(format!("abstention leaves no votes: {e}")))?
            }
            Modification::Misreport { voter, ranking } => {
                check_voter(base, *voter)?;
                let mut ballots = base.ballots().to_vec();
                ballots[*voter] = Ballot::new(ranking.clone(), ballots[*voter].weight());
                Election::from_sorted(base.candidates().to_vec(), ballots)
                    .map_err(|e| malformed(format!("misreport: {e}")))?
            }
        }))
    }

    /// Winner sets before and after the modification. For consistency,
    /// `before` is the intersection of the two parts' winners; for
    /// nondictatorship, `before` lists the voter's top choices over the
    /// corpus and `after` the corresponding winners.
    pub fn explain(&self) -> Result<Explanation> {
        let names = |e: &Election, ws: &[usize]| -> Vec<String> {
            ws.iter().map(|&w| e.name(w).to_string()).collect()
        };
        let before = names(&self.base, &sks_winners(&self.base).winners);
        let note = note_for(self.axiom);
        match &self.modification {
            Modification::Split { second } => {
                same_candidates(&self.base, second)?;
                let other = sks_winners(second).winners;
                let common: Vec<usize> = sks_winners(&self.base)
                    .winners
                    .into_iter()
                    .filter(|w| other.contains(w))
                    .collect();
                let union = self.modified_election()?.expect("split yields an election");
                Ok(Explanation {
                    before: names(&self.base, &common),
                    after: names(&union, &sks_winners(&union).winners),
                    note,
                })
            }
            Modification::Dictator { voter, others } => {
                let mut tops = Vec::new();
                let mut winners = Vec::new();
                for e in core::iter::once(&self.base).chain(others) {
                    check_voter(e, *voter)?;
                    tops.push(e.name(e.ballots()[*voter].ranking()[0]).to_string());
                    winners.push(names(e, &sks_winners(e).winners).join(" "));
                }
                Ok(Explanation {
                    before: tops,
                    after: winners,
                    note,
                })
            }
            _ => {
                let after = match self.modified_election()? {
                    Some(e) => names(&e, &sks_winners(&e).winners),
                    None => before.clone(),
                };
                Ok(Explanation {
                    before,
                    after,
                    note,
                })
            }
        }
    }
}

fn note_for(axiom: AxiomId) -> &'static str {
    match axiom {
        AxiomId::Participation | AxiomId::StrategyProofness => {
            "outcomes compared by the voter's favourite winner"
        }
        AxiomId::Consistency => "before: common winners of the two parts; after: winners of the union",
        AxiomId::Nondictatorship => "before: the voter's top choice per profile; after: the winners",
        AxiomId::IIA => "winners restricted to the original candidates changed",
        AxiomId::IndependenceOfClones => "clone inserted directly behind its original",
        AxiomId::Condorcet => "the Condorcet winner is not among the winners",
        _ => "",
    }
}

fn malformed(why: impl Into<String>) -> Error {
    Error::MalformedWitness(why.into())
}

fn check_voter(e: &Election, voter: usize) -> Result<()> {
    if voter >= e.ballots().len() {
        return Err(malformed(format!(
            "voter {voter} out of range for {} ballots",
            e.ballots().len()
        )));
    }
    Ok(())
}

fn check_candidate(e: &Election, c: usize) -> Result<()> {
    if c >= e.num_candidates() {
        return Err(malformed(format!("candidate index {c} out of range")));
    }
    Ok(())
}

fn same_candidates(a: &Election, b: &Election) -> Result<()> {
    if a.candidates() != b.candidates() {
        return Err(malformed("elections have different candidate sets"));
    }
    Ok(())
}

fn same_weights(a: &Election, b: &Election) -> Result<()> {
    let wa = a.ballots().iter().map(Ballot::weight);
    if a.ballots().len() != b.ballots().len() || !wa.eq(b.ballots().iter().map(Ballot::weight)) {
        return Err(malformed("profiles differ in their ballots' weights"));
    }
    Ok(())
}

/// Moves `candidate` on ballot `ballot_index` to `new_position` (1-based),
/// shifting the candidates in between down by one.
pub fn lift_candidate(
    election: &Election,
    ballot_index: usize,
    candidate: &str,
    new_position: usize,
) -> Result<Election> {
    let c = election.index_of(candidate)?;
    lift_index(election, ballot_index, c, new_position)
}

fn lift_index(
    election: &Election,
    ballot_index: usize,
    candidate: usize,
    new_position: usize,
) -> Result<Election> {
    let ballot = election.ballots().get(ballot_index).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "ballot {ballot_index} out of range for {} ballots",
            election.ballots().len()
        ))
    })?;
    let current = ballot
        .position_of(candidate)
        .ok_or_else(|| Error::InvalidParameter(format!("candidate index {candidate} out of range")))?;
    if new_position == 0 || new_position >= current {
        return Err(Error::PositionNotAnImprovement {
            current,
            requested: new_position,
        });
    }
    let mut ranking = ballot.ranking().to_vec();
    ranking.remove(current - 1);
    ranking.insert(new_position - 1, candidate);
    let mut ballots = election.ballots().to_vec();
    ballots[ballot_index] = Ballot::new(ranking, ballot.weight());
    Election::from_sorted(election.candidates().to_vec(), ballots)
}

fn apply_lifts(base: &Election, candidate: usize, lifts: &[Lift]) -> Result<Election> {
    check_candidate(base, candidate)?;
    let mut e = base.clone();
    for lift in lifts {
        e = lift_index(&e, lift.ballot, candidate, lift.position)
            .map_err(|err| malformed(format!("lift on ballot {}: {err}", lift.ballot)))?;
    }
    Ok(e)
}

/// `base` with `clone` inserted directly behind `original` on every ballot.
pub fn insert_clone(base: &Election, original: usize, clone: &CandidateId) -> Result<Election> {
    check_candidate(base, original)?;
    if base.index_of(clone.as_str()).is_ok() {
        return Err(malformed(format!("clone `{clone}` already a candidate")));
    }
    let m = base.num_candidates();
    let mut candidates = base.candidates().to_vec();
    candidates.push(clone.clone());
    let ballots = base
        .ballots()
        .iter()
        .map(|b| {
            let mut ranking = Vec::with_capacity(m + 1);
            for &c in b.ranking() {
                ranking.push(c);
                if c == original {
                    ranking.push(m);
                }
            }
            Ballot::new(ranking, b.weight())
        })
        .collect();
    Election::new(candidates, ballots)
}

/// Position (1-based) of the voter's favourite member of `winners`.
fn favourite(ballot: &Ballot, winners: &[usize]) -> usize {
    winners
        .iter()
        .filter_map(|&w| ballot.position_of(w))
        .min()
        .unwrap_or(usize::MAX)
}

fn winner_names(e: &Election) -> Vec<&str> {
    sks_winners(e)
        .winners
        .iter()
        .map(|&w| e.name(w).as_str())
        .collect()
}

/// Replays a witness: true iff the recorded modification violates the
/// axiom for SkS. Structurally invalid witnesses are errors.
pub fn check_witness(witness: &ViolationWitness) -> Result<bool> {
    witness.base.validate().map_err(|e| malformed(format!("base: {e}")))?;
    let base = &witness.base;
    let before = sks_winners(base).winners;
    let mismatch = || {
        Err(malformed(format!(
            "{} does not take a `{}` modification",
            witness.axiom,
            witness.modification.name()
        )))
    };
    match (witness.axiom, &witness.modification) {
        (AxiomId::Condorcet, Modification::None) => {
            Ok(base.condorcet_winner().is_some_and(|c| !before.contains(&c)))
        }
        (AxiomId::Majority, Modification::None) => {
            let threshold = base.majority_threshold();
            let mut top = alloc::vec![0u64; base.num_candidates()];
            for b in base.ballots() {
                top[b.ranking()[0]] += b.weight();
            }
            Ok((0..top.len()).any(|c| top[c] >= threshold && before != [c]))
        }
        (AxiomId::CitizensSovereignty, Modification::None) => {
            let first = base.ballots()[0].ranking()[0];
            let unanimous = base.ballots().iter().all(|b| b.ranking()[0] == first);
            Ok(unanimous && before != [first])
        }
        (AxiomId::Resoluteness, Modification::None) => Ok(before.len() >= 2),
        (AxiomId::Monotonicity | AxiomId::PositiveResponsiveness, Modification::Lift { candidate, lifts }) => {
            let after = sks_winners(&apply_lifts(base, *candidate, lifts)?).winners;
            if !before.contains(candidate) {
                return Ok(false);
            }
            Ok(if witness.axiom == AxiomId::Monotonicity {
                !after.contains(candidate)
            } else {
                !lifts.is_empty() && after != [*candidate]
            })
        }
        (AxiomId::StrongMonotonicity, Modification::Replace { candidate, modified }) => {
            check_candidate(base, *candidate)?;
            same_candidates(base, modified)?;
            same_weights(base, modified)?;
            for (old, new) in base.ballots().iter().zip(modified.ballots()) {
                let above_new = &new.ranking()[..new.position_of(*candidate).unwrap() - 1];
                let above_old = &old.ranking()[..old.position_of(*candidate).unwrap() - 1];
                if above_new.iter().any(|c| !above_old.contains(c)) {
                    return Err(malformed("a ballot ranks a new candidate above the winner"));
                }
            }
            let after = sks_winners(modified).winners;
            Ok(before.contains(candidate) && !after.contains(candidate))
        }
        (AxiomId::IIA, Modification::Extend { modified }) => {
            modified.validate().map_err(|e| malformed(format!("modified: {e}")))?;
            let old: Vec<&str> = base.candidates().iter().map(CandidateId::as_str).collect();
            if modified.num_candidates() <= base.num_candidates()
                || old.iter().any(|c| modified.index_of(c).is_err())
            {
                return Err(malformed("modified election must add candidates to the base"));
            }
            same_weights(base, modified)?;
            for (b, mb) in base.ballots().iter().zip(modified.ballots()) {
                let restricted = mb
                    .ranking()
                    .iter()
                    .map(|&c| modified.name(c).as_str())
                    .filter(|n| old.contains(n));
                if !restricted.eq(b.ranking().iter().map(|&c| base.name(c).as_str())) {
                    return Err(malformed("a ballot changes its order on the base candidates"));
                }
            }
            let before = winner_names(base);
            let within: Vec<&str> = winner_names(modified)
                .into_iter()
                .filter(|n| old.contains(n))
                .collect();
            Ok(!within.is_empty() && within != before)
        }
        (AxiomId::IndependenceOfClones, Modification::Clone { original, clone }) => {
            let modified = insert_clone(base, *original, clone)?;
            let before = winner_names(base);
            let after = winner_names(&modified);
            let orig = base.name(*original).as_str();
            let others_change = base
                .candidates()
                .iter()
                .map(CandidateId::as_str)
                .filter(|&c| c != orig)
                .any(|c| before.contains(&c) != after.contains(&c));
            let group_before = before.contains(&orig);
            let group_after = after.contains(&orig) || after.contains(&clone.as_str());
            Ok(others_change || group_before != group_after)
        }
        (AxiomId::Consistency, Modification::Split { .. }) => {
            let explanation = witness.explain()?;
            Ok(!explanation.before.is_empty() && explanation.before != explanation.after)
        }
        (AxiomId::Participation, Modification::Abstain { voter })
        | (AxiomId::StrategyProofness, Modification::Misreport { voter, .. }) => {
            let modified = witness.modified_election()?.expect("modification yields an election");
            let after = sks_winners(&modified).winners;
            let sincere = &base.ballots()[*voter];
            Ok(favourite(sincere, &after) < favourite(sincere, &before))
        }
        (AxiomId::Nondictatorship, Modification::Dictator { voter, others }) => {
            let mut all = core::iter::once(base).chain(others);
            all.try_fold(true, |acc, e| {
                e.validate().map_err(|err| malformed(format!("profile: {err}")))?;
                if e.ballots().len() < 2 {
                    return Err(malformed("profiles need at least two voters"));
                }
                check_voter(e, *voter)?;
                let top = e.ballots()[*voter].ranking()[0];
                Ok(acc && sks_winners(e).winners == [top])
            })
        }
        _ => mismatch(),
    }
}

/// Winner names for the Bucklin / positive-responsiveness fixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucklinResponsivenessReport {
    pub bucklin_before: Vec<String>,
    pub bucklin_after: Vec<String>,
    pub sks_before: Vec<String>,
    pub sks_after: Vec<String>,
}

impl BucklinResponsivenessReport {
    /// Bucklin's winners are unchanged by the lift (a violation of positive
    /// responsiveness), while SkS moves from `a` to `b`.
    pub fn confirms(&self) -> bool {
        self.bucklin_before == ["a", "b"]
            && self.bucklin_after == self.bucklin_before
            && self.sks_before == ["a"]
            && self.sks_after == ["b"]
    }
}

/// Tabulates the four-candidate election `a>b>c>d, b>a>c>d, c>d>a>b` before
/// and after lifting `b` to third place on the last ballot.
pub fn check_bucklin_positive_responsiveness_example() -> BucklinResponsivenessReport {
    let before = fixtures::responsiveness_before();
    let after = lift_candidate(&before, 2, "b", 3).expect("fixture lift is valid");
    let names = |e: &Election, ws: Vec<usize>| -> Vec<String> {
        ws.into_iter().map(|w| e.name(w).to_string()).collect()
    };
    BucklinResponsivenessReport {
        bucklin_before: names(&before, bucklin_winners(&before).winners),
        bucklin_after: names(&after, bucklin_winners(&after).winners),
        sks_before: names(&before, sks_winners(&before).winners),
        sks_after: names(&after, sks_winners(&after).winners),
    }
}
