//! Exhaustive checks around one given election.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{check_witness, AxiomId, Lift, Modification, ViolationWitness};
use crate::election::{Ballot, CandidateId, Election};
use crate::error::{Error, Result};
use crate::perm::all_permutations;
use crate::rules::sks_winners;
use crate::SearchLimits;

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn check(&mut self, w: ViolationWitness) -> Result<Option<ViolationWitness>> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::BudgetExceeded { limit: self.limit });
        }
        Ok(check_witness(&w)?.then_some(w))
    }
}

/// Looks for a violation of `axiom` that uses `election` as its base (or,
/// for IIA, as the extended election) and a single elementary change:
///
/// * Condorcet, majority, citizens' sovereignty, resoluteness: the election
///   itself;
/// * monotonicity, positive responsiveness: every single lift of a winner;
/// * strong monotonicity: every single-ballot replacement that keeps the
///   set above a winner weakly smaller;
/// * IIA: deleting any one candidate gives the base;
/// * clones: cloning any one candidate;
/// * consistency: every split of the ballot list into two nonempty parts;
/// * participation: every voter abstaining;
/// * strategy-proofness: every voter casting any other ranking.
///
/// Nondictatorship concerns a family of profiles and is rejected. Returns
/// the first violation in that order; each replay counts against `limits`.
pub fn check_election(
    axiom: AxiomId,
    election: &Election,
    limits: SearchLimits,
) -> Result<Option<ViolationWitness>> {
    election.validate()?;
    let mut budget = Budget {
        used: 0,
        limit: limits.node_limit,
    };
    let e = election;
    let m = e.num_candidates();
    let n = e.ballots().len();
    let witness = |modification| ViolationWitness::new(axiom, e.clone(), modification);
    match axiom {
        AxiomId::Condorcet
        | AxiomId::Majority
        | AxiomId::CitizensSovereignty
        | AxiomId::Resoluteness => budget.check(witness(Modification::None)),
        AxiomId::Monotonicity | AxiomId::PositiveResponsiveness => {
            for w in sks_winners(e).winners {
                for (ballot, b) in e.ballots().iter().enumerate() {
                    for position in 1..b.position_of(w).unwrap() {
                        let lifts = alloc::vec![Lift { ballot, position }];
                        let found = budget.check(witness(Modification::Lift { candidate: w, lifts }))?;
                        if found.is_some() {
                            return Ok(found);
                        }
                    }
                }
            }
            Ok(None)
        }
        AxiomId::StrongMonotonicity => {
            let rankings = all_permutations(&(0..m).collect::<Vec<_>>());
            for w in sks_winners(e).winners {
                for (i, b) in e.ballots().iter().enumerate() {
                    let above = &b.ranking()[..b.position_of(w).unwrap() - 1];
                    for r in &rankings {
                        let cut = r.iter().position(|&c| c == w).unwrap();
                        if r == b.ranking() || r[..cut].iter().any(|c| !above.contains(c)) {
                            continue;
                        }
                        let mut ballots = e.ballots().to_vec();
                        ballots[i] = Ballot::new(r.clone(), b.weight());
                        let modified = Election::from_sorted(e.candidates().to_vec(), ballots)?;
                        let found = budget.check(witness(Modification::Replace { candidate: w, modified }))?;
                        if found.is_some() {
                            return Ok(found);
                        }
                    }
                }
            }
            Ok(None)
        }
        AxiomId::IIA => {
            for z in 0..m {
                let Ok(base) = e.restrict(&[z]) else { continue };
                let w = ViolationWitness::new(axiom, base, Modification::Extend { modified: e.clone() });
                let found = budget.check(w)?;
                if found.is_some() {
                    return Ok(found);
                }
            }
            Ok(None)
        }
        AxiomId::IndependenceOfClones => {
            for original in 0..m {
                let mut name = String::from(e.name(original).as_str());
                loop {
                    name.push('\'');
                    if e.index_of(&name).is_err() {
                        break;
                    }
                }
                let clone = CandidateId::new(name)?;
                let found = budget.check(witness(Modification::Clone { original, clone }))?;
                if found.is_some() {
                    return Ok(found);
                }
            }
            Ok(None)
        }
        AxiomId::Consistency => {
            if n >= 64 || (1u64 << n) > limits.node_limit {
                return Err(Error::BudgetExceeded { limit: limits.node_limit });
            }
            for mask in 1..(1u64 << n) - 1 {
                let (first, second): (Vec<_>, Vec<_>) = e
                    .ballots()
                    .iter()
                    .enumerate()
                    .partition(|(i, _)| mask >> i & 1 == 1);
                let part = |p: Vec<(usize, &Ballot)>| {
                    Election::from_sorted(e.candidates().to_vec(), p.into_iter().map(|(_, b)| b.clone()).collect())
                };
                let (Ok(base), Ok(second)) = (part(first), part(second)) else { continue };
                let w = ViolationWitness::new(axiom, base, Modification::Split { second });
                let found = budget.check(w)?;
                if found.is_some() {
                    return Ok(found);
                }
            }
            Ok(None)
        }
        AxiomId::Participation => {
            for voter in 0..n {
                let abstain = witness(Modification::Abstain { voter });
                if abstain.modified_election().is_err() {
                    continue;
                }
                let found = budget.check(abstain)?;
                if found.is_some() {
                    return Ok(found);
                }
            }
            Ok(None)
        }
        AxiomId::StrategyProofness => {
            let rankings = all_permutations(&(0..m).collect::<Vec<_>>());
            for voter in 0..n {
                for ranking in rankings.iter().filter(|r| r[..] != *e.ballots()[voter].ranking()) {
                    let w = witness(Modification::Misreport { voter, ranking: ranking.clone() });
                    let found = budget.check(w)?;
                    if found.is_some() {
                        return Ok(found);
                    }
                }
            }
            Ok(None)
        }
        AxiomId::Nondictatorship => Err(Error::InvalidParameter(format!(
            "{axiom} is a property of profile families; use the seeded search"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::fixtures;

    #[test]
    fn fixtures_show_local_violations() {
        let lim = SearchLimits::default();
        let clones = check_election(AxiomId::IndependenceOfClones, &fixtures::table2_base(), lim).unwrap().unwrap();
        assert!(matches!(clones.modification, Modification::Clone { .. }));
        let iia = check_election(AxiomId::IIA, &fixtures::table2_cloned(), lim).unwrap().unwrap();
        assert!(check_witness(&iia).unwrap());
        assert_eq!(iia.base.num_candidates(), 3);
        assert!(check_election(AxiomId::Condorcet, &fixtures::table2_cloned(), lim).unwrap().is_some());
        let sp = check_election(AxiomId::StrategyProofness, &fixtures::example3(), lim).unwrap().unwrap();
        assert!(check_witness(&sp).unwrap());
        for axiom in [AxiomId::Monotonicity, AxiomId::PositiveResponsiveness, AxiomId::Majority] {
            assert_eq!(check_election(axiom, &fixtures::example1(), lim).unwrap(), None);
        }
        assert!(check_election(AxiomId::Nondictatorship, &fixtures::example3(), lim).is_err());
        assert!(matches!(
            check_election(AxiomId::StrategyProofness, &fixtures::example1(), SearchLimits::new(5)),
            Err(Error::BudgetExceeded { limit: 5 })
        ));
    }
}
