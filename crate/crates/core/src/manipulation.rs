//! Coalitional weighted manipulation of SkS in the unique-winner model.
//!
//! A coalition of manipulators with fixed weights casts ballots of its
//! choosing next to the sincere ballots. The constructive goal is to make
//! the target the unique SkS winner; the destructive goal is to keep it from
//! winning alone.
//!
//! * [`solve_ccwm_exact`] searches every coalition profile in which each
//!   manipulator ranks the target first. Lifting the target on a ballot
//!   never costs it a win, so the restriction loses no solutions.
//!   Manipulators of equal weight are interchangeable and are enumerated as
//!   multisets.
//! * [`solve_dcwm`] tries, for each rival, the profiles in which the whole
//!   coalition ranks that rival first and the target last.
//! * [`oracle_manipulation`] enumerates every profile with no
//!   canonicalization and tabulates each one through the traced rule.

use alloc::format;
use alloc::vec::Vec;

use crate::election::{check_total, normalize, Ballot, CandidateId, Election};
use crate::error::{Error, Result};
use crate::perm::{all_permutations, factorial};
use crate::rules::{outcome_unchecked, sks_winners, Outcome, Rule};
use crate::tally::PositionCounts;
use crate::{Provenance, SearchLimits};

/// Middle orders are enumerated exhaustively by [`solve_dcwm`] up to this
/// many candidates.
pub const DCWM_EXHAUSTIVE_MAX_M: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Goal {
    Constructive,
    Destructive,
}

impl Goal {
    /// Whether the SkS `outcome` meets this goal for `target`.
    pub fn achieved(self, outcome: &Outcome, target: usize) -> bool {
        outcome.is_unique_winner(target) == (self == Goal::Constructive)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManipulationInstance {
    candidates: Vec<CandidateId>,
    sincere: Vec<Ballot>,
    manipulator_weights: Vec<u64>,
    target: usize,
    goal: Goal,
}

impl ManipulationInstance {
    /// `sincere` ballots index into `candidates` as given (any order).
    pub fn new(
        candidates: Vec<CandidateId>,
        sincere: Vec<Ballot>,
        manipulator_weights: Vec<u64>,
        target: &str,
        goal: Goal,
    ) -> Result<Self> {
        let (candidates, sincere) = normalize(candidates, sincere)?;
        let target = candidates
            .iter()
            .position(|c| c.as_str() == target)
            .ok_or_else(|| Error::UnknownCandidate(target.into()))?;
        let total = sincere
            .iter()
            .map(Ballot::weight)
            .chain(manipulator_weights.iter().copied())
            .try_fold(0u64, |acc, w| acc.checked_add(w))
            .ok_or_else(|| Error::InvalidInstance("total weight overflows".into()))?;
        check_total(total, candidates.len())?;
        Ok(ManipulationInstance {
            candidates,
            sincere,
            manipulator_weights,
            target,
            goal,
        })
    }

    /// Sincere ballots taken from `election`.
    pub fn from_election(
        election: &Election,
        manipulator_weights: Vec<u64>,
        target: &str,
        goal: Goal,
    ) -> Result<Self> {
        ManipulationInstance::new(
            election.candidates().to_vec(),
            election.ballots().to_vec(),
            manipulator_weights,
            target,
            goal,
        )
    }

    pub fn candidates(&self) -> &[CandidateId] {
        &self.candidates
    }

    pub fn sincere(&self) -> &[Ballot] {
        &self.sincere
    }

    pub fn manipulator_weights(&self) -> &[u64] {
        &self.manipulator_weights
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn goal(&self) -> Goal {
        self.goal
    }

    pub fn is_unweighted(&self) -> bool {
        self.sincere.iter().all(|b| b.weight() == 1)
            && self.manipulator_weights.iter().all(|&w| w == 1)
    }

    fn sincere_counts(&self) -> PositionCounts {
        let mut counts = PositionCounts::new(self.candidates.len());
        for b in &self.sincere {
            counts.add_ballot(b);
        }
        counts
    }

    /// The full election obtained by appending the witness ballots.
    pub fn election_with(&self, witness: &ManipulationWitness) -> Result<Election> {
        if witness.ballots.len() != self.manipulator_weights.len() {
            return Err(Error::InvalidInstance(format!(
                "witness has {} ballots for {} manipulators",
                witness.ballots.len(),
                self.manipulator_weights.len()
            )));
        }
        let mut ballots = self.sincere.clone();
        ballots.extend(
            witness
                .ballots
                .iter()
                .zip(&self.manipulator_weights)
                .map(|(r, &w)| Ballot::new(r.clone(), w)),
        );
        Election::from_sorted(self.candidates.clone(), ballots)
    }

    /// Replays a witness: true iff it reaches the instance's goal.
    pub fn verify(&self, witness: &ManipulationWitness) -> Result<bool> {
        let election = self.election_with(witness)?;
        Ok(self.goal.achieved(&sks_winners(&election).outcome(), self.target))
    }
}

/// One ranking per manipulator, in the order of the instance's weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ManipulationWitness {
    pub ballots: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcwmAnswer {
    pub witness: Option<ManipulationWitness>,
    pub provenance: Provenance,
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::BudgetExceeded { limit: self.limit });
        }
        Ok(())
    }
}

/// Exact constructive coalitional weighted manipulation.
pub fn solve_ccwm_exact(
    instance: &ManipulationInstance,
    limits: SearchLimits,
) -> Result<Option<ManipulationWitness>> {
    if instance.goal != Goal::Constructive {
        return Err(Error::InvalidParameter("ccwm needs a constructive instance".into()));
    }
    let m = instance.candidates.len();
    let target = instance.target;
    let others: Vec<usize> = (0..m).filter(|&c| c != target).collect();
    let ballots: Vec<Vec<usize>> = all_permutations(&others)
        .into_iter()
        .map(|rest| {
            let mut r = Vec::with_capacity(m);
            r.push(target);
            r.extend(rest);
            r
        })
        .collect();

    // Equal-weight manipulators form groups, heaviest first; zero-weight
    // manipulators are inert and keep the first ballot.
    let weights = &instance.manipulator_weights;
    let mut active: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0).collect();
    active.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));

    let mut search = CcwmSearch {
        ballots: &ballots,
        weights,
        order: &active,
        choice: alloc::vec![0; active.len()],
        counts: instance.sincere_counts(),
        target,
        budget: Budget {
            used: 0,
            limit: limits.node_limit,
        },
    };
    if !search.descend(0, 0)? {
        return Ok(None);
    }
    let mut out = alloc::vec![ballots[0].clone(); weights.len()];
    for (slot, &manipulator) in active.iter().enumerate() {
        out[manipulator] = ballots[search.choice[slot]].clone();
    }
    Ok(Some(ManipulationWitness { ballots: out }))
}

struct CcwmSearch<'a> {
    ballots: &'a [Vec<usize>],
    weights: &'a [u64],
    order: &'a [usize],
    choice: Vec<usize>,
    counts: PositionCounts,
    target: usize,
    budget: Budget,
}

impl CcwmSearch<'_> {
    fn descend(&mut self, slot: usize, min_choice: usize) -> Result<bool> {
        self.budget.spend()?;
        if slot == self.order.len() {
            return Ok(outcome_unchecked(&self.counts, Rule::Sks).is_unique_winner(self.target));
        }
        let weight = self.weights[self.order[slot]];
        for b in min_choice..self.ballots.len() {
            self.counts.add(&self.ballots[b], weight);
            self.choice[slot] = b;
            let next_same_group =
                slot + 1 < self.order.len() && self.weights[self.order[slot + 1]] == weight;
            let found = self.descend(slot + 1, if next_same_group { b } else { 0 })?;
            self.counts.remove(&self.ballots[b], weight);
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Which middle orders [`solve_dcwm_with`] evaluates between the rival on
/// top and the target at the bottom.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MiddleOrders {
    /// Every permutation of the middle candidates.
    Exhaustive,
    /// For each stage cut `l`, the middle candidates sorted by ascending and
    /// by descending sincere score at stage `l` (ties by name): at most `2m`
    /// orders.
    ThreatSorted,
}

/// Destructive coalitional weighted manipulation. Middle orders are
/// enumerated exhaustively up to [`DCWM_EXHAUSTIVE_MAX_M`] candidates and
/// drawn from [`MiddleOrders::ThreatSorted`] beyond that; the provenance
/// flag says which.
pub fn solve_dcwm(instance: &ManipulationInstance) -> Result<DcwmAnswer> {
    let family = if instance.candidates.len() <= DCWM_EXHAUSTIVE_MAX_M {
        MiddleOrders::Exhaustive
    } else {
        MiddleOrders::ThreatSorted
    };
    solve_dcwm_with(instance, family)
}

pub fn solve_dcwm_with(instance: &ManipulationInstance, family: MiddleOrders) -> Result<DcwmAnswer> {
    if instance.goal != Goal::Destructive {
        return Err(Error::InvalidParameter("dcwm needs a destructive instance".into()));
    }
    let provenance = match family {
        MiddleOrders::Exhaustive => Provenance::Exhaustive,
        MiddleOrders::ThreatSorted => Provenance::SketchFamily,
    };
    let m = instance.candidates.len();
    let target = instance.target;
    let coalition: u64 = instance.manipulator_weights.iter().sum();
    let mut counts = instance.sincere_counts();
    let mut sincere_scores = alloc::vec![alloc::vec![0u64; m]; m + 1];
    for stage in 1..=m {
        for c in 0..m {
            sincere_scores[stage][c] = sincere_scores[stage - 1][c] + counts.at(c, stage);
        }
    }

    for rival in (0..m).filter(|&c| c != target) {
        let middle: Vec<usize> = (0..m).filter(|&c| c != target && c != rival).collect();
        let orders = match family {
            MiddleOrders::Exhaustive => all_permutations(&middle),
            MiddleOrders::ThreatSorted => threat_orders(&middle, &sincere_scores),
        };
        for order in orders {
            let mut ballot = Vec::with_capacity(m);
            ballot.push(rival);
            ballot.extend(order);
            ballot.push(target);
            counts.add(&ballot, coalition);
            let outcome = outcome_unchecked(&counts, Rule::Sks);
            counts.remove(&ballot, coalition);
            if !outcome.is_unique_winner(target) {
                let ballots = alloc::vec![ballot; instance.manipulator_weights.len()];
                return Ok(DcwmAnswer {
                    witness: Some(ManipulationWitness { ballots }),
                    provenance,
                });
            }
        }
    }
    Ok(DcwmAnswer {
        witness: None,
        provenance,
    })
}

fn threat_orders(middle: &[usize], sincere_scores: &[Vec<u64>]) -> Vec<Vec<usize>> {
    let mut orders: Vec<Vec<usize>> = Vec::new();
    for scores in &sincere_scores[1..] {
        let mut ascending = middle.to_vec();
        ascending.sort_by(|&a, &b| scores[a].cmp(&scores[b]).then(a.cmp(&b)));
        let mut descending = middle.to_vec();
        descending.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
        for order in [ascending, descending] {
            if !orders.contains(&order) {
                orders.push(order);
            }
        }
    }
    orders
}

/// Ground truth: every assignment of full rankings to manipulators, in
/// odometer order with the first manipulator most significant.
pub fn oracle_manipulation(
    instance: &ManipulationInstance,
    limits: SearchLimits,
) -> Result<Option<ManipulationWitness>> {
    let m = instance.candidates.len();
    let s = instance.manipulator_weights.len();
    let space = (0..s).try_fold(1u64, |acc, _| acc.checked_mul(factorial(m)));
    match space {
        Some(n) if n <= limits.node_limit => {}
        _ => return Err(Error::BudgetExceeded { limit: limits.node_limit }),
    }
    let all: Vec<usize> = (0..m).collect();
    let rankings = all_permutations(&all);
    let mut digits = alloc::vec![0usize; s];
    loop {
        let witness = ManipulationWitness {
            ballots: digits.iter().map(|&d| rankings[d].clone()).collect(),
        };
        if instance.verify(&witness)? {
            return Ok(Some(witness));
        }
        // Odometer increment, last digit fastest.
        let mut i = s;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < rankings.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn require_unweighted(instance: &ManipulationInstance, single: bool) -> Result<()> {
    if !instance.is_unweighted() {
        return Err(Error::InvalidParameter("unweighted variant needs unit weights".into()));
    }
    if single && instance.manipulator_weights.len() != 1 {
        return Err(Error::InvalidParameter("single-manipulator variant needs exactly one manipulator".into()));
    }
    Ok(())
}

/// Constructive coalitional manipulation, unweighted.
pub fn solve_ccm(instance: &ManipulationInstance, limits: SearchLimits) -> Result<Option<ManipulationWitness>> {
    require_unweighted(instance, false)?;
    solve_ccwm_exact(instance, limits)
}

/// Constructive manipulation by a single unweighted manipulator.
pub fn solve_cm(instance: &ManipulationInstance, limits: SearchLimits) -> Result<Option<ManipulationWitness>> {
    require_unweighted(instance, true)?;
    solve_ccwm_exact(instance, limits)
}

/// Destructive coalitional manipulation, unweighted.
pub fn solve_dcm(instance: &ManipulationInstance) -> Result<DcwmAnswer> {
    require_unweighted(instance, false)?;
    solve_dcwm(instance)
}

/// Destructive manipulation by a single unweighted manipulator.
pub fn solve_dm(instance: &ManipulationInstance) -> Result<DcwmAnswer> {
    require_unweighted(instance, true)?;
    solve_dcwm(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fixtures, gen_cyclic};
    use alloc::vec;

    fn abc(weight: u64, ranking: &[&str]) -> Election {
        Election::from_names(&["a", "b", "c"], &[(weight, ranking)]).unwrap()
    }

    #[test]
    fn ccwm_already_winning_needs_no_ballots() {
        let e = fixtures::example3();
        let inst = ManipulationInstance::from_election(&e, vec![], "Y", Goal::Constructive).unwrap();
        let w = solve_ccwm_exact(&inst, SearchLimits::default()).unwrap().unwrap();
        assert!(w.ballots.is_empty());
    }

    #[test]
    fn ccwm_two_heavy_manipulators() {
        let e = abc(3, &["a", "b", "c"]);
        let inst = ManipulationInstance::from_election(&e, vec![2, 2], "c", Goal::Constructive).unwrap();
        let w = solve_ccwm_exact(&inst, SearchLimits::default()).unwrap().unwrap();
        assert!(inst.verify(&w).unwrap());
        assert!(w.ballots.iter().all(|b| b[0] == 2));
        assert!(oracle_manipulation(&inst, SearchLimits::default()).unwrap().is_some());
    }

    #[test]
    fn ccwm_cyclic_without_coalition_fails() {
        let e = gen_cyclic(3).unwrap();
        let inst = ManipulationInstance::from_election(&e, vec![], "c1", Goal::Constructive).unwrap();
        assert_eq!(solve_ccwm_exact(&inst, SearchLimits::default()).unwrap(), None);
    }

    #[test]
    fn ccwm_budget_is_reported() {
        // c2 holds a first-place majority no coalition of weight 6 can undo.
        let e = Election::from_names(
            &["c1", "c2", "c3", "c4", "c5"],
            &[(100, &["c2", "c3", "c4", "c5", "c1"])],
        )
        .unwrap();
        let inst =
            ManipulationInstance::from_election(&e, vec![1, 2, 3], "c1", Goal::Constructive).unwrap();
        assert_eq!(
            solve_ccwm_exact(&inst, SearchLimits::new(10)),
            Err(Error::BudgetExceeded { limit: 10 })
        );
        assert_eq!(
            oracle_manipulation(&inst, SearchLimits::new(10)),
            Err(Error::BudgetExceeded { limit: 10 })
        );
    }

    #[test]
    fn dcwm_example3_single_manipulator() {
        let e = fixtures::example3();
        let inst = ManipulationInstance::from_election(&e, vec![1], "Y", Goal::Destructive).unwrap();
        let ans = solve_dcwm(&inst).unwrap();
        assert_eq!(ans.provenance, Provenance::Exhaustive);
        let w = ans.witness.unwrap();
        assert!(inst.verify(&w).unwrap());
        // An added X > Z > Y ballot lifts X to a stage-2 score of 4.
        let xzy = ManipulationWitness { ballots: vec![vec![0, 2, 1]] };
        assert!(inst.verify(&xzy).unwrap());
        let outcome = sks_winners(&inst.election_with(&xzy).unwrap());
        assert_eq!(outcome.winners, [0]);
    }

    #[test]
    fn dcwm_majority_cannot_be_broken() {
        let e = Election::from_names(&["a", "b", "c"], &[(3, &["a", "b", "c"])]).unwrap();
        let inst = ManipulationInstance::from_election(&e, vec![1], "a", Goal::Destructive).unwrap();
        assert_eq!(solve_dcwm(&inst).unwrap().witness, None);
        assert_eq!(oracle_manipulation(&inst, SearchLimits::default()).unwrap(), None);
    }

    #[test]
    fn dcwm_zero_coalition() {
        let e = fixtures::example2();
        let inst = ManipulationInstance::from_election(&e, vec![0], "X", Goal::Destructive).unwrap();
        let w = solve_dcwm(&inst).unwrap().witness.unwrap();
        assert_eq!(w.ballots.len(), 1);
        assert!(inst.verify(&w).unwrap());
    }

    #[test]
    fn goal_mismatch_is_rejected() {
        let e = fixtures::example3();
        let c = ManipulationInstance::from_election(&e, vec![1], "Y", Goal::Constructive).unwrap();
        let d = ManipulationInstance::from_election(&e, vec![1], "Y", Goal::Destructive).unwrap();
        assert!(solve_dcwm(&c).is_err());
        assert!(solve_ccwm_exact(&d, SearchLimits::default()).is_err());
    }

    #[test]
    fn unweighted_entry_points() {
        let e = fixtures::example3();
        let one = ManipulationInstance::from_election(&e, vec![1], "X", Goal::Constructive).unwrap();
        let two = ManipulationInstance::from_election(&e, vec![1, 1], "X", Goal::Constructive).unwrap();
        let heavy = ManipulationInstance::from_election(&e, vec![2], "X", Goal::Constructive).unwrap();
        assert!(solve_cm(&one, SearchLimits::default()).is_ok());
        assert!(solve_cm(&two, SearchLimits::default()).is_err());
        assert!(solve_ccm(&two, SearchLimits::default()).is_ok());
        assert!(solve_ccm(&heavy, SearchLimits::default()).is_err());
    }

    #[test]
    fn empty_sincere_list_is_allowed() {
        let inst = ManipulationInstance::new(
            fixtures::example3().candidates().to_vec(),
            vec![],
            vec![1],
            "Z",
            Goal::Constructive,
        )
        .unwrap();
        let w = solve_ccwm_exact(&inst, SearchLimits::default()).unwrap().unwrap();
        assert!(inst.verify(&w).unwrap());
        assert!(ManipulationInstance::new(
            fixtures::example3().candidates().to_vec(),
            vec![],
            vec![0],
            "Z",
            Goal::Constructive,
        )
        .is_err());
    }
}
