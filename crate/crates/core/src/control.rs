//! Electoral control of SkS in the unique-winner model: deleting up to `k`
//! candidates (constructive CCDC / destructive DCDC) and adding up to `k`
//! voters from a pool of unregistered ballots (CCAV / DCAV).
//!
//! Deleting candidates restricts every ballot to the remaining candidates
//! and renumbers positions `1..=m'`.
//!
//! The exact solvers enumerate actions by size, then lexicographically by
//! the sorted index list, and return the first success, so the witness is
//! the smallest, lexicographically least action. [`oracle_control`]
//! enumerates the same action space as bit masks, rebuilds each election
//! from scratch and keeps the minimum under the same order.
//!
//! [`solve_dcav`] is a polynomial procedure built on two facts: a rival that
//! beats the target under Bucklin also denies it sole SkS victory, and a
//! unique Bucklin winner is the unique SkS winner. It evaluates a family of
//! candidate additions under Bucklin first; if one leaves the target outside
//! the Bucklin winners the answer is yes, and if none even makes the target
//! a Bucklin co-winner the answer is no. Otherwise the same family is
//! tabulated under SkS, where sums of positions decide.
//!
//! The family is built per rival `d` and stage `l` from greedy orders over
//! the pool. The primary orders sort ballots (descending, then by pool
//! index) by:
//!
//! * net gain `w * ([d in top l] - [target in top l])`, then the target's
//!   position, then the ballot's contribution to
//!   `sumpos_l(target) - sumpos_l(d)`;
//! * net gain, then that contribution, then lighter ballots first;
//! * raw gain `w * [d in top l]`, then the target's position, then the
//!   contribution;
//! * sign of the net gain, then lighter ballots first, then the target's
//!   position.
//!
//! Every prefix of each order up to `k` is tried, as is every prefix plus
//! one other pool ballot, and every prefix topped up from a threshold order
//! preferring heavy ballots that keep the target out of the top `l - 1`
//! (these raise the majority threshold without helping the target early).
//! Whether this family is complete is not known beyond exhaustive
//! cross-checks against [`oracle_control`], so answers carry
//! [`Provenance::SketchFamily`].

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::election::{Ballot, Election};
use crate::error::{Error, Result};
use crate::manipulation::Goal;
use crate::rules::{outcome_unchecked, sks_winners, Outcome, Rule};
use crate::tally::PositionCounts;
use crate::{Provenance, SearchLimits};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ControlKind {
    Ccdc,
    Dcdc,
    Ccav,
    Dcav,
}

impl ControlKind {
    pub fn goal(self) -> Goal {
        match self {
            ControlKind::Ccdc | ControlKind::Ccav => Goal::Constructive,
            ControlKind::Dcdc | ControlKind::Dcav => Goal::Destructive,
        }
    }

    pub fn adds_voters(self) -> bool {
        matches!(self, ControlKind::Ccav | ControlKind::Dcav)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ControlKind::Ccdc => "ccdc",
            ControlKind::Dcdc => "dcdc",
            ControlKind::Ccav => "ccav",
            ControlKind::Dcav => "dcav",
        }
    }
}

impl fmt::Display for ControlKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlInstance {
    kind: ControlKind,
    election: Election,
    target: usize,
    limit: usize,
    pool: Vec<Ballot>,
}

impl ControlInstance {
    /// `pool` ballots index into the election's (sorted) candidates and must
    /// be empty for candidate control.
    pub fn new(
        kind: ControlKind,
        election: Election,
        target: &str,
        limit: usize,
        pool: Vec<Ballot>,
    ) -> Result<Self> {
        let target = election.index_of(target)?;
        if !kind.adds_voters() && !pool.is_empty() {
            return Err(Error::InvalidInstance(format!(
                "{kind} takes no pool of unregistered voters"
            )));
        }
        // Validates the pool rankings and the combined weight.
        election.with_ballots(pool.iter().cloned()).map_err(|e| match e {
            Error::InvalidInstance(why) => Error::InvalidInstance(format!("pool: {why}")),
            other => other,
        })?;
        Ok(ControlInstance {
            kind,
            election,
            target,
            limit,
            pool,
        })
    }

    pub fn kind(&self) -> ControlKind {
        self.kind
    }

    pub fn election(&self) -> &Election {
        &self.election
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn pool(&self) -> &[Ballot] {
        &self.pool
    }

    /// Election resulting from the action, or an error if the action is not
    /// legal for this instance.
    pub fn apply(&self, witness: &ControlWitness) -> Result<Election> {
        let malformed = |why: &str| Err(Error::InvalidInstance(why.into()));
        match (self.kind.adds_voters(), witness) {
            (false, ControlWitness::Deleted(deleted)) => {
                if deleted.len() > self.limit {
                    return malformed("more deletions than the limit allows");
                }
                if self.kind == ControlKind::Dcdc && deleted.contains(&self.target) {
                    return malformed("the target may not be deleted");
                }
                if !strictly_increasing(deleted) {
                    return malformed("deletions must be sorted and distinct");
                }
                self.election.restrict(deleted)
            }
            (true, ControlWitness::Added(added)) => {
                if added.len() > self.limit {
                    return malformed("more additions than the limit allows");
                }
                if !strictly_increasing(added) || added.iter().any(|&i| i >= self.pool.len()) {
                    return malformed("additions must be sorted, distinct pool indices");
                }
                self.election
                    .with_ballots(added.iter().map(|&i| self.pool[i].clone()))
            }
            _ => malformed("witness kind does not match the control type"),
        }
    }

    /// Replays a witness through SkS: true iff it is legal and reaches the
    /// goal. Deleting the target never reaches the constructive goal.
    pub fn verify(&self, witness: &ControlWitness) -> Result<bool> {
        let election = self.apply(witness)?;
        let target = match witness {
            ControlWitness::Deleted(deleted) if deleted.contains(&self.target) => {
                return Ok(self.kind.goal() == Goal::Destructive);
            }
            ControlWitness::Deleted(deleted) => {
                self.target - deleted.iter().filter(|&&c| c < self.target).count()
            }
            ControlWitness::Added(_) => self.target,
        };
        Ok(self
            .kind
            .goal()
            .achieved(&sks_winners(&election).outcome(), target))
    }
}

fn strictly_increasing(xs: &[usize]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

/// Candidate indices (of the original election) to delete, or pool indices
/// to add; sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ControlWitness {
    Deleted(Vec<usize>),
    Added(Vec<usize>),
}

impl ControlWitness {
    pub fn len(&self) -> usize {
        match self {
            ControlWitness::Deleted(v) | ControlWitness::Added(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn indices(&self) -> &[usize] {
        match self {
            ControlWitness::Deleted(v) | ControlWitness::Added(v) => v,
        }
    }
}

fn require(instance: &ControlInstance, kind: ControlKind) -> Result<()> {
    if instance.kind != kind {
        return Err(Error::InvalidParameter(format!(
            "expected a {kind} instance, got {}",
            instance.kind
        )));
    }
    Ok(())
}

/// Calls `visit` on every `size`-subset of `items` in lexicographic order
/// until it returns `Ok(true)`.
fn for_each_combination(
    items: &[usize],
    size: usize,
    mut visit: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<Option<Vec<usize>>> {
    if size > items.len() {
        return Ok(None);
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    loop {
        chosen.clear();
        chosen.extend(idx.iter().map(|&i| items[i]));
        if visit(&chosen)? {
            return Ok(Some(chosen));
        }
        let mut i = size;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            if idx[i] < items.len() - size + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn new(limits: SearchLimits) -> Self {
        Budget {
            used: 0,
            limit: limits.node_limit,
        }
    }

    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::BudgetExceeded { limit: self.limit });
        }
        Ok(())
    }
}

/// Position counts of `election` with `deleted` removed; candidate `c` maps
/// to `c - #{deleted < c}`.
fn restricted_counts(election: &Election, deleted: &[usize]) -> PositionCounts {
    let m = election.num_candidates();
    let mut map = vec![0usize; m];
    let mut next = 0;
    for (c, slot) in map.iter_mut().enumerate() {
        if deleted.binary_search(&c).is_ok() {
            *slot = usize::MAX;
        } else {
            *slot = next;
            next += 1;
        }
    }
    let mut counts = PositionCounts::new(next);
    let mut ranking = Vec::with_capacity(next);
    for ballot in election.ballots() {
        ranking.clear();
        ranking.extend(
            ballot
                .ranking()
                .iter()
                .map(|&c| map[c])
                .filter(|&c| c != usize::MAX),
        );
        counts.add(&ranking, ballot.weight());
    }
    counts
}

fn solve_deletion(
    instance: &ControlInstance,
    limits: SearchLimits,
) -> Result<Option<ControlWitness>> {
    let m = instance.election.num_candidates();
    let target = instance.target;
    let goal = instance.kind.goal();
    // Deleting the target is illegal for DCDC and never helps for CCDC.
    let deletable: Vec<usize> = (0..m).filter(|&c| c != target).collect();
    let mut budget = Budget::new(limits);
    for size in 0..=instance.limit.min(deletable.len()) {
        let found = for_each_combination(&deletable, size, |deleted| {
            budget.spend()?;
            let counts = restricted_counts(&instance.election, deleted);
            let shifted = target - deleted.iter().filter(|&&c| c < target).count();
            Ok(goal.achieved(&outcome_unchecked(&counts, Rule::Sks), shifted))
        })?;
        if let Some(deleted) = found {
            return Ok(Some(ControlWitness::Deleted(deleted)));
        }
    }
    Ok(None)
}

/// Exact constructive control by deleting candidates.
pub fn solve_ccdc_exact(
    instance: &ControlInstance,
    limits: SearchLimits,
) -> Result<Option<ControlWitness>> {
    require(instance, ControlKind::Ccdc)?;
    solve_deletion(instance, limits)
}

/// Exact destructive control by deleting candidates (the target itself is
/// never deleted).
pub fn solve_dcdc_exact(
    instance: &ControlInstance,
    limits: SearchLimits,
) -> Result<Option<ControlWitness>> {
    require(instance, ControlKind::Dcdc)?;
    solve_deletion(instance, limits)
}

/// Exact constructive control by adding voters.
pub fn solve_ccav_exact(
    instance: &ControlInstance,
    limits: SearchLimits,
) -> Result<Option<ControlWitness>> {
    require(instance, ControlKind::Ccav)?;
    let base = PositionCounts::from_election(&instance.election);
    let indices: Vec<usize> = (0..instance.pool.len()).collect();
    let mut budget = Budget::new(limits);
    for size in 0..=instance.limit.min(indices.len()) {
        let found = for_each_combination(&indices, size, |added| {
            budget.spend()?;
            let mut counts = base.clone();
            for &i in added {
                counts.add_ballot(&instance.pool[i]);
            }
            Ok(outcome_unchecked(&counts, Rule::Sks).is_unique_winner(instance.target))
        })?;
        if let Some(added) = found {
            return Ok(Some(ControlWitness::Added(added)));
        }
    }
    Ok(None)
}

/// Which branch of the DCAV procedure produced the answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcavCase {
    /// The target is not the unique SkS winner without any addition.
    AlreadyDenied,
    /// Some addition makes a rival beat the target outright under Bucklin.
    BucklinDefeat,
    /// No addition makes the target even a Bucklin co-winner.
    NoBucklinTie,
    /// Bucklin ties are reachable; sums of positions decided.
    SumOfPositions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcavAnswer {
    pub witness: Option<ControlWitness>,
    pub case: DcavCase,
    pub provenance: Provenance,
}

/// Polynomial destructive control by adding voters; see the module docs for
/// the candidate additions it considers.
pub fn solve_dcav(instance: &ControlInstance) -> Result<DcavAnswer> {
    require(instance, ControlKind::Dcav)?;
    let provenance = Provenance::SketchFamily;
    let target = instance.target;
    let base = PositionCounts::from_election(&instance.election);
    if !outcome_unchecked(&base, Rule::Sks).is_unique_winner(target) {
        return Ok(DcavAnswer {
            witness: Some(ControlWitness::Added(Vec::new())),
            case: DcavCase::AlreadyDenied,
            provenance,
        });
    }

    let additions = dcav_candidates(instance);
    let evaluate = |added: &[usize], rule: Rule| -> Outcome {
        let mut counts = base.clone();
        for &i in added {
            counts.add_ballot(&instance.pool[i]);
        }
        outcome_unchecked(&counts, rule)
    };
    let witness = |added: &[usize]| {
        let mut sorted = added.to_vec();
        sorted.sort_unstable();
        Some(ControlWitness::Added(sorted))
    };

    let mut bucklin_tie = false;
    for added in &additions {
        let outcome = evaluate(added, Rule::Bucklin);
        if !outcome.winners.contains(&target) {
            return Ok(DcavAnswer {
                witness: witness(added),
                case: DcavCase::BucklinDefeat,
                provenance,
            });
        }
        bucklin_tie |= outcome.winners.len() > 1;
    }
    if !bucklin_tie {
        return Ok(DcavAnswer {
            witness: None,
            case: DcavCase::NoBucklinTie,
            provenance,
        });
    }
    let found = additions
        .iter()
        .find(|added| !evaluate(added, Rule::Sks).is_unique_winner(target));
    Ok(DcavAnswer {
        witness: found.and_then(|added| witness(added)),
        case: DcavCase::SumOfPositions,
        provenance,
    })
}

/// Candidate additions: for each rival and stage, every prefix of a greedy
/// pool order, every prefix plus one other pool ballot, and every prefix
/// topped up from a second order that favours heavy ballots keeping the
/// target out of the earlier stages (they raise the majority threshold
/// without helping the target). Deduplicated, in generation order.
fn dcav_candidates(instance: &ControlInstance) -> Vec<Vec<usize>> {
    let m = instance.election.num_candidates();
    let target = instance.target;
    let pool = &instance.pool;
    let take = instance.limit.min(pool.len());
    let mut out: Vec<Vec<usize>> = Vec::new();
    if take == 0 {
        return out;
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut push = |mut added: Vec<usize>| {
        added.sort_unstable();
        if seen.insert(added.clone()) {
            out.push(added);
        }
    };
    let target_pos: Vec<usize> = pool
        .iter()
        .map(|b| b.position_of(target).unwrap_or(m))
        .collect();
    let sorted_by = |key: &dyn Fn(usize) -> [i128; 3]| {
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by(|&a, &b| key(b).cmp(&key(a)).then(a.cmp(&b)));
        order
    };
    for rival in (0..m).filter(|&c| c != target) {
        for stage in 1..=m {
            let features = |i: usize| {
                let b = &pool[i];
                let w = b.weight() as i128;
                let pos_t = target_pos[i];
                let pos_d = b.position_of(rival).unwrap_or(m);
                let d_in = (pos_d <= stage) as i128;
                let t_in = (pos_t <= stage) as i128;
                let net = w * (d_in - t_in);
                let adv = w * (t_in * pos_t as i128 - d_in * pos_d as i128);
                (w, net, d_in, pos_t as i128, adv)
            };
            let primary = [
                sorted_by(&|i| {
                    let (_, net, _, pt, adv) = features(i);
                    [net, pt, adv]
                }),
                sorted_by(&|i| {
                    let (w, net, _, _, adv) = features(i);
                    [net, adv, -w]
                }),
                sorted_by(&|i| {
                    let (w, _, d_in, pt, adv) = features(i);
                    [w * d_in, pt, adv]
                }),
                sorted_by(&|i| {
                    let (w, net, _, pt, _) = features(i);
                    [net.signum(), -w, pt]
                }),
            ];
            let raisers = sorted_by(&|i| {
                let (w, net, _, pt, _) = features(i);
                let late = if pt >= stage as i128 { w } else { -w };
                [late, net, pt]
            });
            for order in &primary {
                for len in 1..=take {
                    push(order[..len].to_vec());
                }
                for len in 0..take {
                    let head = &order[..len];
                    for &extra in order[len..].iter() {
                        let mut added = head.to_vec();
                        added.push(extra);
                        push(added);
                    }
                }
                for len in 0..take {
                    let head = &order[..len];
                    let mut added = head.to_vec();
                    for &r in raisers.iter().filter(|r| !head.contains(r)) {
                        if added.len() == take {
                            break;
                        }
                        added.push(r);
                        push(added.clone());
                    }
                }
            }
        }
    }
    out
}

/// Ground truth over every legal action of the instance's kind: all subsets
/// of candidates (never all of them; never the target for DCDC) or of the
/// pool, each tabulated from a freshly built election. Returns the smallest,
/// lexicographically least successful action of size at most `k`.
pub fn oracle_control(
    instance: &ControlInstance,
    limits: SearchLimits,
) -> Result<Option<ControlWitness>> {
    let universe = if instance.kind.adds_voters() {
        instance.pool.len()
    } else {
        instance.election.num_candidates()
    };
    if universe >= 63 || (1u64 << universe) > limits.node_limit {
        return Err(Error::BudgetExceeded {
            limit: limits.node_limit,
        });
    }
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u64..(1u64 << universe) {
        let chosen: Vec<usize> = (0..universe).filter(|&i| mask >> i & 1 == 1).collect();
        if chosen.len() > instance.limit {
            continue;
        }
        let witness = if instance.kind.adds_voters() {
            ControlWitness::Added(chosen.clone())
        } else {
            if chosen.len() == universe
                || (instance.kind == ControlKind::Dcdc && chosen.contains(&instance.target))
            {
                continue;
            }
            ControlWitness::Deleted(chosen.clone())
        };
        let better = match &best {
            None => true,
            Some(b) => (chosen.len(), &chosen) < (b.len(), b),
        };
        if better && instance.verify(&witness)? {
            best = Some(chosen);
        }
    }
    Ok(best.map(|chosen| {
        if instance.kind.adds_voters() {
            ControlWitness::Added(chosen)
        } else {
            ControlWitness::Deleted(chosen)
        }
    }))
}

/// Dispatches to the solver for the instance's kind.
pub fn solve(instance: &ControlInstance, limits: SearchLimits) -> Result<Option<ControlWitness>> {
    match instance.kind {
        ControlKind::Ccdc => solve_ccdc_exact(instance, limits),
        ControlKind::Dcdc => solve_dcdc_exact(instance, limits),
        ControlKind::Ccav => solve_ccav_exact(instance, limits),
        ControlKind::Dcav => Ok(solve_dcav(instance)?.witness),
    }
}
