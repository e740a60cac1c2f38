//! Staged winner determination.
//!
//! Both rules walk stages `i = 1..=m`, accumulating for every candidate the
//! weighted count of top-`i` placements (score) and the weighted sum of
//! those placements (sumpos). The decisive stage is the first stage at which
//! some candidate's score reaches the majority threshold.
//!
//! Bucklin returns every candidate with the highest score at the decisive
//! stage. SkS starts from the same stage but breaks score ties by the lowest
//! sumpos; if that still ties, it moves on to the next stage with only the
//! tied candidates, and declares them co-winners once the last stage is
//! reached.

use alloc::vec::Vec;
use core::fmt;

use crate::election::{majority_threshold, Election};
use crate::error::Result;
use crate::tally::PositionCounts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Bucklin,
    Sks,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Bucklin => "bucklin",
            Rule::Sks => "sks",
        })
    }
}

/// Per-stage tables. `scores` and `sumpos` cover every candidate, including
/// ones no longer eligible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: usize,
    pub eligible: Vec<usize>,
    pub scores: Vec<u64>,
    pub sumpos: Vec<u64>,
    pub majority_reached: Vec<usize>,
}

/// SkS carried `survivors` from `stage` to the next stage after a tie in
/// both score and sumpos.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub stage: usize,
    pub survivors: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabulationTrace {
    pub rule: Rule,
    pub total_weight: u64,
    pub threshold: u64,
    pub stages: Vec<StageRecord>,
    /// First stage at which any candidate reaches the threshold.
    pub decisive_stage: usize,
    /// Stage at which the winner set was fixed (equal to `decisive_stage`
    /// for Bucklin).
    pub final_stage: usize,
    /// Sorted by candidate index.
    pub winners: Vec<usize>,
    pub reductions: Vec<Reduction>,
}

impl TabulationTrace {
    pub fn unique_winner(&self) -> Option<usize> {
        match self.winners[..] {
            [w] => Some(w),
            _ => None,
        }
    }

    pub fn outcome(&self) -> Outcome {
        Outcome {
            winners: self.winners.clone(),
            decisive_stage: self.decisive_stage,
            final_stage: self.final_stage,
        }
    }
}

/// Winner set without the stage tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub winners: Vec<usize>,
    pub decisive_stage: usize,
    pub final_stage: usize,
}

impl Outcome {
    pub fn unique_winner(&self) -> Option<usize> {
        match self.winners[..] {
            [w] => Some(w),
            _ => None,
        }
    }

    pub fn is_unique_winner(&self, candidate: usize) -> bool {
        self.unique_winner() == Some(candidate)
    }
}

pub fn bucklin_winners(election: &Election) -> TabulationTrace {
    tabulate(election, Rule::Bucklin)
}

pub fn sks_winners(election: &Election) -> TabulationTrace {
    tabulate(election, Rule::Sks)
}

pub fn tabulate(election: &Election, rule: Rule) -> TabulationTrace {
    let counts = PositionCounts::from_election(election);
    let mut stages = Vec::with_capacity(election.num_candidates());
    let (outcome, reductions) = walk(&counts, rule, Some(&mut stages));
    TabulationTrace {
        rule,
        total_weight: counts.total_weight(),
        threshold: majority_threshold(counts.total_weight()),
        stages,
        decisive_stage: outcome.decisive_stage,
        final_stage: outcome.final_stage,
        winners: outcome.winners,
        reductions,
    }
}

/// Tie structure every SkS trace with a reduction must have: a unique
/// winner beats each other candidate still eligible at the final stage on
/// score alone, and co-winners tie in both score and sumpos at every stage
/// from the first reduction on. Traces without a reduction pass trivially.
pub fn reduction_invariants_hold(trace: &TabulationTrace) -> bool {
    let Some(first) = trace.reductions.first() else {
        return true;
    };
    let at = |s: usize| trace.stages.iter().find(|r| r.stage == s);
    match trace.winners.as_slice() {
        [] => false,
        [c] => at(trace.final_stage).is_some_and(|r| {
            r.eligible
                .iter()
                .all(|&d| d == *c || r.scores[*c] > r.scores[d])
        }),
        ws @ [w0, ..] => {
            let last = trace.stages.last().map_or(0, |r| r.stage);
            (first.stage..=last).all(|s| {
                at(s).is_some_and(|r| {
                    ws.iter()
                        .all(|&w| r.scores[w] == r.scores[*w0] && r.sumpos[w] == r.sumpos[*w0])
                })
            })
        }
    }
}

/// Winner determination straight from position counts.
pub fn outcome(counts: &PositionCounts, rule: Rule) -> Result<Outcome> {
    counts.check()?;
    Ok(outcome_unchecked(counts, rule))
}

/// Like [`outcome`], for counts already known to have positive total weight.
pub(crate) fn outcome_unchecked(counts: &PositionCounts, rule: Rule) -> Outcome {
    walk(counts, rule, None).0
}

fn walk(
    counts: &PositionCounts,
    rule: Rule,
    mut record: Option<&mut Vec<StageRecord>>,
) -> (Outcome, Vec<Reduction>) {
    let m = counts.num_candidates();
    let threshold = majority_threshold(counts.total_weight());
    let mut score = alloc::vec![0u64; m];
    let mut sumpos = alloc::vec![0u64; m];
    let mut eligible: Vec<usize> = (0..m).collect();
    let mut decisive_stage = None;
    let mut reductions = Vec::new();

    for stage in 1..=m {
        for c in 0..m {
            let w = counts.at(c, stage);
            score[c] += w;
            sumpos[c] += w * stage as u64;
        }
        if let Some(stages) = record.as_deref_mut() {
            stages.push(StageRecord {
                stage,
                eligible: eligible.clone(),
                scores: score.clone(),
                sumpos: sumpos.clone(),
                majority_reached: (0..m).filter(|&c| score[c] >= threshold).collect(),
            });
        }
        let decisive = match decisive_stage {
            Some(s) => s,
            None if score.iter().any(|&s| s >= threshold) => {
                decisive_stage = Some(stage);
                stage
            }
            None => continue,
        };

        let best = eligible.iter().map(|&c| score[c]).max().unwrap_or(0);
        let top: Vec<usize> = eligible
            .iter()
            .copied()
            .filter(|&c| score[c] == best)
            .collect();
        let done = |winners| Outcome {
            winners,
            decisive_stage: decisive,
            final_stage: stage,
        };
        if rule == Rule::Bucklin || top.len() == 1 {
            return (done(top), reductions);
        }
        let lowest = top.iter().map(|&c| sumpos[c]).min().unwrap_or(0);
        let tied: Vec<usize> = top.into_iter().filter(|&c| sumpos[c] == lowest).collect();
        if tied.len() == 1 || stage == m {
            return (done(tied), reductions);
        }
        reductions.push(Reduction {
            stage,
            survivors: tied.clone(),
        });
        eligible = tied;
    }
    // At stage m every candidate has score W >= floor(W/2) + 1.
    unreachable!("tabulation ended without reaching the majority threshold")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fixtures, gen_cyclic, gen_sumpos_gap};
    use alloc::vec;

    fn names<'a>(e: &'a Election, t: &TabulationTrace) -> Vec<&'a str> {
        e.names(&t.winners)
    }

    #[test]
    fn example2_bucklin_and_sks() {
        let e = fixtures::example2();
        let b = bucklin_winners(&e);
        assert_eq!(names(&e, &b), ["U", "X"]);
        assert_eq!(b.decisive_stage, 2);
        assert_eq!(b.stages.len(), 2);
        let s = sks_winners(&e);
        assert_eq!(names(&e, &s), ["U"]);
        assert_eq!(s.final_stage, 2);
        let u = e.index_of("U").unwrap();
        let x = e.index_of("X").unwrap();
        assert_eq!((s.stages[1].sumpos[u], s.stages[1].sumpos[x]), (4, 5));
    }

    #[test]
    fn example3_tables() {
        let e = fixtures::example3();
        let s = sks_winners(&e);
        assert_eq!(names(&e, &s), ["Y"]);
        assert_eq!((s.decisive_stage, s.final_stage), (2, 2));
        assert_eq!(s.stages[0].scores, [1, 2, 1]);
        assert_eq!(s.stages[0].sumpos, [1, 2, 1]);
        assert_eq!(s.stages[1].scores, [3, 3, 2]);
        assert_eq!(s.stages[1].sumpos, [5, 4, 3]);
        assert_eq!(s.stages[1].majority_reached, [0, 1]);
        assert_eq!(names(&e, &bucklin_winners(&e)), ["X", "Y"]);
    }

    #[test]
    fn example1_couple_33() {
        let e = fixtures::example1();
        let s = sks_winners(&e);
        assert_eq!(names(&e, &s), ["33"]);
        assert_eq!(s.final_stage, 2);
    }

    #[test]
    fn single_candidate() {
        let e = Election::from_names(&["solo"], &[(2, &["solo"])]).unwrap();
        for rule in [Rule::Bucklin, Rule::Sks] {
            let t = tabulate(&e, rule);
            assert_eq!(t.winners, [0]);
            assert_eq!(t.decisive_stage, 1);
        }
    }

    #[test]
    fn reduction_then_score_win() {
        let e = fixtures::responsiveness_before();
        let s = sks_winners(&e);
        assert_eq!(names(&e, &s), ["a"]);
        assert_eq!(s.reductions, vec![Reduction { stage: 2, survivors: vec![0, 1] }]);
        assert_eq!(s.stages[2].eligible, [0, 1]);
        assert_eq!(s.final_stage, 3);
    }

    #[test]
    fn cyclic_ties_through_every_stage() {
        for k in 2..=6 {
            let e = gen_cyclic(k).unwrap();
            let all: Vec<usize> = (0..k).collect();
            let s = sks_winners(&e);
            let b = bucklin_winners(&e);
            assert_eq!(s.winners, all);
            assert_eq!(b.winners, all);
            let expected = if k % 2 == 1 { (k + 1) / 2 } else { k / 2 + 1 };
            assert_eq!(b.decisive_stage, expected);
            assert_eq!(s.decisive_stage, expected);
            assert_eq!(s.final_stage, k);
        }
    }

    #[test]
    fn sumpos_gap_formulas() {
        let e = gen_sumpos_gap(5, 3).unwrap();
        let b = bucklin_winners(&e);
        assert_eq!(names(&e, &b), ["a", "b"]);
        assert_eq!(b.decisive_stage, 5);
        let st = &b.stages[4];
        assert_eq!(st.sumpos[e.index_of("a").unwrap()], 9);
        assert_eq!(st.sumpos[e.index_of("b").unwrap()], 21);
        assert_eq!(names(&e, &sks_winners(&e)), ["a"]);
    }

    #[test]
    fn reduction_audit() {
        let reduced = sks_winners(&fixtures::responsiveness_before());
        assert!(reduction_invariants_hold(&reduced));
        let cyclic = sks_winners(&gen_cyclic(4).unwrap());
        assert!(!cyclic.reductions.is_empty());
        assert!(reduction_invariants_hold(&cyclic));
        let mut forged = reduced.clone();
        let last = forged.stages.len() - 1;
        forged.stages[last].scores[1] = forged.stages[last].scores[0];
        assert!(!reduction_invariants_hold(&forged));
        assert!(reduction_invariants_hold(&sks_winners(&fixtures::example3())));
    }

    #[test]
    fn fast_path_matches_trace() {
        for e in [
            fixtures::example1(),
            fixtures::example2(),
            fixtures::example3(),
            fixtures::table2_cloned(),
            fixtures::responsiveness_after(),
        ] {
            let counts = PositionCounts::from_election(&e);
            for rule in [Rule::Bucklin, Rule::Sks] {
                assert_eq!(outcome(&counts, rule).unwrap(), tabulate(&e, rule).outcome());
            }
        }
        assert!(outcome(&PositionCounts::new(2), Rule::Sks).is_err());
    }
}
