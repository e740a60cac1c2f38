use proptest::prelude::*;
use skatevote_core::generators::default_names;
use skatevote_core::rules::{outcome, reduction_invariants_hold, tabulate};
use skatevote_core::{Ballot, CandidateId, Election, PositionCounts, Rule};

fn election(max_m: usize, max_n: usize, max_w: u64) -> impl Strategy<Value = Election> {
    (1..=max_m, 1..=max_n)
        .prop_flat_map(move |(m, n)| {
            let ballot = (Just((0..m).collect::<Vec<usize>>()).prop_shuffle(), 0..=max_w);
            (Just(m), proptest::collection::vec(ballot, n))
        })
        .prop_filter("positive total weight", |(_, bs)| bs.iter().any(|(_, w)| *w > 0))
        .prop_map(|(m, bs)| {
            let names = default_names(m).into_iter().map(|n| CandidateId::new(n).unwrap()).collect();
            Election::new(names, bs.into_iter().map(|(r, w)| Ballot::new(r, w)).collect()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn scores_and_sums_grow_with_the_stage(e in election(6, 9, 4)) {
        for c in e.candidates() {
            for i in 1..e.num_candidates() {
                prop_assert!(e.score_at(c.as_str(), i).unwrap() <= e.score_at(c.as_str(), i + 1).unwrap());
                prop_assert!(e.sumpos_at(c.as_str(), i).unwrap() <= e.sumpos_at(c.as_str(), i + 1).unwrap());
            }
        }
    }

    #[test]
    fn scores_sum_to_stage_times_weight(e in election(6, 9, 4)) {
        for i in 1..=e.num_candidates() {
            let total: u64 = e.candidates().iter().map(|c| e.score_at(c.as_str(), i).unwrap()).sum();
            prop_assert_eq!(total, i as u64 * e.total_weight());
        }
    }

    #[test]
    fn expansion_preserves_scores_and_winners(e in election(5, 6, 4)) {
        let x = e.expand_weights().unwrap();
        prop_assert_eq!(x.total_weight(), e.total_weight());
        prop_assert!(x.ballots().iter().all(|b| b.weight() == 1));
        for c in e.candidates() {
            for i in 1..=e.num_candidates() {
                prop_assert_eq!(e.score_at(c.as_str(), i).unwrap(), x.score_at(c.as_str(), i).unwrap());
                prop_assert_eq!(e.sumpos_at(c.as_str(), i).unwrap(), x.sumpos_at(c.as_str(), i).unwrap());
            }
        }
        for rule in [Rule::Bucklin, Rule::Sks] {
            prop_assert_eq!(tabulate(&e, rule).outcome(), tabulate(&x, rule).outcome());
        }
    }

    #[test]
    fn condorcet_winner_is_the_only_pairwise_champion(e in election(6, 9, 4)) {
        let m = e.num_candidates();
        let beats_all = |a: usize| (0..m).all(|b| a == b || e.pairwise_support(a, b) > e.pairwise_support(b, a));
        let champions: Vec<usize> = (0..m).filter(|&a| beats_all(a)).collect();
        prop_assert!(champions.len() <= 1);
        prop_assert_eq!(e.condorcet_winner(), champions.first().copied());
    }

    #[test]
    fn sks_refines_bucklin(e in election(6, 9, 4)) {
        let s = tabulate(&e, Rule::Sks);
        let b = tabulate(&e, Rule::Bucklin);
        prop_assert!(s.winners.iter().all(|w| b.winners.contains(w)));
        if b.winners.len() == 1 {
            prop_assert_eq!(&s.winners, &b.winners);
        }
        prop_assert_eq!(s.decisive_stage, b.decisive_stage);
        prop_assert!(reduction_invariants_hold(&s));
    }

    #[test]
    fn counts_path_matches_traces(e in election(6, 9, 4)) {
        let counts = PositionCounts::from_election(&e);
        for rule in [Rule::Bucklin, Rule::Sks] {
            let t = tabulate(&e, rule);
            prop_assert_eq!(outcome(&counts, rule).unwrap(), t.outcome());
            prop_assert_eq!(tabulate(&e, rule), t);
        }
    }

    #[test]
    fn zero_weight_ballots_are_inert(e in election(5, 6, 3), r in Just(vec![0usize, 1, 2, 3, 4]).prop_shuffle()) {
        let m = e.num_candidates();
        let ranking: Vec<usize> = r.into_iter().filter(|&c| c < m).collect();
        let padded = e.with_ballots([Ballot::new(ranking, 0)]).unwrap();
        for rule in [Rule::Bucklin, Rule::Sks] {
            prop_assert_eq!(tabulate(&e, rule).outcome(), tabulate(&padded, rule).outcome());
        }
    }
}
