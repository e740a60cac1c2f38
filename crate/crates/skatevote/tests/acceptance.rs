//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p skatevote --test acceptance`. Exits non-zero if
//! any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use skatevote_core::axioms::{
    check_bucklin_positive_responsiveness_example, check_witness, search_counterexample, AxiomId, Modification,
    SearchBounds,
};
use skatevote_core::control::{oracle_control, solve, ControlInstance, ControlKind, ControlWitness};
use skatevote_core::generators::{default_names, fixtures, gen_cyclic, gen_sumpos_gap};
use skatevote_core::manipulation::{oracle_manipulation, solve_ccwm_exact, solve_dcwm, Goal, ManipulationInstance};
use skatevote_core::rules::{bucklin_winners, reduction_invariants_hold, sks_winners, tabulate};
use skatevote_core::sampler::{ElectionBounds, Sampler};
use skatevote_core::{Ballot, CandidateId, Election, Rule, SearchLimits};

const CORPUS: ElectionBounds = ElectionBounds { max_m: 6, max_n: 9, max_weight: 4 };

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("example regressions", examples),
        ("generator constructions", generators),
        ("containment and uniqueness fuzz", containment_fuzz),
        ("reduction trace audit", reduction_audit),
        ("axiom suite", axiom_suite),
        ("manipulation oracle equivalence", manipulation_grid),
        ("control oracle equivalence", control_grid),
        ("weight expansion", weight_expansion),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let clock = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = clock.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn names_of(e: &Election, ws: &[usize]) -> Vec<String> {
    ws.iter().map(|&w| e.name(w).to_string()).collect()
}

fn examples() -> Check {
    let e1 = fixtures::example1();
    let t = sks_winners(&e1);
    ensure!(names_of(&e1, &t.winners) == ["33"] && t.final_stage == 2, "example 1: {:?} at {}", t.winners, t.final_stage);

    let e2 = fixtures::example2();
    let t = bucklin_winners(&e2);
    ensure!(names_of(&e2, &t.winners) == ["U", "X"] && t.decisive_stage == 2, "example 2: {:?}", t.winners);

    let e3 = fixtures::example3();
    let t = sks_winners(&e3);
    ensure!(names_of(&e3, &t.winners) == ["Y"], "example 3 winners {:?}", t.winners);
    let (s1, s2) = (&t.stages[0], &t.stages[1]);
    ensure!(s1.scores == [1, 2, 1] && s1.sumpos == [1, 2, 1], "example 3 stage 1: {s1:?}");
    ensure!(s2.scores == [3, 3, 2] && s2.sumpos == [5, 4, 3], "example 3 stage 2: {s2:?}");

    let (base, cloned) = (fixtures::table2_base(), fixtures::table2_cloned());
    ensure!(names_of(&base, &sks_winners(&base).winners) == ["Y"], "table 2 base winner");
    ensure!(names_of(&cloned, &sks_winners(&cloned).winners) == ["Z"], "table 2 cloned winner");
    let (z, y) = (cloned.sumpos_at("Z", 2).unwrap(), cloned.sumpos_at("Y", 2).unwrap());
    ensure!(z == 5 && y == 6, "table 2 stage-2 sums Z={z} Y={y}");
    for e in [&base, &cloned] {
        ensure!(e.condorcet_winner() == Some(e.index_of("Y").unwrap()), "Condorcet winner is not Y");
    }
    Ok("examples 1-3 and both table2 elections exact".into())
}

fn generators() -> Check {
    for k in 2..=6 {
        let e = gen_cyclic(k).unwrap();
        let all: Vec<usize> = (0..k).collect();
        let (s, b) = (sks_winners(&e), bucklin_winners(&e));
        let stage = k / 2 + 1;
        ensure!(s.winners == all && b.winners == all, "cyclic {k}: winners");
        ensure!(b.decisive_stage == stage && s.decisive_stage == stage, "cyclic {k}: decisive stage");
        ensure!(s.final_stage == k, "cyclic {k}: SkS should run to stage {k}");
    }
    for i in [3, 4, 5] {
        for n in [0, 1, 3] {
            let e = gen_sumpos_gap(i, n).unwrap();
            let b = bucklin_winners(&e);
            let stage = n + 2;
            ensure!(names_of(&e, &b.winners) == ["a", "b"] && b.decisive_stage == stage, "gap ({i},{n}): Bucklin");
            let (sa, sb) = (e.sumpos_at("a", stage).unwrap(), e.sumpos_at("b", stage).unwrap());
            ensure!(sa as usize == i - 1 + n + 2, "gap ({i},{n}): sumpos(a) = {sa}");
            ensure!(sb as usize == 1 + (i - 1) * (n + 2), "gap ({i},{n}): sumpos(b) = {sb}");
            ensure!(names_of(&e, &sks_winners(&e).winners) == ["a"], "gap ({i},{n}): SkS");
        }
    }
    Ok("cyclic k=2..6, sumpos gap 9 parameter pairs".into())
}

fn containment_fuzz() -> Check {
    for t in 0..10_000 {
        let e = Sampler::new(0, t).election(&CORPUS);
        let (s, b) = (sks_winners(&e), bucklin_winners(&e));
        ensure!(s.winners.iter().all(|w| b.winners.contains(w)), "trial {t}: SkS winner outside Bucklin");
        if b.winners.len() == 1 {
            ensure!(s.winners == b.winners, "trial {t}: unique Bucklin winner not unique SkS winner");
        }
        ensure!(s.decisive_stage == b.decisive_stage, "trial {t}: decisive stages differ");
    }
    Ok("10000 elections, 0 violations".into())
}

fn reduction_audit() -> Check {
    let mut with_reduction = 0;
    for t in 0..10_000 {
        let e = Sampler::new(0, t).election(&CORPUS);
        let s = sks_winners(&e);
        ensure!(reduction_invariants_hold(&s), "trial {t}");
        with_reduction += usize::from(!s.reductions.is_empty());
    }
    ensure!(with_reduction > 0, "no trace in the corpus has a reduction");
    Ok(format!("10000 traces, {with_reduction} with reductions, 0 violations"))
}

fn axiom_suite() -> Check {
    let bounds = SearchBounds::default();
    for axiom in AxiomId::ALL.into_iter().filter(|a| a.satisfied_by_sks()) {
        let found = search_counterexample(axiom, &bounds).unwrap();
        ensure!(found.is_none(), "{axiom}: unexpected witness {found:?}");
    }
    for axiom in AxiomId::ALL.into_iter().filter(|a| !a.satisfied_by_sks()) {
        let w = search_counterexample(axiom, &bounds)
            .unwrap()
            .ok_or_else(|| format!("{axiom}: no witness"))?;
        ensure!(check_witness(&w).unwrap(), "{axiom}: witness does not replay");
        let table2 = match axiom {
            AxiomId::Condorcet => w.base == fixtures::table2_cloned(),
            AxiomId::IIA => {
                w.base == fixtures::table2_base()
                    && w.modification == Modification::Extend { modified: fixtures::table2_cloned() }
            }
            AxiomId::IndependenceOfClones => {
                w.base == fixtures::table2_base() && w.modification.name() == "clone"
            }
            _ => true,
        };
        ensure!(table2, "{axiom}: expected the table2 fixture");
    }
    ensure!(check_bucklin_positive_responsiveness_example().confirms(), "responsiveness example");
    Ok("5 satisfied axioms: 0 witnesses in 10000 trials each; 8 violated axioms: replayable witnesses".into())
}

fn rankings(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, m: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        for c in 0..m {
            if !prefix.contains(&c) {
                prefix.push(c);
                rec(prefix, m, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), m, &mut out);
    out
}

/// All multisets of size `0..=max` over `0..kinds`, as sorted index lists.
fn multisets(kinds: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for ms in &frontier {
            let start = ms.last().copied().unwrap_or(0);
            for k in start..kinds {
                let mut grown = ms.clone();
                grown.push(k);
                next.push(grown);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn names(m: usize) -> Vec<CandidateId> {
    default_names(m).into_iter().map(|n| CandidateId::new(n).unwrap()).collect()
}

fn manipulation_agrees(inst: &ManipulationInstance) -> Result<(), String> {
    let limits = SearchLimits::default();
    let truth = oracle_manipulation(inst, limits).unwrap().is_some();
    let answer = match inst.goal() {
        Goal::Constructive => solve_ccwm_exact(inst, limits).unwrap(),
        Goal::Destructive => solve_dcwm(inst).unwrap().witness,
    };
    ensure!(answer.is_some() == truth, "disagreement on {inst:?}");
    if let Some(w) = answer {
        ensure!(inst.verify(&w).unwrap(), "witness does not replay on {inst:?}");
    }
    Ok(())
}

fn manipulation_grid() -> Check {
    let perms = rankings(3);
    let mut complete = 0;
    for v in multisets(perms.len(), 3) {
        let sincere: Vec<Ballot> = v.iter().map(|&i| Ballot::unit(perms[i].clone())).collect();
        for s in 0..=2usize {
            if v.is_empty() && s == 0 {
                continue;
            }
            for target in ["a", "b", "c"] {
                for goal in [Goal::Constructive, Goal::Destructive] {
                    let inst = ManipulationInstance::new(names(3), sincere.clone(), vec![1; s], target, goal).unwrap();
                    manipulation_agrees(&inst)?;
                    complete += 1;
                }
            }
        }
    }
    for t in 0..10_000 {
        let mut s = Sampler::new(6, t);
        let m = s.range(3, 4) as usize;
        let n = s.range(0, 3) as usize;
        let sincere = s.ballots(m, n, 3);
        let size = s.range(u64::from(n == 0), 2) as usize;
        let weights: Vec<u64> = (0..size).map(|_| s.range(1, 3)).collect();
        let target = default_names(m)[s.index(m)].clone();
        let goal = if s.below(2) == 0 { Goal::Constructive } else { Goal::Destructive };
        let inst = ManipulationInstance::new(names(m), sincere, weights, &target, goal).unwrap();
        manipulation_agrees(&inst)?;
    }
    Ok(format!("{complete} complete unit instances at m=3 and 10000 sampled weighted instances, 0 disagreements"))
}

struct Tally {
    instances: usize,
}

/// Compares every `k` for one voter-control instance shape with a single
/// oracle call: the oracle's smallest witness decides all limits at once.
fn voter_control_all_k(kind: ControlKind, e: &Election, target: &str, pool: &[Ballot], tally: &mut Tally) -> Result<(), String> {
    let limits = SearchLimits::default();
    let full = ControlInstance::new(kind, e.clone(), target, pool.len(), pool.to_vec()).unwrap();
    let truth = oracle_control(&full, limits).unwrap();
    for k in 0..=pool.len() {
        let inst = ControlInstance::new(kind, e.clone(), target, k, pool.to_vec()).unwrap();
        let expected = truth.as_ref().filter(|w| w.len() <= k);
        let answer = solve(&inst, limits).unwrap();
        ensure!(answer.is_some() == expected.is_some(), "{kind} k={k} disagreement on {inst:?}");
        match (&answer, kind) {
            (Some(w), ControlKind::Ccav) => ensure!(Some(w) == expected, "{kind}: witness not minimal on {inst:?}"),
            (Some(w), _) => ensure!(inst.verify(w).unwrap(), "{kind}: witness does not replay on {inst:?}"),
            (None, _) => {}
        }
        tally.instances += 1;
    }
    Ok(())
}

fn candidate_control_all_k(kind: ControlKind, e: &Election, target: &str, tally: &mut Tally) -> Result<(), String> {
    let limits = SearchLimits::default();
    let m = e.num_candidates();
    let full = ControlInstance::new(kind, e.clone(), target, m, vec![]).unwrap();
    let truth = oracle_control(&full, limits).unwrap();
    for k in 0..m {
        let inst = ControlInstance::new(kind, e.clone(), target, k, vec![]).unwrap();
        let expected = truth.clone().filter(|w| w.len() <= k);
        let answer = solve(&inst, limits).unwrap();
        ensure!(answer == expected, "{kind} k={k}: {answer:?} vs oracle {expected:?}");
        if let Some(ControlWitness::Deleted(d)) = &answer {
            ensure!(kind != ControlKind::Dcdc || !d.contains(&inst.target()), "DCDC deleted the target");
        }
        tally.instances += 1;
    }
    Ok(())
}

fn unit(perms: &[Vec<usize>], idx: &[usize]) -> Vec<Ballot> {
    idx.iter().map(|&i| Ballot::unit(perms[i].clone())).collect()
}

fn control_grid() -> Check {
    let mut tally = Tally { instances: 0 };
    let voter_kinds = [ControlKind::Ccav, ControlKind::Dcav];
    let candidate_kinds = [ControlKind::Ccdc, ControlKind::Dcdc];

    // m <= 3, unit weights: every registered list up to 4 ballots, every
    // pool up to 6 ballots, every target and limit.
    for m in 2..=3 {
        let perms = rankings(m);
        let pools = multisets(perms.len(), 6);
        let targets = default_names(m);
        for v in multisets(perms.len(), 4).into_iter().filter(|v| !v.is_empty()) {
            let e = Election::new(names(m), unit(&perms, &v)).unwrap();
            for target in &targets {
                for kind in candidate_kinds {
                    candidate_control_all_k(kind, &e, target, &mut tally)?;
                }
                for pool in &pools {
                    for kind in voter_kinds {
                        voter_control_all_k(kind, &e, target, &unit(&perms, pool), &mut tally)?;
                    }
                }
            }
        }
    }
    let small = tally.instances;

    // m = 4, unit weights: candidate control over every registered list up
    // to 4 ballots; voter control over every list and pool up to 2 ballots.
    let perms = rankings(4);
    let targets = default_names(4);
    let lists = multisets(perms.len(), 4);
    for v in lists.iter().filter(|v| !v.is_empty()) {
        let e = Election::new(names(4), unit(&perms, v)).unwrap();
        for target in &targets {
            for kind in candidate_kinds {
                candidate_control_all_k(kind, &e, target, &mut tally)?;
            }
        }
    }
    let pairs = multisets(perms.len(), 2);
    for v in pairs.iter().filter(|v| !v.is_empty()) {
        let e = Election::new(names(4), unit(&perms, v)).unwrap();
        for target in &targets {
            for pool in &pairs {
                for kind in voter_kinds {
                    voter_control_all_k(kind, &e, target, &unit(&perms, pool), &mut tally)?;
                }
            }
        }
    }
    let complete = tally.instances;

    // m = 4, unit weights, the full list and pool sizes: sampled.
    for t in 0..30_000 {
        let mut s = Sampler::new(7, t);
        let n = s.range(1, 4) as usize;
        let u = s.range(0, 6) as usize;
        let e = s.election_with(4, n, 1);
        let pool = s.ballots(4, u, 1);
        let target = targets[s.index(4)].clone();
        voter_control_all_k(voter_kinds[s.index(2)], &e, &target, &pool, &mut tally)?;
    }
    let unit_sampled = tally.instances - complete;

    // Weighted: 10^4 sampled instances over the whole grid.
    for t in 0..10_000 {
        let mut s = Sampler::new(8, t);
        let m = s.range(2, 4) as usize;
        let n = s.range(1, 4) as usize;
        let e = s.election_with(m, n, 3);
        let target = default_names(m)[s.index(m)].clone();
        let kind = [ControlKind::Ccdc, ControlKind::Dcdc, ControlKind::Ccav, ControlKind::Dcav][s.index(4)];
        if kind.adds_voters() {
            let u = s.range(0, 6) as usize;
            let pool = s.ballots(m, u, 3);
            voter_control_all_k(kind, &e, &target, &pool, &mut tally)?;
        } else {
            candidate_control_all_k(kind, &e, &target, &mut tally)?;
        }
    }
    Ok(format!(
        "{small} complete instances at m<=3, {} complete at m=4, {unit_sampled} sampled unit at m=4, {} from 10000 weighted samples; 0 disagreements",
        complete - small,
        tally.instances - complete - unit_sampled
    ))
}

fn weight_expansion() -> Check {
    for t in 0..1_000 {
        let e = Sampler::new(1, t).election(&CORPUS);
        let x = e.expand_weights().unwrap();
        for rule in [Rule::Bucklin, Rule::Sks] {
            let (a, b) = (tabulate(&e, rule).outcome(), tabulate(&x, rule).outcome());
            ensure!(a == b, "trial {t} {rule}: {a:?} vs {b:?}");
        }
    }
    Ok("1000 elections, both rules identical".into())
}

fn binary(args: &[&str], threads: &str, stdin: &[u8]) -> Result<Vec<u8>, String> {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_skatevote"))
        .args(args)
        .env("SKATEVOTE_THREADS", threads)
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    child.stdin.take().unwrap().write_all(stdin).map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    Ok(out.stdout)
}

fn determinism() -> Check {
    use skatevote::format::serialize_election;
    let mut texts = Vec::new();
    for t in 0..10_000 {
        texts.push(serialize_election(&Sampler::new(0, t).election(&CORPUS)));
    }
    // In-process: every corpus election through both record commands.
    let run = |args: &[&str], text: &str| {
        let mut out = Vec::new();
        let argv = std::iter::once("skatevote").chain(args.iter().copied());
        let code = skatevote::cli::run(argv, &mut text.as_bytes(), &mut out, &mut std::io::sink());
        (code, out)
    };
    let commands: [&[&str]; 3] = [
        &["trace", "--rule", "sks", "--format", "records", "-"],
        &["winners", "--rule", "bucklin", "--trace", "--format", "records", "-"],
        &["axioms", "check", "--axiom", "participation", "--format", "records", "-"],
    ];
    for (t, text) in texts.iter().enumerate() {
        for args in commands {
            let first = run(args, text);
            ensure!(first.0 == 0, "corpus {t}: {args:?} exited {}", first.0);
            for _ in 1..20 {
                ensure!(run(args, text) == first, "corpus {t}: {args:?} output varies");
            }
        }
    }
    // Out of process, varying the worker count.
    let spawned: [&[&str]; 6] = [
        &["axioms", "search", "--axiom", "consistency", "--format", "records"],
        &["axioms", "search", "--axiom", "majority", "--budget", "2000", "--format", "records"],
        &["oracle", "--problem", "dcav", "--sweep", "--max-m", "4", "--trials", "40", "--format", "records"],
        &["oracle", "--problem", "dcwm", "--sweep", "--max-m", "4", "--trials", "40", "--format", "records"],
        &["gen", "--family", "random", "--m", "6", "--n", "9", "--max-weight", "4", "--seed", "3"],
        &["trace", "--format", "records", "-"],
    ];
    let threads = ["0", "1", "2", "4"];
    for args in spawned {
        let first = binary(args, "1", texts[17].as_bytes())?;
        for rep in 1..20 {
            let again = binary(args, threads[rep % threads.len()], texts[17].as_bytes())?;
            ensure!(again == first, "{args:?} differs with SKATEVOTE_THREADS={}", threads[rep % threads.len()]);
        }
    }
    Ok("10000 corpus elections x 3 commands x 20 runs; 6 commands x 20 runs across 0/1/2/4 workers".into())
}
