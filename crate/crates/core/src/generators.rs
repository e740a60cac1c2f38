//! Explicit election constructions.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::election::{Ballot, CandidateId, Election};
use crate::error::{Error, Result};

/// `k` candidates `c1..ck` and `k` unit ballots; ballot `t` is the cyclic
/// rotation of `c1 > c2 > ... > ck` starting at `c_t`. Every candidate holds
/// every position exactly once, so all of them tie at every stage.
pub fn gen_cyclic(k: usize) -> Result<Election> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("cyclic family needs k >= 2, got {k}")));
    }
    let names: Vec<String> = (1..=k).map(|i| format!("c{i}")).collect();
    let ballots = (0..k)
        .map(|t| Ballot::unit((0..k).map(|p| (t + p) % k).collect()))
        .collect();
    build(&names, ballots)
}

/// Two Bucklin co-winners `a` and `b` whose sums of positions at the
/// decisive stage `n + 2` are `i - 1 + n + 2` and `1 + (i - 1)(n + 2)`.
///
/// Candidates are `a`, `b`, `c1..c2n`, `d1..d(n+2)`; the `2i - 1` ballots are
/// `i - 1` copies of `a > c1 > .. > cn > b`, one `b > c(n+1) > .. > c2n > a`
/// and `i - 1` copies of `d1 > .. > d(n+2)`. Positions after the prescribed
/// prefix are filled with the unused candidates in name order.
pub fn gen_sumpos_gap(i: usize, n: usize) -> Result<Election> {
    if i < 3 {
        return Err(Error::InvalidParameter(format!("sumpos-gap family needs i >= 3, got {i}")));
    }
    let mut names: Vec<String> = Vec::with_capacity(3 * n + 4);
    names.push("a".into());
    names.push("b".into());
    names.extend((1..=2 * n).map(|j| format!("c{j}")));
    names.extend((1..=n + 2).map(|j| format!("d{j}")));
    let index = |name: &str| names.iter().position(|x| x == name).unwrap();
    let c = |j: usize| index(&format!("c{j}"));
    let d = |j: usize| index(&format!("d{j}"));

    let mut a_first = Vec::with_capacity(n + 2);
    a_first.push(index("a"));
    a_first.extend((1..=n).map(c));
    a_first.push(index("b"));
    let mut b_first = Vec::with_capacity(n + 2);
    b_first.push(index("b"));
    b_first.extend((n + 1..=2 * n).map(c));
    b_first.push(index("a"));
    let d_only: Vec<usize> = (1..=n + 2).map(d).collect();

    let mut prefixes = Vec::with_capacity(2 * i - 1);
    prefixes.extend((0..i - 1).map(|_| a_first.clone()));
    prefixes.push(b_first);
    prefixes.extend((0..i - 1).map(|_| d_only.clone()));

    // Fill tails in name order.
    let mut by_name: Vec<usize> = (0..names.len()).collect();
    by_name.sort_by(|&x, &y| names[x].cmp(&names[y]));
    let ballots = prefixes
        .into_iter()
        .map(|mut ranking| {
            for &cand in &by_name {
                if !ranking.contains(&cand) {
                    ranking.push(cand);
                }
            }
            Ballot::unit(ranking)
        })
        .collect();
    build(&names, ballots)
}

fn build(names: &[String], ballots: Vec<Ballot>) -> Result<Election> {
    let ids = names
        .iter()
        .map(|n| CandidateId::new(n.as_str()))
        .collect::<Result<Vec<_>>>()?;
    Election::new(ids, ballots)
}

/// Candidate names `a, b, c, ...` for up to 26 candidates, `c1, c2, ...`
/// beyond that.
pub fn default_names(m: usize) -> Vec<String> {
    if m <= 26 {
        (0..m).map(|i| String::from((b'a' + i as u8) as char)).collect()
    } else {
        (1..=m).map(|i| format!("c{i}")).collect()
    }
}

/// Fixed elections used throughout the tests, the axiom search and the CLI.
pub mod fixtures {
    use super::*;

    fn from(names: &[&str], ballots: &[&[&str]]) -> Election {
        let weighted: Vec<(u64, &[&str])> = ballots.iter().map(|&b| (1, b)).collect();
        Election::from_names(names, &weighted).expect("fixture is valid")
    }

    /// Dance final: six couples ranked by five adjudicators A..E.
    ///
    /// The published position table lists position 6 twice for adjudicator
    /// D (couples 31 and 35) and omits position 5; couple 35 is placed fifth
    /// here. The winner is unaffected.
    pub fn example1() -> Election {
        from(
            &["31", "32", "33", "34", "35", "36"],
            &[
                &["31", "33", "34", "32", "36", "35"],
                &["31", "32", "34", "35", "36", "33"],
                &["34", "33", "32", "36", "35", "31"],
                &["36", "34", "32", "33", "35", "31"],
                &["32", "33", "36", "35", "34", "31"],
            ],
        )
    }

    /// Anne, Bob, Caro, Dave, Ella over U, X, Y, Z: Bucklin co-winners U, X.
    pub fn example2() -> Election {
        from(
            &["U", "X", "Y", "Z"],
            &[
                &["U", "X", "Y", "Z"],
                &["U", "X", "Y", "Z"],
                &["X", "U", "Y", "Z"],
                &["Y", "Z", "U", "X"],
                &["Z", "Y", "U", "X"],
            ],
        )
    }

    /// Anne, Bob, Caro, Dave over X, Y, Z: unique SkS winner Y.
    pub fn example3() -> Election {
        from(
            &["X", "Y", "Z"],
            &[
                &["X", "Y", "Z"],
                &["Y", "X", "Z"],
                &["Y", "Z", "X"],
                &["Z", "X", "Y"],
            ],
        )
    }

    /// Seven voters over X, Y, Z; Y is the Condorcet and SkS winner.
    pub fn table2_base() -> Election {
        from(
            &["X", "Y", "Z"],
            &[
                &["X", "Y", "Z"],
                &["X", "Y", "Z"],
                &["Y", "X", "Z"],
                &["Y", "Z", "X"],
                &["Z", "Y", "X"],
                &["Z", "Y", "X"],
                &["Z", "Y", "X"],
            ],
        )
    }

    /// [`table2_base`] with clone `Z'` inserted directly behind `Z`; the SkS
    /// winner becomes Z while Y stays the Condorcet winner.
    pub fn table2_cloned() -> Election {
        from(
            &["X", "Y", "Z", "Z'"],
            &[
                &["X", "Y", "Z", "Z'"],
                &["X", "Y", "Z", "Z'"],
                &["Y", "X", "Z", "Z'"],
                &["Y", "Z", "Z'", "X"],
                &["Z", "Z'", "Y", "X"],
                &["Z", "Z'", "Y", "X"],
                &["Z", "Z'", "Y", "X"],
            ],
        )
    }

    /// Bucklin co-winners a, b at stage 2; SkS picks a at stage 3.
    pub fn responsiveness_before() -> Election {
        from(
            &["a", "b", "c", "d"],
            &[
                &["a", "b", "c", "d"],
                &["b", "a", "c", "d"],
                &["c", "d", "a", "b"],
            ],
        )
    }

    /// [`responsiveness_before`] with b lifted to third place on the last ballot.
    pub fn responsiveness_after() -> Election {
        from(
            &["a", "b", "c", "d"],
            &[
                &["a", "b", "c", "d"],
                &["b", "a", "c", "d"],
                &["c", "d", "b", "a"],
            ],
        )
    }
}
