//! Text formats for elections and attack instances.
//!
//! ```text
//! # comment
//! candidates: X,Y,Z
//! X > Y > Z
//! 3: Z > X > Y
//! ```
//!
//! The first significant line declares the candidates; each later line is a
//! ballot with an optional `weight:` prefix (default 1). Attack instances
//! append `key: value` trailer lines; control instances with a pool end
//! with `pool:` followed by more ballot lines. Serialization lists the
//! candidates sorted by name and keeps ballots in order, with one space
//! around `>` and after `:`.

use std::fmt::Write as _;

use skatevote_core::control::{ControlInstance, ControlKind};
use skatevote_core::manipulation::{Goal, ManipulationInstance};
use skatevote_core::{Ballot, CandidateId, Election};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the problem concerns the input as a whole.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

pub type ParseResult<T> = Result<T, ParseError>;

/// A significant input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Item<'a> {
    /// `key: value` with a non-numeric key.
    Keyed { line: usize, key: &'a str, value: &'a str },
    Ballot { line: usize, text: &'a str },
}

impl Item<'_> {
    pub(crate) fn line(&self) -> usize {
        match self {
            Item::Keyed { line, .. } | Item::Ballot { line, .. } => *line,
        }
    }
}

pub(crate) fn items(text: &str) -> Vec<Item<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match trimmed.split_once(':') {
            Some((key, value)) if !key.trim().is_empty() && !is_number_like(key.trim()) => {
                out.push(Item::Keyed {
                    line,
                    key: key.trim(),
                    value: value.trim(),
                })
            }
            _ => out.push(Item::Ballot { line, text: trimmed }),
        }
    }
    out
}

fn is_number_like(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

fn parse_candidates(line: usize, value: &str) -> ParseResult<Vec<CandidateId>> {
    if value.is_empty() {
        return Err(ParseError::new(line, "empty candidate list"));
    }
    let mut out: Vec<CandidateId> = Vec::new();
    for token in value.split(',') {
        let id = CandidateId::new(token.trim()).map_err(|e| ParseError::new(line, e.to_string()))?;
        if out.contains(&id) {
            return Err(ParseError::new(line, format!("duplicate candidate `{id}`")));
        }
        out.push(id);
    }
    Ok(out)
}

/// Parses `[weight:] a > b > ...` against the declared candidates (indices
/// in declaration order).
pub(crate) fn parse_ballot(line: usize, text: &str, candidates: &[CandidateId]) -> ParseResult<Ballot> {
    let (weight, ranking) = match text.split_once(':') {
        Some((w, rest)) => {
            let w = w.trim();
            if w.starts_with('-') {
                return Err(ParseError::new(line, format!("negative weight `{w}`")));
            }
            let weight = w
                .parse::<u64>()
                .map_err(|_| ParseError::new(line, format!("invalid weight `{w}`")))?;
            (weight, rest)
        }
        None => (1, text),
    };
    let mut seen = vec![false; candidates.len()];
    let mut order = Vec::with_capacity(candidates.len());
    for token in ranking.split('>') {
        let name = token.trim();
        let c = candidates
            .iter()
            .position(|id| id.as_str() == name)
            .ok_or_else(|| ParseError::new(line, format!("unknown candidate `{name}`")))?;
        if seen[c] {
            return Err(ParseError::new(line, format!("candidate `{name}` ranked twice")));
        }
        seen[c] = true;
        order.push(c);
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(ParseError::new(
            line,
            format!("ranking omits candidate `{}`", candidates[missing]),
        ));
    }
    Ok(Ballot::new(order, weight))
}

/// Candidates and ballots of the leading election section; returns the
/// number of items consumed.
pub(crate) fn read_election_section<'a>(
    items: &[Item<'a>],
) -> ParseResult<(Vec<CandidateId>, Vec<Ballot>, usize)> {
    let candidates = match items.first() {
        Some(Item::Keyed { line, key: "candidates", value }) => parse_candidates(*line, value)?,
        Some(other) => {
            return Err(ParseError::new(other.line(), "expected `candidates:` declaration"))
        }
        None => return Err(ParseError::new(0, "missing `candidates:` declaration")),
    };
    let mut ballots = Vec::new();
    let mut used = 1;
    for item in &items[1..] {
        match item {
            Item::Ballot { line, text } => ballots.push(parse_ballot(*line, text, &candidates)?),
            Item::Keyed { .. } => break,
        }
        used += 1;
    }
    Ok((candidates, ballots, used))
}

fn build_election(candidates: Vec<CandidateId>, ballots: Vec<Ballot>, line: usize) -> ParseResult<Election> {
    Election::new(candidates, ballots).map_err(|e| ParseError::new(line, e.to_string()))
}

fn last_line(items: &[Item<'_>]) -> usize {
    items.last().map_or(0, Item::line)
}

pub fn parse_election(text: &str) -> ParseResult<Election> {
    let items = items(text);
    let (candidates, ballots, used) = read_election_section(&items)?;
    if let Some(extra) = items.get(used) {
        return Err(ParseError::new(extra.line(), "unexpected line after the ballots"));
    }
    build_election(candidates, ballots, last_line(&items))
}

pub fn serialize_election(election: &Election) -> String {
    let mut out = String::new();
    write_election(&mut out, election);
    out
}

pub(crate) fn write_election(out: &mut String, election: &Election) {
    let names: Vec<&str> = election.candidates().iter().map(CandidateId::as_str).collect();
    writeln!(out, "candidates: {}", names.join(",")).unwrap();
    for b in election.ballots() {
        write_ballot(out, election.candidates(), b.ranking(), b.weight());
    }
}

pub(crate) fn write_ballot(out: &mut String, candidates: &[CandidateId], ranking: &[usize], weight: u64) {
    if weight != 1 {
        write!(out, "{weight}: ").unwrap();
    }
    writeln!(out, "{}", ranking_text(candidates, ranking)).unwrap();
}

pub fn ranking_text(candidates: &[CandidateId], ranking: &[usize]) -> String {
    ranking
        .iter()
        .map(|&c| candidates[c].as_str())
        .collect::<Vec<_>>()
        .join(" > ")
}

/// `key: value` trailer lines, each key at most once.
struct Trailer<'a> {
    entries: Vec<(usize, &'a str, &'a str)>,
}

impl<'a> Trailer<'a> {
    fn get(&self, key: &str) -> Option<(usize, &'a str)> {
        self.entries.iter().find(|(_, k, _)| *k == key).map(|&(l, _, v)| (l, v))
    }

    fn require(&self, key: &str, end: usize) -> ParseResult<(usize, &'a str)> {
        self.get(key)
            .ok_or_else(|| ParseError::new(end, format!("missing `{key}:` line")))
    }
}

fn read_trailer<'a>(items: &[Item<'a>], allowed: &[&str]) -> ParseResult<(Trailer<'a>, usize)> {
    let mut entries: Vec<(usize, &str, &str)> = Vec::new();
    let mut used = 0;
    for item in items {
        match item {
            Item::Keyed { line, key, value } => {
                if !allowed.contains(key) {
                    return Err(ParseError::new(*line, format!("unexpected `{key}:` line")));
                }
                if entries.iter().any(|(_, k, _)| k == key) {
                    return Err(ParseError::new(*line, format!("duplicate `{key}:` line")));
                }
                entries.push((*line, key, value));
                used += 1;
                if *key == "pool" {
                    break;
                }
            }
            Item::Ballot { line, .. } => {
                return Err(ParseError::new(*line, "ballot line inside the trailer"))
            }
        }
    }
    Ok((Trailer { entries }, used))
}

fn parse_weights(line: usize, value: &str) -> ParseResult<Vec<u64>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|w| {
            let w = w.trim();
            if w.starts_with('-') {
                return Err(ParseError::new(line, format!("negative weight `{w}`")));
            }
            w.parse::<u64>()
                .map_err(|_| ParseError::new(line, format!("invalid weight `{w}`")))
        })
        .collect()
}

pub fn parse_manipulation_instance(text: &str) -> ParseResult<ManipulationInstance> {
    let items = items(text);
    let end = last_line(&items);
    let (candidates, ballots, used) = read_election_section(&items)?;
    let (trailer, rest) = read_trailer(&items[used..], &["manipulators", "target", "goal"])?;
    if let Some(extra) = items.get(used + rest) {
        return Err(ParseError::new(extra.line(), "unexpected line after the trailer"));
    }
    let (wl, weights) = trailer.require("manipulators", end)?;
    let weights = parse_weights(wl, weights)?;
    let (tl, target) = trailer.require("target", end)?;
    let (gl, goal) = trailer.require("goal", end)?;
    let goal = match goal {
        "constructive" => Goal::Constructive,
        "destructive" => Goal::Destructive,
        other => return Err(ParseError::new(gl, format!("unknown goal `{other}`"))),
    };
    ManipulationInstance::new(candidates, ballots, weights, target, goal)
        .map_err(|e| ParseError::new(tl, e.to_string()))
}

pub fn serialize_manipulation_instance(instance: &ManipulationInstance) -> String {
    let mut out = String::new();
    let names: Vec<&str> = instance.candidates().iter().map(CandidateId::as_str).collect();
    writeln!(out, "candidates: {}", names.join(",")).unwrap();
    for b in instance.sincere() {
        write_ballot(&mut out, instance.candidates(), b.ranking(), b.weight());
    }
    let weights: Vec<String> = instance.manipulator_weights().iter().map(u64::to_string).collect();
    writeln!(out, "manipulators: {}", weights.join(",")).unwrap();
    writeln!(out, "target: {}", instance.candidates()[instance.target()]).unwrap();
    let goal = match instance.goal() {
        Goal::Constructive => "constructive",
        Goal::Destructive => "destructive",
    };
    writeln!(out, "goal: {goal}").unwrap();
    out
}

pub fn parse_control_kind(s: &str) -> Option<ControlKind> {
    match s {
        "ccdc" => Some(ControlKind::Ccdc),
        "dcdc" => Some(ControlKind::Dcdc),
        "ccav" => Some(ControlKind::Ccav),
        "dcav" => Some(ControlKind::Dcav),
        _ => None,
    }
}

pub fn parse_control_instance(text: &str) -> ParseResult<ControlInstance> {
    let items = items(text);
    let end = last_line(&items);
    let (candidates, ballots, used) = read_election_section(&items)?;
    let (trailer, rest) = read_trailer(&items[used..], &["control", "target", "k", "pool"])?;
    let (cl, kind) = trailer.require("control", end)?;
    let kind = parse_control_kind(kind)
        .ok_or_else(|| ParseError::new(cl, format!("unknown control type `{kind}`")))?;
    let (tl, target) = trailer.require("target", end)?;
    let (kl, k) = trailer.require("k", end)?;
    let k = k
        .parse::<usize>()
        .map_err(|_| ParseError::new(kl, format!("invalid limit `{k}`")))?;
    let mut pool = Vec::new();
    if let Some((pl, value)) = trailer.get("pool") {
        if !value.is_empty() {
            return Err(ParseError::new(pl, "pool ballots go on the following lines"));
        }
        for item in &items[used + rest..] {
            match item {
                Item::Ballot { line, text } => pool.push(parse_ballot(*line, text, &candidates)?),
                Item::Keyed { line, .. } => {
                    return Err(ParseError::new(*line, "unexpected line after the pool"))
                }
            }
        }
        if !kind.adds_voters() {
            return Err(ParseError::new(pl, format!("{kind} takes no pool")));
        }
    } else if let Some(extra) = items.get(used + rest) {
        return Err(ParseError::new(extra.line(), "unexpected line after the trailer"));
    }
    // Pool rankings index the declared order; the election sorts candidates.
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| candidates[a].cmp(&candidates[b]));
    let mut old_to_new = vec![0; candidates.len()];
    for (new, &old) in order.iter().enumerate() {
        old_to_new[old] = new;
    }
    let pool = pool
        .into_iter()
        .map(|b| Ballot::new(b.ranking().iter().map(|&c| old_to_new[c]).collect(), b.weight()))
        .collect();
    let election = build_election(candidates, ballots, end)?;
    ControlInstance::new(kind, election, target, k, pool).map_err(|e| ParseError::new(tl, e.to_string()))
}

pub fn serialize_control_instance(instance: &ControlInstance) -> String {
    let mut out = serialize_election(instance.election());
    writeln!(out, "control: {}", instance.kind()).unwrap();
    writeln!(out, "target: {}", instance.election().name(instance.target())).unwrap();
    writeln!(out, "k: {}", instance.limit()).unwrap();
    if instance.kind().adds_voters() {
        out.push_str("pool:\n");
        for b in instance.pool() {
            write_ballot(&mut out, instance.election().candidates(), b.ranking(), b.weight());
        }
    }
    out
}
