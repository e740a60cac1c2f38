//! Witness files for axiom violations.
//!
//! ```text
//! axiom: monotonicity
//! modification: lift
//! candidate: b
//! lift: 2 1
//! # before: a
//! # after: b
//! election:
//! candidates: a,b,c
//! a > b > c
//! c > b > a
//! ```
//!
//! Header lines, by modification:
//!
//! * `candidate:` for `lift` and `replace`;
//! * `lift: <ballot> <position>`, repeatable, for `lift`;
//! * `clone: <original> <clone>` for `clone`;
//! * `voter:` for `abstain`, `misreport` and `dictator`;
//! * `misreport: <ranking>` for `misreport`.
//!
//! Ballot and voter numbers count ballot lines of the first election from 1.
//! The first `election:` section is the base. `replace`, `extend` and
//! `split` take a second section (the modified profile, the extended
//! election, the other part); `dictator` takes any number of further
//! profiles. Comment lines are ignored when reading.

use std::fmt::Write as _;

use skatevote_core::axioms::{AxiomId, Lift, Modification, ViolationWitness};
use skatevote_core::{CandidateId, Election};

use crate::format::{items, parse_ballot, ranking_text, read_election_section, write_election, Item, ParseError, ParseResult};

pub fn serialize_witness(witness: &ViolationWitness) -> String {
    let mut out = String::new();
    let base = &witness.base;
    writeln!(out, "axiom: {}", witness.axiom).unwrap();
    writeln!(out, "modification: {}", witness.modification.name()).unwrap();
    let mut extra: Vec<&Election> = Vec::new();
    match &witness.modification {
        Modification::None => {}
        Modification::Lift { candidate, lifts } => {
            writeln!(out, "candidate: {}", base.name(*candidate)).unwrap();
            for l in lifts {
                writeln!(out, "lift: {} {}", l.ballot + 1, l.position).unwrap();
            }
        }
        Modification::Replace { candidate, modified } => {
            writeln!(out, "candidate: {}", base.name(*candidate)).unwrap();
            extra.push(modified);
        }
        Modification::Extend { modified } => extra.push(modified),
        Modification::Clone { original, clone } => {
            writeln!(out, "clone: {} {}", base.name(*original), clone).unwrap();
        }
        Modification::Split { second } => extra.push(second),
        Modification::Abstain { voter } => writeln!(out, "voter: {}", voter + 1).unwrap(),
        Modification::Misreport { voter, ranking } => {
            writeln!(out, "voter: {}", voter + 1).unwrap();
            writeln!(out, "misreport: {}", ranking_text(base.candidates(), ranking)).unwrap();
        }
        Modification::Dictator { voter, others } => {
            writeln!(out, "voter: {}", voter + 1).unwrap();
            extra.extend(others);
        }
    }
    if let Ok(ex) = witness.explain() {
        writeln!(out, "# before: {}", ex.before.join(" ")).unwrap();
        writeln!(out, "# after: {}", ex.after.join(" ")).unwrap();
        if !ex.note.is_empty() {
            writeln!(out, "# note: {}", ex.note).unwrap();
        }
    }
    for e in std::iter::once(base).chain(extra) {
        out.push_str("election:\n");
        write_election(&mut out, e);
    }
    out
}

struct Header<'a> {
    entries: Vec<(usize, &'a str, &'a str)>,
    end: usize,
}

impl<'a> Header<'a> {
    fn one(&self, key: &str) -> ParseResult<(usize, &'a str)> {
        let mut found = self.entries.iter().filter(|(_, k, _)| *k == key);
        match (found.next(), found.next()) {
            (Some(&(l, _, v)), None) => Ok((l, v)),
            (Some(_), Some(&(l, _, _))) => Err(ParseError::new(l, format!("duplicate `{key}:` line"))),
            (None, _) => Err(ParseError::new(self.end, format!("missing `{key}:` line"))),
        }
    }

    fn all(&self, key: &str) -> impl Iterator<Item = (usize, &'a str)> + '_ {
        let key = key.to_owned();
        self.entries.iter().filter(move |(_, k, _)| *k == key).map(|&(l, _, v)| (l, v))
    }

    /// Rejects keys that `modification` does not use.
    fn only(&self, allowed: &[&str]) -> ParseResult<()> {
        for &(line, key, _) in &self.entries {
            if !["axiom", "modification"].contains(&key) && !allowed.contains(&key) {
                return Err(ParseError::new(line, format!("unexpected `{key}:` line")));
            }
        }
        Ok(())
    }
}

fn number(line: usize, text: &str, what: &str) -> ParseResult<usize> {
    text.trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| ParseError::new(line, format!("invalid {what} `{}`", text.trim())))
}

fn candidate(base: &Election, line: usize, name: &str) -> ParseResult<usize> {
    base.index_of(name.trim())
        .map_err(|_| ParseError::new(line, format!("unknown candidate `{}`", name.trim())))
}

pub fn parse_witness(text: &str) -> ParseResult<ViolationWitness> {
    let items = items(text);
    let end = items.last().map_or(0, Item::line);
    let mut header = Header { entries: Vec::new(), end };
    let mut rest = &items[..];
    while let Some(item) = rest.first() {
        match item {
            Item::Keyed { key: "election", .. } => break,
            Item::Keyed { line, key, value } => header.entries.push((*line, key, value)),
            Item::Ballot { line, .. } => {
                return Err(ParseError::new(*line, "ballot line before the first `election:` section"))
            }
        }
        rest = &rest[1..];
    }
    let mut elections = Vec::new();
    while let Some(item) = rest.first() {
        let Item::Keyed { line, key: "election", value } = item else {
            return Err(ParseError::new(item.line(), "expected `election:`"));
        };
        if !value.is_empty() {
            return Err(ParseError::new(*line, "`election:` takes no value"));
        }
        let (candidates, ballots, used) = read_election_section(&rest[1..])?;
        let last = rest[used].line();
        let e = Election::new(candidates, ballots).map_err(|e| ParseError::new(last, e.to_string()))?;
        elections.push((*line, e));
        rest = &rest[1 + used..];
    }

    let (al, axiom) = header.one("axiom")?;
    let axiom: AxiomId = axiom.parse().map_err(|e: skatevote_core::Error| ParseError::new(al, e.to_string()))?;
    let (ml, kind) = header.one("modification")?;
    let mut elections = elections.into_iter();
    let (_, base) = elections
        .next()
        .ok_or_else(|| ParseError::new(end, "missing `election:` section"))?;
    let mut next_election = |what: &str| {
        elections
            .next()
            .map(|(_, e)| e)
            .ok_or_else(|| ParseError::new(end, format!("missing `election:` section for the {what}")))
    };
    let voter = |h: &Header| -> ParseResult<usize> {
        let (l, v) = h.one("voter")?;
        let v = number(l, v, "voter")? - 1;
        if v >= base.ballots().len() {
            return Err(ParseError::new(l, format!("voter {} out of range", v + 1)));
        }
        Ok(v)
    };
    let modification = match kind {
        "none" => {
            header.only(&[])?;
            Modification::None
        }
        "lift" => {
            header.only(&["candidate", "lift"])?;
            let (cl, c) = header.one("candidate")?;
            let candidate = candidate(&base, cl, c)?;
            let mut lifts = Vec::new();
            for (l, v) in header.all("lift") {
                let mut parts = v.split_whitespace();
                let (Some(b), Some(p), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(ParseError::new(l, "expected `lift: <ballot> <position>`"));
                };
                lifts.push(Lift { ballot: number(l, b, "ballot")? - 1, position: number(l, p, "position")? });
            }
            if lifts.is_empty() {
                return Err(ParseError::new(end, "missing `lift:` line"));
            }
            Modification::Lift { candidate, lifts }
        }
        "replace" => {
            header.only(&["candidate"])?;
            let (cl, c) = header.one("candidate")?;
            let candidate = candidate(&base, cl, c)?;
            Modification::Replace { candidate, modified: next_election("replacement profile")? }
        }
        "extend" => {
            header.only(&[])?;
            Modification::Extend { modified: next_election("extended election")? }
        }
        "clone" => {
            header.only(&["clone"])?;
            let (l, v) = header.one("clone")?;
            let mut parts = v.split_whitespace();
            let (Some(o), Some(c), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(ParseError::new(l, "expected `clone: <original> <clone>`"));
            };
            let original = candidate(&base, l, o)?;
            let clone = CandidateId::new(c).map_err(|e| ParseError::new(l, e.to_string()))?;
            Modification::Clone { original, clone }
        }
        "split" => {
            header.only(&[])?;
            Modification::Split { second: next_election("second part")? }
        }
        "abstain" => {
            header.only(&["voter"])?;
            Modification::Abstain { voter: voter(&header)? }
        }
        "misreport" => {
            header.only(&["voter", "misreport"])?;
            let voter = voter(&header)?;
            let (l, r) = header.one("misreport")?;
            let ranking = parse_ballot(l, r, base.candidates())?.ranking().to_vec();
            Modification::Misreport { voter, ranking }
        }
        "dictator" => {
            header.only(&["voter"])?;
            let voter = voter(&header)?;
            Modification::Dictator { voter, others: elections.by_ref().map(|(_, e)| e).collect() }
        }
        other => return Err(ParseError::new(ml, format!("unknown modification `{other}`"))),
    };
    if let Some((line, _)) = elections.next() {
        return Err(ParseError::new(line, format!("unexpected `election:` section for `{kind}`")));
    }
    Ok(ViolationWitness::new(axiom, base, modification))
}

#[cfg(test)]
mod tests {
    use super::*;
    use skatevote_core::axioms::{check_witness, fixture_witnesses, search_counterexample, SearchBounds};

    #[test]
    fn fixtures_round_trip() {
        for axiom in AxiomId::ALL {
            for w in fixture_witnesses(axiom) {
                let text = serialize_witness(&w);
                let back = parse_witness(&text).unwrap();
                assert_eq!(back, w, "{text}");
                assert_eq!(serialize_witness(&back), text);
            }
        }
    }

    #[test]
    fn searched_witnesses_round_trip() {
        let bounds = SearchBounds::default();
        for axiom in AxiomId::ALL.into_iter().filter(|a| !a.satisfied_by_sks()) {
            let w = search_counterexample(axiom, &bounds).unwrap().unwrap();
            let back = parse_witness(&serialize_witness(&w)).unwrap();
            assert_eq!(back, w);
            assert!(check_witness(&back).unwrap());
        }
    }

    #[test]
    fn misreport_text() {
        let text = "axiom: strategy-proofness\nmodification: misreport\nvoter: 4\nmisreport: X > Z > Y\nelection:\ncandidates: X,Y,Z\nX > Y > Z\nY > X > Z\nY > Z > X\nZ > X > Y\n";
        let w = parse_witness(text).unwrap();
        assert_eq!(w.modification, Modification::Misreport { voter: 3, ranking: vec![0, 2, 1] });
        assert!(check_witness(&w).unwrap());
        let out = serialize_witness(&w);
        assert!(out.contains("# before: Y\n# after: X Y\n"), "{out}");
    }

    #[test]
    fn diagnostics() {
        let err = |t: &str| parse_witness(t).unwrap_err();
        assert_eq!(err("axiom: nope\nmodification: none\nelection:\ncandidates: a\na\n").line, 1);
        assert_eq!(err("axiom: resoluteness\nmodification: twirl\nelection:\ncandidates: a\na\n").line, 2);
        assert!(err("axiom: resoluteness\nmodification: none\n").message.contains("election"));
        assert_eq!(err("axiom: resoluteness\nmodification: none\nvoter: 1\nelection:\ncandidates: a\na\n").line, 3);
        assert_eq!(err("axiom: participation\nmodification: abstain\nvoter: 2\nelection:\ncandidates: a\na\n").line, 3);
        assert_eq!(
            err("axiom: resoluteness\nmodification: none\nelection:\ncandidates: a\na\nelection:\ncandidates: a\na\n").line,
            6
        );
        assert_eq!(err("axiom: iia\nmodification: lift\ncandidate: a\nlift: 1\nelection:\ncandidates: a,b\nb > a\n").line, 4);
    }
}
