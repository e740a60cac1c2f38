//! Line-delimited JSON output.
//!
//! The first line is a schema header:
//!
//! ```text
//! {"schema":"skatevote.records","version":1,"command":"winners"}
//! ```
//!
//! Every following line is one object whose `type` field names its shape.
//! Candidate-indexed arrays (`scores`, `sumpos`) follow the `candidates`
//! array of the preceding `election` record.

use std::io::{self, Write};

use serde::Serialize;
use skatevote_core::rules::TabulationTrace;
use skatevote_core::Election;

pub const SCHEMA: &str = "skatevote.records";
pub const VERSION: u32 = 1;

#[derive(Serialize)]
struct Header<'a> {
    schema: &'a str,
    version: u32,
    command: &'a str,
}

pub struct RecordWriter<W: Write> {
    out: W,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(mut out: W, command: &str) -> io::Result<Self> {
        let header = Header {
            schema: SCHEMA,
            version: VERSION,
            command,
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        Ok(RecordWriter { out })
    }

    pub fn write<T: Serialize>(&mut self, record: &T) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Record<'a> {
    Election {
        candidates: Vec<&'a str>,
        ballots: usize,
        total_weight: u64,
        threshold: u64,
    },
    Stage {
        rule: String,
        stage: usize,
        eligible: Vec<&'a str>,
        scores: &'a [u64],
        sumpos: &'a [u64],
        majority_reached: Vec<&'a str>,
    },
    Reduction {
        rule: String,
        stage: usize,
        survivors: Vec<&'a str>,
    },
    Outcome {
        rule: String,
        winners: Vec<&'a str>,
        decisive_stage: usize,
        final_stage: usize,
    },
    Answer {
        problem: &'a str,
        answer: &'a str,
        provenance: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<Vec<String>>,
    },
    Axiom {
        axiom: &'a str,
        answer: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        modification: Option<&'a str>,
        #[serde(skip_serializing_if = "Option::is_none")]
        before: Option<Vec<String>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        after: Option<Vec<String>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<String>,
    },
    Replay {
        axiom: &'a str,
        violation: bool,
        before: Vec<String>,
        after: Vec<String>,
        note: &'a str,
    },
    Oracle {
        problem: &'a str,
        oracle: &'a str,
        solver: &'a str,
        agree: bool,
    },
    Sweep {
        problem: &'a str,
        m: usize,
        instances: usize,
        yes: usize,
        compared: usize,
        disagreements: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        solver_micros: Option<u128>,
        #[serde(skip_serializing_if = "Option::is_none")]
        oracle_micros: Option<u128>,
    },
}

pub fn election_record(e: &Election) -> Record<'_> {
    Record::Election {
        candidates: e.names(&(0..e.num_candidates()).collect::<Vec<_>>()),
        ballots: e.ballots().len(),
        total_weight: e.total_weight(),
        threshold: e.majority_threshold(),
    }
}

/// One `stage` record per stage, then the reductions, then the outcome.
pub fn trace_records<'a>(e: &'a Election, trace: &'a TabulationTrace) -> Vec<Record<'a>> {
    let rule = trace.rule.to_string();
    let mut out = Vec::new();
    for s in &trace.stages {
        out.push(Record::Stage {
            rule: rule.clone(),
            stage: s.stage,
            eligible: e.names(&s.eligible),
            scores: &s.scores,
            sumpos: &s.sumpos,
            majority_reached: e.names(&s.majority_reached),
        });
    }
    for r in &trace.reductions {
        out.push(Record::Reduction {
            rule: rule.clone(),
            stage: r.stage,
            survivors: e.names(&r.survivors),
        });
    }
    out.push(outcome_record(e, trace));
    out
}

pub fn outcome_record<'a>(e: &'a Election, trace: &TabulationTrace) -> Record<'a> {
    Record::Outcome {
        rule: trace.rule.to_string(),
        winners: e.names(&trace.winners),
        decisive_stage: trace.decisive_stage,
        final_stage: trace.final_stage,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use skatevote_core::generators::fixtures;
    use skatevote_core::rules::sks_winners;

    #[test]
    fn header_and_records() {
        let e = fixtures::example3();
        let trace = sks_winners(&e);
        let mut w = RecordWriter::new(Vec::new(), "trace").unwrap();
        w.write(&election_record(&e)).unwrap();
        for r in trace_records(&e, &trace) {
            w.write(&r).unwrap();
        }
        let text = String::from_utf8(w.into_inner()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], r#"{"schema":"skatevote.records","version":1,"command":"trace"}"#);
        assert_eq!(
            lines[1],
            r#"{"type":"election","candidates":["X","Y","Z"],"ballots":4,"total_weight":4,"threshold":3}"#
        );
        assert!(lines[3].contains(r#""stage":2"#) && lines[3].contains(r#""scores":[3,3,2]"#));
        assert_eq!(
            *lines.last().unwrap(),
            r#"{"type":"outcome","rule":"sks","winners":["Y"],"decisive_stage":2,"final_stage":2}"#
        );
    }
}
