//! Command-line front end.
//!
//! Exit status 0 means the command computed an answer, 2 an input error
//! (with `file:line:` diagnostics where a line applies) and 3 an exhausted
//! search budget. Output is buffered, so a failing command prints nothing
//! on standard output.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::ThreadPool;
use skatevote_core::axioms::{check_election, check_witness, AxiomId, SearchBounds, ViolationWitness};
use skatevote_core::control::{oracle_control, solve_ccav_exact, solve_ccdc_exact, solve_dcav, solve_dcdc_exact, ControlInstance, ControlKind, ControlWitness};
use skatevote_core::generators::{default_names, fixtures, gen_cyclic, gen_sumpos_gap};
use skatevote_core::manipulation::{
    oracle_manipulation, solve_ccm, solve_ccwm_exact, solve_cm, solve_dcm, solve_dcwm, solve_dm, Goal,
    ManipulationInstance, ManipulationWitness,
};
use skatevote_core::rules::{tabulate, TabulationTrace};
use skatevote_core::sampler::Sampler;
use skatevote_core::{Ballot, CandidateId, Election, Provenance, Rule, SearchLimits};

use crate::format::{
    parse_control_instance, parse_election, parse_manipulation_instance, serialize_election,
    write_ballot, ParseError,
};
use crate::parallel;
use crate::records::{election_record, outcome_record, trace_records, Record, RecordWriter};
use crate::witness::{parse_witness, serialize_witness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "skatevote", version, about = "SkS and Bucklin tabulation, axiom checks and attack solvers")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the winners of an election.
    Winners {
        #[command(flatten)]
        rule: RuleOpt,
        /// Also print the stage tables.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        out: FormatOpt,
        /// Election file, or `-` for standard input.
        file: String,
    },
    /// Print the stage tables and the winners of an election.
    Trace {
        #[command(flatten)]
        rule: RuleOpt,
        #[command(flatten)]
        out: FormatOpt,
        file: String,
    },
    /// Axiom checks, counterexample search and witness replay.
    Axioms {
        #[command(subcommand)]
        command: AxiomsCommand,
    },
    /// Solve a manipulation or control instance.
    Attack {
        #[arg(long, value_enum)]
        problem: Problem,
        #[command(flatten)]
        budget: BudgetOpt,
        #[command(flatten)]
        out: FormatOpt,
        file: String,
    },
    /// Generate an election.
    Gen(GenArgs),
    /// Compare a solver with the exhaustive oracle, on one instance or on a
    /// sampled sweep over candidate counts.
    Oracle {
        #[arg(long, value_enum)]
        problem: Problem,
        #[command(flatten)]
        budget: BudgetOpt,
        #[command(flatten)]
        out: FormatOpt,
        /// Sample instances instead of reading one.
        #[arg(long, conflicts_with = "file")]
        sweep: bool,
        /// Largest candidate count of the sweep (starting at 3).
        #[arg(long, default_value_t = 5, requires = "sweep")]
        max_m: usize,
        /// Instances per candidate count.
        #[arg(long, default_value_t = 100, requires = "sweep")]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest ballot weight in sampled instances.
        #[arg(long, default_value_t = 1, requires = "sweep")]
        max_weight: u64,
        /// Add wall-clock totals (in microseconds) to each sweep row; the
        /// output is then no longer reproducible.
        #[arg(long, requires = "sweep")]
        timings: bool,
        #[arg(required_unless_present = "sweep")]
        file: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum AxiomsCommand {
    /// Look for a violation that starts from the given election.
    Check {
        #[arg(long)]
        axiom: AxiomId,
        #[command(flatten)]
        budget: BudgetOpt,
        #[command(flatten)]
        out: FormatOpt,
        file: String,
    },
    /// Seeded search for a violation over random elections.
    Search {
        #[arg(long)]
        axiom: AxiomId,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of sampled trials.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 5)]
        max_m: usize,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        max_weight: u64,
        #[command(flatten)]
        out: FormatOpt,
    },
    /// Re-tabulate a witness file.
    Replay {
        #[command(flatten)]
        out: FormatOpt,
        file: String,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// `table2` election to emit; both when omitted.
    #[arg(long, value_enum)]
    variant: Option<Variant>,
    /// Number of candidates of the cyclic profile.
    #[arg(long)]
    k: Option<usize>,
    /// Stage parameter of the sumpos-gap profile.
    #[arg(long)]
    i: Option<usize>,
    /// Ballot count for `random`; extra stages for `sumpos-gap`.
    #[arg(long)]
    n: Option<usize>,
    /// Candidate count for `random`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    max_weight: u64,
}

#[derive(Args, Debug)]
struct RuleOpt {
    #[arg(long, value_enum, default_value_t = RuleArg::Sks)]
    rule: RuleArg,
}

#[derive(Args, Debug)]
struct FormatOpt {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct BudgetOpt {
    /// Node limit for exhaustive searches.
    #[arg(long, default_value_t = SearchLimits::default().node_limit)]
    budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Sks,
    Bucklin,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Rule {
        match r {
            RuleArg::Sks => Rule::Sks,
            RuleArg::Bucklin => Rule::Bucklin,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Cyclic,
    SumposGap,
    Random,
    Table2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    Base,
    Clone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Problem {
    Ccwm,
    Dcwm,
    Ccm,
    Cm,
    Dcm,
    Dm,
    Ccdc,
    Dcdc,
    Ccav,
    Dcav,
}

impl Problem {
    fn as_str(self) -> &'static str {
        match self {
            Problem::Ccwm => "ccwm",
            Problem::Dcwm => "dcwm",
            Problem::Ccm => "ccm",
            Problem::Cm => "cm",
            Problem::Dcm => "dcm",
            Problem::Dm => "dm",
            Problem::Ccdc => "ccdc",
            Problem::Dcdc => "dcdc",
            Problem::Ccav => "ccav",
            Problem::Dcav => "dcav",
        }
    }

    fn control_kind(self) -> Option<ControlKind> {
        match self {
            Problem::Ccdc => Some(ControlKind::Ccdc),
            Problem::Dcdc => Some(ControlKind::Dcdc),
            Problem::Ccav => Some(ControlKind::Ccav),
            Problem::Dcav => Some(ControlKind::Dcav),
            _ => None,
        }
    }

    fn goal(self) -> Goal {
        match self {
            Problem::Ccwm | Problem::Ccm | Problem::Cm | Problem::Ccdc | Problem::Ccav => Goal::Constructive,
            _ => Goal::Destructive,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(String),
}

impl From<skatevote_core::Error> for Failure {
    fn from(e: skatevote_core::Error) -> Self {
        match e {
            skatevote_core::Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

struct Env<'a> {
    stdin: &'a mut dyn Read,
    pool: ThreadPool,
}

impl Env<'_> {
    fn read(&mut self, file: &str) -> CliResult<String> {
        if file == "-" {
            let mut text = String::new();
            self.stdin
                .read_to_string(&mut text)
                .map_err(|e| Failure::Input(format!("<stdin>: {e}")))?;
            Ok(text)
        } else {
            std::fs::read_to_string(file).map_err(|e| Failure::Input(format!("{file}: {e}")))
        }
    }
}

fn located(file: &str, e: ParseError) -> Failure {
    let file = if file == "-" { "<stdin>" } else { file };
    if e.line == 0 {
        Failure::Input(format!("{file}: {}", e.message))
    } else {
        Failure::Input(format!("{file}:{}: {}", e.line, e.message))
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let threads = match parallel::threads_from_env() {
        Ok(t) => t,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    let mut env = Env {
        stdin,
        pool: parallel::pool(threads),
    };
    let mut out = Vec::new();
    match execute(cli.command, &mut env, &mut out) {
        Ok(()) => {
            if stdout.write_all(&out).and_then(|_| stdout.flush()).is_err() {
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Budget(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_BUDGET
        }
    }
}

fn execute(command: Command, env: &mut Env, out: &mut Vec<u8>) -> CliResult<()> {
    match command {
        Command::Winners { rule, trace, out: fmt, file } => {
            let e = parse_election(&env.read(&file)?).map_err(|err| located(&file, err))?;
            tabulation(&e, rule.rule.into(), trace, fmt.format, "winners", out)
        }
        Command::Trace { rule, out: fmt, file } => {
            let e = parse_election(&env.read(&file)?).map_err(|err| located(&file, err))?;
            tabulation(&e, rule.rule.into(), true, fmt.format, "trace", out)
        }
        Command::Axioms { command } => axioms(command, env, out),
        Command::Attack { problem, budget, out: fmt, file } => {
            let text = env.read(&file)?;
            let limits = SearchLimits::new(budget.budget);
            let answer = match problem.control_kind() {
                Some(kind) => {
                    let inst = parse_control_instance(&text).map_err(|err| located(&file, err))?;
                    check_control_kind(&inst, kind)?;
                    solve_control(&inst, limits)?
                }
                None => {
                    let inst = parse_manipulation_instance(&text).map_err(|err| located(&file, err))?;
                    check_goal(&inst, problem)?;
                    solve_manipulation(problem, &inst, limits)?
                }
            };
            write_answer(problem, &answer, fmt.format, out)
        }
        Command::Gen(args) => {
            out.extend_from_slice(generate(&args)?.as_bytes());
            Ok(())
        }
        Command::Oracle { problem, budget, out: fmt, sweep, max_m, trials, seed, max_weight, timings, file } => {
            let limits = SearchLimits::new(budget.budget);
            if sweep {
                let opts = SweepOpts { max_m, trials, seed, max_weight, timings };
                return oracle_sweep(problem, limits, &opts, &env.pool, fmt.format, out);
            }
            let file = file.expect("clap requires a file without --sweep");
            let text = env.read(&file)?;
            let (oracle, solver) = match problem.control_kind() {
                Some(kind) => {
                    let inst = parse_control_instance(&text).map_err(|err| located(&file, err))?;
                    check_control_kind(&inst, kind)?;
                    (oracle_control(&inst, limits)?.is_some(), solve_control(&inst, limits)?.yes())
                }
                None => {
                    let inst = parse_manipulation_instance(&text).map_err(|err| located(&file, err))?;
                    check_goal(&inst, problem)?;
                    (
                        oracle_manipulation(&inst, limits)?.is_some(),
                        solve_manipulation(problem, &inst, limits)?.yes(),
                    )
                }
            };
            match fmt.format {
                Format::Text => {
                    writeln!(
                        out,
                        "oracle: {}\nsolver: {}\nagree: {}",
                        yes_no(oracle),
                        yes_no(solver),
                        if oracle == solver { "yes" } else { "no" }
                    )?;
                }
                Format::Records => {
                    let mut w = RecordWriter::new(out, "oracle")?;
                    w.write(&Record::Oracle {
                        problem: problem.as_str(),
                        oracle: yes_no(oracle),
                        solver: yes_no(solver),
                        agree: oracle == solver,
                    })?;
                }
            }
            Ok(())
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "YES"
    } else {
        "NO"
    }
}

fn tabulation(e: &Election, rule: Rule, trace: bool, format: Format, command: &str, out: &mut Vec<u8>) -> CliResult<()> {
    let t = tabulate(e, rule);
    match format {
        Format::Text => {
            if command == "winners" {
                writeln!(out, "{}", e.names(&t.winners).join(" "))?;
            }
            if trace {
                out.extend_from_slice(trace_text(e, &t).as_bytes());
            }
        }
        Format::Records => {
            let mut w = RecordWriter::new(out, command)?;
            w.write(&election_record(e))?;
            if trace {
                for r in trace_records(e, &t) {
                    w.write(&r)?;
                }
            } else {
                w.write(&outcome_record(e, &t))?;
            }
        }
    }
    Ok(())
}

pub fn trace_text(e: &Election, t: &TabulationTrace) -> String {
    let mut s = String::new();
    writeln!(s, "rule: {}", t.rule).unwrap();
    writeln!(s, "total weight: {}", t.total_weight).unwrap();
    writeln!(s, "majority threshold: {}", t.threshold).unwrap();
    let width = e.candidates().iter().map(|c| c.as_str().len()).max().unwrap_or(0);
    for st in &t.stages {
        writeln!(s, "stage {}: eligible {}", st.stage, e.names(&st.eligible).join(" ")).unwrap();
        for c in 0..e.num_candidates() {
            let mark = if st.majority_reached.contains(&c) { "  majority" } else { "" };
            writeln!(
                s,
                "  {:<width$}  score {:>3}  sumpos {:>3}{mark}",
                e.name(c).as_str(),
                st.scores[c],
                st.sumpos[c]
            )
            .unwrap();
        }
    }
    for r in &t.reductions {
        writeln!(s, "reduction at stage {}: {}", r.stage, e.names(&r.survivors).join(" ")).unwrap();
    }
    writeln!(s, "decisive stage: {}", t.decisive_stage).unwrap();
    writeln!(s, "final stage: {}", t.final_stage).unwrap();
    writeln!(s, "winners: {}", e.names(&t.winners).join(" ")).unwrap();
    s
}

fn axioms(command: AxiomsCommand, env: &mut Env, out: &mut Vec<u8>) -> CliResult<()> {
    match command {
        AxiomsCommand::Check { axiom, budget, out: fmt, file } => {
            let e = parse_election(&env.read(&file)?).map_err(|err| located(&file, err))?;
            let found = check_election(axiom, &e, SearchLimits::new(budget.budget))?;
            write_axiom_answer(axiom, found.as_ref(), fmt.format, "axioms-check", out)
        }
        AxiomsCommand::Search { axiom, seed, budget, max_m, max_n, max_weight, out: fmt } => {
            let bounds = SearchBounds { max_m, max_n, max_weight, budget, seed };
            let found = parallel::search_counterexample(&env.pool, axiom, &bounds)?;
            write_axiom_answer(axiom, found.as_ref(), fmt.format, "axioms-search", out)
        }
        AxiomsCommand::Replay { out: fmt, file } => {
            let w = parse_witness(&env.read(&file)?).map_err(|err| located(&file, err))?;
            let violation = check_witness(&w)?;
            let ex = w.explain()?;
            match fmt.format {
                Format::Text => {
                    writeln!(out, "{}", yes_no(violation))?;
                    writeln!(out, "axiom: {}", w.axiom)?;
                    writeln!(out, "before: {}", ex.before.join(" "))?;
                    writeln!(out, "after: {}", ex.after.join(" "))?;
                    if !ex.note.is_empty() {
                        writeln!(out, "note: {}", ex.note)?;
                    }
                }
                Format::Records => {
                    let mut rw = RecordWriter::new(out, "axioms-replay")?;
                    rw.write(&Record::Replay {
                        axiom: w.axiom.as_str(),
                        violation,
                        before: ex.before,
                        after: ex.after,
                        note: ex.note,
                    })?;
                }
            }
            Ok(())
        }
    }
}

fn write_axiom_answer(
    axiom: AxiomId,
    found: Option<&ViolationWitness>,
    format: Format,
    command: &str,
    out: &mut Vec<u8>,
) -> CliResult<()> {
    match format {
        Format::Text => {
            writeln!(out, "{}", yes_no(found.is_some()))?;
            if let Some(w) = found {
                out.extend_from_slice(serialize_witness(w).as_bytes());
            }
        }
        Format::Records => {
            let mut rw = RecordWriter::new(out, command)?;
            let explained = found.map(|w| w.explain()).transpose()?;
            rw.write(&Record::Axiom {
                axiom: axiom.as_str(),
                answer: yes_no(found.is_some()),
                modification: found.map(|w| w.modification.name()),
                before: explained.as_ref().map(|e| e.before.clone()),
                after: explained.as_ref().map(|e| e.after.clone()),
                witness: found.map(serialize_witness),
            })?;
        }
    }
    Ok(())
}

/// A solver answer with the witness rendered as text lines.
struct Answer {
    witness: Option<Vec<String>>,
    provenance: Provenance,
}

impl Answer {
    fn yes(&self) -> bool {
        self.witness.is_some()
    }
}

fn check_goal(inst: &ManipulationInstance, problem: Problem) -> CliResult<()> {
    if inst.goal() != problem.goal() {
        return Err(Failure::Input(format!(
            "problem {} needs a {} instance",
            problem.as_str(),
            goal_name(problem.goal())
        )));
    }
    Ok(())
}

fn goal_name(goal: Goal) -> &'static str {
    match goal {
        Goal::Constructive => "constructive",
        Goal::Destructive => "destructive",
    }
}

fn check_control_kind(inst: &ControlInstance, kind: ControlKind) -> CliResult<()> {
    if inst.kind() != kind {
        return Err(Failure::Input(format!("instance declares `control: {}`, not {kind}", inst.kind())));
    }
    Ok(())
}

fn solve_manipulation(problem: Problem, inst: &ManipulationInstance, limits: SearchLimits) -> CliResult<Answer> {
    let (witness, provenance) = match problem {
        Problem::Ccwm => (solve_ccwm_exact(inst, limits)?, Provenance::Exhaustive),
        Problem::Ccm => (solve_ccm(inst, limits)?, Provenance::Exhaustive),
        Problem::Cm => (solve_cm(inst, limits)?, Provenance::Exhaustive),
        Problem::Dcwm | Problem::Dcm | Problem::Dm => {
            let a = match problem {
                Problem::Dcwm => solve_dcwm(inst)?,
                Problem::Dcm => solve_dcm(inst)?,
                _ => solve_dm(inst)?,
            };
            (a.witness, a.provenance)
        }
        _ => unreachable!("control problem"),
    };
    Ok(Answer {
        witness: witness.map(|w| manipulation_lines(inst, &w)),
        provenance,
    })
}

fn manipulation_lines(inst: &ManipulationInstance, w: &ManipulationWitness) -> Vec<String> {
    w.ballots
        .iter()
        .zip(inst.manipulator_weights())
        .map(|(r, &weight)| {
            let mut s = String::new();
            write_ballot(&mut s, inst.candidates(), r, weight);
            s.pop();
            s
        })
        .collect()
}

fn solve_control(inst: &ControlInstance, limits: SearchLimits) -> CliResult<Answer> {
    let (witness, provenance) = match inst.kind() {
        ControlKind::Ccdc => (solve_ccdc_exact(inst, limits)?, Provenance::Exhaustive),
        ControlKind::Dcdc => (solve_dcdc_exact(inst, limits)?, Provenance::Exhaustive),
        ControlKind::Ccav => (solve_ccav_exact(inst, limits)?, Provenance::Exhaustive),
        ControlKind::Dcav => {
            let a = solve_dcav(inst)?;
            (a.witness, a.provenance)
        }
    };
    Ok(Answer {
        witness: witness.map(|w| control_lines(inst, &w)),
        provenance,
    })
}

fn control_lines(inst: &ControlInstance, w: &ControlWitness) -> Vec<String> {
    let e = inst.election();
    match w {
        ControlWitness::Deleted(cs) => vec![format!("delete: {}", e.names(cs).join(","))],
        ControlWitness::Added(vs) => {
            let numbers: Vec<String> = vs.iter().map(|v| (v + 1).to_string()).collect();
            let mut lines = vec![format!("add: {}", numbers.join(","))];
            for &v in vs {
                let b = &inst.pool()[v];
                let mut s = String::new();
                write_ballot(&mut s, e.candidates(), b.ranking(), b.weight());
                s.pop();
                lines.push(s);
            }
            lines
        }
    }
}

fn provenance_name(p: Provenance) -> &'static str {
    match p {
        Provenance::Exhaustive => "exhaustive",
        Provenance::SketchFamily => "sketch-family",
    }
}

fn write_answer(problem: Problem, answer: &Answer, format: Format, out: &mut Vec<u8>) -> CliResult<()> {
    match format {
        Format::Text => {
            writeln!(out, "{}", yes_no(answer.yes()))?;
            if answer.provenance == Provenance::SketchFamily {
                writeln!(out, "# provenance: {}", provenance_name(answer.provenance))?;
            }
            for line in answer.witness.iter().flatten() {
                writeln!(out, "{line}")?;
            }
        }
        Format::Records => {
            let mut w = RecordWriter::new(out, "attack")?;
            w.write(&Record::Answer {
                problem: problem.as_str(),
                answer: yes_no(answer.yes()),
                provenance: provenance_name(answer.provenance),
                witness: answer.witness.clone(),
            })?;
        }
    }
    Ok(())
}

fn need<T>(value: Option<T>, flag: &str, family: &str) -> CliResult<T> {
    value.ok_or_else(|| Failure::Input(format!("--family {family} needs --{flag}")))
}

fn generate(args: &GenArgs) -> CliResult<String> {
    Ok(match args.family {
        Family::Cyclic => serialize_election(&gen_cyclic(need(args.k, "k", "cyclic")?)?),
        Family::SumposGap => {
            let e = gen_sumpos_gap(need(args.i, "i", "sumpos-gap")?, need(args.n, "n", "sumpos-gap")?)?;
            serialize_election(&e)
        }
        Family::Random => {
            let m = need(args.m, "m", "random")?;
            let n = need(args.n, "n", "random")?;
            if m == 0 || n == 0 || args.max_weight == 0 {
                return Err(Failure::Input("--m, --n and --max-weight must be positive".into()));
            }
            serialize_election(&Sampler::new(args.seed, 0).election_with(m, n, args.max_weight))
        }
        Family::Table2 => match args.variant {
            Some(Variant::Base) => serialize_election(&fixtures::table2_base()),
            Some(Variant::Clone) => serialize_election(&fixtures::table2_cloned()),
            None => format!(
                "election:\n{}election:\n{}",
                serialize_election(&fixtures::table2_base()),
                serialize_election(&fixtures::table2_cloned())
            ),
        },
    })
}

struct SweepOpts {
    max_m: usize,
    trials: u64,
    seed: u64,
    max_weight: u64,
    timings: bool,
}

enum Sampled {
    Manipulation(ManipulationInstance),
    Control(ControlInstance),
}

fn names(m: usize) -> Vec<CandidateId> {
    default_names(m).into_iter().map(|n| CandidateId::new(n).expect("generated name")).collect()
}

/// Instance `t` of the sweep row for `m` candidates.
fn sample_instance(problem: Problem, m: usize, opts: &SweepOpts, t: u64) -> skatevote_core::Result<Sampled> {
    let mut s = Sampler::new(opts.seed, (m as u64) << 32 | t);
    let n = s.range(1, 4) as usize;
    let e = s.election_with(m, n, opts.max_weight);
    let target = e.name(s.index(m)).to_string();
    if let Some(kind) = problem.control_kind() {
        let (pool, k) = if kind.adds_voters() {
            let u = s.range(0, 6) as usize;
            let pool = s.ballots(m, u, opts.max_weight);
            let k = s.range(0, u as u64) as usize;
            (pool, k)
        } else {
            (Vec::new(), s.range(0, m as u64 - 1) as usize)
        };
        return Ok(Sampled::Control(ControlInstance::new(kind, e, &target, k, pool)?));
    }
    let weights: Vec<u64> = match problem {
        Problem::Cm | Problem::Dm => vec![1],
        Problem::Ccm | Problem::Dcm => vec![1; s.range(1, 2) as usize],
        _ => (0..s.range(1, 2)).map(|_| s.range(1, opts.max_weight.max(3))).collect(),
    };
    let ballots: Vec<Ballot> = e.ballots().to_vec();
    Ok(Sampled::Manipulation(ManipulationInstance::new(
        names(m),
        ballots,
        weights,
        &target,
        problem.goal(),
    )?))
}

struct Row {
    yes: bool,
    compared: bool,
    agree: bool,
    solver_micros: u128,
    oracle_micros: u128,
}

fn sweep_one(problem: Problem, m: usize, opts: &SweepOpts, limits: SearchLimits, t: u64) -> CliResult<Row> {
    let inst = sample_instance(problem, m, opts, t)?;
    let clock = Instant::now();
    let solver = match &inst {
        Sampled::Manipulation(i) => solve_manipulation(problem, i, limits)?.yes(),
        Sampled::Control(i) => solve_control(i, limits)?.yes(),
    };
    let solver_micros = clock.elapsed().as_micros();
    let clock = Instant::now();
    let oracle = match &inst {
        Sampled::Manipulation(i) => oracle_manipulation(i, limits).map(|w| w.is_some()),
        Sampled::Control(i) => oracle_control(i, limits).map(|w| w.is_some()),
    };
    let oracle_micros = clock.elapsed().as_micros();
    let (compared, agree) = match oracle {
        Ok(o) => (true, o == solver),
        Err(skatevote_core::Error::BudgetExceeded { .. }) => (false, true),
        Err(e) => return Err(e.into()),
    };
    Ok(Row { yes: solver, compared, agree, solver_micros, oracle_micros })
}

fn oracle_sweep(
    problem: Problem,
    limits: SearchLimits,
    opts: &SweepOpts,
    pool: &ThreadPool,
    format: Format,
    out: &mut Vec<u8>,
) -> CliResult<()> {
    if opts.max_m < 3 || opts.trials == 0 || opts.max_weight == 0 {
        return Err(Failure::Input("--max-m must be at least 3; --trials and --max-weight positive".into()));
    }
    let mut writer = match format {
        Format::Records => Some(RecordWriter::new(Vec::new(), "oracle-sweep")?),
        Format::Text => None,
    };
    let trials: Vec<u64> = (0..opts.trials).collect();
    for m in 3..=opts.max_m {
        let rows = parallel::map_ordered(pool, &trials, |&t| sweep_one(problem, m, opts, limits, t));
        let rows = rows.into_iter().collect::<CliResult<Vec<Row>>>()?;
        let yes = rows.iter().filter(|r| r.yes).count();
        let compared = rows.iter().filter(|r| r.compared).count();
        let disagreements = rows.iter().filter(|r| !r.agree).count();
        let solver_micros = rows.iter().map(|r| r.solver_micros).sum::<u128>();
        let oracle_micros = rows.iter().map(|r| r.oracle_micros).sum::<u128>();
        match &mut writer {
            Some(w) => w.write(&Record::Sweep {
                problem: problem.as_str(),
                m,
                instances: rows.len(),
                yes,
                compared,
                disagreements,
                solver_micros: opts.timings.then_some(solver_micros),
                oracle_micros: opts.timings.then_some(oracle_micros),
            })?,
            None => {
                write!(
                    out,
                    "{} m={m} instances={} yes={yes} compared={compared} disagreements={disagreements}",
                    problem.as_str(),
                    rows.len()
                )?;
                if opts.timings {
                    write!(out, " solver_us={solver_micros} oracle_us={oracle_micros}")?;
                }
                writeln!(out)?;
            }
        }
    }
    if let Some(w) = writer {
        out.extend_from_slice(&w.into_inner());
    }
    Ok(())
}
