//! `tmsim` command-line front end.
//!
//! Exit codes: 0 halted/ok, 1 usage or parse error, 2 stuck, 3 step limit
//! exceeded, 4 verification mismatch.

pub mod trace;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use tmsim::analysis::{coverage, reachability, validate};
use tmsim::{
    decode_unary, encode_unary, fibonacci, parse_machine, parse_tape_input,
    run_accelerated_observed, run_accelerated_profiled, run_observed, Machine, OutcomeKind, Rule,
    RunOutcome, Silent, SymbolId, DEFAULT_MAX_STEPS, FIBONACCI_SOURCE,
};

use crate::trace::TraceRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_STUCK: i32 = 2;
pub const EXIT_STEP_LIMIT: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

/// Alias for the bundled Fibonacci machine.
pub const FIBONACCI_ALIAS: &str = "@fibonacci";
/// Path of the bundled machine; used as a fallback when it is not on disk.
pub const FIBONACCI_PATH: &str = "machines/fibonacci.tm";

#[derive(Debug, Parser)]
#[command(
    name = "tmsim",
    version,
    about = "Deterministic single-tape Turing machine simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Naive,
    Accel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchEngine {
    Naive,
    Accel,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a machine on a tape.
    Run {
        /// Machine file, or `@fibonacci` for the bundled machine.
        machine: String,
        /// Tape symbols, whitespace separated.
        #[arg(conflicts_with = "unary")]
        tape: Vec<String>,
        /// Start from n cells of `1` instead of explicit tape symbols.
        #[arg(long, value_name = "N")]
        unary: Option<u64>,
        #[arg(long, value_enum, default_value = "naive")]
        engine: Engine,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        /// Write one trace line per step to standard error.
        #[arg(long)]
        trace: bool,
        /// Write the trace to a file instead.
        #[arg(long, value_name = "PATH")]
        trace_file: Option<PathBuf>,
        /// Print run statistics and coverage as JSON documents.
        #[arg(long)]
        metrics: bool,
    },
    /// Compute F(n) with the bundled Fibonacci machine.
    Fib {
        n: u64,
        #[arg(long, value_enum, default_value = "naive")]
        engine: Engine,
        /// Compare against the iterative oracle; exit 4 on mismatch.
        #[arg(long)]
        expect: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
    },
    /// Check a machine description and print its static report.
    Validate {
        machine: String,
        /// Print the static report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Time both engines over a range of unary inputs.
    Bench {
        machine: String,
        /// Inclusive range `A..B`.
        #[arg(long, value_name = "A..B")]
        unary_range: String,
        #[arg(long, value_enum, default_value = "both")]
        engine: BenchEngine,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        /// Also check decoded outputs against F(n); exit 4 on mismatch.
        #[arg(long)]
        expect_fib: bool,
        /// Write the results as a JSON document.
        #[arg(long, value_name = "PATH")]
        json_file: Option<PathBuf>,
    },
}

/// Error that ends a command with a specific exit code after printing
/// `message` to standard error.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(format!("i/o error: {e}"))
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Run {
            machine,
            tape,
            unary,
            engine,
            max_steps,
            trace,
            trace_file,
            metrics,
        } => cmd_run(
            RunArgs {
                machine,
                tape,
                unary,
                engine,
                max_steps,
                trace,
                trace_file,
                metrics,
            },
            out,
            err,
        ),
        Command::Fib {
            n,
            engine,
            expect,
            max_steps,
        } => cmd_fib(n, engine, expect, max_steps, out),
        Command::Validate { machine, json } => cmd_validate(&machine, json, out),
        Command::Bench {
            machine,
            unary_range,
            engine,
            max_steps,
            expect_fib,
            json_file,
        } => cmd_bench(
            &machine,
            &unary_range,
            engine,
            max_steps,
            expect_fib,
            json_file.as_deref(),
            out,
        ),
    };
    let _ = out.flush();
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

/// Reads a machine description. `@fibonacci` is the bundled source, and so
/// is `machines/fibonacci.tm` when no such file exists on disk.
pub fn load_source(path: &str) -> io::Result<String> {
    if path == FIBONACCI_ALIAS {
        return Ok(FIBONACCI_SOURCE.to_owned());
    }
    match std::fs::read_to_string(path) {
        Err(e)
            if e.kind() == io::ErrorKind::NotFound
                && Path::new(path) == Path::new(FIBONACCI_PATH) =>
        {
            Ok(FIBONACCI_SOURCE.to_owned())
        }
        other => other,
    }
}

fn load_machine(path: &str) -> Result<Machine, Failure> {
    let source = load_source(path).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
    parse_machine(&source).map_err(|diags| {
        let lines: Vec<String> = diags.iter().map(|d| format!("{path}: {d}")).collect();
        Failure::usage(format!("machine does not parse\n{}", lines.join("\n")))
    })
}

pub fn exit_code(kind: OutcomeKind) -> i32 {
    match kind {
        OutcomeKind::Halted => EXIT_OK,
        OutcomeKind::Stuck => EXIT_STUCK,
        OutcomeKind::StepLimitExceeded => EXIT_STEP_LIMIT,
    }
}

/// Runs with the selected engine, forwarding every step to `observer`.
/// Returns the outcome and the number of dispatch iterations.
fn execute<F: FnMut(u64, i64, &Rule)>(
    machine: &Machine,
    input: &[SymbolId],
    engine: Engine,
    max_steps: u64,
    observer: Option<F>,
) -> Result<(RunOutcome, u64), Failure> {
    let result = match (engine, observer) {
        (Engine::Naive, Some(mut f)) => run_observed(machine, input, max_steps, &mut f).map(|o| {
            let steps = o.stats.steps;
            (o, steps)
        }),
        (Engine::Naive, None) => run_observed(machine, input, max_steps, &mut Silent).map(|o| {
            let steps = o.stats.steps;
            (o, steps)
        }),
        (Engine::Accel, Some(mut f)) => run_accelerated_observed(machine, input, max_steps, &mut f)
            .map(|(o, c)| (o, c.dispatches)),
        (Engine::Accel, None) => {
            run_accelerated_profiled(machine, input, max_steps).map(|(o, c)| (o, c.dispatches))
        }
    };
    result.map_err(|e| Failure::usage(e.to_string()))
}

fn unary_value(machine: &Machine, outcome: &RunOutcome) -> Option<u64> {
    decode_unary(&outcome.final_config.tape, machine).ok()
}

struct RunArgs {
    machine: String,
    tape: Vec<String>,
    unary: Option<u64>,
    engine: Engine,
    max_steps: u64,
    trace: bool,
    trace_file: Option<PathBuf>,
    metrics: bool,
}

fn cmd_run(args: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if args.trace && args.trace_file.is_some() {
        return Err(Failure::usage(
            "--trace and --trace-file are mutually exclusive",
        ));
    }
    let machine = load_machine(&args.machine)?;
    let input = match args.unary {
        Some(n) => encode_unary(n, &machine).map_err(|e| Failure::usage(e.to_string()))?,
        None => parse_tape_input(&args.tape.join(" "), &machine)
            .map_err(|e| Failure::usage(e.to_string()))?,
    };

    let mut sink: Option<Box<dyn Write + '_>> = match (&args.trace_file, args.trace) {
        (Some(path), _) => Some(Box::new(BufWriter::new(File::create(path)?))),
        (None, true) => Some(Box::new(BufWriter::new(err))),
        (None, false) => None,
    };
    let mut trace_error: Option<io::Error> = None;
    let (outcome, _) = match sink.as_mut() {
        Some(w) => execute(
            &machine,
            &input,
            args.engine,
            args.max_steps,
            Some(|step: u64, head: i64, rule: &Rule| {
                if trace_error.is_none() {
                    if let Err(e) = writeln!(w, "{}", TraceRecord::new(&machine, step, head, rule))
                    {
                        trace_error = Some(e);
                    }
                }
            }),
        )?,
        None => execute(
            &machine,
            &input,
            args.engine,
            args.max_steps,
            None::<fn(u64, i64, &Rule)>,
        )?,
    };
    if let Some(mut w) = sink {
        w.flush()?;
    }
    if let Some(e) = trace_error {
        return Err(e.into());
    }

    let config = &outcome.final_config;
    writeln!(out, "outcome: {}", outcome.kind.as_str())?;
    writeln!(out, "state: {}", machine.state_name(config.state))?;
    writeln!(out, "steps: {}", outcome.stats.steps)?;
    writeln!(out, "tape: {}", config.tape.render(&machine))?;
    match unary_value(&machine, &outcome) {
        Some(v) => writeln!(out, "value: {v}")?,
        None => writeln!(out, "value: n/a")?,
    }
    writeln!(
        out,
        "span: {} ({}..{})",
        outcome.stats.span(),
        outcome.stats.min_offset,
        outcome.stats.max_offset
    )?;
    if args.metrics {
        let cov = coverage(&machine, &outcome);
        writeln!(out, "{}", outcome.stats.to_document(&machine))?;
        writeln!(out, "{}", cov.to_document())?;
    }
    Ok(exit_code(outcome.kind))
}

fn cmd_fib(n: u64, engine: Engine, expect: bool, max_steps: u64, out: &mut dyn Write) -> CmdResult {
    let machine = tmsim::fibonacci_machine();
    let input = encode_unary(n, &machine).map_err(|e| Failure::usage(e.to_string()))?;
    let (outcome, _) = execute(
        &machine,
        &input,
        engine,
        max_steps,
        None::<fn(u64, i64, &Rule)>,
    )?;
    let result = unary_value(&machine, &outcome).expect("bundled machine has `1`");
    writeln!(out, "n: {n}")?;
    writeln!(out, "outcome: {}", outcome.kind.as_str())?;
    writeln!(out, "result: {result}")?;
    writeln!(out, "steps: {}", outcome.stats.steps)?;
    writeln!(out, "span: {}", outcome.stats.span())?;
    if outcome.kind != OutcomeKind::Halted {
        return Ok(exit_code(outcome.kind));
    }
    if expect {
        let expected = u32::try_from(n).map(fibonacci).unwrap_or(u64::MAX);
        writeln!(out, "expected: {expected}")?;
        if expected != result {
            return Err(Failure {
                code: EXIT_MISMATCH,
                message: format!("F({n}) mismatch: machine gave {result}, oracle gives {expected}"),
            });
        }
    }
    Ok(EXIT_OK)
}

fn cmd_validate(path: &str, as_json: bool, out: &mut dyn Write) -> CmdResult {
    let source = load_source(path).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
    let machine = match parse_machine(&source) {
        Ok(m) => m,
        Err(diags) => {
            for d in &diags {
                writeln!(out, "{path}: {d}")?;
            }
            return Ok(EXIT_USAGE);
        }
    };
    let problems = validate(&machine);
    let report = reachability(&machine);
    if as_json {
        let mut doc = report.to_document(&machine);
        doc["rules"] = json!(machine.rules().len());
        doc["states"] = json!(machine.state_count());
        doc["symbols"] = json!(machine.symbol_count());
        doc["errors"] = json!(problems.iter().map(|p| p.to_string()).collect::<Vec<_>>());
        writeln!(out, "{doc}")?;
    } else {
        writeln!(
            out,
            "{} rules, {} states, {} symbols",
            machine.rules().len(),
            machine.state_count(),
            machine.symbol_count()
        )?;
        for p in &problems {
            writeln!(out, "error: {p}")?;
        }
        for &s in &report.unreachable_states {
            writeln!(out, "warning: unreachable state {}", machine.state_name(s))?;
        }
        write!(out, "{}", report.to_text(&machine))?;
    }
    Ok(if problems.is_empty() {
        EXIT_OK
    } else {
        EXIT_USAGE
    })
}

/// Parses an inclusive `A..B` range.
pub fn parse_range(text: &str) -> Option<(u64, u64)> {
    let (a, b) = text.split_once("..")?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let (a, b) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
    (a <= b).then_some((a, b))
}

struct BenchRow {
    n: u64,
    engine: Engine,
    kind: OutcomeKind,
    steps: u64,
    dispatches: u64,
    decoded: Option<u64>,
    span: u64,
    millis: f64,
}

fn engine_name(engine: Engine) -> &'static str {
    match engine {
        Engine::Naive => "naive",
        Engine::Accel => "accel",
    }
}

fn cmd_bench(
    machine_path: &str,
    range: &str,
    engine: BenchEngine,
    max_steps: u64,
    expect_fib: bool,
    json_file: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let (lo, hi) = parse_range(range)
        .ok_or_else(|| Failure::usage(format!("bad range `{range}`: expected A..B with A <= B")))?;
    let machine = load_machine(machine_path)?;
    let engines: &[Engine] = match engine {
        BenchEngine::Naive => &[Engine::Naive],
        BenchEngine::Accel => &[Engine::Accel],
        BenchEngine::Both => &[Engine::Naive, Engine::Accel],
    };

    let mut rows = Vec::new();
    for n in lo..=hi {
        let input = encode_unary(n, &machine).map_err(|e| Failure::usage(e.to_string()))?;
        let mut group: Vec<BenchRow> = Vec::new();
        for &e in engines {
            let start = Instant::now();
            let (outcome, dispatches) =
                execute(&machine, &input, e, max_steps, None::<fn(u64, i64, &Rule)>)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            group.push(BenchRow {
                n,
                engine: e,
                kind: outcome.kind,
                steps: outcome.stats.steps,
                dispatches,
                decoded: unary_value(&machine, &outcome),
                span: outcome.stats.span(),
                millis,
            });
        }
        if let Some(first) = group.first() {
            for other in &group[1..] {
                if (other.kind, other.steps, other.decoded)
                    != (first.kind, first.steps, first.decoded)
                {
                    return Err(Failure {
                        code: EXIT_MISMATCH,
                        message: format!(
                            "engines disagree on n = {n}: {} gave {:?}/{} steps/{:?}, {} gave {:?}/{} steps/{:?}",
                            engine_name(first.engine), first.kind, first.steps, first.decoded,
                            engine_name(other.engine), other.kind, other.steps, other.decoded,
                        ),
                    });
                }
            }
            if expect_fib {
                let expected = u32::try_from(n).map(fibonacci).unwrap_or(u64::MAX);
                if first.decoded != Some(expected) {
                    return Err(Failure {
                        code: EXIT_MISMATCH,
                        message: format!(
                            "F({n}) mismatch: machine gave {:?}, oracle gives {expected}",
                            first.decoded
                        ),
                    });
                }
            }
        }
        rows.extend(group);
    }

    writeln!(
        out,
        "{:>6}  {:<6}  {:<19}  {:>12}  {:>12}  {:>10}  {:>8}  {:>10}",
        "n", "engine", "outcome", "steps", "dispatches", "decoded", "span", "ms"
    )?;
    for r in &rows {
        let decoded = r
            .decoded
            .map_or_else(|| "n/a".to_owned(), |v| v.to_string());
        writeln!(
            out,
            "{:>6}  {:<6}  {:<19}  {:>12}  {:>12}  {:>10}  {:>8}  {:>10.3}",
            r.n,
            engine_name(r.engine),
            r.kind.as_str(),
            r.steps,
            r.dispatches,
            decoded,
            r.span,
            r.millis
        )?;
    }

    if let Some(path) = json_file {
        let doc = json!({
            "report": "bench",
            "machine": machine_path,
            "rows": rows.iter().map(|r| json!({
                "n": r.n,
                "engine": engine_name(r.engine),
                "outcome": r.kind.as_str(),
                "steps": r.steps,
                "dispatches": r.dispatches,
                "decoded": r.decoded,
                "span": r.span,
                "ms": r.millis,
            })).collect::<Vec<_>>(),
        });
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Failure::usage(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
    }

    Ok(EXIT_OK)
}
