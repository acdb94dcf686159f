//! Acceptance criteria. Runs without the libtest harness so that one
//! PASS/FAIL line per criterion is always printed; exits non-zero if any
//! criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tmsim::analysis::validate;
use tmsim::gen::{random_input, random_machine, GenParams};
use tmsim::{
    decode_unary, encode_unary, parse_machine, run, run_accelerated, run_accelerated_profiled,
    serialize_machine, DiagnosticKind, Machine, Move, OutcomeKind, Tape, DEFAULT_MAX_STEPS,
};
use tmsim_cli::main_with;
use tmsim_cli::trace::replay;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn bundled_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/machines/fibonacci.tm")
}

fn bundled() -> Result<Machine, String> {
    let text = std::fs::read_to_string(bundled_path()).map_err(|e| e.to_string())?;
    parse_machine(&text).map_err(|d| format!("{d:?}"))
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with(
        std::iter::once("tmsim").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

/// Iterative oracle, F(1) = F(2) = 1. Kept separate from the library's.
fn oracle(n: u64) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

fn only_ones(tape: &Tape, m: &Machine) -> Result<usize, String> {
    let one = m.symbol("1").ok_or("no `1` symbol")?;
    let cells: Vec<_> = tape.cells().collect();
    ensure!(
        cells.iter().all(|&(_, s)| s == one),
        "final tape holds symbols other than 1: {}",
        tape.render(m)
    );
    Ok(cells.len())
}

fn ac1_golden_sample() -> Check {
    let start = Instant::now();
    let m = bundled()?;
    let out =
        run(&m, &encode_unary(7, &m).unwrap(), DEFAULT_MAX_STEPS).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(out.kind == OutcomeKind::Halted, "outcome {:?}", out.kind);
    ensure!(
        m.state_name(out.final_config.state) == "qf",
        "final state {}",
        m.state_name(out.final_config.state)
    );
    let ones = only_ones(&out.final_config.tape, &m)?;
    ensure!(ones == 13, "{ones} ones on the final tape");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "n=7 -> 13 ones in qf after {} steps ({elapsed:.2?})",
        out.stats.steps
    ))
}

fn ac2_oracle_suite() -> Check {
    const EXPECTED: [u64; 15] = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610];
    let start = Instant::now();
    for n in 1..=15u64 {
        ensure!(
            oracle(n) == EXPECTED[n as usize - 1],
            "oracle F({n}) = {}",
            oracle(n)
        );
        let (code, stdout, stderr) = cli(&["fib", &n.to_string(), "--expect", "--engine", "naive"]);
        ensure!(code == 0, "fib {n} --expect exited {code}: {stderr}");
        ensure!(stdout.contains("outcome: halted\n"), "fib {n} did not halt");
        let result = format!("result: {}\n", EXPECTED[n as usize - 1]);
        ensure!(stdout.contains(&result), "fib {n} printed:\n{stdout}");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("F(1..15) match the oracle ({elapsed:.2?})"))
}

fn ac3_bundled_fidelity() -> Check {
    let m = bundled()?;
    ensure!(m.rules().len() == 100, "{} rules", m.rules().len());
    ensure!(m.state_count() == 50, "{} states", m.state_count());
    let mut expected_states: BTreeSet<String> = ["q0", "qf"].map(String::from).into();
    for (group, count) in [
        (1, 9),
        (2, 4),
        (3, 11),
        (4, 4),
        (5, 3),
        (6, 4),
        (7, 4),
        (8, 9),
    ] {
        for i in 1..=count {
            expected_states.insert(format!("q{group}{i:02}"));
        }
    }
    ensure!(expected_states.len() == 50, "internal state listing is off");
    let states: BTreeSet<String> = m.state_names().iter().cloned().collect();
    ensure!(
        states == expected_states,
        "state set differs: {:?}",
        states
            .symmetric_difference(&expected_states)
            .collect::<Vec<_>>()
    );
    let symbols: BTreeSet<&str> = m.symbol_names().iter().map(String::as_str).collect();
    ensure!(
        symbols == BTreeSet::from(["b", "1", "x", "*"]),
        "symbols {symbols:?}"
    );
    ensure!(m.symbol_name(m.blank()) == "b", "blank is not b");
    ensure!(m.finals().len() == 1, "{} final states", m.finals().len());
    let problems = validate(&m);
    ensure!(problems.is_empty(), "validate: {problems:?}");
    let spot = [
        (0, ("q0", "1", "q101", "x", Move::Right)),
        (55, ("q404", "x", "q801", "x", Move::Stay)),
        (98, ("q809", "1", "qf", "1", Move::Stay)),
    ];
    for (id, (cs, sym, ns, w, mv)) in spot {
        let r = m.rule(id).ok_or(format!("no rule {id}"))?;
        let got = (
            m.state_name(r.cur_state),
            m.symbol_name(r.cur_symbol),
            m.state_name(r.next_state),
            m.symbol_name(r.next_symbol),
            r.movement,
        );
        ensure!(got == (cs, sym, ns, w, mv), "rule {id} is {got:?}");
    }
    Ok("100 rules, 50 states, 4 symbols, 1 final; rules 0/55/98 match; validate clean".into())
}

fn unique_keys(m: &Machine) -> bool {
    let mut seen = HashSet::new();
    m.rules()
        .iter()
        .all(|r| seen.insert((r.cur_state, r.cur_symbol)))
}

fn ac4_determinism() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC4);
    let mut machines = vec![bundled()?];
    machines.extend((0..200).map(|_| random_machine(&mut rng, GenParams::default())));
    let mut rejected = 0;
    for (i, m) in machines.iter().enumerate() {
        let text = serialize_machine(m);
        let parsed =
            parse_machine(&text).map_err(|d| format!("machine {i} did not reparse: {d:?}"))?;
        ensure!(
            unique_keys(&parsed),
            "machine {i}: duplicate (state, symbol) after parsing"
        );
        let Some(r) = m.rules().first() else { continue };
        let dup_line = format!(
            "rule {} {} {} {} {}\n",
            m.state_name(r.cur_state),
            m.symbol_name(r.cur_symbol),
            m.state_name(m.initial()),
            m.symbol_name(m.blank()),
            if r.movement == Move::Left {
                Move::Right
            } else {
                Move::Left
            },
        );
        let diags = parse_machine(&(text.clone() + &dup_line))
            .err()
            .ok_or(format!("machine {i}: duplicate rule accepted"))?;
        let last_line = text.lines().count() + 1;
        ensure!(
            diags.len() == 1
                && diags[0].kind == DiagnosticKind::DuplicateRule
                && diags[0].line == last_line,
            "machine {i}: diagnostics {diags:?}"
        );
        rejected += 1;
    }
    Ok(format!(
        "{} machines deterministic after parsing; {rejected} injected duplicates rejected",
        machines.len()
    ))
}

fn ac5_engine_equivalence() -> Check {
    const LIMIT: u64 = 100_000;
    let m = bundled()?;
    for n in 1..=12 {
        let input = encode_unary(n, &m).unwrap();
        let slow = run(&m, &input, LIMIT).map_err(|e| e.to_string())?;
        let fast = run_accelerated(&m, &input, LIMIT).map_err(|e| e.to_string())?;
        ensure!(
            slow.kind == OutcomeKind::Halted,
            "n={n} did not halt within {LIMIT}"
        );
        ensure!(fast == slow, "engines differ on fibonacci n={n}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC5);
    let mut kinds = [0usize; 3];
    for i in 0..100 {
        let machine = random_machine(&mut rng, GenParams::default());
        let input = random_input(&mut rng, &machine, 30);
        let slow = run(&machine, &input, LIMIT).map_err(|e| e.to_string())?;
        let fast = run_accelerated(&machine, &input, LIMIT).map_err(|e| e.to_string())?;
        ensure!(
            (
                fast.kind,
                fast.final_config.state,
                &fast.final_config.tape,
                fast.stats.steps
            ) == (
                slow.kind,
                slow.final_config.state,
                &slow.final_config.tape,
                slow.stats.steps
            ),
            "random pair {i} differs"
        );
        ensure!(fast == slow, "random pair {i}: statistics differ");
        kinds[slow.kind as usize] += 1;
    }
    Ok(format!(
        "fibonacci n=1..12 and 100 random pairs agree (halted {}, stuck {}, limit {})",
        kinds[0], kinds[1], kinds[2]
    ))
}

fn ac6_codec_round_trip() -> Check {
    let m = bundled()?;
    for n in 0..=1000u64 {
        let tape = Tape::from_symbols(&encode_unary(n, &m).unwrap(), m.blank());
        let back = decode_unary(&tape, &m).map_err(|e| e.to_string())?;
        ensure!(back == n, "decode(encode({n})) = {back}");
    }
    Ok("n = 0..=1000".into())
}

fn ac7_trace_replay() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("trace.log");
    let machine_path = bundled_path();
    let (code, stdout, stderr) = cli(&[
        "run",
        machine_path.to_str().unwrap(),
        "--unary",
        "5",
        "--trace-file",
        path.to_str().unwrap(),
    ]);
    ensure!(code == 0, "run exited {code}: {stderr}");
    let trace = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let m = bundled()?;
    let input = encode_unary(5, &m).unwrap();
    let replayed = replay(&m, &input, trace.lines()).map_err(|e| e.to_string())?;
    let reference = run(&m, &input, DEFAULT_MAX_STEPS).map_err(|e| e.to_string())?;
    ensure!(
        replayed.tape == reference.final_config.tape,
        "replayed tape differs"
    );
    ensure!(
        replayed == reference.final_config,
        "replayed configuration differs"
    );
    let printed = format!("tape: {}\n", replayed.tape.render(&m));
    ensure!(
        stdout.contains(&printed),
        "printed tape differs from replay"
    );
    Ok(format!(
        "{} trace lines replay to the final tape",
        trace.lines().count()
    ))
}

fn ac8_stuck_semantics() -> Check {
    let m = bundled()?;
    let q0 = m.initial();
    let blank = m.blank();
    ensure!(
        !m.rules()
            .iter()
            .any(|r| r.cur_state == q0 && r.cur_symbol == blank),
        "table has a (q0, b) rule"
    );
    let out = run(&m, &[], DEFAULT_MAX_STEPS).map_err(|e| e.to_string())?;
    ensure!(out.kind == OutcomeKind::Stuck, "outcome {:?}", out.kind);
    ensure!(out.stats.steps == 0, "{} steps", out.stats.steps);
    ensure!(
        out.final_config.state == q0,
        "state {}",
        m.state_name(out.final_config.state)
    );
    let (code, _, _) = cli(&["run", bundled_path().to_str().unwrap(), "--unary", "0"]);
    ensure!(code == 2, "exit code {code}");
    Ok("empty input: stuck at step 0 in q0, exit 2".into())
}

fn ac9_dispatch_reduction() -> Check {
    let m = bundled()?;
    let input = encode_unary(12, &m).unwrap();
    let slow = run(&m, &input, DEFAULT_MAX_STEPS).map_err(|e| e.to_string())?;
    let (fast, counters) =
        run_accelerated_profiled(&m, &input, DEFAULT_MAX_STEPS).map_err(|e| e.to_string())?;
    ensure!(
        fast.stats.steps == slow.stats.steps,
        "steps {} vs {}",
        fast.stats.steps,
        slow.stats.steps
    );
    ensure!(
        counters.dispatches < fast.stats.steps,
        "{} dispatches for {} steps",
        counters.dispatches,
        fast.stats.steps
    );
    Ok(format!(
        "n=12: {} dispatches for {} steps ({} sweeps covering {} steps)",
        counters.dispatches, fast.stats.steps, counters.macro_steps, counters.macro_cells
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("AC1 golden sample n=7 -> 13", ac1_golden_sample),
        ("AC2 oracle suite n=1..15", ac2_oracle_suite),
        ("AC3 bundled machine fidelity", ac3_bundled_fidelity),
        ("AC4 determinism after parsing", ac4_determinism),
        ("AC5 engine equivalence", ac5_engine_equivalence),
        ("AC6 unary codec round trip", ac6_codec_round_trip),
        ("AC7 trace replay", ac7_trace_replay),
        ("AC8 stuck semantics", ac8_stuck_semantics),
        ("AC9 accelerated dispatch count", ac9_dispatch_reduction),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
