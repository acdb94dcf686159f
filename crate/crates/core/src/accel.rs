//! Accelerated engine.
//!
//! The tape is kept as two stacks of `(symbol, count)` runs on either side of
//! the head. When the rule under the head is a scan rule (same state in and
//! out, head moves), the whole run of identical cells ahead of the head is
//! consumed in one dispatch and `k` steps are booked at once. Every other rule
//! is applied one step at a time, so `N`-move self-loops still hit the step
//! limit.
//!
//! Results are identical to [`crate::engine::run`], including step counts and
//! statistics.

use crate::engine::{
    check_input, Configuration, OutcomeKind, RunError, RunOutcome, RunStats, Silent, StepObserver,
};
use crate::machine::{Machine, Move, SymbolId};
use crate::tape::Tape;

type Run = (SymbolId, u64);

/// Run-length-encoded tape. Each stack keeps the run nearest the head last.
///
/// Canonical form: no run has count 0, adjacent runs differ in symbol, and
/// the run farthest from the head is never blank (blank fringes are
/// implicit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RleTape {
    left: Vec<Run>,
    right: Vec<Run>,
    current: SymbolId,
    blank: SymbolId,
    head: i64,
}

fn push(stack: &mut Vec<Run>, blank: SymbolId, symbol: SymbolId, count: u64) {
    match stack.last_mut() {
        Some((top, n)) if *top == symbol => *n += count,
        None if symbol == blank => {}
        _ => stack.push((symbol, count)),
    }
}

fn pop_one(stack: &mut Vec<Run>, blank: SymbolId) -> SymbolId {
    match stack.last_mut() {
        None => blank,
        Some((symbol, n)) => {
            let symbol = *symbol;
            *n -= 1;
            if *n == 0 {
                stack.pop();
            }
            symbol
        }
    }
}

/// Removes `count` cells from the near end. The caller guarantees they all
/// belong to the top run, or that the stack is empty (implicit blanks).
fn drop_cells(stack: &mut Vec<Run>, count: u64) {
    if count == 0 {
        return;
    }
    if let Some((_, n)) = stack.last_mut() {
        debug_assert!(*n >= count);
        *n -= count;
        if *n == 0 {
            stack.pop();
        }
    }
}

impl RleTape {
    /// Head on offset 0 over `input[0]`; the rest is compressed to the right.
    pub fn from_list(input: &[SymbolId], blank: SymbolId) -> Self {
        let mut right = Vec::new();
        if input.len() > 1 {
            for &symbol in input[1..].iter().rev() {
                push(&mut right, blank, symbol, 1);
            }
        }
        RleTape {
            left: Vec::new(),
            right,
            current: input.first().copied().unwrap_or(blank),
            blank,
            head: 0,
        }
    }

    pub fn current(&self) -> SymbolId {
        self.current
    }

    pub fn head(&self) -> i64 {
        self.head
    }

    /// Runs to the left of the head, nearest first.
    pub fn left_runs(&self) -> Vec<(SymbolId, u64)> {
        self.left.iter().rev().copied().collect()
    }

    /// Runs to the right of the head, nearest first.
    pub fn right_runs(&self) -> Vec<(SymbolId, u64)> {
        self.right.iter().rev().copied().collect()
    }

    pub fn is_canonical(&self) -> bool {
        let ok = |stack: &[Run]| {
            stack.iter().all(|&(_, n)| n > 0)
                && stack.windows(2).all(|w| w[0].0 != w[1].0)
                && stack.first().is_none_or(|&(s, _)| s != self.blank)
        };
        ok(&self.left) && ok(&self.right)
    }

    /// Expands into a sparse tape with the same head offset.
    pub fn to_tape(&self) -> Tape {
        let mut tape = Tape::new(self.blank);
        tape.write_at(self.head, self.current);
        let mut offset = self.head;
        for &(symbol, n) in self.left.iter().rev() {
            for _ in 0..n {
                offset -= 1;
                tape.write_at(offset, symbol);
            }
        }
        offset = self.head;
        for &(symbol, n) in self.right.iter().rev() {
            for _ in 0..n {
                offset += 1;
                tape.write_at(offset, symbol);
            }
        }
        tape.set_head(self.head);
        tape
    }

    #[inline]
    fn step(&mut self, write: SymbolId, movement: Move) {
        let blank = self.blank;
        match movement {
            Move::Stay => self.current = write,
            Move::Right => {
                push(&mut self.left, blank, write, 1);
                self.current = pop_one(&mut self.right, blank);
                self.head += 1;
            }
            Move::Left => {
                push(&mut self.right, blank, write, 1);
                self.current = pop_one(&mut self.left, blank);
                self.head -= 1;
            }
        }
    }

    /// Number of consecutive cells equal to the current one in direction
    /// `movement`, counting the current cell. `None` means unbounded (a blank
    /// with nothing but blank fringe ahead).
    fn run_ahead(&self, movement: Move) -> Option<u64> {
        let ahead = match movement {
            Move::Right => &self.right,
            Move::Left => &self.left,
            Move::Stay => return Some(1),
        };
        match ahead.last() {
            None if self.current == self.blank => None,
            Some(&(symbol, n)) if symbol == self.current => Some(1 + n),
            _ => Some(1),
        }
    }

    /// Writes `write` over `count` cells moving in `movement`, starting at
    /// the head. The cells must all hold the current symbol.
    fn sweep(&mut self, write: SymbolId, movement: Move, count: u64) {
        let blank = self.blank;
        let (behind, ahead, delta) = match movement {
            Move::Right => (&mut self.left, &mut self.right, 1),
            Move::Left => (&mut self.right, &mut self.left, -1),
            Move::Stay => unreachable!("sweep needs a moving rule"),
        };
        push(behind, blank, write, count);
        drop_cells(ahead, count - 1);
        self.current = pop_one(ahead, blank);
        self.head += delta * count as i64;
    }
}

/// Dispatch counters of an accelerated run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AccelCounters {
    /// Loop iterations, one per rule lookup that led to an application.
    pub dispatches: u64,
    /// Dispatches that went through a scan rule.
    pub macro_steps: u64,
    /// Steps covered by those scan dispatches.
    pub macro_cells: u64,
}

pub fn run_accelerated(
    machine: &Machine,
    input: &[SymbolId],
    max_steps: u64,
) -> Result<RunOutcome, RunError> {
    run_accelerated_profiled(machine, input, max_steps).map(|(outcome, _)| outcome)
}

pub fn run_accelerated_profiled(
    machine: &Machine,
    input: &[SymbolId],
    max_steps: u64,
) -> Result<(RunOutcome, AccelCounters), RunError> {
    run_accelerated_observed(machine, input, max_steps, &mut Silent)
}

/// As [`run_accelerated_profiled`], reporting every individual step to
/// `observer`, including each step folded into a scan.
pub fn run_accelerated_observed<O: StepObserver>(
    machine: &Machine,
    input: &[SymbolId],
    max_steps: u64,
    observer: &mut O,
) -> Result<(RunOutcome, AccelCounters), RunError> {
    check_input(machine, input)?;
    let mut tape = RleTape::from_list(input, machine.blank());
    let mut state = machine.initial();
    let mut stats = RunStats::new(machine);
    let mut counters = AccelCounters::default();

    let kind = loop {
        if machine.is_final(state) {
            break OutcomeKind::Halted;
        }
        let Some(rule) = machine.lookup(state, tape.current) else {
            break OutcomeKind::Stuck;
        };
        let remaining = max_steps.saturating_sub(stats.steps);
        if remaining == 0 {
            break OutcomeKind::StepLimitExceeded;
        }
        counters.dispatches += 1;
        if rule.is_scan() {
            let count = tape
                .run_ahead(rule.movement)
                .map_or(remaining, |n| n.min(remaining));
            let start = tape.head;
            if observer.is_active() {
                for i in 0..count {
                    let head = start + rule.movement.delta() * i as i64;
                    observer.on_step(stats.steps + i, head, rule);
                }
            }
            tape.sweep(rule.next_symbol, rule.movement, count);
            stats.record(rule, count, tape.head);
            counters.macro_steps += 1;
            counters.macro_cells += count;
        } else {
            observer.on_step(stats.steps, tape.head, rule);
            tape.step(rule.next_symbol, rule.movement);
            state = rule.next_state;
            stats.record(rule, 1, tape.head);
        }
        debug_assert!(tape.is_canonical());
    };

    let outcome = RunOutcome {
        kind,
        final_config: Configuration {
            state,
            tape: tape.to_tape(),
            steps: stats.steps,
        },
        stats,
    };
    Ok((outcome, counters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, DEFAULT_MAX_STEPS};
    use crate::format::{fibonacci_machine, parse_machine, parse_tape_input};
    use crate::machine::Rule;
    use crate::unary::{decode_unary, encode_unary};

    const B: SymbolId = SymbolId::new(0);
    const ONE: SymbolId = SymbolId::new(1);
    const STAR: SymbolId = SymbolId::new(2);

    #[test]
    fn compress_samples() {
        let t = RleTape::from_list(&[ONE; 5], B);
        assert_eq!(t.current(), ONE);
        assert_eq!(t.right_runs(), vec![(ONE, 4)]);
        assert!(t.left_runs().is_empty());

        let t = RleTape::from_list(&[], B);
        assert_eq!(t.current(), B);
        assert!(t.right_runs().is_empty() && t.left_runs().is_empty());

        let t = RleTape::from_list(&[ONE, STAR, STAR, ONE], B);
        assert_eq!(t.current(), ONE);
        assert_eq!(t.right_runs(), vec![(STAR, 2), (ONE, 1)]);
        assert!(t.is_canonical());
    }

    #[test]
    fn expansion_matches_sparse_layout() {
        let input = [ONE, B, STAR, STAR, B, B];
        let t = RleTape::from_list(&input, B);
        assert_eq!(t.to_tape(), Tape::from_symbols(&input, B));
        assert!(t.is_canonical());
    }

    #[test]
    fn blank_writes_at_the_fringe_vanish() {
        let mut t = RleTape::from_list(&[ONE], B);
        t.step(B, Move::Right);
        t.step(B, Move::Right);
        assert!(t.left_runs().is_empty());
        t.step(ONE, Move::Left);
        t.step(STAR, Move::Left);
        assert_eq!(t.head(), 0);
        assert_eq!(t.right_runs(), vec![(STAR, 1), (ONE, 1)]);
        assert_eq!(t.current(), B);
        assert!(t.is_canonical());
    }

    #[test]
    fn right_scanner_uses_one_sweep() {
        let m =
            parse_machine("blank b\ninitial q\nfinal f\nrule q 1 q 1 R\nrule q b f b N\n").unwrap();
        let input = encode_unary(10, &m).unwrap();
        let (out, counters) = run_accelerated_profiled(&m, &input, DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(out.kind, OutcomeKind::Halted);
        assert_eq!(out.stats.steps, 11);
        assert!(counters.dispatches <= 3);
        assert_eq!(counters.macro_steps, 1);
        assert_eq!(counters.macro_cells, 10);
        assert_eq!(out, run(&m, &input, DEFAULT_MAX_STEPS).unwrap());
    }

    #[test]
    fn sweep_is_truncated_at_the_limit() {
        let m =
            parse_machine("blank b\ninitial q\nfinal f\nrule q 1 q * R\nrule q b f b N\n").unwrap();
        let input = encode_unary(10, &m).unwrap();
        for limit in 1..=12 {
            let fast = run_accelerated(&m, &input, limit).unwrap();
            assert_eq!(fast, run(&m, &input, limit).unwrap(), "limit {limit}");
        }
    }

    #[test]
    fn endless_blank_scan_stops_on_the_limit() {
        let m = parse_machine("blank b\ninitial q\nfinal f\nrule q b q b L\n").unwrap();
        let (out, counters) = run_accelerated_profiled(&m, &[], 1_000_000_000).unwrap();
        assert_eq!(out.kind, OutcomeKind::StepLimitExceeded);
        assert_eq!(out.stats.steps, 1_000_000_000);
        assert_eq!(out.stats.min_offset, -1_000_000_000);
        assert_eq!(out.final_config.tape.head(), -1_000_000_000);
        assert_eq!(counters.dispatches, 1);
    }

    #[test]
    fn rewriting_scan_over_mixed_runs() {
        let m = parse_machine(
            "blank b\ninitial q\nfinal f\nrule q 1 q * L\nrule q * r * R\nrule r * r 1 R\nrule r 1 r 1 R\nrule r b f b N\n",
        )
        .unwrap();
        let input = parse_tape_input("* 1 1 1 * * 1", &m).unwrap();
        let mut start = input.clone();
        start.rotate_left(3);
        for input in [input, start] {
            assert_eq!(
                run_accelerated(&m, &input, 1000).unwrap(),
                run(&m, &input, 1000).unwrap()
            );
        }
    }

    #[test]
    fn fibonacci_matches_reference() {
        let m = fibonacci_machine();
        for n in 1..=8 {
            let input = encode_unary(n, &m).unwrap();
            let fast = run_accelerated(&m, &input, DEFAULT_MAX_STEPS).unwrap();
            let slow = run(&m, &input, DEFAULT_MAX_STEPS).unwrap();
            assert_eq!(fast, slow, "n = {n}");
        }
        let input = encode_unary(7, &m).unwrap();
        let out = run_accelerated(&m, &input, DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(decode_unary(&out.final_config.tape, &m).unwrap(), 13);
        assert_eq!(
            run_accelerated(&m, &input, 5).unwrap(),
            run(&m, &input, 5).unwrap()
        );
    }

    #[test]
    fn observer_expands_sweeps() {
        let m = fibonacci_machine();
        let input = encode_unary(6, &m).unwrap();
        let mut fast = Vec::new();
        run_accelerated_observed(
            &m,
            &input,
            DEFAULT_MAX_STEPS,
            &mut |s: u64, h: i64, r: &Rule| fast.push((s, h, r.rule_id)),
        )
        .unwrap();
        let mut slow = Vec::new();
        crate::engine::run_observed(
            &m,
            &input,
            DEFAULT_MAX_STEPS,
            &mut |s: u64, h: i64, r: &Rule| slow.push((s, h, r.rule_id)),
        )
        .unwrap();
        assert_eq!(fast, slow);
    }
}
