//! Reference engine: one rule application per iteration over a sparse tape.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::machine::{Machine, Rule, StateId, SymbolId};
use crate::tape::Tape;

/// Step limit used when the caller does not pick one.
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("input symbol #{} at position {position} is not in the machine's alphabet", symbol.index())]
    InputSymbolOutOfAlphabet { position: usize, symbol: SymbolId },
}

/// Current state, tape and number of rule applications so far.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub tape: Tape,
    pub steps: u64,
}

impl Configuration {
    /// Initial state, `input` at offsets `0..len`, head on 0.
    pub fn initial(machine: &Machine, input: &[SymbolId]) -> Result<Self, RunError> {
        check_input(machine, input)?;
        Ok(Configuration {
            state: machine.initial(),
            tape: Tape::from_symbols(input, machine.blank()),
            steps: 0,
        })
    }

    /// Applies `rule` regardless of whether it matches the current
    /// configuration.
    #[inline]
    pub fn apply(&mut self, rule: &Rule) {
        self.tape.write(rule.next_symbol);
        self.tape.shift(rule.movement.delta());
        self.state = rule.next_state;
        self.steps += 1;
    }
}

pub(crate) fn check_input(machine: &Machine, input: &[SymbolId]) -> Result<(), RunError> {
    match input.iter().position(|&s| !machine.has_symbol(s)) {
        Some(position) => Err(RunError::InputSymbolOutOfAlphabet {
            position,
            symbol: input[position],
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Applied {
        rule_id: usize,
        config: Configuration,
    },
    AlreadyHalted,
    Stuck,
}

/// Single-step semantics. A configuration in a final state is halted before
/// any rule lookup; a missing rule in a non-final state is `Stuck`.
///
/// Panics if `config.state` does not belong to `machine`.
pub fn step(machine: &Machine, config: &Configuration) -> StepResult {
    if machine.is_final(config.state) {
        return StepResult::AlreadyHalted;
    }
    match machine.lookup(config.state, config.tape.read()) {
        None => StepResult::Stuck,
        Some(rule) => {
            let mut next = config.clone();
            next.apply(rule);
            StepResult::Applied {
                rule_id: rule.rule_id,
                config: next,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    Halted,
    Stuck,
    StepLimitExceeded,
}

impl OutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::Halted => "halted",
            OutcomeKind::Stuck => "stuck",
            OutcomeKind::StepLimitExceeded => "step-limit-exceeded",
        }
    }
}

/// Per-run counters. `rule_firings` is indexed by `rule_id` and
/// `state_visits` by state index.
///
/// `state_visits` counts configurations: the initial configuration plus one
/// per applied step, attributed to the state entered.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunStats {
    pub steps: u64,
    /// Leftmost head position reached.
    pub min_offset: i64,
    /// Rightmost head position reached.
    pub max_offset: i64,
    pub rule_firings: Vec<u64>,
    pub state_visits: Vec<u64>,
}

impl RunStats {
    pub fn new(machine: &Machine) -> Self {
        let mut state_visits = vec![0; machine.state_count()];
        state_visits[machine.initial().index()] = 1;
        RunStats {
            steps: 0,
            min_offset: 0,
            max_offset: 0,
            rule_firings: vec![0; machine.rules().len()],
            state_visits,
        }
    }

    /// Accounts for `count` consecutive applications of `rule` that leave the
    /// head at `head`. For `count > 1` the rule must be a scan rule, so every
    /// intermediate head position lies between the start and `head`.
    #[inline]
    pub(crate) fn record(&mut self, rule: &Rule, count: u64, head: i64) {
        self.steps += count;
        self.rule_firings[rule.rule_id] += count;
        self.state_visits[rule.next_state.index()] += count;
        self.min_offset = self.min_offset.min(head);
        self.max_offset = self.max_offset.max(head);
    }

    pub fn span(&self) -> u64 {
        (self.max_offset - self.min_offset) as u64
    }

    pub fn fired_rules(&self) -> impl Iterator<Item = usize> + '_ {
        self.rule_firings
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(id, _)| id)
    }

    /// Structured document with names resolved through `machine`. Only
    /// non-zero counters are listed.
    pub fn to_document(&self, machine: &Machine) -> Value {
        let firings: BTreeMap<usize, u64> = self
            .rule_firings
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(id, &n)| (id, n))
            .collect();
        let visits: BTreeMap<&str, u64> = self
            .state_visits
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(s, &n)| (machine.state_name(StateId::new(s as u32)), n))
            .collect();
        json!({
            "report": "run_stats",
            "steps": self.steps,
            "min_offset": self.min_offset,
            "max_offset": self.max_offset,
            "rule_firings": firings,
            "state_visits": visits,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub kind: OutcomeKind,
    pub final_config: Configuration,
    pub stats: RunStats,
}

/// Receives every rule application in order. `step` is the step number
/// before the application and `head` the head position the rule read.
pub trait StepObserver {
    fn on_step(&mut self, step: u64, head: i64, rule: &Rule);

    /// False when `on_step` does nothing, letting engines skip the calls.
    fn is_active(&self) -> bool {
        true
    }
}

/// Observer that ignores every step.
#[derive(Debug, Clone, Copy, Default)]
pub struct Silent;

impl StepObserver for Silent {
    fn on_step(&mut self, _: u64, _: i64, _: &Rule) {}

    fn is_active(&self) -> bool {
        false
    }
}

impl<F: FnMut(u64, i64, &Rule)> StepObserver for F {
    fn on_step(&mut self, step: u64, head: i64, rule: &Rule) {
        self(step, head, rule)
    }
}

/// Runs `machine` on `input` until it halts, gets stuck or has taken
/// `max_steps` steps.
pub fn run(machine: &Machine, input: &[SymbolId], max_steps: u64) -> Result<RunOutcome, RunError> {
    run_observed(machine, input, max_steps, &mut Silent)
}

pub fn run_observed<O: StepObserver>(
    machine: &Machine,
    input: &[SymbolId],
    max_steps: u64,
    observer: &mut O,
) -> Result<RunOutcome, RunError> {
    let mut config = Configuration::initial(machine, input)?;
    let mut stats = RunStats::new(machine);
    let kind = loop {
        if machine.is_final(config.state) {
            break OutcomeKind::Halted;
        }
        let Some(rule) = machine.lookup(config.state, config.tape.read()) else {
            break OutcomeKind::Stuck;
        };
        if config.steps >= max_steps {
            break OutcomeKind::StepLimitExceeded;
        }
        observer.on_step(config.steps, config.tape.head(), rule);
        config.apply(rule);
        stats.record(rule, 1, config.tape.head());
    };
    debug_assert!(config.tape.is_canonical());
    debug_assert_eq!(stats.steps, config.steps);
    Ok(RunOutcome {
        kind,
        final_config: config,
        stats,
    })
}
