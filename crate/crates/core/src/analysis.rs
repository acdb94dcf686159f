//! Static checks over a machine's rule table and coverage of a finished run.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use serde_json::{json, Value};

use crate::engine::RunOutcome;
use crate::machine::{Machine, StateId, SymbolId};

/// State-graph reachability from the initial state. Symbols are ignored, so
/// this over-approximates the states a run can actually enter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticReport {
    pub reachable_states: BTreeSet<StateId>,
    pub unreachable_states: BTreeSet<StateId>,
    /// Rules whose current state is unreachable.
    pub statically_dead_rules: BTreeSet<usize>,
    /// `(state, symbol)` pairs with no rule, over reachable non-final states.
    pub missing_transitions: BTreeSet<(StateId, SymbolId)>,
}

pub fn reachability(machine: &Machine) -> StaticReport {
    let mut successors: Vec<Vec<StateId>> = vec![Vec::new(); machine.state_count()];
    for rule in machine.rules() {
        successors[rule.cur_state.index()].push(rule.next_state);
    }

    let mut reachable_states = BTreeSet::from([machine.initial()]);
    let mut queue = VecDeque::from([machine.initial()]);
    while let Some(state) = queue.pop_front() {
        for &next in &successors[state.index()] {
            if reachable_states.insert(next) {
                queue.push_back(next);
            }
        }
    }

    let unreachable_states: BTreeSet<StateId> = machine
        .states()
        .filter(|s| !reachable_states.contains(s))
        .collect();
    let statically_dead_rules = machine
        .rules()
        .iter()
        .filter(|r| unreachable_states.contains(&r.cur_state))
        .map(|r| r.rule_id)
        .collect();
    let missing_transitions = reachable_states
        .iter()
        .filter(|&&s| !machine.is_final(s))
        .flat_map(|&s| machine.symbols().map(move |a| (s, a)))
        .filter(|&(s, a)| machine.lookup(s, a).is_none())
        .collect();

    StaticReport {
        reachable_states,
        unreachable_states,
        statically_dead_rules,
        missing_transitions,
    }
}

fn state_list(machine: &Machine, states: &BTreeSet<StateId>) -> Vec<String> {
    states
        .iter()
        .map(|&s| machine.state_name(s).to_owned())
        .collect()
}

impl StaticReport {
    /// `key: value` lines; list values are space separated.
    pub fn to_text(&self, machine: &Machine) -> String {
        let mut out = String::new();
        let ids = |set: &BTreeSet<usize>| {
            set.iter()
                .map(|id| id.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let missing = self
            .missing_transitions
            .iter()
            .map(|&(s, a)| format!("{}/{}", machine.state_name(s), machine.symbol_name(a)))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            out,
            "reachable_states: {}",
            state_list(machine, &self.reachable_states).join(" ")
        );
        let _ = writeln!(
            out,
            "unreachable_states: {}",
            state_list(machine, &self.unreachable_states).join(" ")
        );
        let _ = writeln!(
            out,
            "statically_dead_rules: {}",
            ids(&self.statically_dead_rules)
        );
        let _ = writeln!(out, "missing_transitions: {missing}");
        out
    }

    pub fn to_document(&self, machine: &Machine) -> Value {
        let missing: Vec<[&str; 2]> = self
            .missing_transitions
            .iter()
            .map(|&(s, a)| [machine.state_name(s), machine.symbol_name(a)])
            .collect();
        json!({
            "report": "static",
            "reachable_states": state_list(machine, &self.reachable_states),
            "unreachable_states": state_list(machine, &self.unreachable_states),
            "statically_dead_rules": self.statically_dead_rules,
            "missing_transitions": missing,
        })
    }
}

/// Which rules a run fired, and the non-blank symbols left on its final tape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub fired_rules: BTreeSet<usize>,
    pub never_fired: BTreeSet<usize>,
    /// Count of each non-blank symbol on the final tape, by name.
    pub residue: BTreeMap<String, u64>,
}

pub fn coverage(machine: &Machine, outcome: &RunOutcome) -> CoverageReport {
    let fired_rules: BTreeSet<usize> = outcome.stats.fired_rules().collect();
    let never_fired = (0..machine.rules().len())
        .filter(|id| !fired_rules.contains(id))
        .collect();
    let mut residue = BTreeMap::new();
    for (_, symbol) in outcome.final_config.tape.cells() {
        *residue
            .entry(machine.symbol_name(symbol).to_owned())
            .or_insert(0) += 1;
    }
    CoverageReport {
        fired_rules,
        never_fired,
        residue,
    }
}

impl CoverageReport {
    pub fn to_text(&self) -> String {
        let ids = |set: &BTreeSet<usize>| {
            set.iter()
                .map(|id| id.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let residue = self
            .residue
            .iter()
            .map(|(s, n)| format!("{s}={n}"))
            .collect::<Vec<_>>()
            .join(" ");
        format!(
            "fired_rules: {}\nnever_fired: {}\nresidue: {residue}\n",
            ids(&self.fired_rules),
            ids(&self.never_fired)
        )
    }

    pub fn to_document(&self) -> Value {
        json!({
            "report": "coverage",
            "fired_rules": self.fired_rules,
            "never_fired": self.never_fired,
            "residue": self.residue,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    NoFinalStates,
    DuplicateRule {
        first: usize,
        second: usize,
    },
    RuleFromFinalState {
        rule_id: usize,
    },
    InvalidId {
        rule_id: Option<usize>,
        what: &'static str,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoFinalStates => write!(f, "machine has no final state"),
            Diagnostic::DuplicateRule { first, second } => {
                write!(
                    f,
                    "rule {second} has the same (state, symbol) as rule {first}"
                )
            }
            Diagnostic::RuleFromFinalState { rule_id } => {
                write!(f, "rule {rule_id} leaves a final state")
            }
            Diagnostic::InvalidId {
                rule_id: Some(id),
                what,
            } => {
                write!(f, "rule {id} refers to an undeclared {what}")
            }
            Diagnostic::InvalidId {
                rule_id: None,
                what,
            } => {
                write!(f, "{what} refers to an undeclared id")
            }
        }
    }
}

/// Re-checks the machine invariants. An empty list means the machine is
/// clean.
pub fn validate(machine: &Machine) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !machine.has_symbol(machine.blank()) {
        out.push(Diagnostic::InvalidId {
            rule_id: None,
            what: "blank",
        });
    }
    if !machine.has_state(machine.initial()) {
        out.push(Diagnostic::InvalidId {
            rule_id: None,
            what: "initial",
        });
    }
    if machine.finals().is_empty() {
        out.push(Diagnostic::NoFinalStates);
    }
    if machine.finals().iter().any(|&s| !machine.has_state(s)) {
        out.push(Diagnostic::InvalidId {
            rule_id: None,
            what: "final",
        });
    }
    let mut seen: HashMap<(StateId, SymbolId), usize> = HashMap::new();
    for rule in machine.rules() {
        let states_ok = machine.has_state(rule.cur_state) && machine.has_state(rule.next_state);
        let symbols_ok =
            machine.has_symbol(rule.cur_symbol) && machine.has_symbol(rule.next_symbol);
        if !states_ok || !symbols_ok {
            out.push(Diagnostic::InvalidId {
                rule_id: Some(rule.rule_id),
                what: if states_ok { "symbol" } else { "state" },
            });
            continue;
        }
        if let Some(&first) = seen.get(&(rule.cur_state, rule.cur_symbol)) {
            out.push(Diagnostic::DuplicateRule {
                first,
                second: rule.rule_id,
            });
        } else {
            seen.insert((rule.cur_state, rule.cur_symbol), rule.rule_id);
        }
        if machine.is_final(rule.cur_state) {
            out.push(Diagnostic::RuleFromFinalState {
                rule_id: rule.rule_id,
            });
        }
    }
    out
}
