//! Machine description: interned states and symbols plus a deterministic rule
//! table with a dense `(state, symbol)` dispatch array.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Index into a machine's state name table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StateId(u32);

impl StateId {
    pub const fn new(index: u32) -> Self {
        StateId(index)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index into a machine's symbol name table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SymbolId(u32);

impl SymbolId {
    pub const fn new(index: u32) -> Self {
        SymbolId(index)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

/// Head movement after a write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    /// Head displacement: -1, +1 or 0.
    pub const fn delta(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
            Move::Stay => 0,
        }
    }

    pub const fn token(self) -> &'static str {
        match self {
            Move::Left => "L",
            Move::Right => "R",
            Move::Stay => "N",
        }
    }

    pub fn from_token(token: &str) -> Option<Move> {
        match token {
            "L" => Some(Move::Left),
            "R" => Some(Move::Right),
            "N" => Some(Move::Stay),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One row of the transition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rule {
    /// Ordinal position in the source table, starting at 0.
    pub rule_id: usize,
    pub cur_state: StateId,
    pub cur_symbol: SymbolId,
    pub next_state: StateId,
    pub next_symbol: SymbolId,
    pub movement: Move,
}

impl Rule {
    /// A directional rule that stays in its own state. These are the rules
    /// the accelerated engine applies across a whole run of cells.
    pub fn is_scan(&self) -> bool {
        self.cur_state == self.next_state && self.movement != Move::Stay
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("no blank symbol declared")]
    MissingBlank,
    #[error("no initial state declared")]
    MissingInitial,
    #[error("no final state declared")]
    NoFinalStates,
    #[error("rule {second} duplicates rule {first} for ({state}, {symbol})")]
    DuplicateRule {
        state: String,
        symbol: String,
        first: usize,
        second: usize,
    },
    #[error("rule {rule_id} leaves final state {state}")]
    RuleFromFinalState { rule_id: usize, state: String },
}

/// Immutable Turing machine description.
///
/// Equality is structural: two machines are equal when they agree on the
/// blank symbol, initial state, final states and the rule sequence, compared
/// by name. Interning order does not matter.
#[derive(Debug, Clone)]
pub struct Machine {
    state_names: Vec<String>,
    symbol_names: Vec<String>,
    state_index: HashMap<String, StateId>,
    symbol_index: HashMap<String, SymbolId>,
    blank: SymbolId,
    initial: StateId,
    finals: BTreeSet<StateId>,
    is_final: Vec<bool>,
    rules: Vec<Rule>,
    dispatch: Vec<Option<u32>>,
}

impl Machine {
    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn symbol_count(&self) -> usize {
        self.symbol_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn symbol_names(&self) -> &[String] {
        &self.symbol_names
    }

    pub fn state_name(&self, state: StateId) -> &str {
        &self.state_names[state.index()]
    }

    pub fn symbol_name(&self, symbol: SymbolId) -> &str {
        &self.symbol_names[symbol.index()]
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn symbol(&self, name: &str) -> Option<SymbolId> {
        self.symbol_index.get(name).copied()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.state_names.len() as u32).map(StateId::new)
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.symbol_names.len() as u32).map(SymbolId::new)
    }

    pub fn has_state(&self, state: StateId) -> bool {
        state.index() < self.state_names.len()
    }

    pub fn has_symbol(&self, symbol: SymbolId) -> bool {
        symbol.index() < self.symbol_names.len()
    }

    pub fn blank(&self) -> SymbolId {
        self.blank
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.is_final[state.index()]
    }

    /// All rules, indexed by `rule_id`.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, rule_id: usize) -> Option<&Rule> {
        self.rules.get(rule_id)
    }

    /// The rule for `(state, symbol)`, if the table has one.
    #[inline]
    pub fn lookup(&self, state: StateId, symbol: SymbolId) -> Option<&Rule> {
        let slot = state.index() * self.symbol_names.len() + symbol.index();
        match self.dispatch[slot] {
            Some(idx) => Some(&self.rules[idx as usize]),
            None => None,
        }
    }
}

impl PartialEq for Machine {
    fn eq(&self, other: &Self) -> bool {
        let finals = |m: &Machine| -> BTreeSet<String> {
            m.finals
                .iter()
                .map(|&s| m.state_name(s).to_owned())
                .collect()
        };
        let rule_names = |m: &Machine, r: &Rule| {
            (
                m.state_name(r.cur_state).to_owned(),
                m.symbol_name(r.cur_symbol).to_owned(),
                m.state_name(r.next_state).to_owned(),
                m.symbol_name(r.next_symbol).to_owned(),
                r.movement,
            )
        };
        self.symbol_name(self.blank) == other.symbol_name(other.blank)
            && self.state_name(self.initial) == other.state_name(other.initial)
            && finals(self) == finals(other)
            && self.rules.len() == other.rules.len()
            && self
                .rules
                .iter()
                .zip(&other.rules)
                .all(|(a, b)| rule_names(self, a) == rule_names(other, b))
    }
}

impl Eq for Machine {}

/// Incremental construction of a [`Machine`]. States and symbols are interned
/// in first-use order.
#[derive(Debug, Clone, Default)]
pub struct MachineBuilder {
    state_names: Vec<String>,
    symbol_names: Vec<String>,
    state_index: HashMap<String, StateId>,
    symbol_index: HashMap<String, SymbolId>,
    blank: Option<SymbolId>,
    initial: Option<StateId>,
    finals: BTreeSet<StateId>,
    rules: Vec<Rule>,
}

impl MachineBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.state_index.get(name) {
            return id;
        }
        let id = StateId::new(self.state_names.len() as u32);
        self.state_names.push(name.to_owned());
        self.state_index.insert(name.to_owned(), id);
        id
    }

    pub fn symbol(&mut self, name: &str) -> SymbolId {
        if let Some(&id) = self.symbol_index.get(name) {
            return id;
        }
        let id = SymbolId::new(self.symbol_names.len() as u32);
        self.symbol_names.push(name.to_owned());
        self.symbol_index.insert(name.to_owned(), id);
        id
    }

    pub fn blank(&mut self, name: &str) -> &mut Self {
        let id = self.symbol(name);
        self.blank = Some(id);
        self
    }

    pub fn initial(&mut self, name: &str) -> &mut Self {
        let id = self.state(name);
        self.initial = Some(id);
        self
    }

    pub fn final_state(&mut self, name: &str) -> &mut Self {
        let id = self.state(name);
        self.finals.insert(id);
        self
    }

    /// Appends a rule and returns its `rule_id`.
    pub fn rule(
        &mut self,
        cur_state: &str,
        cur_symbol: &str,
        next_state: &str,
        next_symbol: &str,
        movement: Move,
    ) -> usize {
        let rule = Rule {
            rule_id: self.rules.len(),
            cur_state: self.state(cur_state),
            cur_symbol: self.symbol(cur_symbol),
            next_state: self.state(next_state),
            next_symbol: self.symbol(next_symbol),
            movement,
        };
        self.rules.push(rule);
        rule.rule_id
    }

    /// Builds the machine, enforcing every invariant: blank and initial
    /// present, at least one final state, unique `(state, symbol)` keys and no
    /// rule leaving a final state. All violations are reported.
    pub fn build(self) -> Result<Machine, Vec<MachineError>> {
        let mut errors = Vec::new();
        if self.blank.is_none() {
            errors.push(MachineError::MissingBlank);
        }
        if self.initial.is_none() {
            errors.push(MachineError::MissingInitial);
        }
        if self.finals.is_empty() {
            errors.push(MachineError::NoFinalStates);
        }
        let mut seen: HashMap<(StateId, SymbolId), usize> = HashMap::new();
        for rule in &self.rules {
            if let Some(&first) = seen.get(&(rule.cur_state, rule.cur_symbol)) {
                errors.push(MachineError::DuplicateRule {
                    state: self.state_names[rule.cur_state.index()].clone(),
                    symbol: self.symbol_names[rule.cur_symbol.index()].clone(),
                    first,
                    second: rule.rule_id,
                });
            } else {
                seen.insert((rule.cur_state, rule.cur_symbol), rule.rule_id);
            }
            if self.finals.contains(&rule.cur_state) {
                errors.push(MachineError::RuleFromFinalState {
                    rule_id: rule.rule_id,
                    state: self.state_names[rule.cur_state.index()].clone(),
                });
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(self.assemble())
    }

    /// Builds the machine requiring only a blank symbol and an initial state.
    ///
    /// Empty final sets, duplicate keys and rules out of final states are
    /// accepted so that [`crate::analysis::validate`] can report them. For a
    /// duplicated key the earliest rule is the one dispatched.
    pub fn build_unchecked(self) -> Result<Machine, MachineError> {
        if self.blank.is_none() {
            return Err(MachineError::MissingBlank);
        }
        if self.initial.is_none() {
            return Err(MachineError::MissingInitial);
        }
        Ok(self.assemble())
    }

    fn assemble(self) -> Machine {
        let symbols = self.symbol_names.len();
        let mut dispatch = vec![None; self.state_names.len() * symbols];
        for rule in &self.rules {
            let slot = &mut dispatch[rule.cur_state.index() * symbols + rule.cur_symbol.index()];
            if slot.is_none() {
                *slot = Some(rule.rule_id as u32);
            }
        }
        let mut is_final = vec![false; self.state_names.len()];
        for state in &self.finals {
            is_final[state.index()] = true;
        }
        Machine {
            blank: self.blank.expect("checked by caller"),
            initial: self.initial.expect("checked by caller"),
            state_names: self.state_names,
            symbol_names: self.symbol_names,
            state_index: self.state_index,
            symbol_index: self.symbol_index,
            finals: self.finals,
            is_final,
            rules: self.rules,
            dispatch,
        }
    }
}
