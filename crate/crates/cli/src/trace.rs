//! One line per step:
//!
//! ```text
//! step=0 state=q0 head=0 read=1 rule=0 write=x move=R next=q101
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;
use tmsim::{Configuration, Machine, Move, Rule, SymbolId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub step: u64,
    pub state: String,
    pub head: i64,
    pub read: String,
    pub rule: usize,
    pub write: String,
    pub movement: Move,
    pub next_state: String,
}

impl TraceRecord {
    pub fn new(machine: &Machine, step: u64, head: i64, rule: &Rule) -> Self {
        TraceRecord {
            step,
            state: machine.state_name(rule.cur_state).to_owned(),
            head,
            read: machine.symbol_name(rule.cur_symbol).to_owned(),
            rule: rule.rule_id,
            write: machine.symbol_name(rule.next_symbol).to_owned(),
            movement: rule.movement,
            next_state: machine.state_name(rule.next_state).to_owned(),
        }
    }
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step={} state={} head={} read={} rule={} write={} move={} next={}",
            self.step,
            self.state,
            self.head,
            self.read,
            self.rule,
            self.write,
            self.movement,
            self.next_state
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed trace line: {0}")]
pub struct MalformedTrace(pub String);

impl FromStr for TraceRecord {
    type Err = MalformedTrace;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        const KEYS: [&str; 8] = [
            "step", "state", "head", "read", "rule", "write", "move", "next",
        ];
        let bad = || MalformedTrace(line.to_owned());
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != KEYS.len() {
            return Err(bad());
        }
        let mut values = [""; 8];
        for ((field, key), value) in fields.iter().zip(KEYS).zip(values.iter_mut()) {
            *value = field
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .ok_or_else(bad)?;
        }
        Ok(TraceRecord {
            step: values[0].parse().map_err(|_| bad())?,
            state: values[1].to_owned(),
            head: values[2].parse().map_err(|_| bad())?,
            read: values[3].to_owned(),
            rule: values[4].parse().map_err(|_| bad())?,
            write: values[5].to_owned(),
            movement: Move::from_token(values[6]).ok_or_else(bad)?,
            next_state: values[7].to_owned(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("record {index}: {source}")]
    Malformed {
        index: usize,
        source: MalformedTrace,
    },
    #[error("record {index}: rule {rule} does not exist")]
    UnknownRule { index: usize, rule: usize },
    #[error("record {index}: recorded {field} `{recorded}` but replay has `{actual}`")]
    Divergence {
        index: usize,
        field: &'static str,
        recorded: String,
        actual: String,
    },
    #[error("invalid input: {0}")]
    Input(#[from] tmsim::RunError),
}

/// Applies each recorded rule to a fresh configuration built from `input`,
/// checking that every record agrees with the replayed configuration and
/// with the machine's table. Returns the final configuration.
pub fn replay<'a>(
    machine: &Machine,
    input: &[SymbolId],
    lines: impl IntoIterator<Item = &'a str>,
) -> Result<Configuration, ReplayError> {
    let mut config = Configuration::initial(machine, input)?;
    for (index, line) in lines.into_iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: TraceRecord = line
            .parse()
            .map_err(|source| ReplayError::Malformed { index, source })?;
        let rule = *machine.rule(record.rule).ok_or(ReplayError::UnknownRule {
            index,
            rule: record.rule,
        })?;
        let expected = TraceRecord::new(machine, config.steps, config.tape.head(), &rule);
        let actual_state = machine.state_name(config.state);
        let actual_read = machine.symbol_name(config.tape.read());
        let checks = [
            ("step", record.step.to_string(), expected.step.to_string()),
            ("head", record.head.to_string(), expected.head.to_string()),
            ("state", record.state.clone(), actual_state.to_owned()),
            ("read", record.read.clone(), actual_read.to_owned()),
            ("rule state", record.state.clone(), expected.state.clone()),
            ("rule symbol", record.read.clone(), expected.read.clone()),
            ("write", record.write.clone(), expected.write.clone()),
            (
                "move",
                record.movement.to_string(),
                expected.movement.to_string(),
            ),
            (
                "next",
                record.next_state.clone(),
                expected.next_state.clone(),
            ),
        ];
        for (field, recorded, actual) in checks {
            if recorded != actual {
                return Err(ReplayError::Divergence {
                    index,
                    field,
                    recorded,
                    actual,
                });
            }
        }
        config.apply(&rule);
    }
    Ok(config)
}
