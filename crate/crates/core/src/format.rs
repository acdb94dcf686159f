//! Line-oriented machine description format.
//!
//! ```text
//! # comment to end of line
//! blank b
//! initial q0
//! final qf                  # repeatable
//! rule q0 1 q101 x R        # state symbol next-state write move
//! ```
//!
//! Tokens are arbitrary non-whitespace strings. States and symbols are
//! declared by use and interned in order of first appearance; rules get
//! `rule_id`s in source order. CRLF line endings are accepted.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::machine::{Machine, MachineBuilder, Move, SymbolId};

/// Source of the bundled Fibonacci machine (`machines/fibonacci.tm`).
pub const FIBONACCI_SOURCE: &str = include_str!("../machines/fibonacci.tm");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    DuplicateRule,
    UnknownMove,
    BadArity,
    MissingDirective,
    DuplicateDirective,
    UnknownToken,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::DuplicateRule => "DuplicateRule",
            DiagnosticKind::UnknownMove => "UnknownMove",
            DiagnosticKind::BadArity => "BadArity",
            DiagnosticKind::MissingDirective => "MissingDirective",
            DiagnosticKind::DuplicateDirective => "DuplicateDirective",
            DiagnosticKind::UnknownToken => "UnknownToken",
        }
    }
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    /// 1-based line number.
    pub line: usize,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.kind, self.message)
    }
}

/// Parses a machine description. Parsing continues past errors and every
/// diagnostic found is returned; no machine is produced if there are any.
pub fn parse_machine(source: &str) -> Result<Machine, Vec<ParseDiagnostic>> {
    let mut builder = MachineBuilder::new();
    let mut diagnostics = Vec::new();
    let mut blank_line: Option<usize> = None;
    let mut initial_line: Option<usize> = None;
    let mut has_final = false;
    let mut rule_lines: HashMap<(&str, &str), usize> = HashMap::new();
    let mut last_line = 1;

    let mut diag = |line: usize, kind: DiagnosticKind, message: String| {
        diagnostics.push(ParseDiagnostic {
            line,
            kind,
            message,
        })
    };

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&directive, args)) = tokens.split_first() else {
            continue;
        };
        match directive {
            "blank" | "initial" => {
                if args.len() != 1 {
                    diag(
                        line,
                        DiagnosticKind::BadArity,
                        format!("`{directive}` takes 1 argument, found {}", args.len()),
                    );
                    continue;
                }
                let seen = if directive == "blank" {
                    &mut blank_line
                } else {
                    &mut initial_line
                };
                if let Some(first) = *seen {
                    diag(
                        line,
                        DiagnosticKind::DuplicateDirective,
                        format!("`{directive}` already given on line {first}"),
                    );
                    continue;
                }
                *seen = Some(line);
                if directive == "blank" {
                    builder.blank(args[0]);
                } else {
                    builder.initial(args[0]);
                }
            }
            "final" => {
                if args.len() != 1 {
                    diag(
                        line,
                        DiagnosticKind::BadArity,
                        format!("`final` takes 1 argument, found {}", args.len()),
                    );
                    continue;
                }
                has_final = true;
                builder.final_state(args[0]);
            }
            "rule" => {
                if args.len() != 5 {
                    diag(
                        line,
                        DiagnosticKind::BadArity,
                        format!("`rule` takes 5 arguments, found {}", args.len()),
                    );
                    continue;
                }
                let Some(movement) = Move::from_token(args[4]) else {
                    diag(
                        line,
                        DiagnosticKind::UnknownMove,
                        format!("move must be L, R or N, found `{}`", args[4]),
                    );
                    continue;
                };
                if let Some(&first) = rule_lines.get(&(args[0], args[1])) {
                    diag(
                        line,
                        DiagnosticKind::DuplicateRule,
                        format!(
                            "second rule for ({}, {}); first on line {first}",
                            args[0], args[1]
                        ),
                    );
                    continue;
                }
                rule_lines.insert((args[0], args[1]), line);
                builder.rule(args[0], args[1], args[2], args[3], movement);
            }
            other => diag(
                line,
                DiagnosticKind::UnknownToken,
                format!("unknown directive `{other}`"),
            ),
        }
    }

    for (present, name) in [
        (blank_line.is_some(), "blank"),
        (initial_line.is_some(), "initial"),
        (has_final, "final"),
    ] {
        if !present {
            diag(
                last_line,
                DiagnosticKind::MissingDirective,
                format!("no `{name}` directive"),
            );
        }
    }

    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    Ok(builder
        .build_unchecked()
        .expect("blank and initial directives were checked"))
}

/// Canonical text: `blank`, `initial`, `final` lines sorted by state name,
/// an empty line, then one `rule` line per rule in `rule_id` order.
///
/// State and symbol names must be valid tokens (non-empty, no whitespace, no
/// `#`) for the output to parse back.
pub fn serialize_machine(machine: &Machine) -> String {
    let mut out = String::new();
    out.push_str("blank ");
    out.push_str(machine.symbol_name(machine.blank()));
    out.push('\n');
    out.push_str("initial ");
    out.push_str(machine.state_name(machine.initial()));
    out.push('\n');
    let mut finals: Vec<&str> = machine
        .finals()
        .iter()
        .map(|&s| machine.state_name(s))
        .collect();
    finals.sort_unstable();
    for name in finals {
        out.push_str("final ");
        out.push_str(name);
        out.push('\n');
    }
    out.push('\n');
    for rule in machine.rules() {
        out.push_str(&format!(
            "rule {} {} {} {} {}\n",
            machine.state_name(rule.cur_state),
            machine.symbol_name(rule.cur_symbol),
            machine.state_name(rule.next_state),
            machine.symbol_name(rule.next_symbol),
            rule.movement,
        ));
    }
    out
}

/// The bundled 100-rule Fibonacci machine.
pub fn fibonacci_machine() -> Machine {
    static MACHINE: OnceLock<Machine> = OnceLock::new();
    MACHINE
        .get_or_init(|| {
            parse_machine(FIBONACCI_SOURCE).unwrap_or_else(|d| {
                panic!("bundled fibonacci.tm does not parse: {d:?}");
            })
        })
        .clone()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown tape symbol `{token}` at position {position}")]
pub struct UnknownToken {
    pub token: String,
    /// 1-based token position.
    pub position: usize,
}

/// Whitespace-separated symbol names to symbol ids.
pub fn parse_tape_input(text: &str, machine: &Machine) -> Result<Vec<SymbolId>, UnknownToken> {
    text.split_whitespace()
        .enumerate()
        .map(|(i, token)| {
            machine.symbol(token).ok_or_else(|| UnknownToken {
                token: token.to_owned(),
                position: i + 1,
            })
        })
        .collect()
}
