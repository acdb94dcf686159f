//! Deterministic single-tape Turing machine simulation.
//!
//! The crate is organised around an immutable [`Machine`] description and two
//! engines that execute it:
//!
//! * [`engine`] is the reference interpreter. It applies one rule per
//!   iteration over a sparse [`Tape`].
//! * [`accel`] keeps the tape run-length encoded and applies directional
//!   self-loop rules across a whole run of identical symbols at once. It is
//!   observationally identical to the reference engine, step counts included.
//!
//! [`format`] reads and writes the line-oriented machine description format
//! and bundles the Fibonacci machine; [`analysis`] provides static checks and
//! run coverage; [`unary`] converts between numbers and unary tapes.

pub mod accel;
pub mod analysis;
pub mod engine;
pub mod format;
#[cfg(feature = "gen")]
pub mod gen;
pub mod machine;
pub mod tape;
pub mod unary;

pub use accel::{
    run_accelerated, run_accelerated_observed, run_accelerated_profiled, AccelCounters, RleTape,
};
pub use engine::{
    run, run_observed, step, Configuration, OutcomeKind, RunError, RunOutcome, RunStats, Silent,
    StepObserver, StepResult, DEFAULT_MAX_STEPS,
};
pub use format::{
    fibonacci_machine, parse_machine, parse_tape_input, serialize_machine, DiagnosticKind,
    ParseDiagnostic, UnknownToken, FIBONACCI_SOURCE,
};
pub use machine::{Machine, MachineBuilder, MachineError, Move, Rule, StateId, SymbolId};
pub use tape::Tape;
pub use unary::{decode_unary, encode_unary, fibonacci, CodecError};
