//! Unary numbers: `n` is written as `n` cells of the symbol `1`.

use thiserror::Error;

use crate::machine::{Machine, SymbolId};
use crate::tape::Tape;

pub const UNARY_SYMBOL: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("machine does not declare the unary symbol `1`")]
    MissingUnarySymbol,
}

fn unary_symbol(machine: &Machine) -> Result<SymbolId, CodecError> {
    machine
        .symbol(UNARY_SYMBOL)
        .ok_or(CodecError::MissingUnarySymbol)
}

pub fn encode_unary(n: u64, machine: &Machine) -> Result<Vec<SymbolId>, CodecError> {
    let one = unary_symbol(machine)?;
    Ok(vec![one; n as usize])
}

/// Counts every `1` cell on the tape, wherever it sits.
pub fn decode_unary(tape: &Tape, machine: &Machine) -> Result<u64, CodecError> {
    let one = unary_symbol(machine)?;
    Ok(tape.count(one) as u64)
}

/// Iterative Fibonacci with F(0) = 0 and F(1) = F(2) = 1. Saturates at
/// `u64::MAX` (from n = 94).
pub fn fibonacci(n: u32) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        let next = a.saturating_add(b);
        a = b;
        b = next;
    }
    a
}
