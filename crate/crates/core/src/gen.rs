//! Random well-formed machines and inputs for differential testing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::machine::{Machine, MachineBuilder, Move, SymbolId};

/// Shape of generated machines.
#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub max_states: usize,
    pub max_symbols: usize,
    /// Probability that a `(state, symbol)` pair gets a rule.
    pub density: f64,
    /// Probability that a generated rule is a scan rule.
    pub scan_bias: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_states: 6,
            max_symbols: 4,
            density: 0.85,
            scan_bias: 0.35,
        }
    }
}

const SYMBOLS: [&str; 6] = ["b", "1", "x", "*", "a", "c"];

/// A deterministic machine over states `s0..` (initial `s0`, single final
/// `halt`) and symbols drawn from `b 1 x * a c` with `b` blank.
pub fn random_machine<R: Rng + ?Sized>(rng: &mut R, params: GenParams) -> Machine {
    let states = rng.gen_range(1..=params.max_states.max(1));
    let symbols = rng.gen_range(2..=params.max_symbols.clamp(2, SYMBOLS.len()));
    let mut builder = MachineBuilder::new();
    builder.blank("b").initial("s0").final_state("halt");
    for &name in &SYMBOLS[..symbols] {
        builder.symbol(name);
    }
    let names: Vec<String> = (0..states).map(|i| format!("s{i}")).collect();
    for state in &names {
        builder.state(state);
    }
    let moves = [Move::Left, Move::Right, Move::Stay];
    for state in &names {
        for &read in &SYMBOLS[..symbols] {
            if !rng.gen_bool(params.density) {
                continue;
            }
            let write = SYMBOLS[rng.gen_range(0..symbols)];
            if rng.gen_bool(params.scan_bias) {
                let movement = if rng.gen_bool(0.5) {
                    Move::Left
                } else {
                    Move::Right
                };
                builder.rule(state, read, state, write, movement);
            } else {
                let next = if rng.gen_bool(0.15) {
                    "halt"
                } else {
                    names.choose(rng).expect("at least one state")
                };
                let movement = *moves.choose(rng).expect("three moves");
                builder.rule(state, read, next, write, movement);
            }
        }
    }
    builder.build().expect("generated machine is well formed")
}

/// Up to `max_len` symbols drawn uniformly from the machine's alphabet.
pub fn random_input<R: Rng + ?Sized>(
    rng: &mut R,
    machine: &Machine,
    max_len: usize,
) -> Vec<SymbolId> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| SymbolId::new(rng.gen_range(0..machine.symbol_count()) as u32))
        .collect()
}
