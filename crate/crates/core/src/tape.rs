use std::collections::BTreeMap;

use crate::machine::{Machine, SymbolId};

/// Unbounded two-way tape stored sparsely. Cells that were never written, or
/// were overwritten with the blank symbol, are absent from the map.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tape {
    cells: BTreeMap<i64, SymbolId>,
    head: i64,
    blank: SymbolId,
}

impl Tape {
    pub fn new(blank: SymbolId) -> Self {
        Tape {
            cells: BTreeMap::new(),
            head: 0,
            blank,
        }
    }

    /// Lays `input` out at offsets `0..input.len()` with the head on offset 0.
    pub fn from_symbols(input: &[SymbolId], blank: SymbolId) -> Self {
        let mut tape = Tape::new(blank);
        for (offset, &symbol) in input.iter().enumerate() {
            tape.write_at(offset as i64, symbol);
        }
        tape
    }

    pub fn blank(&self) -> SymbolId {
        self.blank
    }

    pub fn head(&self) -> i64 {
        self.head
    }

    pub fn set_head(&mut self, head: i64) {
        self.head = head;
    }

    #[inline]
    pub fn shift(&mut self, delta: i64) {
        self.head += delta;
    }

    #[inline]
    pub fn read(&self) -> SymbolId {
        self.read_at(self.head)
    }

    #[inline]
    pub fn read_at(&self, offset: i64) -> SymbolId {
        self.cells.get(&offset).copied().unwrap_or(self.blank)
    }

    #[inline]
    pub fn write(&mut self, symbol: SymbolId) {
        self.write_at(self.head, symbol);
    }

    pub fn write_at(&mut self, offset: i64, symbol: SymbolId) {
        if symbol == self.blank {
            self.cells.remove(&offset);
        } else {
            self.cells.insert(offset, symbol);
        }
    }

    /// Non-blank cells in ascending offset order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, SymbolId)> + '_ {
        self.cells.iter().map(|(&o, &s)| (o, s))
    }

    pub fn non_blank_len(&self) -> usize {
        self.cells.len()
    }

    pub fn count(&self, symbol: SymbolId) -> usize {
        if symbol == self.blank {
            return 0;
        }
        self.cells.values().filter(|&&s| s == symbol).count()
    }

    /// Lowest and highest non-blank offsets.
    pub fn extent(&self) -> Option<(i64, i64)> {
        let lo = *self.cells.keys().next()?;
        let hi = *self.cells.keys().next_back()?;
        Some((lo, hi))
    }

    /// Symbols from the first to the last non-blank cell, interior blanks
    /// included.
    pub fn trimmed(&self) -> Vec<SymbolId> {
        match self.extent() {
            Some((lo, hi)) => (lo..=hi).map(|o| self.read_at(o)).collect(),
            None => Vec::new(),
        }
    }

    /// Space-separated symbol names of [`Tape::trimmed`].
    pub fn render(&self, machine: &Machine) -> String {
        self.trimmed()
            .into_iter()
            .map(|s| machine.symbol_name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// True when no stored cell holds the blank symbol.
    pub fn is_canonical(&self) -> bool {
        self.cells.values().all(|&s| s != self.blank)
    }
}
