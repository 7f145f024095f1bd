//! Visit-frequency memory over grid cells.
//!
//! Deep counts accumulate over the whole run. Shallow counts cover the
//! current iteration plus the last `window` completed iterations, maintained
//! as a ring of per-iteration count deltas so the window slides exactly.

use std::collections::{BTreeMap, VecDeque};

#[derive(Debug, Clone)]
pub struct FrequencyMemory {
    deep: BTreeMap<u64, u64>,
    shallow: BTreeMap<u64, u64>,
    current: BTreeMap<u64, u64>,
    ring: VecDeque<BTreeMap<u64, u64>>,
    window: u64,
    total: u64,
}

impl FrequencyMemory {
    pub fn new(window: u64) -> Self {
        Self {
            deep: BTreeMap::new(),
            shallow: BTreeMap::new(),
            current: BTreeMap::new(),
            ring: VecDeque::new(),
            window,
            total: 0,
        }
    }

    pub fn record(&mut self, cell: u64) {
        *self.deep.entry(cell).or_insert(0) += 1;
        *self.shallow.entry(cell).or_insert(0) += 1;
        *self.current.entry(cell).or_insert(0) += 1;
        self.total += 1;
    }

    /// Commits the current iteration's deltas and slides the window.
    pub fn tick(&mut self) {
        self.ring.push_back(std::mem::take(&mut self.current));
        if self.ring.len() as u64 > self.window {
            let expired = self.ring.pop_front().expect("non-empty ring");
            for (cell, delta) in expired {
                let count = self.shallow.get_mut(&cell).expect("shallow covers ring");
                *count -= delta;
                if *count == 0 {
                    self.shallow.remove(&cell);
                }
            }
        }
    }

    pub fn clear_shallow(&mut self) {
        self.shallow.clear();
        self.current.clear();
        self.ring.clear();
    }

    pub fn deep_count(&self, cell: u64) -> u64 {
        self.deep.get(&cell).copied().unwrap_or(0)
    }

    pub fn shallow_count(&self, cell: u64) -> u64 {
        self.shallow.get(&cell).copied().unwrap_or(0)
    }

    pub fn deep_counts(&self) -> &BTreeMap<u64, u64> {
        &self.deep
    }

    /// Total visits recorded over the run; equals the sum of deep counts.
    pub fn total_visits(&self) -> u64 {
        self.total
    }
}
