//! Deep / shallow / extended-shallow storage shared by the elite and
//! characteristic memories.
//!
//! Entries are ranked by a key where lower is better (the objective value
//! for the elite memory, a negated feature score for the characteristic
//! memory). The deep layer keeps the best `deep_capacity` entries over the
//! whole run. The shallow side keeps every entry whose depth index is still
//! within the temporal bound; the exposed shallow view is the best
//! `shallow_capacity` of those, the extended view the next
//! `extended_capacity`, and anything beyond is retained while alive so an
//! eviction can always be backfilled by the best next element.

use crate::problems::Solution;

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub solution: Solution,
    pub key: f64,
}

/// A shallow-side entry with its depth index: the number of iterations
/// elapsed since the position was last visited.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedEntry {
    pub solution: Solution,
    pub key: f64,
    pub depth: u64,
}

#[derive(Debug, Clone)]
pub struct LayeredStore {
    deep: Vec<RankedEntry>,
    window: Vec<TimedEntry>,
    deep_capacity: usize,
    shallow_capacity: usize,
    extended_capacity: usize,
    depth_bound: u64,
}

impl LayeredStore {
    pub fn new(
        deep_capacity: usize,
        shallow_capacity: usize,
        extended_capacity: usize,
        depth_bound: u64,
    ) -> Self {
        Self {
            deep: Vec::with_capacity(deep_capacity + 1),
            window: Vec::new(),
            deep_capacity,
            shallow_capacity,
            extended_capacity,
            depth_bound,
        }
    }

    /// Records a visit. A position already present is refreshed (depth reset
    /// to zero), never duplicated.
    pub fn record(&mut self, solution: &Solution, key: f64) {
        self.record_deep(solution, key);
        self.record_window(solution, key);
    }

    fn record_deep(&mut self, solution: &Solution, key: f64) {
        if self.deep_capacity == 0 {
            return;
        }
        let insert_at = self.deep.partition_point(|e| e.key <= key);
        // Equal keys cluster before insert_at; a revisit of the same
        // position keeps its original slot.
        let mut probe = insert_at;
        while probe > 0 && self.deep[probe - 1].key == key {
            probe -= 1;
            if self.deep[probe].solution.position == solution.position {
                return;
            }
        }
        if insert_at == self.deep.len() && self.deep.len() >= self.deep_capacity {
            return;
        }
        self.deep.insert(
            insert_at,
            RankedEntry {
                solution: solution.clone(),
                key,
            },
        );
        self.deep.truncate(self.deep_capacity);
    }

    fn record_window(&mut self, solution: &Solution, key: f64) {
        let insert_at = self.window.partition_point(|e| e.key <= key);
        let mut probe = insert_at;
        while probe > 0 && self.window[probe - 1].key == key {
            probe -= 1;
            if self.window[probe].solution.position == solution.position {
                self.window[probe].depth = 0;
                return;
            }
        }
        self.window.insert(
            insert_at,
            TimedEntry {
                solution: solution.clone(),
                key,
                depth: 0,
            },
        );
    }

    /// Advances every depth index by one iteration and evicts entries whose
    /// depth exceeded the bound. Backfill is implicit: the window stays
    /// sorted by key, so the views slide up.
    pub fn tick(&mut self) {
        for entry in &mut self.window {
            entry.depth += 1;
        }
        self.window.retain(|e| e.depth <= self.depth_bound);
    }

    pub fn clear_shallow(&mut self) {
        self.window.clear();
    }

    pub fn deep(&self) -> &[RankedEntry] {
        &self.deep
    }

    pub fn best(&self) -> Option<&Solution> {
        self.deep.first().map(|e| &e.solution)
    }

    pub fn best_key(&self) -> Option<f64> {
        self.deep.first().map(|e| e.key)
    }

    pub fn shallow(&self) -> &[TimedEntry] {
        let n = self.window.len().min(self.shallow_capacity);
        &self.window[..n]
    }

    pub fn extended(&self) -> &[TimedEntry] {
        let start = self.window.len().min(self.shallow_capacity);
        let end = self
            .window
            .len()
            .min(self.shallow_capacity + self.extended_capacity);
        &self.window[start..end]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(position: Vec<f64>, value: f64) -> Solution {
        Solution {
            position,
            value,
            birth_iteration: 0,
        }
    }

    fn record_value(store: &mut LayeredStore, position: Vec<f64>, value: f64) {
        let s = sol(position, value);
        store.record(&s, value);
    }

    #[test]
    fn deep_keeps_best_sorted_and_evicts_worst() {
        let mut store = LayeredStore::new(3, 2, 2, 10);
        for (i, v) in [5.0, 1.0, 9.0, 3.0].iter().enumerate() {
            record_value(&mut store, vec![i as f64], *v);
        }
        let keys: Vec<f64> = store.deep().iter().map(|e| e.key).collect();
        assert_eq!(keys, vec![1.0, 3.0, 5.0]);
    }

    #[test]
    fn duplicate_position_refreshes_without_growth() {
        let mut store = LayeredStore::new(4, 2, 2, 10);
        record_value(&mut store, vec![1.0, 2.0], 3.0);
        store.tick();
        assert_eq!(store.shallow()[0].depth, 1);
        record_value(&mut store, vec![1.0, 2.0], 3.0);
        assert_eq!(store.shallow().len(), 1);
        assert_eq!(store.shallow()[0].depth, 0);
        assert_eq!(store.deep().len(), 1);
    }

    #[test]
    fn eviction_promotes_best_extended_entry() {
        let mut store = LayeredStore::new(10, 1, 1, 2);
        record_value(&mut store, vec![0.0], 1.0);
        store.tick();
        store.tick();
        // fresher but worse entries sit below the shallow view
        record_value(&mut store, vec![1.0], 2.0);
        record_value(&mut store, vec![2.0], 3.0);
        assert_eq!(store.shallow()[0].key, 1.0);
        assert_eq!(store.extended()[0].key, 2.0);
        // depth of the old best exceeds the bound on the next tick
        store.tick();
        assert_eq!(store.shallow()[0].key, 2.0);
        assert_eq!(store.extended()[0].key, 3.0);
    }

    #[test]
    fn eviction_with_empty_reserve_shrinks_shallow() {
        let mut store = LayeredStore::new(10, 2, 2, 1);
        record_value(&mut store, vec![0.0], 1.0);
        store.tick();
        store.tick();
        assert!(store.shallow().is_empty());
        assert!(store.extended().is_empty());
    }
}
