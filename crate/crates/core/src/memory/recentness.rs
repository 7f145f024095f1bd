//! Recentness memory: the tabu ring of the last visited positions.

use std::collections::VecDeque;

use crate::util::euclidean;

#[derive(Debug, Clone)]
pub struct RecentnessMemory {
    ring: VecDeque<Vec<f64>>,
    capacity: usize,
}

impl RecentnessMemory {
    pub fn new(capacity: usize) -> Self {
        Self {
            ring: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    /// Pushes a visited position. An identical position already in the ring
    /// is refreshed to most-recent rather than duplicated.
    pub fn push(&mut self, position: &[f64]) {
        if let Some(at) = self.ring.iter().position(|p| p == position) {
            self.ring.remove(at);
        }
        self.ring.push_back(position.to_vec());
        while self.ring.len() > self.capacity {
            self.ring.pop_front();
        }
    }

    /// True iff some stored position lies within Euclidean distance
    /// `radius` of `position`.
    pub fn is_tabu(&self, position: &[f64], radius: f64) -> bool {
        self.ring
            .iter()
            .any(|p| euclidean(p, position) <= radius)
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    /// Stored positions, oldest first.
    pub fn positions(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.ring.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_ring_is_never_tabu() {
        let mem = RecentnessMemory::new(4);
        assert!(!mem.is_tabu(&[0.0, 0.0], 1e9));
    }

    #[test]
    fn exact_revisit_is_tabu_for_any_positive_radius() {
        let mut mem = RecentnessMemory::new(4);
        mem.push(&[1.5, -2.0]);
        assert!(mem.is_tabu(&[1.5, -2.0], 1e-300));
    }

    #[test]
    fn hand_computed_distance_case() {
        let mut mem = RecentnessMemory::new(4);
        mem.push(&[0.0, 0.0]);
        // distance of (0.3, 0.3) from the origin is about 0.424
        assert!(mem.is_tabu(&[0.3, 0.3], 0.5));
        assert!(!mem.is_tabu(&[0.3, 0.3], 0.4));
    }

    #[test]
    fn oldest_entry_evicted_first() {
        let mut mem = RecentnessMemory::new(2);
        mem.push(&[0.0]);
        mem.push(&[1.0]);
        mem.push(&[2.0]);
        assert_eq!(mem.len(), 2);
        assert!(!mem.is_tabu(&[0.0], 0.1));
        assert!(mem.is_tabu(&[1.0], 0.1));
    }

    #[test]
    fn revisit_refreshes_instead_of_duplicating() {
        let mut mem = RecentnessMemory::new(2);
        mem.push(&[0.0]);
        mem.push(&[1.0]);
        mem.push(&[0.0]); // refresh: [1.0] is now the oldest
        mem.push(&[2.0]);
        assert!(mem.is_tabu(&[0.0], 0.1));
        assert!(!mem.is_tabu(&[1.0], 0.1));
    }
}
