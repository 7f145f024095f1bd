//! Spatial memory: landmark and visitation data per grid cell.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Landmark {
    /// Most recently visited position inside the cell.
    pub representative: Vec<f64>,
    pub last_visit_iteration: u64,
    pub visit_count: u64,
}

#[derive(Debug, Clone)]
pub struct SpatialMemory {
    landmarks: BTreeMap<u64, Landmark>,
    cell_count: u64,
    window: u64,
    /// Landmarks visited before this iteration are excluded from the
    /// shallow view (set when a search stage clears its shallow layers).
    shallow_floor: u64,
}

impl SpatialMemory {
    pub fn new(cell_count: u64, window: u64) -> Self {
        Self {
            landmarks: BTreeMap::new(),
            cell_count,
            window,
            shallow_floor: 0,
        }
    }

    pub fn record(&mut self, cell: u64, position: &[f64], iteration: u64) {
        let landmark = self.landmarks.entry(cell).or_insert_with(|| Landmark {
            representative: position.to_vec(),
            last_visit_iteration: iteration,
            visit_count: 0,
        });
        landmark.representative = position.to_vec();
        landmark.last_visit_iteration = iteration;
        landmark.visit_count += 1;
    }

    pub fn cell_count(&self) -> u64 {
        self.cell_count
    }

    pub fn visited_cells(&self) -> u64 {
        self.landmarks.len() as u64
    }

    /// Fraction of grid cells visited at least once over the run.
    pub fn coverage(&self) -> f64 {
        self.landmarks.len() as f64 / self.cell_count as f64
    }

    pub fn landmark(&self, cell: u64) -> Option<&Landmark> {
        self.landmarks.get(&cell)
    }

    pub fn visit_count(&self, cell: u64) -> u64 {
        self.landmarks.get(&cell).map_or(0, |l| l.visit_count)
    }

    /// Landmarks visited within the shallow window ending at `iteration`.
    pub fn shallow_landmarks(&self, iteration: u64) -> Vec<(u64, &Landmark)> {
        let horizon = iteration.saturating_sub(self.window).max(self.shallow_floor);
        self.landmarks
            .iter()
            .filter(|(_, l)| l.last_visit_iteration >= horizon)
            .map(|(&cell, l)| (cell, l))
            .collect()
    }

    pub fn clear_shallow(&mut self, iteration: u64) {
        self.shallow_floor = iteration;
    }

    /// The `count` cell ids with the fewest visits, unvisited cells first;
    /// ties break by ascending cell id.
    pub fn least_visited(&self, count: usize) -> Vec<u64> {
        let want = count.min(self.cell_count as usize);
        let mut picked = Vec::with_capacity(want);
        // unvisited cells are the zero-count minimum and already id-ordered
        let mut visited = self.landmarks.keys().copied().peekable();
        for cell in 0..self.cell_count {
            match visited.peek() {
                Some(&v) if v == cell => {
                    visited.next();
                }
                _ => {
                    picked.push(cell);
                    if picked.len() == want {
                        return picked;
                    }
                }
            }
        }
        let mut rest: Vec<(u64, u64)> = self
            .landmarks
            .iter()
            .map(|(&cell, l)| (l.visit_count, cell))
            .collect();
        rest.sort_unstable();
        picked.extend(rest.iter().take(want - picked.len()).map(|&(_, cell)| cell));
        picked
    }
}
