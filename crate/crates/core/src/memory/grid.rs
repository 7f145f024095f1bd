//! Uniform partition of the box domain into grid cells.
//!
//! The grid covers the first `min(n, dimension_cap)` coordinates with `k`
//! equal bins each, so the cell count stays bounded on high-dimensional
//! problems. Cell ids are the mixed-radix encoding of the per-dimension bin
//! indices; ascending id order is the canonical cell order everywhere.

use crate::problems::Problem;

#[derive(Debug, Clone)]
pub struct Grid {
    lower: Vec<f64>,
    upper: Vec<f64>,
    partitions_per_dim: usize,
    gridded_dims: usize,
}

impl Grid {
    pub fn new(problem: &Problem, partitions_per_dim: usize, dimension_cap: usize) -> Self {
        let gridded_dims = problem.dimension().min(dimension_cap).max(1);
        Self {
            lower: problem.lower_bounds()[..gridded_dims].to_vec(),
            upper: problem.upper_bounds()[..gridded_dims].to_vec(),
            partitions_per_dim,
            gridded_dims,
        }
    }

    pub fn cell_count(&self) -> u64 {
        (self.partitions_per_dim as u64).pow(self.gridded_dims as u32)
    }

    pub fn gridded_dims(&self) -> usize {
        self.gridded_dims
    }

    /// Cell id of a position. Out-of-range components land in the boundary
    /// bins, so clipped and unclipped views of a point agree.
    pub fn cell_of(&self, position: &[f64]) -> u64 {
        debug_assert!(position.len() >= self.gridded_dims);
        let k = self.partitions_per_dim;
        let mut id = 0u64;
        for ((&x, &lo), &hi) in position[..self.gridded_dims]
            .iter()
            .zip(&self.lower)
            .zip(&self.upper)
        {
            let t = (x - lo) / (hi - lo);
            let bin = ((t * k as f64).floor() as i64).clamp(0, k as i64 - 1) as u64;
            id = id * k as u64 + bin;
        }
        id
    }

    /// Per-gridded-dimension (lower, upper) sub-box of a cell.
    pub fn cell_bounds(&self, cell: u64) -> Vec<(f64, f64)> {
        debug_assert!(cell < self.cell_count());
        let k = self.partitions_per_dim as u64;
        let mut bins = vec![0u64; self.gridded_dims];
        let mut rest = cell;
        for i in (0..self.gridded_dims).rev() {
            bins[i] = rest % k;
            rest /= k;
        }
        bins.iter()
            .enumerate()
            .map(|(i, &bin)| {
                let width = (self.upper[i] - self.lower[i]) / k as f64;
                let lo = self.lower[i] + bin as f64 * width;
                (lo, lo + width)
            })
            .collect()
    }
}
