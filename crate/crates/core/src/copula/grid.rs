//! Discretized copula grids and the canonical-copula / mixture constructions.

use super::partition::SetPartition;
use super::taildep::Mb11Spec;
use super::{ratio_to_f64, CopulaError};

/// Total cell budget: grids larger than 2^24 cells are refused.
pub const GRID_CELL_BUDGET_BITS: usize = 24;

/// Exact mixtures must satisfy the copula invariants to this tolerance.
pub const EXACT_MARGIN_TOL: f64 = 1e-12;

/// n-dimensional probability tensor with 2^k cells per axis and uniform
/// margins: the classical oracle object all circuits are checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaGrid {
    n: usize,
    k: usize,
    cells: Vec<f64>,
}

impl CopulaGrid {
    /// Wraps raw cells after checking nonnegativity, normalization, and the
    /// uniform-margin property within `margin_tol`.
    pub fn new(n: usize, k: usize, cells: Vec<f64>, margin_tol: f64) -> Result<Self, CopulaError> {
        check_budget(n, k)?;
        if cells.len() != 1usize << (n * k) {
            return Err(CopulaError::BadGrid(format!(
                "expected {} cells, got {}",
                1usize << (n * k),
                cells.len()
            )));
        }
        if let Some(&bad) = cells.iter().find(|&&c| c < 0.0 || c.is_nan()) {
            return Err(CopulaError::BadGrid(format!("negative cell mass {bad}")));
        }
        let grid = CopulaGrid { n, k, cells };
        let total = grid.total();
        if (total - 1.0).abs() > EXACT_MARGIN_TOL {
            return Err(CopulaError::BadGrid(format!("cells sum to {total}")));
        }
        let (axis, dev) = grid.worst_margin_deviation();
        if dev > margin_tol {
            return Err(CopulaError::MarginViolation { axis, max_dev: dev });
        }
        Ok(grid)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Cells per axis, 2^k.
    pub fn side(&self) -> usize {
        1 << self.k
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    /// Flat index of a cell; variable 0 occupies the most significant bits,
    /// matching the outcome order of layout-based marginal distributions.
    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.n);
        coords.iter().fold(0, |acc, &c| (acc << self.k) | c)
    }

    pub fn get(&self, coords: &[usize]) -> f64 {
        self.cells[self.index(coords)]
    }

    /// Decodes a flat index back to per-variable cell coordinates.
    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mask = self.side() - 1;
        let mut out = vec![0usize; self.n];
        for v in (0..self.n).rev() {
            out[v] = index & mask;
            index >>= self.k;
        }
        out
    }

    /// Marginal of one axis; uniform margins make every entry 1/2^k.
    pub fn axis_marginal(&self, axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.side()];
        for (idx, &mass) in self.cells.iter().enumerate() {
            out[self.coords(idx)[axis]] += mass;
        }
        out
    }

    /// The axis with the largest margin deviation from 1/2^k, and that
    /// deviation.
    pub fn worst_margin_deviation(&self) -> (usize, f64) {
        let uniform = 1.0 / self.side() as f64;
        let mut worst = (0, 0.0f64);
        for axis in 0..self.n {
            for p in self.axis_marginal(axis) {
                let dev = (p - uniform).abs();
                if dev > worst.1 {
                    worst = (axis, dev);
                }
            }
        }
        worst
    }

    /// Bivariate marginal over axes (i, j) as a side x side row-major table.
    pub fn bivariate_marginal(&self, i: usize, j: usize) -> Vec<f64> {
        let side = self.side();
        let mut out = vec![0.0; side * side];
        for (idx, &mass) in self.cells.iter().enumerate() {
            let c = self.coords(idx);
            out[c[i] * side + c[j]] += mass;
        }
        out
    }

    /// Largest absolute cell difference against another grid of equal shape.
    pub fn max_abs_diff(&self, other: &CopulaGrid) -> f64 {
        self.cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_budget(n: usize, k: usize) -> Result<(), CopulaError> {
    if n == 0 || k == 0 || n * k > GRID_CELL_BUDGET_BITS {
        return Err(CopulaError::BudgetExceeded {
            bits: n * k,
            cap: GRID_CELL_BUDGET_BITS,
        });
    }
    Ok(())
}

/// The discretized canonical copula of a (signed) set partition: every block
/// draws one of 2^k seeds; members take the seed cell, negated members its
/// bitwise complement. Each support cell carries (1/2^k)^blocks.
pub fn canonical_grid(partition: &SetPartition, k: usize) -> Result<CopulaGrid, CopulaError> {
    let n = partition.n();
    check_budget(n, k)?;
    let side = 1usize << k;
    let blocks = partition.block_count();
    let mass = (side as f64).powi(-(blocks as i32));
    let mut cells = vec![0.0; 1 << (n * k)];
    let mut seeds = vec![0usize; blocks];
    let mut coords = vec![0usize; n];
    loop {
        for (v, slot) in coords.iter_mut().enumerate() {
            let (b, negated) = partition.block_of(v);
            *slot = if negated {
                side - 1 - seeds[b]
            } else {
                seeds[b]
            };
        }
        let idx = coords.iter().fold(0, |acc, &c| (acc << k) | c);
        cells[idx] += mass;
        // odometer over block seeds
        let mut b = 0;
        loop {
            if b == blocks {
                return CopulaGrid::new(n, k, cells, EXACT_MARGIN_TOL);
            }
            seeds[b] += 1;
            if seeds[b] < side {
                break;
            }
            seeds[b] = 0;
            b += 1;
        }
    }
}

/// Convex combination of canonical grids under the mixture's weights.
pub fn mixture_grid(spec: &Mb11Spec, k: usize) -> Result<CopulaGrid, CopulaError> {
    let n = spec.n();
    check_budget(n, k)?;
    let mut cells = vec![0.0; 1 << (n * k)];
    for (partition, weight) in spec.nonzero_entries() {
        let w = ratio_to_f64(weight);
        let grid = canonical_grid(partition, k)?;
        for (c, g) in cells.iter_mut().zip(grid.cells()) {
            *c += w * g;
        }
    }
    CopulaGrid::new(n, k, cells, EXACT_MARGIN_TOL)
}
