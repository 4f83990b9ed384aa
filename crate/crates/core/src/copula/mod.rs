//! Classical copula mathematics and the exact oracles: set partitions and
//! Bell numbers, canonical-copula grids, mixture calibration against tail
//! dependence structures, inclusion-exclusion discretization of analytic
//! copulas, and grid statistics (cqep, Spearman correlation).

pub mod archimedean;
pub mod fabric;
pub mod grid;
pub mod partition;
pub mod stats;
pub mod taildep;

use thiserror::Error;

/// Exact rational scalar used for mixture weights and tail coefficients.
pub type Ratio = num_rational::Rational64;

/// Converts a rational weight to a float at the circuit boundary.
pub fn ratio_to_f64(r: Ratio) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Error, PartialEq)]
pub enum CopulaError {
    #[error("dimension {n} outside the supported range (max {max})")]
    DimensionOutOfRange { n: usize, max: usize },
    #[error("grid of 2^{bits} cells exceeds the 2^{cap}-cell budget")]
    BudgetExceeded { bits: usize, cap: usize },
    #[error("invalid set partition: {0}")]
    BadPartition(String),
    #[error("invalid mixture weights: {0}")]
    BadWeights(String),
    #[error("infeasible tail dependence structure: {0}")]
    Infeasible(String),
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("margin of axis {axis} deviates from uniform by {max_dev:e}")]
    MarginViolation { axis: usize, max_dev: f64 },
    #[error("invalid cdf: {0}")]
    BadCdf(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

pub use archimedean::{
    comonotone_cdf, countermonotone_cdf, discretize_cdf, independence_cdf, ArchimedeanFamily,
    ArchimedeanParams,
};
pub use fabric::{fabric_reference, FabricParams, FabricReference};
pub use grid::{canonical_grid, mixture_grid, CopulaGrid};
pub use partition::{bell_number, set_partitions, Member, SetPartition};
pub use stats::{cqep_b11, grid_cqep, grid_cqep3, grid_spearman};
pub use taildep::{
    mb11_from_bivariate_structure, mb11_weights_from_taildep, taildep_from_weights, Mb11Spec,
    TailDependenceStructure,
};
