//! Quantum-circuit synthesis and simulation toolkit for copula sampling and
//! risk analysis.
//!
//! The crate builds circuits that sample from discretized copulas (the
//! comonotone/countermonotone/independence fundamentals, B11 and its
//! multivariate extension over set partitions, the trivariate Fréchet
//! extension, arbitrary discretized bivariate copulas, and the "fabric"
//! family), simulates them on a dense statevector backend, and verifies every
//! circuit against an exact classical grid oracle. On top of the samplers sits
//! a risk pipeline: comparator oracles, canonical amplitude estimation,
//! bisection Value-at-Risk, and conditional quantile exceedance estimation.

pub mod circuits;
pub mod copula;
pub mod riskq;
pub mod sim;
pub mod synth;

pub use sim::{Circuit, DiscreteDistribution, Gate, Layout, Statevector};
