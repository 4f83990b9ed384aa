//! Circuit builders for every supported copula family. Each builder's
//! contract is exact distributional equality with the corresponding classical
//! grid oracle from [`crate::copula`]; the verification suites live in the
//! crate's integration tests.
//!
//! Qubit allocation is uniform across builders: variable `v` of resolution
//! `k` occupies qubits `v*k .. v*k+k`, most significant first, and any
//! control/ancilla qubits follow after the `n*k` copula qubits.

mod b11;
mod fabric;
mod fundamental;
mod generic;
mod mb11;

use crate::copula::CopulaError;
use crate::sim::SimError;
use crate::synth::SynthError;
use thiserror::Error;

/// Mixed-state builders refuse registers beyond this size.
pub const QUBIT_BUDGET: usize = 22;

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("alpha = {0} outside the supported range")]
    AlphaOutOfRange(f64),
    #[error("negative alpha with k >= 2 is not supported by the pure-state builder; \
             discretize the target copula and use the generic builder")]
    NegativeAlphaNeedsGeneric,
    #[error("builder requires dimension {expected}, got {got}")]
    WrongDimension { got: usize, expected: usize },
    #[error("circuit needs {needed} qubits, exceeding the {cap}-qubit budget")]
    QubitBudgetExceeded { needed: usize, cap: usize },
    #[error("signed partitions require the trivariate Fréchet builder")]
    SignedSpecNeedsFrechet,
    #[error("resolution k must be at least 1")]
    ZeroResolution,
    #[error("fabric parameters must have shape (n-1) x k")]
    FabricShape,
    #[error("generic builder supports n = 2 or 3, got {0}")]
    GenericDimension(usize),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

pub use b11::{
    b11_level_alpha, b11_rotation_angle, build_b11_mixed, build_b11_pure, build_mn_pin,
    mn_pin_reference_angle,
};
pub use fabric::build_fabric;
pub use fundamental::{build_fundamental, FundamentalKind};
pub use generic::{build_generic, generic_synthesizer_count};
pub use mb11::{
    benchmark4_spec, build_benchmark4, build_frechet3_pure, build_mb11_mixed, build_mb11_pure3,
    cqg_probabilities, trivariate_context_weights,
};

use crate::sim::{Gate, Layout};

/// Qubit index of variable `v`'s level-`level` qubit (level 0 is the most
/// significant).
pub(crate) fn var_qubit(v: usize, k: usize, level: usize) -> usize {
    v * k + level
}

/// Standard layout: `n` variables of `k` qubits each, followed by
/// `num_controls` control qubits.
pub(crate) fn variable_layout(n: usize, k: usize, num_controls: usize) -> Layout {
    Layout {
        variables: (0..n)
            .map(|v| (0..k).map(|l| var_qubit(v, k, l)).collect())
            .collect(),
        controls: (n * k..n * k + num_controls).collect(),
    }
}

/// Gates realizing one canonical copula: per partition block, Hadamards on
/// the seed variable's qubits, CNOT fan-out to the other members, and X after
/// the copy for negated members.
pub(crate) fn canonical_block_gates(
    partition: &crate::copula::SetPartition,
    k: usize,
) -> Vec<Gate> {
    let mut gates = Vec::new();
    for block in partition.blocks() {
        let seed = block[0].index;
        for level in 0..k {
            gates.push(Gate::H {
                target: var_qubit(seed, k, level),
            });
        }
        for member in &block[1..] {
            for level in 0..k {
                let target = var_qubit(member.index, k, level);
                gates.push(Gate::Cnot {
                    control: var_qubit(seed, k, level),
                    target,
                });
                if member.negated {
                    gates.push(Gate::X { target });
                }
            }
        }
    }
    gates
}
