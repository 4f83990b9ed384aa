//! Pure-state builder for arbitrary discretized copulas: a tree of
//! probability synthesizers, one per conditioning context, each loading the
//! conditional cell-quadrant distribution given the more significant bits.

use super::{var_qubit, variable_layout, BuildError};
use crate::copula::CopulaGrid;
use crate::sim::{Circuit, Gate};
use crate::synth::{conditional_loader, synth2, ProbVector};

/// Number of synthesizer slots of the construction,
/// sum over levels of 2^(l*n) = (2^(k*n) - 1) / (2^n - 1).
pub fn generic_synthesizer_count(n: usize, k: usize) -> usize {
    (0..k).map(|l| 1usize << (l * n)).sum()
}

/// Builds a circuit reproducing an arbitrary bivariate or trivariate copula
/// grid exactly, on n*k qubits with no ancilla.
///
/// Level l emits one synthesizer per joint value of the variables' upper l
/// bits, loading the grid's conditional quadrant (bivariate) or octant
/// (trivariate) probabilities; zero-mass contexts emit nothing. Every
/// emitted synthesizer appears as exactly one top-level gate, so the gate
/// count equals the number of reachable synthesizer slots.
pub fn build_generic(grid: &CopulaGrid, k: usize) -> Result<Circuit, BuildError> {
    let n = grid.n();
    if !(n == 2 || n == 3) {
        return Err(BuildError::GenericDimension(n));
    }
    if k != grid.k() || k == 0 {
        return Err(BuildError::ZeroResolution);
    }
    let mut circuit = Circuit::new(n * k, variable_layout(n, k, 0));
    for level in 0..k {
        let shift = k - level; // low bits not yet fixed at this level
        // context: each variable's upper `level` bits
        for ctx in 0..1usize << (level * n) {
            let prefix: Vec<usize> = (0..n)
                .map(|v| (ctx >> ((n - 1 - v) * level)) & ((1 << level) - 1))
                .collect();
            // masses of the 2^n refinement children of this context
            let mut child = vec![0.0f64; 1 << n];
            for (idx, &mass) in grid.cells().iter().enumerate() {
                let coords = grid.coords(idx);
                if coords.iter().zip(&prefix).all(|(c, p)| c >> shift == *p) {
                    let c = coords
                        .iter()
                        .fold(0usize, |acc, &v| (acc << 1) | ((v >> (shift - 1)) & 1));
                    child[c] += mass;
                }
            }
            let total: f64 = child.iter().sum();
            if total <= 0.0 {
                continue;
            }
            for c in child.iter_mut() {
                *c /= total;
            }
            let target = ProbVector::new(child)?;
            let level_qubits: Vec<usize> = (0..n).map(|v| var_qubit(v, k, level)).collect();
            let body = if n == 2 {
                synth2(&target, [level_qubits[0], level_qubits[1]])?
            } else {
                conditional_loader(&target, &level_qubits)?
            };
            let mut controls = Vec::with_capacity(n * level);
            for (v, &pref) in prefix.iter().enumerate() {
                for m in 0..level {
                    controls.push((var_qubit(v, k, m), (pref >> (level - 1 - m)) & 1 == 1));
                }
            }
            circuit.push(Gate::Block { controls, body });
        }
    }
    Ok(circuit)
}
