//! The three fundamental copulas: comonotonicity, independence, and
//! countermonotonicity.

use super::{var_qubit, variable_layout, BuildError};
use crate::sim::{Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FundamentalKind {
    /// Comonotonicity M2: the second variable is a qubit-wise copy of the
    /// first.
    M2,
    /// Independence Pi_n: Hadamards everywhere.
    Pi,
    /// Countermonotonicity W2: copy then X on every copied qubit.
    W2,
}

/// Builds a fundamental copula circuit at resolution `k`; `n` is only
/// meaningful for the independence family (M2/W2 are bivariate).
pub fn build_fundamental(kind: FundamentalKind, k: usize, n: usize) -> Result<Circuit, BuildError> {
    if k == 0 {
        return Err(BuildError::ZeroResolution);
    }
    match kind {
        FundamentalKind::Pi => {
            if n == 0 {
                return Err(BuildError::WrongDimension {
                    got: n,
                    expected: 1,
                });
            }
            let mut circuit = Circuit::new(n * k, variable_layout(n, k, 0));
            for q in 0..n * k {
                circuit.push(Gate::H { target: q });
            }
            Ok(circuit)
        }
        FundamentalKind::M2 | FundamentalKind::W2 => {
            if n != 2 {
                return Err(BuildError::WrongDimension { got: n, expected: 2 });
            }
            let mut circuit = Circuit::new(2 * k, variable_layout(2, k, 0));
            for level in 0..k {
                circuit.push(Gate::H {
                    target: var_qubit(0, k, level),
                });
            }
            for level in 0..k {
                let target = var_qubit(1, k, level);
                circuit.push(Gate::Cnot {
                    control: var_qubit(0, k, level),
                    target,
                });
                if kind == FundamentalKind::W2 {
                    circuit.push(Gate::X { target });
                }
            }
            Ok(circuit)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::{canonical_grid, SetPartition};

    fn circuit_probs(circuit: &Circuit) -> Vec<f64> {
        let state = circuit.run().unwrap();
        circuit
            .variable_distribution(&state)
            .unwrap()
            .probs()
            .to_vec()
    }

    #[test]
    fn m2_matches_comonotone_grid() {
        for k in [1usize, 2, 3] {
            let circuit = build_fundamental(FundamentalKind::M2, k, 2).unwrap();
            let grid = canonical_grid(&SetPartition::comonotone(2), k).unwrap();
            let probs = circuit_probs(&circuit);
            for (p, g) in probs.iter().zip(grid.cells()) {
                assert!((p - g).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pi_is_uniform() {
        let circuit = build_fundamental(FundamentalKind::Pi, 1, 2).unwrap();
        let probs = circuit_probs(&circuit);
        assert_eq!(probs.len(), 4);
        for p in probs {
            assert!((p - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn w2_is_bitwise_complement() {
        let circuit = build_fundamental(FundamentalKind::W2, 2, 2).unwrap();
        let probs = circuit_probs(&circuit);
        for c1 in 0..4usize {
            for c2 in 0..4usize {
                let expect = if c2 == 3 - c1 { 0.25 } else { 0.0 };
                assert!((probs[(c1 << 2) | c2] - expect).abs() < 1e-14);
            }
        }
        let grid = canonical_grid(&SetPartition::countermonotone2(), 2).unwrap();
        for (p, g) in circuit_probs(&circuit).iter().zip(grid.cells()) {
            assert!((p - g).abs() < 1e-14);
        }
    }

    #[test]
    fn dimension_checks() {
        assert!(build_fundamental(FundamentalKind::M2, 1, 3).is_err());
        assert!(build_fundamental(FundamentalKind::Pi, 0, 2).is_err());
    }
}
