//! The "fabric" copula circuit: level-wise noisy copies of the first
//! variable's qubits. Margins stay exactly uniform for every parameter
//! choice, which is what makes the structure a copula.

use super::{var_qubit, variable_layout, BuildError};
use crate::copula::FabricParams;
use crate::sim::{Circuit, Gate};
use crate::synth::bernoulli_angle;

/// Builds the n-variate fabric circuit at resolution k from an
/// (n-1) x k parameter matrix.
///
/// Variable 1's qubits get Hadamards; each dependent variable's level-l
/// qubit is prepared as a Bernoulli difference bit with
/// P(agree) = p\[group\]\[level\] and XORed onto a copy of variable 1's level-l
/// qubit. The difference bit is uniform after the XOR regardless of p, so
/// every margin is uniform.
pub fn build_fabric(params: &FabricParams, n: usize, k: usize) -> Result<Circuit, BuildError> {
    if n != params.n() || k != params.levels() {
        return Err(BuildError::FabricShape);
    }
    if k == 0 {
        return Err(BuildError::ZeroResolution);
    }
    let mut circuit = Circuit::new(n * k, variable_layout(n, k, 0));
    for level in 0..k {
        circuit.push(Gate::H {
            target: var_qubit(0, k, level),
        });
    }
    for group in 0..n - 1 {
        for level in 0..k {
            let target = var_qubit(group + 1, k, level);
            // P(differ) = 1 - p, so cos^2(angle / 2) = p
            let angle = bernoulli_angle(1.0 - params.get(group, level))?;
            if angle != 0.0 {
                circuit.push(Gate::Ry { target, angle });
            }
            circuit.push(Gate::Cnot {
                control: var_qubit(0, k, level),
                target,
            });
        }
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn margins_are_uniform(circuit: &Circuit, tol: f64) {
        let state = circuit.run().unwrap();
        for var in &circuit.layout.variables {
            let marginal = state.distribution(var).unwrap();
            let expect = 1.0 / marginal.len() as f64;
            for p in marginal.probs() {
                assert!((p - expect).abs() <= tol, "marginal {p} vs {expect}");
            }
        }
    }

    #[test]
    fn all_half_parameters() {
        let params = FabricParams::new(vec![vec![0.5; 2]]).unwrap();
        let circuit = build_fabric(&params, 2, 2).unwrap();
        margins_are_uniform(&circuit, 1e-14);
    }

    #[test]
    fn perfect_copy_is_comonotone_bits() {
        let params = FabricParams::new(vec![vec![1.0; 2]]).unwrap();
        let circuit = build_fabric(&params, 2, 2).unwrap();
        let state = circuit.run().unwrap();
        let dist = circuit.variable_distribution(&state).unwrap();
        for c1 in 0..4usize {
            for c2 in 0..4usize {
                let expect = if c1 == c2 { 0.25 } else { 0.0 };
                assert!((dist.prob((c1 << 2) | c2) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn margins_uniform_for_random_parameters() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let n = rng.random_range(2..=3usize);
            let k = rng.random_range(1..=4usize);
            let p: Vec<Vec<f64>> = (0..n - 1)
                .map(|_| (0..k).map(|_| rng.random::<f64>()).collect())
                .collect();
            let params = FabricParams::new(p).unwrap();
            let circuit = build_fabric(&params, n, k).unwrap();
            margins_are_uniform(&circuit, 1e-12);
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let params = FabricParams::new(vec![vec![0.5; 2]]).unwrap();
        assert_eq!(build_fabric(&params, 3, 2), Err(BuildError::FabricShape));
        assert_eq!(build_fabric(&params, 2, 3), Err(BuildError::FabricShape));
    }
}
