//! Multivariate B11 and trivariate Fréchet builders: the mixed-state
//! construction with a marginalized control register, the ancilla-free
//! trivariate pure-state construction, and the four-dimensional tail
//! dependence benchmark.

use super::{canonical_block_gates, var_qubit, variable_layout, BuildError, QUBIT_BUDGET};
use crate::copula::{ratio_to_f64, Mb11Spec, Ratio, SetPartition};
use crate::sim::{Circuit, Gate};
use crate::synth::{conditional_loader, synth2, synth3_5, ProbVector};
use num_traits::Zero;

/// Probability that one qubit layer of each variable shows the bit pattern
/// (3 bits, variable 0 most significant) under the given canonical copula:
/// (1/2)^blocks when every block's members agree after sign flips, else 0.
/// Layers are independent given the partition, so grid cell masses and all
/// conditional layer distributions factor through this.
fn layer_factor(partition: &SetPartition, pattern: usize) -> Ratio {
    let n = partition.n();
    for block in partition.blocks() {
        let seed_bit = (pattern >> (n - 1 - block[0].index)) & 1;
        for member in &block[1..] {
            let bit = (pattern >> (n - 1 - member.index)) & 1;
            let expect = if member.negated {
                1 - seed_bit
            } else {
                seed_bit
            };
            if bit != expect {
                return Ratio::zero();
            }
        }
    }
    Ratio::new(1, 1 << partition.block_count())
}

/// Normalized child mixture weights for one conditioning context of the
/// trivariate pure-state construction. `path` lists the mirror classes
/// (0..3, the XOR of variables 2 and 3 against variable 1) chosen by the
/// previous layers; `None` marks an unreachable context.
pub fn trivariate_context_weights(
    spec: &Mb11Spec,
    path: &[usize],
) -> Option<Vec<(SetPartition, Ratio)>> {
    let mut weights: Vec<(SetPartition, Ratio)> = spec
        .nonzero_entries()
        .map(|(p, w)| (p.clone(), w))
        .collect();
    for &class in path {
        debug_assert!(class < 4);
        for (partition, w) in weights.iter_mut() {
            *w *= layer_factor(partition, class);
        }
    }
    let total: Ratio = weights.iter().map(|(_, w)| *w).sum();
    if total.is_zero() {
        return None;
    }
    for (_, w) in weights.iter_mut() {
        *w /= total;
    }
    Some(weights)
}

/// One layer's class distribution under the given mixture weights: entry c
/// is the probability of the non-mirror pattern |0, c> of the layer's three
/// qubits. The four entries sum to 1/2; the mirror patterns carry the other
/// half by symmetry.
fn class_vector(weights: &[(SetPartition, Ratio)]) -> [Ratio; 4] {
    let mut out = [Ratio::zero(); 4];
    for (partition, w) in weights {
        for (c, slot) in out.iter_mut().enumerate() {
            *slot += *w * layer_factor(partition, c);
        }
    }
    out
}

/// Absolute probabilities of the control-qubit-generator states |000>..|011>
/// for a trivariate mixture (their mirrors carry equal mass).
pub fn cqg_probabilities(spec: &Mb11Spec) -> Result<[Ratio; 4], BuildError> {
    if spec.n() != 3 {
        return Err(BuildError::WrongDimension {
            got: spec.n(),
            expected: 3,
        });
    }
    let weights: Vec<(SetPartition, Ratio)> = spec
        .nonzero_entries()
        .map(|(p, w)| (p.clone(), w))
        .collect();
    Ok(class_vector(&weights))
}

fn build_trivariate_pure(spec: &Mb11Spec, k: usize) -> Result<Circuit, BuildError> {
    if spec.n() != 3 {
        return Err(BuildError::WrongDimension {
            got: spec.n(),
            expected: 3,
        });
    }
    if k == 0 {
        return Err(BuildError::ZeroResolution);
    }
    let mut circuit = Circuit::new(3 * k, variable_layout(3, k, 0));
    let q = |v: usize, level: usize| var_qubit(v, k, level);
    let mut path = vec![0usize; 0];
    for level in 0..k {
        circuit.push(Gate::H {
            target: q(0, level),
        });
        // walk every conditioning context of the previous layers
        path.clear();
        path.resize(level, 0);
        loop {
            if let Some(weights) = trivariate_context_weights(spec, &path) {
                let classes = class_vector(&weights);
                let target = ProbVector::new(
                    classes
                        .iter()
                        .map(|&v| ratio_to_f64(v + v))
                        .collect::<Vec<_>>(),
                )?;
                let fragment = synth2(&target, [q(1, level), q(2, level)])?;
                if !fragment.is_empty() {
                    if level == 0 {
                        circuit.extend(fragment);
                    } else {
                        let controls = (0..level)
                            .flat_map(|m| {
                                [
                                    (q(1, m), (path[m] >> 1) & 1 == 1),
                                    (q(2, m), path[m] & 1 == 1),
                                ]
                            })
                            .collect();
                        circuit.push(Gate::Block {
                            controls,
                            body: fragment,
                        });
                    }
                }
            }
            // odometer over class paths
            let mut pos = 0;
            loop {
                if pos == level {
                    break;
                }
                path[pos] += 1;
                if path[pos] < 4 {
                    break;
                }
                path[pos] = 0;
                pos += 1;
            }
            if pos == level {
                break;
            }
        }
    }
    // convert the difference qubits of variables 2 and 3 into value bits
    for level in 0..k {
        circuit.push(Gate::Cnot {
            control: q(0, level),
            target: q(1, level),
        });
        circuit.push(Gate::Cnot {
            control: q(0, level),
            target: q(2, level),
        });
    }
    Ok(circuit)
}

/// Pure-state trivariate MB11 circuit on exactly 3k qubits, no ancilla.
/// Layer 1 is the control qubit generator; each deeper layer re-scales the
/// mixture weights per conditioning context and emits a mirror-symmetric
/// three-qubit generator shared between mirror-image contexts.
pub fn build_mb11_pure3(spec: &Mb11Spec, k: usize) -> Result<Circuit, BuildError> {
    if spec.is_signed() {
        return Err(BuildError::SignedSpecNeedsFrechet);
    }
    build_trivariate_pure(spec, k)
}

/// Trivariate Fréchet extension: the same layered construction with the six
/// countermonotone set partitions admitted. Mirror symmetry of the layer
/// factors holds for signed blocks as well (complementing all three bits
/// maps consistent seed patterns to consistent ones), so the shared
/// generators remain valid; purely unsigned specs reproduce
/// [`build_mb11_pure3`] exactly.
pub fn build_frechet3_pure(spec: &Mb11Spec, k: usize) -> Result<Circuit, BuildError> {
    build_trivariate_pure(spec, k)
}

/// Mixed-state MB11 circuit for any dimension: n*k copula qubits plus a
/// marginalized control register of ceil(log2(#nonzero-weights)) qubits.
/// The register is loaded with the weight vector (the five-probability
/// synthesizer for the full trivariate family, the conditional loader
/// otherwise); each control state gates one canonical-copula block.
pub fn build_mb11_mixed(spec: &Mb11Spec, k: usize) -> Result<Circuit, BuildError> {
    if k == 0 {
        return Err(BuildError::ZeroResolution);
    }
    let n = spec.n();
    let components: Vec<(&SetPartition, Ratio)> = spec.nonzero_entries().collect();
    let count = components.len();
    let mut ctrl_bits = 0usize;
    while (1usize << ctrl_bits) < count {
        ctrl_bits += 1;
    }
    let total_qubits = n * k + ctrl_bits;
    if total_qubits > QUBIT_BUDGET {
        return Err(BuildError::QubitBudgetExceeded {
            needed: total_qubits,
            cap: QUBIT_BUDGET,
        });
    }
    let mut circuit = Circuit::new(total_qubits, variable_layout(n, k, ctrl_bits));
    let base = n * k;
    let ctrl_qubits: Vec<usize> = (base..base + ctrl_bits).collect();
    let weights_f64: Vec<f64> = components.iter().map(|(_, w)| ratio_to_f64(*w)).collect();
    if ctrl_bits > 0 {
        if n == 3 && count == 5 {
            let target = ProbVector::new(weights_f64.clone())?;
            circuit.extend(synth3_5(&target, [base, base + 1, base + 2])?);
        } else {
            let mut padded = weights_f64.clone();
            padded.resize(1 << ctrl_bits, 0.0);
            circuit.extend(conditional_loader(&ProbVector::new(padded)?, &ctrl_qubits)?);
        }
    }
    for (i, (partition, _)) in components.iter().enumerate() {
        let body = canonical_block_gates(partition, k);
        if ctrl_bits == 0 {
            circuit.extend(body);
        } else {
            let controls = (0..ctrl_bits)
                .map(|j| (ctrl_qubits[j], (i >> (ctrl_bits - 1 - j)) & 1 == 1))
                .collect();
            circuit.push(Gate::Block { controls, body });
        }
    }
    Ok(circuit)
}

/// The mixture realizing the four-dimensional benchmark structure: weight
/// 1/3 on each of the partitions pairing variable 4 with one of the others.
pub fn benchmark4_spec() -> Mb11Spec {
    let third = Ratio::new(1, 3);
    Mb11Spec::new(
        4,
        vec![
            (SetPartition::pair(4, 0, 3).unwrap(), third),
            (SetPartition::pair(4, 1, 3).unwrap(), third),
            (SetPartition::pair(4, 2, 3).unwrap(), third),
        ],
    )
    .expect("benchmark weights sum to one")
}

/// Benchmark circuit: two control qubits carrying the distribution
/// (1/3, 1/3, 1/3, 0) select among the three pair copulas at resolution k.
pub fn build_benchmark4(k: usize) -> Result<Circuit, BuildError> {
    if k == 0 {
        return Err(BuildError::ZeroResolution);
    }
    let base = 4 * k;
    let total = base + 2;
    if total > QUBIT_BUDGET {
        return Err(BuildError::QubitBudgetExceeded {
            needed: total,
            cap: QUBIT_BUDGET,
        });
    }
    let mut circuit = Circuit::new(total, variable_layout(4, k, 2));
    let third = 1.0 / 3.0;
    circuit.extend(synth2(
        &ProbVector::new(vec![third, third, third, 0.0])?,
        [base, base + 1],
    )?);
    for (state, partner) in [(0usize, 0usize), (1, 1), (2, 2)] {
        let partition = SetPartition::pair(4, partner, 3)?;
        circuit.push(Gate::Block {
            controls: vec![
                (base, (state >> 1) & 1 == 1),
                (base + 1, state & 1 == 1),
            ],
            body: canonical_block_gates(&partition, k),
        });
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::{mb11_weights_from_taildep, mixture_grid};

    fn r(num: i64, den: i64) -> Ratio {
        Ratio::new(num, den)
    }

    fn worked_spec() -> Mb11Spec {
        mb11_weights_from_taildep(r(1, 2), r(1, 4), r(1, 8), r(1, 16)).unwrap()
    }

    fn circuit_probs(circuit: &Circuit) -> Vec<f64> {
        let state = circuit.run().unwrap();
        circuit
            .variable_distribution(&state)
            .unwrap()
            .probs()
            .to_vec()
    }

    fn assert_matches_grid(circuit: &Circuit, spec: &Mb11Spec, k: usize, tol: f64) {
        let grid = mixture_grid(spec, k).unwrap();
        let probs = circuit_probs(circuit);
        assert_eq!(probs.len(), grid.cells().len());
        let mut worst = 0.0f64;
        for (p, g) in probs.iter().zip(grid.cells()) {
            worst = worst.max((p - g).abs());
        }
        assert!(worst <= tol, "max cell error {worst}");
    }

    #[test]
    fn cqg_probabilities_for_worked_example() {
        let probs = cqg_probabilities(&worked_spec()).unwrap();
        assert_eq!(probs, [r(15, 64), r(9, 64), r(5, 64), r(3, 64)]);
    }

    #[test]
    fn second_layer_context_weights_match_rescaling() {
        let spec = worked_spec();
        let lookup = |weights: &[(SetPartition, Ratio)], name: &str| {
            weights
                .iter()
                .find(|(p, _)| p.to_string() == name)
                .map(|(_, w)| *w)
                .unwrap_or_default()
        };
        let cases: [(usize, [Ratio; 5]); 4] = [
            (0, [r(2, 15), r(7, 15), r(1, 5), r(1, 15), r(2, 15)]),
            (1, [r(0, 1), r(7, 9), r(0, 1), r(0, 1), r(2, 9)]),
            (2, [r(0, 1), r(0, 1), r(3, 5), r(0, 1), r(2, 5)]),
            (3, [r(0, 1), r(0, 1), r(0, 1), r(1, 3), r(2, 3)]),
        ];
        for (class, expected) in cases {
            let weights = trivariate_context_weights(&spec, &[class]).unwrap();
            let names = ["1,2,3", "1,2|3", "1,3|2", "1|2,3", "1|2|3"];
            for (name, want) in names.iter().zip(expected) {
                assert_eq!(lookup(&weights, name), want, "class {class}, {name}");
            }
        }
    }

    #[test]
    fn pure3_matches_oracle() {
        let spec = worked_spec();
        for k in [1usize, 2] {
            let circuit = build_mb11_pure3(&spec, k).unwrap();
            assert_eq!(circuit.num_qubits, 3 * k);
            assert_matches_grid(&circuit, &spec, k, 1e-12);
        }
    }

    #[test]
    fn pure3_independence_is_uniform() {
        let spec = Mb11Spec::new(3, vec![(SetPartition::independence(3), r(1, 1))]).unwrap();
        let circuit = build_mb11_pure3(&spec, 2).unwrap();
        for p in circuit_probs(&circuit) {
            assert!((p - 1.0 / 64.0).abs() < 1e-13);
        }
    }

    #[test]
    fn pure3_rejects_signed_specs() {
        let spec = Mb11Spec::new(3, vec![("1,-2,3".parse().unwrap(), r(1, 1))]).unwrap();
        assert_eq!(
            build_mb11_pure3(&spec, 1),
            Err(BuildError::SignedSpecNeedsFrechet)
        );
    }

    #[test]
    fn frechet_reduces_to_pure3_on_unsigned_specs() {
        let spec = worked_spec();
        let a = build_mb11_pure3(&spec, 2).unwrap();
        let b = build_frechet3_pure(&spec, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn frechet_signed_specs_match_signed_grids() {
        let specs = [
            Mb11Spec::new(3, vec![("1,-2|3".parse().unwrap(), r(1, 1))]).unwrap(),
            Mb11Spec::new(
                3,
                vec![
                    ("1,2,-3".parse().unwrap(), r(1, 2)),
                    ("1|2|3".parse().unwrap(), r(1, 2)),
                ],
            )
            .unwrap(),
            Mb11Spec::new(
                3,
                vec![
                    ("1,-2,-3".parse().unwrap(), r(1, 4)),
                    ("1,-3|2".parse().unwrap(), r(1, 4)),
                    ("1|2,3".parse().unwrap(), r(1, 2)),
                ],
            )
            .unwrap(),
        ];
        for spec in &specs {
            for k in [1usize, 2] {
                let circuit = build_frechet3_pure(spec, k).unwrap();
                assert_matches_grid(&circuit, spec, k, 1e-12);
            }
        }
    }

    #[test]
    fn frechet_pure_countermonotone_support() {
        let spec = Mb11Spec::new(3, vec![("1,-2|3".parse().unwrap(), r(1, 1))]).unwrap();
        let circuit = build_frechet3_pure(&spec, 2).unwrap();
        let probs = circuit_probs(&circuit);
        for (idx, &p) in probs.iter().enumerate() {
            let (c1, c2, c3) = (idx >> 4, (idx >> 2) & 3, idx & 3);
            let _ = c3;
            if p > 1e-13 {
                assert_eq!(c2, 3 - c1, "support violation at {idx}");
            }
        }
    }

    #[test]
    fn mixed_two_component_uses_one_control() {
        let spec = Mb11Spec::new(
            3,
            vec![
                ("1,2,3".parse().unwrap(), r(1, 2)),
                ("1,2|3".parse().unwrap(), r(1, 2)),
            ],
        )
        .unwrap();
        let circuit = build_mb11_mixed(&spec, 3).unwrap();
        assert_eq!(circuit.num_qubits, 10);
        assert_matches_grid(&circuit, &spec, 3, 1e-12);
    }

    #[test]
    fn mixed_full_trivariate_family_table_probabilities() {
        let spec = worked_spec();
        let circuit = build_mb11_mixed(&spec, 1).unwrap();
        assert_eq!(circuit.num_qubits, 6); // 3 copula + 3 controls
        let probs = circuit_probs(&circuit);
        // alpha112/4 + alpha123/8 = 9/64 on |001>
        assert!((probs[0b001] - 9.0 / 64.0).abs() < 1e-13);
        assert_matches_grid(&circuit, &spec, 1, 1e-13);
    }

    #[test]
    fn mixed_independence_only_needs_no_control() {
        let spec = Mb11Spec::new(3, vec![(SetPartition::independence(3), r(1, 1))]).unwrap();
        let circuit = build_mb11_mixed(&spec, 2).unwrap();
        assert_eq!(circuit.num_qubits, 6);
        for p in circuit_probs(&circuit) {
            assert!((p - 1.0 / 64.0).abs() < 1e-14);
        }
    }

    #[test]
    fn benchmark_control_distribution_and_grid() {
        let circuit = build_benchmark4(1).unwrap();
        let state = circuit.run().unwrap();
        let controls = state
            .distribution(&circuit.layout.controls)
            .unwrap();
        assert!((controls.prob(0) - 1.0 / 3.0).abs() < 1e-13);
        assert!((controls.prob(1) - 1.0 / 3.0).abs() < 1e-13);
        assert!((controls.prob(2) - 1.0 / 3.0).abs() < 1e-13);
        assert!(controls.prob(3).abs() < 1e-15);

        assert_matches_grid(&circuit, &benchmark4_spec(), 1, 1e-13);
    }
}
