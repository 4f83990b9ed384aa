//! Dense statevector simulation: gate application, circuit execution,
//! measurement distributions with marginalization, seeded sampling, and
//! full-unitary extraction.
//!
//! Conventions used throughout the crate:
//! - basis-state index bit `i` corresponds to register qubit `i`
//!   (`(index >> qubit) & 1`),
//! - a copula variable is a list of qubits, most-significant first, so a
//!   variable's cell value is the binary fraction numerator `0.q1 q2 .. qk`
//!   read as an integer.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Largest register for which a dense unitary is materialized
/// (2^12 x 2^12 complex entries, ~268 MB).
pub const UNITARY_QUBIT_CAP: usize = 12;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("qubit index {qubit} out of range for {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("gate uses qubit {qubit} more than once")]
    OverlappingQubits { qubit: usize },
    #[error("rotation angle is not finite")]
    NonFiniteAngle,
    #[error("amplitude vector of length {len} is not a power of two")]
    BadAmplitudeLength { len: usize },
    #[error("statevector norm deviates from 1 by {deviation:e}")]
    NotNormalized { deviation: f64 },
    #[error("marginal distribution requires a nonempty qubit subset")]
    EmptyKeep,
    #[error("register of {num_qubits} qubits exceeds the {cap}-qubit unitary materialization cap")]
    RegisterTooLarge { num_qubits: usize, cap: usize },
    #[error("layout is inconsistent: {0}")]
    BadLayout(String),
}

/// A single gate. `Block` applies its body only on basis states where every
/// listed control qubit carries the required bit; the simulator realizes it
/// natively, without decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X { target: usize },
    H { target: usize },
    Ry { target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    Swap { a: usize, b: usize },
    Block { controls: Vec<(usize, bool)>, body: Vec<Gate> },
}

impl Gate {
    /// Qubits the gate touches (controls and targets, recursively).
    pub fn qubits(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_qubits(&mut out);
        out
    }

    fn collect_qubits(&self, out: &mut Vec<usize>) {
        match self {
            Gate::X { target } | Gate::H { target } | Gate::Ry { target, .. } => {
                out.push(*target);
            }
            Gate::Cnot { control, target } => out.extend([*control, *target]),
            Gate::Swap { a, b } => out.extend([*a, *b]),
            Gate::Block { controls, body } => {
                out.extend(controls.iter().map(|(q, _)| *q));
                for g in body {
                    g.collect_qubits(out);
                }
            }
        }
    }

    /// The inverse gate. All supported gates are real, so only Ry needs an
    /// angle flip; blocks invert their body in reverse order.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Ry { target, angle } => Gate::Ry {
                target: *target,
                angle: -angle,
            },
            Gate::Block { controls, body } => Gate::Block {
                controls: controls.clone(),
                body: body.iter().rev().map(Gate::inverse).collect(),
            },
            other => other.clone(),
        }
    }

    fn validate(&self, num_qubits: usize, blocked: &mut Vec<usize>) -> Result<(), SimError> {
        let check = |q: usize| {
            if q >= num_qubits {
                Err(SimError::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                })
            } else {
                Ok(())
            }
        };
        match self {
            Gate::X { target } | Gate::H { target } => check(*target),
            Gate::Ry { target, angle } => {
                check(*target)?;
                if !angle.is_finite() {
                    return Err(SimError::NonFiniteAngle);
                }
                Ok(())
            }
            Gate::Cnot { control, target } => {
                check(*control)?;
                check(*target)?;
                if control == target {
                    return Err(SimError::OverlappingQubits { qubit: *control });
                }
                Ok(())
            }
            Gate::Swap { a, b } => {
                check(*a)?;
                check(*b)?;
                if a == b {
                    return Err(SimError::OverlappingQubits { qubit: *a });
                }
                Ok(())
            }
            Gate::Block { controls, body } => {
                for (q, _) in controls {
                    check(*q)?;
                    if blocked.contains(q) {
                        return Err(SimError::OverlappingQubits { qubit: *q });
                    }
                    blocked.push(*q);
                }
                for g in body {
                    for q in g.qubits() {
                        if blocked.contains(&q) {
                            return Err(SimError::OverlappingQubits { qubit: q });
                        }
                    }
                    g.validate(num_qubits, blocked)?;
                }
                for _ in controls {
                    blocked.pop();
                }
                Ok(())
            }
        }
    }
}

/// Declares which qubits form each copula variable (most-significant first)
/// and which are control/ancilla qubits that get marginalized away.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layout {
    pub variables: Vec<Vec<usize>>,
    pub controls: Vec<usize>,
}

impl Layout {
    /// All variable qubits in output order: variable 0 first, each
    /// most-significant first. This is the `keep` set whose marginal
    /// distribution indexes copula grid cells directly.
    pub fn variable_qubits(&self) -> Vec<usize> {
        self.variables.iter().flatten().copied().collect()
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Qubits per variable; zero for an empty layout.
    pub fn resolution(&self) -> usize {
        self.variables.first().map_or(0, Vec::len)
    }

    fn validate(&self, num_qubits: usize) -> Result<(), SimError> {
        // an entirely empty layout marks an ad-hoc circuit with no declared roles
        if self.variables.is_empty() && self.controls.is_empty() {
            return Ok(());
        }
        let mut seen = vec![false; num_qubits];
        let mut mark = |q: usize| -> Result<(), SimError> {
            if q >= num_qubits {
                return Err(SimError::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            if seen[q] {
                return Err(SimError::BadLayout(format!("qubit {q} has two roles")));
            }
            seen[q] = true;
            Ok(())
        };
        for var in &self.variables {
            if var.len() != self.resolution() {
                return Err(SimError::BadLayout(
                    "variable qubit lists have unequal lengths".into(),
                ));
            }
            for &q in var {
                mark(q)?;
            }
        }
        for &q in &self.controls {
            mark(q)?;
        }
        if let Some(q) = seen.iter().position(|s| !s) {
            return Err(SimError::BadLayout(format!("qubit {q} has no role")));
        }
        Ok(())
    }
}

/// An ordered gate list over a fixed-size register with a variable layout.
/// Immutable once built; freely shareable across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    pub layout: Layout,
}

impl Circuit {
    pub fn new(num_qubits: usize, layout: Layout) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
            layout,
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) {
        self.gates.extend(gates);
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.layout.validate(self.num_qubits)?;
        let mut blocked = Vec::new();
        for g in &self.gates {
            g.validate(self.num_qubits, &mut blocked)?;
        }
        Ok(())
    }

    /// Gate list of the inverse circuit (layout preserved).
    pub fn inverse_gates(&self) -> Vec<Gate> {
        self.gates.iter().rev().map(Gate::inverse).collect()
    }

    /// Run from |0..0> and return the final state.
    pub fn run(&self) -> Result<Statevector, SimError> {
        self.validate()?;
        let mut state = Statevector::zero(self.num_qubits);
        for g in &self.gates {
            state.apply(g)?;
        }
        Ok(state)
    }

    /// Marginal distribution over the layout's variable qubits, with
    /// control/ancilla qubits traced out. The outcome index is the
    /// concatenation of the variables' cell values, variable 0 most
    /// significant.
    pub fn variable_distribution(&self, state: &Statevector) -> Result<DiscreteDistribution, SimError> {
        state.distribution(&self.layout.variable_qubits())
    }

    /// The full circuit unitary, column j being the result of running the
    /// circuit on basis state |j>. Capped at [`UNITARY_QUBIT_CAP`] qubits.
    pub fn unitary(&self) -> Result<UnitaryMatrix, SimError> {
        if self.num_qubits > UNITARY_QUBIT_CAP {
            return Err(SimError::RegisterTooLarge {
                num_qubits: self.num_qubits,
                cap: UNITARY_QUBIT_CAP,
            });
        }
        self.validate()?;
        let dim = 1usize << self.num_qubits;
        let mut columns = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut state = Statevector::basis(self.num_qubits, j);
            for g in &self.gates {
                state.apply(g)?;
            }
            columns.push(state.into_amplitudes());
        }
        Ok(UnitaryMatrix { dim, columns })
    }
}

/// Length-2^n unit-norm complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// |0..0> on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    /// The computational basis state with the given index.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << num_qubits];
        amps[index] = Complex64::ONE;
        Statevector { num_qubits, amps }
    }

    /// Wrap an explicit amplitude vector, checking length and norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimError::BadAmplitudeLength { len });
        }
        let state = Statevector {
            num_qubits: len.trailing_zeros() as usize,
            amps,
        };
        let deviation = (state.norm_sqr() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(SimError::NotNormalized { deviation });
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probability(&self, basis_state: usize) -> f64 {
        self.amps[basis_state].norm_sqr()
    }

    /// Apply a gate in place. Norm is preserved by construction.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        gate.validate(self.num_qubits, &mut Vec::new())?;
        self.apply_unchecked(gate, &[]);
        Ok(())
    }

    fn controls_match(index: usize, controls: &[(usize, bool)]) -> bool {
        controls
            .iter()
            .all(|&(q, bit)| ((index >> q) & 1 == 1) == bit)
    }

    fn apply_unchecked(&mut self, gate: &Gate, controls: &[(usize, bool)]) {
        match gate {
            Gate::X { target } => self.apply_1q(*target, controls, |a, b| (b, a)),
            Gate::H { target } => {
                let f = std::f64::consts::FRAC_1_SQRT_2;
                self.apply_1q(*target, controls, |a, b| (f * (a + b), f * (a - b)));
            }
            Gate::Ry { target, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                self.apply_1q(*target, controls, |a, b| (c * a - s * b, s * a + c * b));
            }
            Gate::Cnot { control, target } => {
                let mut all = controls.to_vec();
                all.push((*control, true));
                self.apply_1q(*target, &all, |a, b| (b, a));
            }
            Gate::Swap { a, b } => {
                let (lo, hi) = (1usize << *a, 1usize << *b);
                for i in 0..self.amps.len() {
                    // visit each swapped pair once, from its (a=1, b=0) member
                    if i & lo != 0 && i & hi == 0 && Self::controls_match(i, controls) {
                        self.amps.swap(i, i ^ lo ^ hi);
                    }
                }
            }
            Gate::Block {
                controls: block_controls,
                body,
            } => {
                let mut all = controls.to_vec();
                all.extend_from_slice(block_controls);
                for g in body {
                    self.apply_unchecked(g, &all);
                }
            }
        }
    }

    fn apply_1q(
        &mut self,
        target: usize,
        controls: &[(usize, bool)],
        map: impl Fn(Complex64, Complex64) -> (Complex64, Complex64),
    ) {
        let step = 1usize << target;
        for i in 0..self.amps.len() {
            if i & step == 0 && Self::controls_match(i, controls) {
                let j = i | step;
                let (a, b) = (self.amps[i], self.amps[j]);
                let (na, nb) = map(a, b);
                self.amps[i] = na;
                self.amps[j] = nb;
            }
        }
    }

    /// Marginal measurement distribution over `keep` qubits, tracing out the
    /// rest. `keep[0]` is the most significant bit of the outcome index.
    pub fn distribution(&self, keep: &[usize]) -> Result<DiscreteDistribution, SimError> {
        if keep.is_empty() {
            return Err(SimError::EmptyKeep);
        }
        let mut seen = Vec::new();
        for &q in keep {
            if q >= self.num_qubits {
                return Err(SimError::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
            if seen.contains(&q) {
                return Err(SimError::OverlappingQubits { qubit: q });
            }
            seen.push(q);
        }
        let mut probs = vec![0.0; 1 << keep.len()];
        let top = keep.len() - 1;
        for (i, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut outcome = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                outcome |= ((i >> q) & 1) << (top - pos);
            }
            probs[outcome] += p;
        }
        Ok(DiscreteDistribution { probs })
    }

    /// Draw `shots` measurement outcomes over the full register.
    ///
    /// Sampling uses the ChaCha8 stream cipher generator seeded via
    /// `ChaCha8Rng::seed_from_u64(seed)`, so counts are reproducible across
    /// platforms and runs.
    pub fn sample(&self, shots: u64, seed: u64) -> BTreeMap<usize, u64> {
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for amp in &self.amps {
            acc += amp.norm_sqr();
            cumulative.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let x: f64 = rng.random::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c <= x);
            *counts.entry(idx.min(self.amps.len() - 1)).or_insert(0) += 1;
        }
        counts
    }
}

/// Probabilities over basis-state outcomes; nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn from_probs(probs: Vec<f64>) -> Self {
        DiscreteDistribution { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, outcome: usize) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Largest absolute difference against another distribution of the same
    /// length.
    pub fn max_abs_diff(&self, other: &DiscreteDistribution) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Dense unitary, stored by columns; `columns[j]` is the circuit applied to
/// basis state |j>.
#[derive(Debug, Clone)]
pub struct UnitaryMatrix {
    dim: usize,
    columns: Vec<Vec<Complex64>>,
}

impl UnitaryMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.columns[col][row]
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.columns[col]
    }

    /// Largest deviation of U†U from the identity, checked entrywise over
    /// `max_pairs` column pairs (all pairs when the bound is large enough).
    pub fn unitarity_deviation(&self, max_pairs: usize) -> f64 {
        let mut worst = 0.0f64;
        let mut pairs = 0usize;
        for i in 0..self.dim {
            for j in i..self.dim {
                if pairs >= max_pairs {
                    return worst;
                }
                let dot: Complex64 = self.columns[i]
                    .iter()
                    .zip(&self.columns[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - expect).norm());
                pairs += 1;
            }
        }
        worst
    }

    /// True when every entry has imaginary part below `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.columns
            .iter()
            .all(|col| col.iter().all(|z| z.im.abs() <= tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn hadamard_on_zero() {
        let mut state = Statevector::zero(1);
        state.apply(&Gate::H { target: 0 }).unwrap();
        assert_close(state.amplitudes()[0].re, FRAC_1_SQRT_2, 1e-15);
        assert_close(state.amplitudes()[1].re, FRAC_1_SQRT_2, 1e-15);
    }

    #[test]
    fn cnot_truth_table() {
        // |q0 q1> = |10> is index 0b01; CNOT(0 -> 1) maps it to |11> = 0b11.
        let mut state = Statevector::basis(2, 0b01);
        state
            .apply(&Gate::Cnot {
                control: 0,
                target: 1,
            })
            .unwrap();
        assert_close(state.probability(0b11), 1.0, 1e-15);
    }

    #[test]
    fn ry_angle_convention() {
        // Ry(phi)|0> = cos(phi/2)|0> + sin(phi/2)|1>; at phi = 1.23096 the
        // probabilities are 2/3 and 1/3.
        let mut state = Statevector::zero(1);
        state
            .apply(&Gate::Ry {
                target: 0,
                angle: 1.23096,
            })
            .unwrap();
        assert_close(state.probability(0), 2.0 / 3.0, 1e-5);
        assert_close(state.probability(1), 1.0 / 3.0, 1e-5);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let circuit = Circuit::new(2, Layout::default());
        let state = circuit.run().unwrap();
        assert_close(state.probability(0), 1.0, 1e-15);
    }

    fn fig6_circuit(alpha: f64) -> Circuit {
        // H on the first variable, Ry + CNOT produce the second.
        let angle = 2.0 * ((1.0 + alpha) / 2.0).sqrt().acos();
        let mut c = Circuit::new(
            2,
            Layout {
                variables: vec![vec![0], vec![1]],
                controls: vec![],
            },
        );
        c.push(Gate::H { target: 0 });
        c.push(Gate::Ry { target: 1, angle });
        c.push(Gate::Cnot {
            control: 0,
            target: 1,
        });
        c
    }

    #[test]
    fn one_qubit_dependence_circuit_distribution() {
        let state = fig6_circuit(1.0 / 3.0).run().unwrap();
        let dist = state.distribution(&[0, 1]).unwrap();
        assert_close(dist.prob(0b00), 1.0 / 3.0, 1e-12);
        assert_close(dist.prob(0b01), 1.0 / 6.0, 1e-12);
        assert_close(dist.prob(0b10), 1.0 / 6.0, 1e-12);
        assert_close(dist.prob(0b11), 1.0 / 3.0, 1e-12);
    }

    #[test]
    fn uniform_from_hadamards() {
        let mut c = Circuit::new(2, Layout::default());
        c.push(Gate::H { target: 0 });
        c.push(Gate::H { target: 1 });
        let dist = c.run().unwrap().distribution(&[0, 1]).unwrap();
        for i in 0..4 {
            assert_close(dist.prob(i), 0.25, 1e-12);
        }
    }

    #[test]
    fn bell_marginal_is_fair_coin() {
        let mut state = Statevector::zero(2);
        state.apply(&Gate::H { target: 0 }).unwrap();
        state
            .apply(&Gate::Cnot {
                control: 0,
                target: 1,
            })
            .unwrap();
        let dist = state.distribution(&[0]).unwrap();
        assert_close(dist.prob(0), 0.5, 1e-12);
        assert_close(dist.prob(1), 0.5, 1e-12);
    }

    #[test]
    fn marginal_consistency() {
        let state = fig6_circuit(0.4).run().unwrap();
        let full = state.distribution(&[0, 1]).unwrap();
        let sub = state.distribution(&[1]).unwrap();
        assert_close(sub.prob(0), full.prob(0b00) + full.prob(0b10), 1e-15);
        assert_close(sub.prob(1), full.prob(0b01) + full.prob(0b11), 1e-15);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut c1 = Circuit::new(2, Layout::default());
        c1.push(Gate::H { target: 0 });
        c1.push(Gate::Ry {
            target: 1,
            angle: 0.7,
        });
        let mut c2 = Circuit::new(2, Layout::default());
        c2.push(Gate::Cnot {
            control: 0,
            target: 1,
        });
        c2.push(Gate::H { target: 1 });

        let mut combined = c1.clone();
        combined.extend(c2.gates.iter().cloned());
        let lhs = combined.run().unwrap();

        let mut rhs = c1.run().unwrap();
        for g in &c2.gates {
            rhs.apply(g).unwrap();
        }
        assert_eq!(lhs.amplitudes().len(), rhs.amplitudes().len());
        for (a, b) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn controlled_block_fires_on_matching_bits() {
        let mut state = Statevector::basis(2, 0b01); // qubit 0 set
        state
            .apply(&Gate::Block {
                controls: vec![(0, true)],
                body: vec![Gate::X { target: 1 }],
            })
            .unwrap();
        assert_close(state.probability(0b11), 1.0, 1e-15);

        let mut state = Statevector::basis(2, 0b00);
        state
            .apply(&Gate::Block {
                controls: vec![(0, true)],
                body: vec![Gate::X { target: 1 }],
            })
            .unwrap();
        assert_close(state.probability(0b00), 1.0, 1e-15);
    }

    #[test]
    fn negative_control_block() {
        let mut state = Statevector::basis(2, 0b00);
        state
            .apply(&Gate::Block {
                controls: vec![(0, false)],
                body: vec![Gate::X { target: 1 }],
            })
            .unwrap();
        assert_close(state.probability(0b10), 1.0, 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_and_complete() {
        let state = fig6_circuit(1.0 / 3.0).run().unwrap();
        let a = state.sample(4096, 7);
        let b = state.sample(4096, 7);
        assert_eq!(a, b);
        assert_eq!(a.values().sum::<u64>(), 4096);

        let zero = Statevector::zero(3);
        let counts = zero.sample(100, 1);
        assert_eq!(counts.get(&0), Some(&100));
        assert_eq!(counts.len(), 1);
    }

    #[test]
    fn sampled_frequencies_pass_chi_square() {
        // chi-square against {1/3, 1/6, 1/6, 1/3}; 99.9% critical value for
        // 3 degrees of freedom.
        const CHI2_3_CRIT_999: f64 = 16.266;
        let state = fig6_circuit(1.0 / 3.0).run().unwrap();
        let counts = state.sample(8192, 20200309);
        let expected = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0];
        let stat: f64 = (0..4)
            .map(|i| {
                let obs = *counts.get(&i).unwrap_or(&0) as f64;
                let exp = expected[i] * 8192.0;
                (obs - exp).powi(2) / exp
            })
            .sum();
        assert!(stat < CHI2_3_CRIT_999, "chi-square statistic {stat}");
    }

    #[test]
    fn unitary_of_single_hadamard() {
        let mut c = Circuit::new(1, Layout::default());
        c.push(Gate::H { target: 0 });
        let u = c.unitary().unwrap();
        assert_close(u.get(0, 0).re, FRAC_1_SQRT_2, 1e-15);
        assert_close(u.get(0, 1).re, FRAC_1_SQRT_2, 1e-15);
        assert_close(u.get(1, 0).re, FRAC_1_SQRT_2, 1e-15);
        assert_close(u.get(1, 1).re, -FRAC_1_SQRT_2, 1e-15);
        assert!(u.unitarity_deviation(usize::MAX) < 1e-12);
    }

    #[test]
    fn comonotone_copy_from_basis_zero() {
        let mut c = Circuit::new(2, Layout::default());
        c.push(Gate::H { target: 0 });
        c.push(Gate::Cnot {
            control: 0,
            target: 1,
        });
        let u = c.unitary().unwrap();
        assert_close(u.get(0b00, 0).re, FRAC_1_SQRT_2, 1e-15);
        assert_close(u.get(0b11, 0).re, FRAC_1_SQRT_2, 1e-15);
        assert_close(u.get(0b01, 0).norm(), 0.0, 1e-15);
        assert!(u.is_real(0.0));
    }

    #[test]
    fn unitary_cap_enforced() {
        let c = Circuit::new(UNITARY_QUBIT_CAP + 1, Layout::default());
        assert!(matches!(
            c.unitary(),
            Err(SimError::RegisterTooLarge { .. })
        ));
    }

    #[test]
    fn gate_validation_errors() {
        let mut state = Statevector::zero(2);
        assert!(matches!(
            state.apply(&Gate::X { target: 5 }),
            Err(SimError::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            state.apply(&Gate::Ry {
                target: 0,
                angle: f64::NAN
            }),
            Err(SimError::NonFiniteAngle)
        ));
        assert!(matches!(
            state.apply(&Gate::Block {
                controls: vec![(0, true)],
                body: vec![Gate::X { target: 0 }],
            }),
            Err(SimError::OverlappingQubits { .. })
        ));
        assert_eq!(state.distribution(&[]), Err(SimError::EmptyKeep));
    }

    #[test]
    fn swap_reorders_qubits() {
        let mut state = Statevector::basis(2, 0b01);
        state.apply(&Gate::Swap { a: 0, b: 1 }).unwrap();
        assert_close(state.probability(0b10), 1.0, 1e-15);
    }

    #[test]
    fn inverse_undoes_circuit() {
        let mut c = Circuit::new(3, Layout::default());
        c.push(Gate::H { target: 0 });
        c.push(Gate::Ry {
            target: 1,
            angle: 1.1,
        });
        c.push(Gate::Block {
            controls: vec![(0, true)],
            body: vec![
                Gate::Ry {
                    target: 2,
                    angle: 0.4,
                },
                Gate::Cnot {
                    control: 1,
                    target: 2,
                },
            ],
        });
        let mut state = c.run().unwrap();
        for g in c.inverse_gates() {
            state.apply(&g).unwrap();
        }
        assert_close(state.probability(0), 1.0, 1e-12);
    }

    #[test]
    fn norm_preserved_by_gate_sequences() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let n = rng.random_range(1..=5usize);
            let mut state = Statevector::zero(n);
            for _ in 0..30 {
                let q = rng.random_range(0..n);
                let gate = match rng.random_range(0..4) {
                    0 => Gate::X { target: q },
                    1 => Gate::H { target: q },
                    2 => Gate::Ry {
                        target: q,
                        angle: rng.random_range(-PI..PI),
                    },
                    _ => {
                        let t = rng.random_range(0..n);
                        if t == q {
                            Gate::H { target: q }
                        } else {
                            Gate::Cnot {
                                control: q,
                                target: t,
                            }
                        }
                    }
                };
                state.apply(&gate).unwrap();
            }
            assert_close(state.norm_sqr(), 1.0, 1e-12);
        }
    }
}
