//! Probability-distribution loaders: Bernoulli rotation angles, the 2-qubit
//! four-probability synthesizer, the 3-qubit five-probability synthesizer,
//! and the generic conditional tree loader.
//!
//! Every loader is exact: simulating the returned fragment from |0..0>
//! reproduces the target probabilities up to floating-point rounding. All
//! fragments use only X/H/Ry/CNOT and positive/negative controlled blocks,
//! so the produced amplitudes are real and nonnegative.

use crate::sim::Gate;
use thiserror::Error;

/// Probabilities below this are treated as exact zeros before building the
/// conditional tree, so numeric noise in classical oracles cannot create
/// spurious branches.
pub const PROB_CLAMP: f64 = 1e-15;

const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("probability vector sums to {0}, expected 1")]
    NotNormalized(f64),
    #[error("probability vector has length {got}, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("probability vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("fragment needs {needed} qubits, got {got}")]
    WrongQubitCount { got: usize, needed: usize },
}

/// Nonnegative reals summing to one (within 1e-12). Entries below
/// [`PROB_CLAMP`] are zeroed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self, SynthError> {
        for &v in &values {
            if !(0.0..=1.0 + SUM_TOL).contains(&v) || v.is_nan() {
                return Err(SynthError::ProbabilityOutOfRange(v));
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(SynthError::NotNormalized(sum));
        }
        let values = values
            .into_iter()
            .map(|v| if v < PROB_CLAMP { 0.0 } else { v })
            .collect();
        Ok(ProbVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Ry angle rotating |0> to a state measured as |1> with probability `p`
/// (convention P(|1>) = sin^2(angle/2)).
pub fn bernoulli_angle(p: f64) -> Result<f64, SynthError> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(SynthError::ProbabilityOutOfRange(p));
    }
    Ok(2.0 * p.sqrt().asin())
}

/// Loads four prescribed probabilities onto two qubits.
///
/// `qubits[0]` is the more significant outcome bit. The fragment is a
/// conditional-probability tree: one rotation on the first qubit, then one
/// rotation on the second qubit per first-qubit branch.
pub fn synth2(target: &ProbVector, qubits: [usize; 2]) -> Result<Vec<Gate>, SynthError> {
    if target.len() != 4 {
        return Err(SynthError::WrongLength {
            got: target.len(),
            expected: 4,
        });
    }
    conditional_loader(target, &qubits)
}

/// Loads five prescribed probabilities onto three qubits: targets 1-4 land on
/// |000>..|011> and target 5 on |100>; the states |101>, |110>, |111> carry
/// zero probability.
pub fn synth3_5(target: &ProbVector, qubits: [usize; 3]) -> Result<Vec<Gate>, SynthError> {
    if target.len() != 5 {
        return Err(SynthError::WrongLength {
            got: target.len(),
            expected: 5,
        });
    }
    let v = target.values();
    let mut gates = Vec::new();
    // Most significant qubit carries the fifth probability.
    let p_top = v[4];
    let angle = bernoulli_angle(p_top)?;
    if angle != 0.0 {
        gates.push(Gate::Ry {
            target: qubits[0],
            angle,
        });
    }
    let rest: f64 = 1.0 - p_top;
    if rest > 0.0 {
        let scaled = ProbVector::new(renormalize(&v[..4], rest))?;
        let body = synth2(&scaled, [qubits[1], qubits[2]])?;
        if !body.is_empty() {
            gates.push(Gate::Block {
                controls: vec![(qubits[0], false)],
                body,
            });
        }
    }
    Ok(gates)
}

/// Loads a length-2^m pdf onto m qubits via the conditional-probability tree:
/// qubit l is rotated conditioned on the values of qubits 1..l-1. Exact for
/// any valid pdf; zero-probability branches emit no gates.
pub fn conditional_loader(pdf: &ProbVector, qubits: &[usize]) -> Result<Vec<Gate>, SynthError> {
    let len = pdf.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(SynthError::NotPowerOfTwo(len));
    }
    let m = len.trailing_zeros() as usize;
    if qubits.len() != m {
        return Err(SynthError::WrongQubitCount {
            got: qubits.len(),
            needed: m,
        });
    }
    let v = pdf.values();
    let mut gates = Vec::new();
    for level in 0..m {
        // At this level each prefix of `level` leading bits owns a
        // contiguous run of 2^(m-level) outcomes.
        let run = 1usize << (m - level);
        for prefix in 0..1usize << level {
            let start = prefix * run;
            let mass: f64 = v[start..start + run].iter().sum();
            if mass <= 0.0 {
                continue; // unreachable branch
            }
            let p_one: f64 = v[start + run / 2..start + run].iter().sum::<f64>() / mass;
            let angle = bernoulli_angle(p_one.clamp(0.0, 1.0))?;
            if angle == 0.0 {
                continue;
            }
            let rotation = Gate::Ry {
                target: qubits[level],
                angle,
            };
            if level == 0 {
                gates.push(rotation);
            } else {
                let controls = (0..level)
                    .map(|j| (qubits[j], (prefix >> (level - 1 - j)) & 1 == 1))
                    .collect();
                gates.push(Gate::Block {
                    controls,
                    body: vec![rotation],
                });
            }
        }
    }
    Ok(gates)
}

fn renormalize(values: &[f64], mass: f64) -> Vec<f64> {
    values.iter().map(|v| v / mass).collect()
}
