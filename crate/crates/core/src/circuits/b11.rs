//! Pure- and mixed-state B11 builders, and the n-variate one-qubit
//! comonotone/independence mixture.

use super::{var_qubit, variable_layout, BuildError};
use crate::sim::{Circuit, Gate};
use crate::synth::{bernoulli_angle, conditional_loader, ProbVector};

/// Level-l dependence coefficient of the pure-state recursion,
/// `alpha_l = 2^(l-1) alpha / (1 + (2^(l-1) - 1) alpha)`; `level` is
/// one-based. Approaches 1 as the level deepens.
pub fn b11_level_alpha(alpha: f64, level: usize) -> f64 {
    let scale = f64::powi(2.0, level as i32 - 1);
    scale * alpha / (1.0 + (scale - 1.0) * alpha)
}

/// Ry angle of the one-level B11 block: `2 arccos(sqrt((1 + alpha) / 2))`,
/// valid for alpha in [-1, 1]. Rotates the pair-difference qubit so the two
/// variables agree with probability (1 + alpha) / 2.
pub fn b11_rotation_angle(alpha: f64) -> f64 {
    2.0 * ((1.0 + alpha) / 2.0).sqrt().acos()
}

/// Pure-state B11 circuit on exactly 2k qubits, no ancilla.
///
/// Level 1 realizes the one-qubit-resolution mixture; each deeper level
/// applies a one-level B11 block with the boosted coefficient
/// [`b11_level_alpha`] whenever all previous qubit pairs are equal, and
/// independent Hadamards otherwise. The pair-equality conditioning is kept
/// cheap by generating the second variable's qubits as difference bits first
/// (conditioned on the previous differences being zero) and converting them
/// to value bits with a final CNOT per level.
///
/// Negative alpha (the linear-Spearman extension) is supported at k = 1
/// only; deeper negative-alpha copulas go through the generic builder.
pub fn build_b11_pure(alpha: f64, k: usize) -> Result<Circuit, BuildError> {
    if k == 0 {
        return Err(BuildError::ZeroResolution);
    }
    if !(-1.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(BuildError::AlphaOutOfRange(alpha));
    }
    if alpha < 0.0 && k >= 2 {
        return Err(BuildError::NegativeAlphaNeedsGeneric);
    }
    let mut circuit = Circuit::new(2 * k, variable_layout(2, k, 0));
    let a = |level| var_qubit(0, k, level);
    let b = |level| var_qubit(1, k, level);
    for level in 0..k {
        circuit.push(Gate::H { target: a(level) });
        let angle = b11_rotation_angle(b11_level_alpha(alpha, level + 1));
        if level == 0 {
            circuit.push(Gate::Ry {
                target: b(0),
                angle,
            });
        } else {
            circuit.push(Gate::H { target: b(level) });
            circuit.push(Gate::Block {
                controls: (0..level).map(|m| (b(m), false)).collect(),
                body: vec![
                    Gate::H { target: b(level) },
                    Gate::Ry {
                        target: b(level),
                        angle,
                    },
                ],
            });
        }
    }
    for level in 0..k {
        circuit.push(Gate::Cnot {
            control: a(level),
            target: b(level),
        });
    }
    Ok(circuit)
}

/// Mixed-state B11 circuit: 2k copula qubits plus one control qubit that
/// selects the comonotone block with probability alpha and the independence
/// block otherwise. The control is marginalized, not measured.
pub fn build_b11_mixed(alpha: f64, k: usize) -> Result<Circuit, BuildError> {
    if k == 0 {
        return Err(BuildError::ZeroResolution);
    }
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(BuildError::AlphaOutOfRange(alpha));
    }
    let ctrl = 2 * k;
    let mut circuit = Circuit::new(2 * k + 1, variable_layout(2, k, 1));
    circuit.push(Gate::Ry {
        target: ctrl,
        angle: bernoulli_angle(alpha)?,
    });
    let mut comonotone = Vec::new();
    for level in 0..k {
        comonotone.push(Gate::H {
            target: var_qubit(0, k, level),
        });
        comonotone.push(Gate::Cnot {
            control: var_qubit(0, k, level),
            target: var_qubit(1, k, level),
        });
    }
    circuit.push(Gate::Block {
        controls: vec![(ctrl, true)],
        body: comonotone,
    });
    circuit.push(Gate::Block {
        controls: vec![(ctrl, false)],
        body: (0..2 * k).map(|q| Gate::H { target: q }).collect(),
    });
    Ok(circuit)
}

/// Reference rotation angle for the n-variate k = 1 mixture,
/// `2 arcsin(sqrt(1 - alpha) / (sqrt 2 sqrt(1 + alpha)))`. For n = 3 it
/// matches the deepest all-zeros-context rotation of the conditional loader
/// that realizes the same state.
pub fn mn_pin_reference_angle(alpha: f64) -> f64 {
    2.0 * ((1.0 - alpha).sqrt() / (2.0f64.sqrt() * (1.0 + alpha).sqrt())).asin()
}

/// The n-variate mixture alpha*M_n + (1-alpha)*Pi_n at one qubit per
/// variable: a pure state with P(|0..0>) = P(|1..1>) = alpha/2 + (1-alpha)/2^n
/// and all other outcomes (1-alpha)/2^n, loaded exactly.
pub fn build_mn_pin(alpha: f64, n: usize) -> Result<Circuit, BuildError> {
    if n < 2 {
        return Err(BuildError::WrongDimension { got: n, expected: 2 });
    }
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(BuildError::AlphaOutOfRange(alpha));
    }
    let size = 1usize << n;
    let base = (1.0 - alpha) / size as f64;
    let mut pdf = vec![base; size];
    pdf[0] += alpha / 2.0;
    pdf[size - 1] += alpha / 2.0;
    let mut circuit = Circuit::new(n, variable_layout(n, 1, 0));
    circuit.extend(conditional_loader(
        &ProbVector::new(pdf)?,
        &(0..n).collect::<Vec<_>>(),
    )?);
    Ok(circuit)
}
