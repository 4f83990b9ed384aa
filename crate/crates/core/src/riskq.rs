//! The risk pipeline: loss comparator oracles, canonical amplitude
//! estimation on top of the statevector simulator, bisection Value-at-Risk,
//! and conditional quantile exceedance estimation.
//!
//! Amplitude estimation follows the canonical phase-estimation form: the
//! Grover operator is assembled from the preparation circuit and the flag
//! reflection using only the simulator's real gate set, the inverse Fourier
//! transform is applied to the phase register numerically, and the full
//! phase-register distribution is read out. The modal outcome gives a
//! deterministic, seedless estimate; a seeded single-shot readout is
//! available behind the same contract.

use crate::copula::CopulaGrid;
use crate::sim::{Circuit, Gate, Layout, SimError, Statevector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

/// Total register cap for amplitude estimation (preparation plus phase
/// qubits).
pub const AE_QUBIT_CAP: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum RiskError {
    #[error("threshold {0} is not in the loss support")]
    ThresholdOutOfSupport(f64),
    #[error("quantile index {q_index} out of range for resolution 2^{k}")]
    QIndexOutOfRange { q_index: usize, k: usize },
    #[error("confidence level {0} must lie in (0, 1)")]
    BadLevel(f64),
    #[error("estimation register needs at least one qubit")]
    EmptyPhaseRegister,
    #[error("{needed} qubits exceed the {cap}-qubit amplitude estimation budget")]
    BudgetExceeded { needed: usize, cap: usize },
    #[error("circuit layout declares {got} variables, model has {expected}")]
    VariableMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Linear loss over the copula variates: Loss = sum of coeff_v * x_v with
/// x_v = cell_v / 2^k. With coefficients (4^k, 2^k) the loss is the
/// concatenation of the two variates' bits read as an integer.
#[derive(Debug, Clone, PartialEq)]
pub struct LossModel {
    coefficients: Vec<f64>,
    k: usize,
}

impl LossModel {
    pub fn new(coefficients: Vec<f64>, k: usize) -> Self {
        LossModel { coefficients, k }
    }

    /// Bivariate model whose loss is the concatenated bit string of the two
    /// variates; at k = 2 the coefficients are (16, 4) and the support is
    /// {0..15}.
    pub fn bit_concatenation(k: usize) -> Self {
        let side = (1usize << k) as f64;
        LossModel::new(vec![side * side, side], k)
    }

    pub fn num_variables(&self) -> usize {
        self.coefficients.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn loss(&self, cells: &[usize]) -> f64 {
        let scale = f64::powi(2.0, self.k as i32);
        self.coefficients
            .iter()
            .zip(cells)
            .map(|(c, &cell)| c * cell as f64 / scale)
            .sum()
    }

    /// Sorted, deduplicated loss values over all cell combinations.
    pub fn support(&self) -> Vec<f64> {
        let side = 1usize << self.k;
        let n = self.num_variables();
        let mut values: Vec<f64> = (0..side.pow(n as u32))
            .map(|mut idx| {
                let mut cells = vec![0usize; n];
                for v in (0..n).rev() {
                    cells[v] = idx % side;
                    idx /= side;
                }
                self.loss(&cells)
            })
            .collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        values
    }
}

/// Configuration of the phase-estimation register: m qubits discretize the
/// estimated probability to the 2^(m-1)+1 values sin^2(pi y / 2^m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeConfig {
    pub m: usize,
}

impl AeConfig {
    pub fn new(m: usize) -> Result<Self, RiskError> {
        if m == 0 {
            return Err(RiskError::EmptyPhaseRegister);
        }
        Ok(AeConfig { m })
    }

    pub fn register_size(&self) -> usize {
        1 << self.m
    }

    /// The achievable probability values, y = 0..=2^(m-1).
    pub fn grid(&self) -> Vec<f64> {
        let size = self.register_size() as f64;
        (0..=self.register_size() / 2)
            .map(|y| (PI * y as f64 / size).sin().powi(2))
            .collect()
    }
}

fn pattern_controls(layout: &Layout, cells: &[usize]) -> Vec<(usize, bool)> {
    let k = layout.resolution();
    let mut controls = Vec::new();
    for (var, &cell) in layout.variables.iter().zip(cells) {
        for (pos, &q) in var.iter().enumerate() {
            controls.push((q, (cell >> (k - 1 - pos)) & 1 == 1));
        }
    }
    controls
}

/// Flag-flip oracle for an arbitrary predicate over the variables' cells:
/// one multi-controlled X per satisfying cell combination. Unitary and
/// self-inverse by construction.
fn predicate_oracle<P>(layout: &Layout, flag: usize, pred: P) -> Vec<Gate>
where
    P: Fn(&[usize]) -> bool,
{
    let n = layout.num_variables();
    let side = 1usize << layout.resolution();
    let mut gates = Vec::new();
    let mut cells = vec![0usize; n];
    loop {
        if pred(&cells) {
            gates.push(Gate::Block {
                controls: pattern_controls(layout, &cells),
                body: vec![Gate::X { target: flag }],
            });
        }
        let mut v = 0;
        loop {
            if v == n {
                return gates;
            }
            cells[v] += 1;
            if cells[v] < side {
                break;
            }
            cells[v] = 0;
            v += 1;
        }
    }
}

/// Comparator fragment flipping the flag qubit exactly on basis states with
/// Loss(x) <= v. The threshold must be a support value.
pub fn comparator_fragment(
    model: &LossModel,
    v: f64,
    layout: &Layout,
    flag: usize,
) -> Result<Vec<Gate>, RiskError> {
    if layout.num_variables() != model.num_variables() {
        return Err(RiskError::VariableMismatch {
            got: layout.num_variables(),
            expected: model.num_variables(),
        });
    }
    if !model.support().iter().any(|&s| (s - v).abs() < 1e-9) {
        return Err(RiskError::ThresholdOutOfSupport(v));
    }
    Ok(predicate_oracle(layout, flag, |cells| {
        model.loss(cells) <= v + 1e-12
    }))
}

/// Joint-exceedance fragment: flips the flag iff every variable's cell is at
/// least `q_index`.
pub fn event_oracle_fragment(
    q_index: usize,
    layout: &Layout,
    flag: usize,
) -> Result<Vec<Gate>, RiskError> {
    let k = layout.resolution();
    if q_index >= 1 << k {
        return Err(RiskError::QIndexOutOfRange { q_index, k });
    }
    Ok(predicate_oracle(layout, flag, |cells| {
        cells.iter().all(|&c| c >= q_index)
    }))
}

/// Extends a copula circuit with a flag qubit and an oracle fragment built
/// for it; the flag becomes the last qubit and is tracked as an ancilla.
pub fn prep_with_oracle<F>(copula: &Circuit, build: F) -> Result<(Circuit, usize), RiskError>
where
    F: FnOnce(&Layout, usize) -> Result<Vec<Gate>, RiskError>,
{
    let flag = copula.num_qubits;
    let fragment = build(&copula.layout, flag)?;
    let mut layout = copula.layout.clone();
    layout.controls.push(flag);
    let mut prep = Circuit::new(copula.num_qubits + 1, layout);
    prep.extend(copula.gates.iter().cloned());
    prep.extend(fragment);
    Ok((prep, flag))
}

/// Outcome of one amplitude estimation run: the full phase-register
/// distribution plus the deterministic modal estimate.
#[derive(Debug, Clone)]
pub struct AeOutcome {
    config: AeConfig,
    phase_probs: Vec<f64>,
    modal_phase: usize,
}

impl AeOutcome {
    /// Modal estimate: the sin^2 grid value carrying the most probability
    /// after merging each phase y with its mirror 2^m - y.
    pub fn estimate(&self) -> f64 {
        self.grid_value(self.modal_phase)
    }

    pub fn modal_phase(&self) -> usize {
        self.modal_phase
    }

    /// Probability of each phase-register outcome y = 0..2^m.
    pub fn phase_probs(&self) -> &[f64] {
        &self.phase_probs
    }

    /// Total probability mass landing on the folded grid index.
    pub fn grid_mass(&self, folded: usize) -> f64 {
        let size = self.config.register_size();
        let mirror = (size - folded) % size;
        if mirror == folded {
            self.phase_probs[folded]
        } else {
            self.phase_probs[folded] + self.phase_probs[mirror]
        }
    }

    pub fn grid_value(&self, y: usize) -> f64 {
        let size = self.config.register_size() as f64;
        (PI * y as f64 / size).sin().powi(2)
    }

    /// Shot-based readout: draws one phase outcome with the ChaCha8 seeded
    /// generator and maps it to the grid.
    pub fn sampled_estimate(&self, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: f64 = rng.random::<f64>() * self.phase_probs.iter().sum::<f64>();
        let mut acc = 0.0;
        for (y, &p) in self.phase_probs.iter().enumerate() {
            acc += p;
            if x < acc {
                return self.grid_value(y);
            }
        }
        self.grid_value(self.phase_probs.len() - 1)
    }
}

/// Canonical amplitude estimation of the flag probability of `prep`.
///
/// Phase qubits control powers of the Grover operator
/// G = -A S_0 A^dag S_flag, assembled from the preparation gates, the
/// all-zeros reflection, and the flag-phase reflection (Z is spelled HXH in
/// the real gate set; the global minus sign becomes a Z on the control of
/// every odd power). The inverse Fourier transform is then applied to the
/// phase register and the register marginal is returned.
pub fn amplitude_estimate(
    prep: &Circuit,
    flag: usize,
    config: AeConfig,
) -> Result<AeOutcome, RiskError> {
    let s = prep.num_qubits;
    let m = config.m;
    if s + m > AE_QUBIT_CAP {
        return Err(RiskError::BudgetExceeded {
            needed: s + m,
            cap: AE_QUBIT_CAP,
        });
    }
    let z_on = |q: usize| {
        vec![
            Gate::H { target: q },
            Gate::X { target: q },
            Gate::H { target: q },
        ]
    };
    // Grover operator body, applied left to right as listed
    let mut grover = Vec::new();
    grover.extend(z_on(flag)); // flag-phase reflection
    grover.extend(prep.inverse_gates()); // A^dag
    for q in 0..s {
        grover.push(Gate::X { target: q });
    }
    grover.push(Gate::Block {
        controls: (1..s).map(|q| (q, true)).collect(),
        body: z_on(0),
    }); // sign flip on |0..0> inside the X frame
    for q in 0..s {
        grover.push(Gate::X { target: q });
    }
    grover.extend(prep.gates.iter().cloned()); // A

    let mut state = Statevector::zero(s + m);
    for g in &prep.gates {
        state.apply(g)?;
    }
    for j in 0..m {
        let ctrl = s + j;
        state.apply(&Gate::H { target: ctrl })?;
        let power = 1usize << j;
        let mut body = Vec::with_capacity(grover.len() * power);
        for _ in 0..power {
            body.extend(grover.iter().cloned());
        }
        state.apply(&Gate::Block {
            controls: vec![(ctrl, true)],
            body,
        })?;
        if power % 2 == 1 {
            // the -1 in G^power survives only for odd powers
            for g in z_on(ctrl) {
                state.apply(&g)?;
            }
        }
    }
    let phase_probs = inverse_qft_marginal(state.amplitudes_mut(), s, m);
    // merge mirrored phases onto the sin^2 grid, then take the modal value
    let size = 1usize << m;
    let mut modal = (0usize, -1.0f64);
    for y in 0..=size / 2 {
        let mirror = (size - y) % size;
        let mass = if mirror == y {
            phase_probs[y]
        } else {
            phase_probs[y] + phase_probs[mirror]
        };
        if mass > modal.1 + 1e-15 {
            modal = (y, mass);
        }
    }
    Ok(AeOutcome {
        config,
        phase_probs,
        modal_phase: modal.0,
    })
}

/// Applies the inverse Fourier transform along the top m qubits and returns
/// the phase-register marginal.
fn inverse_qft_marginal(amps: &mut [Complex64], s_bits: usize, m_bits: usize) -> Vec<f64> {
    let size = 1usize << m_bits;
    let stride = 1usize << s_bits;
    let scale = 1.0 / (size as f64).sqrt();
    let mut buf = vec![Complex64::ZERO; size];
    let mut probs = vec![0.0f64; size];
    for sys in 0..stride {
        for (e, slot) in buf.iter_mut().enumerate() {
            *slot = amps[sys + (e << s_bits)];
        }
        fft_negative_exponent(&mut buf);
        for (y, &value) in buf.iter().enumerate() {
            let v = value * scale;
            amps[sys + (y << s_bits)] = v;
            probs[y] += v.norm_sqr();
        }
    }
    probs
}

/// In-place radix-2 DFT with kernel exp(-2 pi i y e / N), unnormalized.
fn fft_negative_exponent(buf: &mut [Complex64]) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let angle = -2.0 * PI / len as f64;
        let w_len = Complex64::from_polar(1.0, angle);
        for start in (0..n).step_by(len) {
            let mut w = Complex64::ONE;
            for i in 0..len / 2 {
                let a = buf[start + i];
                let b = buf[start + i + len / 2] * w;
                buf[start + i] = a + b;
                buf[start + i + len / 2] = a - b;
                w *= w_len;
            }
        }
        len <<= 1;
    }
}

/// Estimated cumulative loss probability P(Loss <= v) for one threshold.
pub fn estimate_cdf_point(
    model: &LossModel,
    copula: &Circuit,
    v: f64,
    config: AeConfig,
) -> Result<f64, RiskError> {
    let (prep, flag) = prep_with_oracle(copula, |layout, flag| {
        comparator_fragment(model, v, layout, flag)
    })?;
    Ok(amplitude_estimate(&prep, flag, config)?.estimate())
}

/// Value-at-Risk by bisection over the discrete loss support: the smallest
/// support value whose estimated cumulative probability reaches `level`,
/// with one amplitude estimation call per probe.
pub fn estimate_var(
    model: &LossModel,
    copula: &Circuit,
    level: f64,
    config: AeConfig,
) -> Result<f64, RiskError> {
    if level <= 0.0 || level >= 1.0 || level.is_nan() {
        return Err(RiskError::BadLevel(level));
    }
    let support = model.support();
    let mut lo = 0usize;
    let mut hi = support.len() - 1;
    while lo < hi {
        let mid = (lo + hi) / 2;
        let estimate = estimate_cdf_point(model, copula, support[mid], config)?;
        if estimate >= level {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(support[lo])
}

/// Quantum estimate of the conditional quantile exceedance probability at
/// q = q_index / 2^k: amplitude estimation of the joint exceedance, divided
/// by the closed-form margin 1 - q. The division degrades accuracy at high
/// quantiles.
pub fn estimate_cqep(
    copula: &Circuit,
    q_index: usize,
    config: AeConfig,
) -> Result<f64, RiskError> {
    let (prep, flag) = prep_with_oracle(copula, |layout, flag| {
        event_oracle_fragment(q_index, layout, flag)
    })?;
    let joint = amplitude_estimate(&prep, flag, config)?.estimate();
    let k = copula.layout.resolution();
    let q = q_index as f64 / f64::powi(2.0, k as i32);
    Ok(joint / (1.0 - q))
}

/// Exact cumulative loss distribution by cell enumeration over the oracle
/// grid: pairs (v, P(Loss <= v)) over the loss support.
pub fn true_cdf(grid: &CopulaGrid, model: &LossModel) -> Vec<(f64, f64)> {
    model
        .support()
        .into_iter()
        .map(|v| {
            let mass: f64 = grid
                .cells()
                .iter()
                .enumerate()
                .filter(|(idx, _)| model.loss(&grid.coords(*idx)) <= v + 1e-12)
                .map(|(_, &m)| m)
                .sum();
            (v, mass)
        })
        .collect()
}

/// Exact joint exceedance probability P(all variables >= q_index) by cell
/// enumeration.
pub fn true_event_probability(grid: &CopulaGrid, q_index: usize) -> f64 {
    grid.cells()
        .iter()
        .enumerate()
        .filter(|(idx, _)| grid.coords(*idx).iter().all(|&c| c >= q_index))
        .map(|(_, &m)| m)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::build_b11_pure;
    use crate::copula::{mixture_grid, Mb11Spec, Ratio};
    use crate::synth::bernoulli_angle;

    fn reference_copula() -> Circuit {
        build_b11_pure(0.5, 2).unwrap()
    }

    fn reference_grid() -> CopulaGrid {
        mixture_grid(&Mb11Spec::b11(Ratio::new(1, 2)).unwrap(), 2).unwrap()
    }

    fn flag_probability(prep: &Circuit, flag: usize) -> f64 {
        let state = prep.run().unwrap();
        state.distribution(&[flag]).unwrap().prob(1)
    }

    #[test]
    fn ae_grid_has_expected_size() {
        for m in [3usize, 5, 7] {
            let grid = AeConfig::new(m).unwrap().grid();
            assert_eq!(grid.len(), (1 << (m - 1)) + 1);
            assert_eq!(grid[0], 0.0);
            assert!((grid[grid.len() - 1] - 1.0).abs() < 1e-15);
            for pair in grid.windows(2) {
                assert!(pair[0] < pair[1]);
            }
        }
        assert!(AeConfig::new(0).is_err());
    }

    #[test]
    fn loss_model_support_is_integer_ladder() {
        let model = LossModel::bit_concatenation(2);
        let support = model.support();
        assert_eq!(support.len(), 16);
        for (i, v) in support.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-12);
        }
        assert_eq!(model.loss(&[2, 3]), 11.0);
    }

    #[test]
    fn comparator_flag_probabilities() {
        let copula = reference_copula();
        let grid = reference_grid();
        let model = LossModel::bit_concatenation(2);
        for v in [0.0, 4.0, 15.0] {
            let (prep, flag) = prep_with_oracle(&copula, |layout, flag| {
                comparator_fragment(&model, v, layout, flag)
            })
            .unwrap();
            let simulated = flag_probability(&prep, flag);
            let enumerated = true_cdf(&grid, &model)
                .into_iter()
                .find(|(t, _)| (*t - v).abs() < 1e-9)
                .unwrap()
                .1;
            assert!(
                (simulated - enumerated).abs() < 1e-13,
                "v={v}: {simulated} vs {enumerated}"
            );
        }
        // frozen values from the enumeration oracle
        let cdf = true_cdf(&grid, &model);
        assert!((cdf[0].1 - 0.15625).abs() < 1e-15);
        assert!((cdf[4].1 - 0.28125).abs() < 1e-15);
        assert!((cdf[15].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn comparator_is_self_inverse() {
        let copula = reference_copula();
        let model = LossModel::bit_concatenation(2);
        let (prep, flag) = prep_with_oracle(&copula, |layout, flag| {
            comparator_fragment(&model, 7.0, layout, flag)
        })
        .unwrap();
        let mut state = prep.run().unwrap();
        let fragment = comparator_fragment(&model, 7.0, &copula.layout, flag).unwrap();
        for g in &fragment {
            state.apply(g).unwrap();
        }
        // flag restored to |0>
        assert!(state.distribution(&[flag]).unwrap().prob(1) < 1e-12);
    }

    #[test]
    fn comparator_rejects_off_support_threshold() {
        let model = LossModel::bit_concatenation(2);
        let layout = reference_copula().layout;
        assert!(matches!(
            comparator_fragment(&model, 3.5, &layout, 4),
            Err(RiskError::ThresholdOutOfSupport(_))
        ));
    }

    #[test]
    fn event_oracle_probabilities() {
        let copula = reference_copula();
        let grid = reference_grid();
        for q in 0..4usize {
            let (prep, flag) = prep_with_oracle(&copula, |layout, flag| {
                event_oracle_fragment(q, layout, flag)
            })
            .unwrap();
            let simulated = flag_probability(&prep, flag);
            let truth = true_event_probability(&grid, q);
            assert!((simulated - truth).abs() < 1e-13);
        }
        assert!((true_event_probability(&grid, 0) - 1.0).abs() < 1e-15);
        assert!((true_event_probability(&grid, 3) - 0.15625).abs() < 1e-15);
    }

    /// Minimal preparation with a known flag amplitude.
    fn bernoulli_prep(a: f64) -> (Circuit, usize) {
        let mut c = Circuit::new(1, Layout::default());
        c.push(Gate::Ry {
            target: 0,
            angle: bernoulli_angle(a).unwrap(),
        });
        (c, 0)
    }

    #[test]
    fn ae_exact_on_grid() {
        let config = AeConfig::new(7).unwrap();
        for a in [0.0, 0.5, 1.0] {
            let (prep, flag) = bernoulli_prep(a);
            let outcome = amplitude_estimate(&prep, flag, config).unwrap();
            assert!(
                (outcome.estimate() - a).abs() < 1e-10,
                "a={a}: {}",
                outcome.estimate()
            );
        }
    }

    #[test]
    fn ae_off_grid_lands_on_neighbor_with_canonical_mass() {
        let a = 0.15625;
        let config = AeConfig::new(7).unwrap();
        let (prep, flag) = bernoulli_prep(a);
        let outcome = amplitude_estimate(&prep, flag, config).unwrap();
        let y_true = 128.0 * a.sqrt().asin() / PI;
        let lo = y_true.floor() as usize;
        let hi = y_true.ceil() as usize;
        assert!(
            outcome.modal_phase() == lo || outcome.modal_phase() == hi,
            "modal phase {} not adjacent to {y_true}",
            outcome.modal_phase()
        );
        let neighbor_mass = outcome.grid_mass(lo) + outcome.grid_mass(hi);
        assert!(
            neighbor_mass >= 8.0 / (PI * PI),
            "neighbor mass {neighbor_mass}"
        );
    }

    #[test]
    fn sampled_readout_is_deterministic() {
        let (prep, flag) = bernoulli_prep(0.3);
        let outcome = amplitude_estimate(&prep, flag, AeConfig::new(5).unwrap()).unwrap();
        assert_eq!(outcome.sampled_estimate(9), outcome.sampled_estimate(9));
    }

    #[test]
    fn var_bisection_on_reference_instance() {
        let copula = reference_copula();
        let model = LossModel::bit_concatenation(2);
        let config = AeConfig::new(7).unwrap();
        let var = estimate_var(&model, &copula, 0.25, config).unwrap();
        assert_eq!(var, 4.0);
        let var = estimate_var(&model, &copula, 0.999, config).unwrap();
        assert_eq!(var, 15.0);
    }

    #[test]
    fn cqep_estimates_track_truth() {
        let copula = reference_copula();
        let grid = reference_grid();
        let config = AeConfig::new(7).unwrap();
        let step = PI / 128.0; // phase-grid scale
        for q in 0..4usize {
            let estimate = estimate_cqep(&copula, q, config).unwrap();
            let truth = true_event_probability(&grid, q) / (1.0 - q as f64 / 4.0);
            let closed_form = 1.0 - (q as f64 / 4.0) * 0.5;
            assert!((truth - closed_form).abs() < 1e-13);
            let tol = (2.0 * step + step * step) / (1.0 - q as f64 / 4.0);
            assert!(
                (estimate - truth).abs() <= tol,
                "q={q}: {estimate} vs {truth} (tol {tol})"
            );
        }
    }

    #[test]
    fn budget_guard() {
        let (prep, flag) = bernoulli_prep(0.5);
        assert!(matches!(
            amplitude_estimate(&prep, flag, AeConfig { m: AE_QUBIT_CAP }),
            Err(RiskError::BudgetExceeded { .. })
        ));
    }
}
