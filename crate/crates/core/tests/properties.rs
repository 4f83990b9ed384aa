//! Property tests over the library's structural invariants.

use proptest::prelude::*;
use qcopula::copula::{
    canonical_grid, comonotone_cdf, discretize_cdf, independence_cdf, mb11_weights_from_taildep,
    mixture_grid, set_partitions, taildep_from_weights, Mb11Spec, Ratio, SetPartition,
};
use qcopula::synth::{conditional_loader, synth2, synth3_5, ProbVector};
use qcopula::{Gate, Statevector};

fn simplex(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len).prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / sum).collect()
    })
}

fn simulate(gates: &[Gate], num_qubits: usize) -> Vec<f64> {
    let mut state = Statevector::zero(num_qubits);
    for g in gates {
        state.apply(g).unwrap();
    }
    state
        .distribution(&(0..num_qubits).collect::<Vec<_>>())
        .unwrap()
        .probs()
        .to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loaders_round_trip(target in simplex(8)) {
        let pdf = ProbVector::new(target.clone()).unwrap();
        let gates = conditional_loader(&pdf, &[0, 1, 2]).unwrap();
        let probs = simulate(&gates, 3);
        for (p, t) in probs.iter().zip(pdf.values()) {
            prop_assert!((p - t).abs() < 1e-12);
        }
    }

    #[test]
    fn synth2_round_trips(target in simplex(4)) {
        let pdf = ProbVector::new(target).unwrap();
        let gates = synth2(&pdf, [0, 1]).unwrap();
        let probs = simulate(&gates, 2);
        for (p, t) in probs.iter().zip(pdf.values()) {
            prop_assert!((p - t).abs() < 1e-12);
        }
    }

    #[test]
    fn synth3_5_round_trips_and_confines_support(target in simplex(5)) {
        let pdf = ProbVector::new(target).unwrap();
        let gates = synth3_5(&pdf, [0, 1, 2]).unwrap();
        let probs = simulate(&gates, 3);
        for (p, t) in probs.iter().take(5).zip(pdf.values()) {
            prop_assert!((p - t).abs() < 1e-12);
        }
        for &state in &[0b101usize, 0b110, 0b111] {
            prop_assert_eq!(probs[state], 0.0);
        }
    }

    #[test]
    fn calibration_round_trip_exact(
        a in 0i64..=16, b in 0i64..=16, c in 0i64..=16, d in 0i64..=16,
    ) {
        // scale down so feasibility usually holds; skip infeasible draws
        let (l12, l13, l23) = (Ratio::new(a, 64), Ratio::new(b, 64), Ratio::new(c, 64));
        let l123 = Ratio::new(d, 64).min(l12).min(l13).min(l23);
        if let Ok(spec) = mb11_weights_from_taildep(l12, l13, l23, l123) {
            let tail = taildep_from_weights(&spec);
            prop_assert_eq!(tail.entry(0, 1), l12);
            prop_assert_eq!(tail.entry(0, 2), l13);
            prop_assert_eq!(tail.entry(1, 2), l23);
            prop_assert_eq!(tail.lambda123(), Some(l123));
        }
    }

    #[test]
    fn mixtures_keep_uniform_margins(weight in 0i64..=32) {
        let w = Ratio::new(weight, 32);
        let spec = Mb11Spec::new(
            3,
            vec![
                ("1,2,3".parse::<SetPartition>().unwrap(), w),
                (SetPartition::independence(3), Ratio::new(1, 1) - w),
            ],
        ).unwrap();
        let grid = mixture_grid(&spec, 2).unwrap();
        let (_, dev) = grid.worst_margin_deviation();
        prop_assert!(dev < 1e-12);
    }
}

#[test]
fn partition_counts_equal_bell_numbers() {
    use qcopula::copula::bell_number;
    for n in 1..=10usize {
        let parts = set_partitions(n, false).unwrap();
        assert_eq!(parts.len() as u64, bell_number(n), "n = {n}");
        let unique: std::collections::BTreeSet<_> = parts.iter().collect();
        assert_eq!(unique.len(), parts.len(), "duplicates at n = {n}");
    }
}

#[test]
fn discretizer_agrees_with_canonical_grids() {
    for k in 1..=4usize {
        let upper = discretize_cdf(comonotone_cdf, k).unwrap();
        assert!(
            upper
                .max_abs_diff(&canonical_grid(&SetPartition::comonotone(2), k).unwrap())
                == 0.0
        );
        let product = discretize_cdf(independence_cdf, k).unwrap();
        assert!(
            product
                .max_abs_diff(&canonical_grid(&SetPartition::independence(2), k).unwrap())
                < 1e-15
        );
    }
}
