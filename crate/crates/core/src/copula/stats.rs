//! Conditional quantile exceedance probabilities and rank correlation,
//! evaluated exactly on copula grids.

use super::grid::CopulaGrid;
use super::CopulaError;

/// Closed-form cqep of the B11 copula: 1 - p(1 - alpha), decreasing from 1
/// at p = 0 to alpha at p = 1.
pub fn cqep_b11(p: f64, alpha: f64) -> Result<f64, CopulaError> {
    for (name, v) in [("p", p), ("alpha", alpha)] {
        if !(0.0..=1.0).contains(&v) || v.is_nan() {
            return Err(CopulaError::BadParameter(format!("{name} = {v} outside [0, 1]")));
        }
    }
    Ok(1.0 - p * (1.0 - alpha))
}

/// P(X_i >= q | X_j >= q) at q = q_index / 2^k, by exact summation over
/// cells. The denominator is positive for every q_index < 2^k.
pub fn grid_cqep(
    grid: &CopulaGrid,
    i: usize,
    j: usize,
    q_index: usize,
) -> Result<f64, CopulaError> {
    check_axes(grid, &[i, j], q_index)?;
    let mut joint = 0.0;
    let mut cond = 0.0;
    for (idx, &mass) in grid.cells().iter().enumerate() {
        let c = grid.coords(idx);
        if c[j] >= q_index {
            cond += mass;
            if c[i] >= q_index {
                joint += mass;
            }
        }
    }
    Ok(joint / cond)
}

/// Trivariate analogue: P(X_1 >= q ∧ X_2 >= q | X_3 >= q).
pub fn grid_cqep3(grid: &CopulaGrid, q_index: usize) -> Result<f64, CopulaError> {
    if grid.n() != 3 {
        return Err(CopulaError::BadParameter(format!(
            "trivariate cqep needs n = 3, grid has n = {}",
            grid.n()
        )));
    }
    check_axes(grid, &[0, 1, 2], q_index)?;
    let mut joint = 0.0;
    let mut cond = 0.0;
    for (idx, &mass) in grid.cells().iter().enumerate() {
        let c = grid.coords(idx);
        if c[2] >= q_index {
            cond += mass;
            if c[0] >= q_index && c[1] >= q_index {
                joint += mass;
            }
        }
    }
    Ok(joint / cond)
}

/// Spearman rank correlation of two grid variables using the mid-rank
/// (grade) convention: each cell c maps to the grade (c + 1/2) / 2^k and the
/// result is the Pearson correlation of the grades. Uniform margins make the
/// grade variance (m^2 - 1) / (12 m^2) with m = 2^k, so the discrete
/// comonotone grid scores exactly 1.
pub fn grid_spearman(grid: &CopulaGrid, i: usize, j: usize) -> Result<f64, CopulaError> {
    check_axes(grid, &[i, j], 0)?;
    let side = grid.side();
    let m = side as f64;
    let marginal = grid.bivariate_marginal(i, j);
    let grade = |c: usize| (c as f64 + 0.5) / m - 0.5;
    let mut cov = 0.0;
    for ci in 0..side {
        for cj in 0..side {
            cov += marginal[ci * side + cj] * grade(ci) * grade(cj);
        }
    }
    let var = (m * m - 1.0) / (12.0 * m * m);
    Ok(cov / var)
}

fn check_axes(grid: &CopulaGrid, axes: &[usize], q_index: usize) -> Result<(), CopulaError> {
    for &a in axes {
        if a >= grid.n() {
            return Err(CopulaError::BadParameter(format!(
                "axis {a} out of range for n = {}",
                grid.n()
            )));
        }
    }
    if q_index >= grid.side() {
        return Err(CopulaError::BadParameter(format!(
            "q_index {q_index} out of range for 2^k = {}",
            grid.side()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::grid::{canonical_grid, mixture_grid};
    use crate::copula::partition::SetPartition;
    use crate::copula::taildep::Mb11Spec;
    use crate::copula::Ratio;

    #[test]
    fn cqep_b11_closed_form() {
        assert_eq!(cqep_b11(0.0, 0.3).unwrap(), 1.0);
        assert!((cqep_b11(1.0, 0.3).unwrap() - 0.3).abs() < 1e-15);
        assert!((cqep_b11(0.5, 0.5).unwrap() - 0.75).abs() < 1e-15);
        assert!(cqep_b11(-0.1, 0.5).is_err());
    }

    #[test]
    fn grid_cqep_at_zero_is_one() {
        for s in ["1,2", "1|2", "1,-2"] {
            let p: SetPartition = s.parse().unwrap();
            let grid = canonical_grid(&p, 3).unwrap();
            assert_eq!(grid_cqep(&grid, 0, 1, 0).unwrap(), 1.0);
        }
    }

    #[test]
    fn discretized_b11_preserves_cqep() {
        for (num, den) in [(0i64, 1i64), (1, 2), (1, 1), (1, 3)] {
            let alpha = Ratio::new(num, den);
            let alpha_f = num as f64 / den as f64;
            for k in [2usize, 4] {
                let grid = mixture_grid(&Mb11Spec::b11(alpha).unwrap(), k).unwrap();
                let m = grid.side() as f64;
                for q_index in 0..grid.side() {
                    let got = grid_cqep(&grid, 0, 1, q_index).unwrap();
                    let expect = 1.0 - (q_index as f64 / m) * (1.0 - alpha_f);
                    assert!(
                        (got - expect).abs() < 1e-12,
                        "alpha {alpha}, k {k}, q {q_index}: {got} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn independence_grid_cqep() {
        let grid = canonical_grid(&SetPartition::independence(2), 2).unwrap();
        for q in 0..4usize {
            let got = grid_cqep(&grid, 0, 1, q).unwrap();
            assert!((got - (1.0 - q as f64 / 4.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn trivariate_cqep_cases() {
        let pure = canonical_grid(&SetPartition::comonotone(3), 2).unwrap();
        for q in 0..4usize {
            assert!((grid_cqep3(&pure, q).unwrap() - 1.0).abs() < 1e-14);
        }

        let spec = Mb11Spec::new(
            3,
            vec![
                ("1,2,3".parse().unwrap(), Ratio::new(1, 2)),
                ("1,2|3".parse().unwrap(), Ratio::new(1, 2)),
            ],
        )
        .unwrap();
        let grid = mixture_grid(&spec, 6).unwrap();
        assert_eq!(grid_cqep3(&grid, 0).unwrap(), 1.0);
        let top = grid_cqep3(&grid, grid.side() - 1).unwrap();
        assert!((top - 0.5).abs() < 0.02, "top-cell trivariate cqep {top}");
    }

    #[test]
    fn spearman_reference_points() {
        let indep = canonical_grid(&SetPartition::independence(2), 3).unwrap();
        assert!(grid_spearman(&indep, 0, 1).unwrap().abs() < 1e-14);

        let mono = canonical_grid(&SetPartition::comonotone(2), 3).unwrap();
        assert!((grid_spearman(&mono, 0, 1).unwrap() - 1.0).abs() < 1e-13);

        let anti = canonical_grid(&SetPartition::countermonotone2(), 3).unwrap();
        assert!((grid_spearman(&anti, 0, 1).unwrap() + 1.0).abs() < 1e-13);
    }

    #[test]
    fn b11_spearman_equals_alpha_at_every_resolution() {
        // the grade convention preserves the rank correlation of the
        // discretized copula, so the k = 2, 4, 6 sequence sits at alpha
        // (trivially monotone toward the continuous limit)
        let alpha = Ratio::new(1, 2);
        let mut prev_gap = f64::INFINITY;
        for k in [2usize, 4, 6] {
            let grid = mixture_grid(&Mb11Spec::b11(alpha).unwrap(), k).unwrap();
            let rho = grid_spearman(&grid, 0, 1).unwrap();
            let gap = (rho - 0.5).abs();
            assert!(gap < 1e-12, "k {k}: rho {rho}");
            assert!(gap <= prev_gap + 1e-15);
            prev_gap = gap;
        }
    }
}
