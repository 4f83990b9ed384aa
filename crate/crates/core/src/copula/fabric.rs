//! Parameters and printed reference formulas for the "fabric" copula family.
//!
//! The reference correlation formulas are transcribed as printed; their
//! indexing is internally inconsistent in the source material, so they are
//! reported for comparison against brute-force grid statistics, which remain
//! authoritative.

use super::CopulaError;

/// Per-gate probabilities p\[group\]\[level\] = cos^2(phi/2), one group per
/// dependent variable (n - 1 groups) and one entry per qubit level.
#[derive(Debug, Clone, PartialEq)]
pub struct FabricParams {
    p: Vec<Vec<f64>>,
}

impl FabricParams {
    pub fn new(p: Vec<Vec<f64>>) -> Result<Self, CopulaError> {
        if p.is_empty() || p[0].is_empty() {
            return Err(CopulaError::BadParameter("empty fabric parameters".into()));
        }
        let levels = p[0].len();
        for row in &p {
            if row.len() != levels {
                return Err(CopulaError::BadParameter(
                    "fabric parameter rows have unequal lengths".into(),
                ));
            }
            for &v in row {
                if !(0.0..=1.0).contains(&v) || v.is_nan() {
                    return Err(CopulaError::BadParameter(format!(
                        "fabric probability {v} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(FabricParams { p })
    }

    /// Number of dependent-variable groups, n - 1.
    pub fn groups(&self) -> usize {
        self.p.len()
    }

    /// Qubit levels per variable, k.
    pub fn levels(&self) -> usize {
        self.p[0].len()
    }

    pub fn n(&self) -> usize {
        self.groups() + 1
    }

    pub fn get(&self, group: usize, level: usize) -> f64 {
        self.p[group][level]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.p
    }
}

/// Reference statistics computed from the printed closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct FabricReference {
    /// Printed trivariate k = 3 correlations (rho12, rho13, rho23); present
    /// only when the parameter shape matches (2 groups, >= 3 levels). The
    /// printed subscripts are read as (level, group) for the linear terms
    /// and as level-wise group products for the bilinear one.
    pub rho_printed: Option<[f64; 3]>,
    /// Hidden-first-variable correlation limit, truncated: for group pair
    /// (i, j), sum over levels l of 3/2^(2l+2) * p_il * p_jl.
    pub rho_hidden: Vec<Vec<f64>>,
    /// Tail coefficient products, truncated: prod over levels of p_il * p_jl.
    pub lambda_tail: Vec<Vec<f64>>,
}

/// Evaluates the printed reference formulas at a truncation depth of
/// `k_truncation` levels (capped by the available levels).
pub fn fabric_reference(params: &FabricParams, k_truncation: usize) -> FabricReference {
    let g = params.groups();
    let depth = k_truncation.min(params.levels());

    let rho_printed = (g == 2 && params.levels() >= 3).then(|| {
        let linear = |group: usize| {
            (4.0 * (params.get(group, 0) + params.get(group, 1)) - params.get(group, 2)) / 21.0
        };
        let bilinear = (16.0 * params.get(0, 0) * params.get(1, 0)
            + 4.0 * params.get(0, 1) * params.get(1, 1)
            + params.get(0, 2) * params.get(1, 2))
            / 21.0;
        [linear(0), linear(1), bilinear]
    });

    let mut rho_hidden = vec![vec![0.0; g]; g];
    let mut lambda_tail = vec![vec![1.0; g]; g];
    for i in 0..g {
        for j in 0..g {
            let mut rho = 0.0;
            let mut tail = 1.0;
            for l in 0..depth {
                let prod = params.get(i, l) * params.get(j, l);
                rho += 3.0 / f64::powi(2.0, (2 * (l + 1) + 2) as i32) * prod;
                tail *= prod;
            }
            rho_hidden[i][j] = rho;
            lambda_tail[i][j] = tail;
        }
    }
    FabricReference {
        rho_printed,
        rho_hidden,
        lambda_tail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FabricParams::new(vec![]).is_err());
        assert!(FabricParams::new(vec![vec![0.5], vec![0.5, 0.5]]).is_err());
        assert!(FabricParams::new(vec![vec![1.5]]).is_err());
        let p = FabricParams::new(vec![vec![0.1, 0.9], vec![0.4, 0.6]]).unwrap();
        assert_eq!(p.n(), 3);
        assert_eq!(p.levels(), 2);
    }

    #[test]
    fn tail_product_extremes() {
        let zeros = FabricParams::new(vec![vec![0.0; 3], vec![0.0; 3]]).unwrap();
        let r = fabric_reference(&zeros, 3);
        assert_eq!(r.lambda_tail[0][1], 0.0);

        let ones = FabricParams::new(vec![vec![1.0; 3], vec![1.0; 3]]).unwrap();
        let r = fabric_reference(&ones, 3);
        assert_eq!(r.lambda_tail[0][1], 1.0);
    }

    #[test]
    fn printed_rho_only_for_matching_shape() {
        let bivariate = FabricParams::new(vec![vec![0.5; 4]]).unwrap();
        assert!(fabric_reference(&bivariate, 4).rho_printed.is_none());

        let trivariate = FabricParams::new(vec![vec![0.5; 3], vec![0.5; 3]]).unwrap();
        let r = fabric_reference(&trivariate, 3);
        let [r12, r13, r23] = r.rho_printed.unwrap();
        assert!((r12 - (4.0 * 1.0 - 0.5) / 21.0).abs() < 1e-15);
        assert_eq!(r12, r13);
        assert!((r23 - (16.0 * 0.25 + 4.0 * 0.25 + 0.25) / 21.0).abs() < 1e-15);
    }

    #[test]
    fn hidden_rho_truncation() {
        let p = FabricParams::new(vec![vec![1.0; 3], vec![1.0; 3]]).unwrap();
        let r1 = fabric_reference(&p, 1);
        let r3 = fabric_reference(&p, 3);
        // 3/16, then + 3/64 + 3/256
        assert!((r1.rho_hidden[0][1] - 3.0 / 16.0).abs() < 1e-15);
        assert!((r3.rho_hidden[0][1] - (3.0 / 16.0 + 3.0 / 64.0 + 3.0 / 256.0)).abs() < 1e-15);
    }
}
