//! Mixture specifications over set partitions and the tail-dependence
//! calibration algebra.
//!
//! Weights and tail coefficients are kept in exact rational arithmetic so the
//! calibration round trip is exact; conversion to floats happens only at the
//! circuit boundary.

use super::partition::SetPartition;
use super::{CopulaError, Ratio};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Map from (signed) set partitions of {1..n} to nonnegative mixture weights
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Mb11Spec {
    n: usize,
    entries: BTreeMap<SetPartition, Ratio>,
}

impl Mb11Spec {
    pub fn new(
        n: usize,
        entries: impl IntoIterator<Item = (SetPartition, Ratio)>,
    ) -> Result<Self, CopulaError> {
        let mut map = BTreeMap::new();
        let mut total = Ratio::zero();
        for (partition, weight) in entries {
            if partition.n() != n {
                return Err(CopulaError::BadWeights(format!(
                    "partition {partition} has dimension {}, spec has {n}",
                    partition.n()
                )));
            }
            if weight < Ratio::zero() {
                return Err(CopulaError::BadWeights(format!(
                    "negative weight {weight} on {partition}"
                )));
            }
            total += weight;
            *map.entry(partition).or_insert_with(Ratio::zero) += weight;
        }
        if !total.is_one() {
            return Err(CopulaError::BadWeights(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Mb11Spec { n, entries: map })
    }

    /// The bivariate B11 mixture alpha*M2 + (1-alpha)*Pi2; negative alpha
    /// swings the comonotone share onto the countermonotone copula (the
    /// linear-Spearman extension).
    pub fn b11(alpha: Ratio) -> Result<Self, CopulaError> {
        let one = Ratio::one();
        if alpha.abs() > one {
            return Err(CopulaError::BadWeights(format!(
                "alpha {alpha} outside [-1, 1]"
            )));
        }
        let mut entries = vec![(SetPartition::independence(2), one - alpha.abs())];
        if alpha > Ratio::zero() {
            entries.push((SetPartition::comonotone(2), alpha));
        } else if alpha < Ratio::zero() {
            entries.push((SetPartition::countermonotone2(), -alpha));
        }
        Mb11Spec::new(2, entries)
    }

    /// The bivariate Fréchet mixture alpha*M2 + beta*W2 + (1-alpha-beta)*Pi2.
    pub fn frechet2(alpha: Ratio, beta: Ratio) -> Result<Self, CopulaError> {
        let rest = Ratio::one() - alpha - beta;
        Mb11Spec::new(
            2,
            vec![
                (SetPartition::comonotone(2), alpha),
                (SetPartition::countermonotone2(), beta),
                (SetPartition::independence(2), rest),
            ],
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, partition: &SetPartition) -> Ratio {
        self.entries.get(partition).copied().unwrap_or_default()
    }

    pub fn entries(&self) -> &BTreeMap<SetPartition, Ratio> {
        &self.entries
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (&SetPartition, Ratio)> {
        self.entries
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(p, w)| (p, *w))
    }

    pub fn is_signed(&self) -> bool {
        self.nonzero_entries().any(|(p, _)| p.is_signed())
    }
}

/// Symmetric bivariate tail-dependence matrix with unit diagonal, plus the
/// optional trivariate coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct TailDependenceStructure {
    lambda2: Vec<Vec<Ratio>>,
    lambda123: Option<Ratio>,
}

impl TailDependenceStructure {
    pub fn new(lambda2: Vec<Vec<Ratio>>, lambda123: Option<Ratio>) -> Result<Self, CopulaError> {
        let n = lambda2.len();
        for (i, row) in lambda2.iter().enumerate() {
            if row.len() != n {
                return Err(CopulaError::BadWeights("matrix is not square".into()));
            }
            if !row[i].is_one() {
                return Err(CopulaError::BadWeights(format!(
                    "diagonal entry [{i}][{i}] is {}, expected 1",
                    row[i]
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v < Ratio::zero() || v > Ratio::one() {
                    return Err(CopulaError::BadWeights(format!(
                        "entry [{i}][{j}] = {v} outside [0, 1]"
                    )));
                }
                if lambda2[j][i] != v {
                    return Err(CopulaError::BadWeights("matrix is not symmetric".into()));
                }
            }
        }
        Ok(TailDependenceStructure { lambda2, lambda123 })
    }

    pub fn n(&self) -> usize {
        self.lambda2.len()
    }

    pub fn lambda2(&self) -> &[Vec<Ratio>] {
        &self.lambda2
    }

    pub fn entry(&self, i: usize, j: usize) -> Ratio {
        self.lambda2[i][j]
    }

    pub fn lambda123(&self) -> Option<Ratio> {
        self.lambda123
    }
}

/// Calibrates the five trivariate mixture weights from the pairwise tail
/// coefficients and the trivariate one. Nonnegativity of all five weights is
/// equivalent to feasibility of the requested tail structure.
pub fn mb11_weights_from_taildep(
    l12: Ratio,
    l13: Ratio,
    l23: Ratio,
    l123: Ratio,
) -> Result<Mb11Spec, CopulaError> {
    for (name, v) in [("l12", l12), ("l13", l13), ("l23", l23), ("l123", l123)] {
        if v < Ratio::zero() || v > Ratio::one() {
            return Err(CopulaError::BadWeights(format!("{name} = {v} outside [0, 1]")));
        }
    }
    let one = Ratio::one();
    let weights = [
        ("1,2,3", l123),
        ("1,2|3", l12 - l123),
        ("1,3|2", l13 - l123),
        ("1|2,3", l23 - l123),
        ("1|2|3", one - l12 - l13 - l23 + l123 + l123),
    ];
    for (name, w) in &weights {
        if *w < Ratio::zero() {
            return Err(CopulaError::Infeasible(format!(
                "tail structure gives negative weight {w} on {name}"
            )));
        }
    }
    Mb11Spec::new(
        3,
        weights
            .into_iter()
            .map(|(name, w)| (name.parse::<SetPartition>().unwrap(), w)),
    )
}

/// Pairwise tail structure realized by a mixture: entry (i, j) sums the
/// weights of partitions placing i and j in one block with equal signs. For
/// n = 3 the trivariate coefficient is the weight of the all-positive single
/// block.
pub fn taildep_from_weights(spec: &Mb11Spec) -> TailDependenceStructure {
    let n = spec.n();
    let mut lambda2 = vec![vec![Ratio::zero(); n]; n];
    for (i, row) in lambda2.iter_mut().enumerate() {
        row[i] = Ratio::one();
    }
    for (partition, weight) in spec.nonzero_entries() {
        #[allow(clippy::needless_range_loop)] // symmetric two-index update
        for i in 0..n {
            for j in (i + 1..n).filter(|&j| partition.comonotone_pair(i, j)) {
                lambda2[i][j] += weight;
                lambda2[j][i] += weight;
            }
        }
    }
    let lambda123 = (n == 3).then(|| spec.weight(&SetPartition::comonotone(3)));
    TailDependenceStructure { lambda2, lambda123 }
}

/// Realizes a bivariate tail structure whose off-diagonal mass sits in the
/// last row/column: variable n is paired with variable i at weight
/// lambda2\[n\]\[i\], the remainder goes to the independence copula. The sum of
/// all matrix entries must not exceed n + 2 (equivalently the pair weights
/// must not exceed one).
pub fn mb11_from_bivariate_structure(
    structure: &TailDependenceStructure,
    n: usize,
) -> Result<Mb11Spec, CopulaError> {
    if structure.n() != n || n < 2 {
        return Err(CopulaError::BadWeights(format!(
            "structure has dimension {}, requested {n}",
            structure.n()
        )));
    }
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            if i != j && !structure.entry(i, j).is_zero() {
                return Err(CopulaError::Infeasible(format!(
                    "entry [{i}][{j}] is nonzero; construction requires off-diagonal mass \
                     only in row/column {n}"
                )));
            }
        }
    }
    let total: Ratio = structure
        .lambda2()
        .iter()
        .flatten()
        .copied()
        .sum();
    if total > Ratio::from_integer(n as i64 + 2) {
        return Err(CopulaError::Infeasible(format!(
            "matrix entries sum to {total}, exceeding n + 2 = {}",
            n + 2
        )));
    }
    let pair_weights: Vec<Ratio> = (0..n - 1).map(|i| structure.entry(n - 1, i)).collect();
    let used: Ratio = pair_weights.iter().copied().sum();
    if used > Ratio::one() {
        return Err(CopulaError::Infeasible(format!(
            "pair weights sum to {used} > 1"
        )));
    }
    let mut entries = Vec::new();
    for (i, &w) in pair_weights.iter().enumerate() {
        if !w.is_zero() {
            entries.push((SetPartition::pair(n, i, n - 1)?, w));
        }
    }
    let rest = Ratio::one() - used;
    if !rest.is_zero() || entries.is_empty() {
        entries.push((SetPartition::independence(n), rest));
    }
    Mb11Spec::new(n, entries)
}
