//! Gumbel and Clayton copula cdfs and inclusion-exclusion discretization of
//! arbitrary bivariate copula cdfs onto dyadic grids.

use super::grid::CopulaGrid;
use super::CopulaError;

/// Margin tolerance for grids obtained by discretizing an analytic cdf.
pub const DISCRETIZED_MARGIN_TOL: f64 = 1e-9;

/// Negative cell masses beyond this are treated as an invalid cdf rather
/// than round-off.
const NEGATIVE_CELL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchimedeanFamily {
    Gumbel,
    Clayton,
}

/// An Archimedean copula with its parameter; Gumbel requires theta >= 1,
/// Clayton theta > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchimedeanParams {
    pub family: ArchimedeanFamily,
    pub theta: f64,
}

impl ArchimedeanParams {
    pub fn new(family: ArchimedeanFamily, theta: f64) -> Result<Self, CopulaError> {
        let ok = match family {
            ArchimedeanFamily::Gumbel => theta >= 1.0,
            ArchimedeanFamily::Clayton => theta > 0.0,
        };
        if !ok || !theta.is_finite() {
            return Err(CopulaError::BadParameter(format!(
                "theta = {theta} invalid for {family:?}"
            )));
        }
        Ok(ArchimedeanParams { family, theta })
    }

    pub fn gumbel(theta: f64) -> Result<Self, CopulaError> {
        Self::new(ArchimedeanFamily::Gumbel, theta)
    }

    pub fn clayton(theta: f64) -> Result<Self, CopulaError> {
        Self::new(ArchimedeanFamily::Clayton, theta)
    }

    /// Cumulative distribution at (x1, x2) in [0, 1]^2. Values at zero are
    /// the limits (both families vanish there); F(1, x) = x.
    ///
    /// The Clayton cdf uses the generator-inverse exponent -1/theta; the
    /// positive exponent would violate the margin property.
    pub fn cdf(&self, x1: f64, x2: f64) -> Result<f64, CopulaError> {
        for x in [x1, x2] {
            if !(0.0..=1.0).contains(&x) || x.is_nan() {
                return Err(CopulaError::BadParameter(format!(
                    "cdf argument {x} outside [0, 1]"
                )));
            }
        }
        if x1 == 0.0 || x2 == 0.0 {
            return Ok(0.0);
        }
        let t = self.theta;
        Ok(match self.family {
            ArchimedeanFamily::Gumbel => {
                let s = (-x1.ln()).powf(t) + (-x2.ln()).powf(t);
                (-s.powf(1.0 / t)).exp()
            }
            ArchimedeanFamily::Clayton => {
                (x1.powf(-t) + x2.powf(-t) - 1.0).powf(-1.0 / t)
            }
        })
    }
}

/// Discretizes a bivariate copula cdf onto the 2^k x 2^k dyadic grid using
/// the inclusion-exclusion cell-mass formula
/// `F(h1,h2) - F(l1,h2) - F(h1,l2) + F(l1,l2)`.
///
/// Round-off negatives down to -1e-12 are zeroed; anything more negative, or
/// margins off uniform by more than 1e-9, signals an invalid input cdf.
pub fn discretize_cdf<F>(cdf: F, k: usize) -> Result<CopulaGrid, CopulaError>
where
    F: Fn(f64, f64) -> f64,
{
    let side = 1usize << k;
    let m = side as f64;
    // corner values on the (side+1)^2 lattice
    let corner = |i: usize, j: usize| cdf(i as f64 / m, j as f64 / m);
    let mut lattice = vec![0.0; (side + 1) * (side + 1)];
    for i in 0..=side {
        for j in 0..=side {
            lattice[i * (side + 1) + j] = corner(i, j);
        }
    }
    let at = |i: usize, j: usize| lattice[i * (side + 1) + j];
    let mut cells = vec![0.0; side * side];
    for c1 in 0..side {
        for c2 in 0..side {
            let mass = at(c1 + 1, c2 + 1) - at(c1, c2 + 1) - at(c1 + 1, c2) + at(c1, c2);
            if mass < -NEGATIVE_CELL_TOL {
                return Err(CopulaError::BadCdf(format!(
                    "cell ({c1},{c2}) has mass {mass}"
                )));
            }
            cells[(c1 << k) | c2] = mass.max(0.0);
        }
    }
    CopulaGrid::new(2, k, cells, DISCRETIZED_MARGIN_TOL)
}

/// Fréchet upper bound min(x1, x2): the comonotonicity cdf.
pub fn comonotone_cdf(x1: f64, x2: f64) -> f64 {
    x1.min(x2)
}

/// Product copula cdf x1 * x2.
pub fn independence_cdf(x1: f64, x2: f64) -> f64 {
    x1 * x2
}

/// Fréchet lower bound max(x1 + x2 - 1, 0): the countermonotonicity cdf.
pub fn countermonotone_cdf(x1: f64, x2: f64) -> f64 {
    (x1 + x2 - 1.0).max(0.0)
}
