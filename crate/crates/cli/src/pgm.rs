//! Binary PGM (P5) rasters: probability heatmaps of grids and sign/magnitude
//! patterns of circuit unitaries. Bit-exact and diffable, no plotting
//! dependency.

use anyhow::{bail, Result};
use qcopula::sim::UnitaryMatrix;
use qcopula::DiscreteDistribution;
use std::io::Write;

pub fn write_pgm(out: &mut dyn Write, width: usize, height: usize, bytes: &[u8]) -> Result<()> {
    assert_eq!(bytes.len(), width * height);
    write!(out, "P5\n{width} {height}\n255\n")?;
    out.write_all(bytes)?;
    Ok(())
}

/// Gray levels proportional to probability, white = largest cell. Bivariate
/// grids render as a side x side image (row = first variable); trivariate
/// grids tile the third variable's slices horizontally.
pub fn distribution_raster(
    dist: &DiscreteDistribution,
    n: usize,
    k: usize,
) -> Result<(usize, usize, Vec<u8>)> {
    let side = 1usize << k;
    let max = dist.probs().iter().cloned().fold(0.0f64, f64::max);
    let shade = |p: f64| {
        if max <= 0.0 {
            0u8
        } else {
            (255.0 * p / max).round().clamp(0.0, 255.0) as u8
        }
    };
    match n {
        2 => {
            let mut bytes = vec![0u8; side * side];
            for x1 in 0..side {
                for x2 in 0..side {
                    bytes[x1 * side + x2] = shade(dist.prob((x1 << k) | x2));
                }
            }
            Ok((side, side, bytes))
        }
        3 => {
            let width = side * side;
            let mut bytes = vec![0u8; width * side];
            for x1 in 0..side {
                for x2 in 0..side {
                    for x3 in 0..side {
                        let p = dist.prob((((x1 << k) | x2) << k) | x3);
                        bytes[x1 * width + x3 * side + x2] = shade(p);
                    }
                }
            }
            Ok((width, side, bytes))
        }
        _ => bail!("heatmaps support 2 or 3 variables, got {n}"),
    }
}

/// Signed raster of the unitary's real part: mid-gray is zero, white the
/// most positive entry, black the most negative. The builder circuits are
/// real, so the real part is the whole story.
pub fn unitary_raster(unitary: &UnitaryMatrix) -> (usize, usize, Vec<u8>) {
    let dim = unitary.dim();
    let mut max_abs = 0.0f64;
    for col in 0..dim {
        for row in 0..dim {
            max_abs = max_abs.max(unitary.get(row, col).re.abs());
        }
    }
    let mut bytes = vec![128u8; dim * dim];
    if max_abs > 0.0 {
        for row in 0..dim {
            for col in 0..dim {
                let v = unitary.get(row, col).re / max_abs;
                bytes[row * dim + col] = (128.0 + 127.0 * v).round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    (dim, dim, bytes)
}
