//! RFC-4180 CSV writers (CRLF records) for distributions, counts, and
//! estimation sweeps.

use anyhow::Result;
use qcopula::DiscreteDistribution;
use std::collections::BTreeMap;
use std::io::Write;

fn cells_of(index: usize, n: usize, k: usize) -> Vec<usize> {
    let mask = (1usize << k) - 1;
    (0..n)
        .map(|v| (index >> (k * (n - 1 - v))) & mask)
        .collect()
}

/// One row per grid cell: `x1,..,xn,probability`.
pub fn write_distribution(
    out: &mut dyn Write,
    dist: &DiscreteDistribution,
    n: usize,
    k: usize,
) -> Result<()> {
    let header: Vec<String> = (1..=n).map(|v| format!("x{v}")).collect();
    write!(out, "{},probability\r\n", header.join(","))?;
    for (index, &p) in dist.probs().iter().enumerate() {
        let coords: Vec<String> = cells_of(index, n, k)
            .into_iter()
            .map(|c| c.to_string())
            .collect();
        write!(out, "{},{}\r\n", coords.join(","), fmt(p))?;
    }
    Ok(())
}

/// Sampled counts over the copula variables: `x1,..,xn,count`.
pub fn write_counts(
    out: &mut dyn Write,
    counts: &BTreeMap<usize, u64>,
    n: usize,
    k: usize,
) -> Result<()> {
    let header: Vec<String> = (1..=n).map(|v| format!("x{v}")).collect();
    write!(out, "{},count\r\n", header.join(","))?;
    for (&index, &count) in counts {
        let coords: Vec<String> = cells_of(index, n, k)
            .into_iter()
            .map(|c| c.to_string())
            .collect();
        write!(out, "{},{count}\r\n", coords.join(","))?;
    }
    Ok(())
}

/// Sweep rows pairing the classical truth with the quantum estimate.
pub fn write_sweep(
    out: &mut dyn Write,
    key_header: &str,
    rows: &[(String, f64, f64)],
) -> Result<()> {
    write!(out, "{key_header},true,estimate\r\n")?;
    for (key, truth, estimate) in rows {
        write!(out, "{key},{},{}\r\n", fmt(*truth), fmt(*estimate))?;
    }
    Ok(())
}

/// Real parts of a unitary, one matrix row per record.
pub fn write_unitary(out: &mut dyn Write, unitary: &qcopula::sim::UnitaryMatrix) -> Result<()> {
    for row in 0..unitary.dim() {
        let fields: Vec<String> = (0..unitary.dim())
            .map(|col| fmt(unitary.get(row, col).re))
            .collect();
        write!(out, "{}\r\n", fields.join(","))?;
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    // shortest representation that parses back to the same f64
    format!("{v}")
}
