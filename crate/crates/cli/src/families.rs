//! Parses command-line family specifications into circuits plus their
//! classical oracle grids.

use anyhow::{anyhow, bail, Context, Result};
use num_rational::Rational64;
use qcopula::circuits::{
    benchmark4_spec, build_b11_mixed, build_b11_pure, build_benchmark4, build_fabric,
    build_frechet3_pure, build_fundamental, build_generic, build_mb11_mixed, build_mb11_pure3,
    build_mn_pin, FundamentalKind,
};
use qcopula::copula::{
    discretize_cdf, mb11_weights_from_taildep, mixture_grid, ratio_to_f64, ArchimedeanParams,
    CopulaGrid, FabricParams, Mb11Spec, Ratio, SetPartition,
};
use qcopula::Circuit;

/// A family instance resolved to a circuit, with the classical grid oracle
/// when one exists (the fabric family is margin-verified only) and the cell
/// tolerance its verification runs at.
pub struct BuiltFamily {
    pub label: String,
    pub circuit: Circuit,
    pub oracle: Option<CopulaGrid>,
    pub tolerance: f64,
}

/// Raw family parameters as they arrive from the command line.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct FamilyArgs {
    /// Copula family: m2, w2, pi, b11-pure, b11-mixed, mn-pin, mb11-mixed,
    /// mb11-pure3, frechet3, benchmark4, generic, fabric
    #[arg(long)]
    pub family: Option<String>,
    /// Qubits per copula variable
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Number of variables (pi, mn-pin)
    #[arg(long)]
    pub n: Option<usize>,
    /// Mixing coefficient, rational ("1/3") or decimal ("0.5")
    #[arg(long)]
    pub alpha: Option<String>,
    /// Countermonotone weight of the bivariate Fréchet mixture (frechet2)
    #[arg(long)]
    pub beta: Option<String>,
    /// Archimedean parameter theta (generic family)
    #[arg(long)]
    pub theta: Option<f64>,
    /// Archimedean family for generic: gumbel or clayton
    #[arg(long)]
    pub copula: Option<String>,
    /// Tail coefficients "l12,l13,l23,l123" calibrating the trivariate
    /// mixture
    #[arg(long)]
    pub lambda: Option<String>,
    /// Explicit mixture weights "1,2,3=1/16;1,-2|3=..." over set partitions
    #[arg(long)]
    pub weights: Option<String>,
    /// Fabric parameters, one row per group: "0.3,0.5;0.7,0.1"
    #[arg(long)]
    pub p: Option<String>,
    /// Grid CSV file providing the target copula (generic family)
    #[arg(long)]
    pub grid: Option<std::path::PathBuf>,
}

/// Exact rational from "p/q", a decimal string, or an integer.
pub fn parse_ratio(s: &str) -> Result<Rational64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().context("bad numerator")?;
        let den: i64 = den.trim().parse().context("bad denominator")?;
        if den == 0 {
            bail!("zero denominator in '{s}'");
        }
        return Ok(Rational64::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 15 {
            bail!("decimal '{s}' has too many digits for exact conversion");
        }
        let negative = int.starts_with('-');
        let int_part: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().context("bad integer part")?
        };
        let frac_part: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().context("bad fractional part")?
        };
        let scale = 10i64.pow(frac.len() as u32);
        let magnitude = int_part.abs() * scale + frac_part;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Rational64::new(signed, scale));
    }
    Ok(Rational64::from_integer(s.parse().context("bad integer")?))
}

fn parse_lambda(s: &str) -> Result<Mb11Spec> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        bail!("--lambda needs four coefficients l12,l13,l23,l123");
    }
    let vals: Vec<Rational64> = parts
        .iter()
        .map(|p| parse_ratio(p))
        .collect::<Result<_>>()?;
    Ok(mb11_weights_from_taildep(
        vals[0], vals[1], vals[2], vals[3],
    )?)
}

fn parse_weights(s: &str, n_hint: Option<usize>) -> Result<Mb11Spec> {
    let mut entries = Vec::new();
    for item in s.split(';') {
        let (partition, weight) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("weight entry '{item}' needs partition=weight"))?;
        let partition: SetPartition = partition
            .trim()
            .parse()
            .map_err(|e| anyhow!("bad partition '{partition}': {e}"))?;
        entries.push((partition, parse_ratio(weight)?));
    }
    let n = n_hint.unwrap_or_else(|| entries.iter().map(|(p, _)| p.n()).max().unwrap_or(0));
    // re-parse each partition at the common dimension to catch mismatches
    let entries: Vec<(SetPartition, Ratio)> = entries
        .into_iter()
        .map(|(p, w)| {
            let blocks = p
                .blocks()
                .iter()
                .map(|b| b.to_vec())
                .collect::<Vec<_>>();
            Ok((SetPartition::new(n.max(p.n()), blocks)?, w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mb11Spec::new(n, entries)?)
}

fn mixture_from_args(args: &FamilyArgs, n_hint: Option<usize>) -> Result<Mb11Spec> {
    match (&args.lambda, &args.weights) {
        (Some(l), None) => parse_lambda(l),
        (None, Some(w)) => parse_weights(w, n_hint),
        (Some(_), Some(_)) => bail!("--lambda and --weights are mutually exclusive"),
        (None, None) => bail!("this family needs --lambda or --weights"),
    }
}

fn fabric_params(s: &str) -> Result<FabricParams> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<f64>().context("bad fabric probability"))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(FabricParams::new(rows)?)
}

/// Reads a grid CSV (`x1,..,xn,probability` rows) into a margin-checked
/// copula grid.
pub fn read_grid_csv(text: &str) -> Result<CopulaGrid> {
    let mut rows = Vec::new();
    let mut n = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r').trim();
        if line.is_empty() || (i == 0 && line.starts_with('x')) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            bail!("grid row '{line}' needs coordinates and a probability");
        }
        n = fields.len() - 1;
        let coords: Vec<usize> = fields[..n]
            .iter()
            .map(|f| f.trim().parse().context("bad cell coordinate"))
            .collect::<Result<_>>()?;
        let p: f64 = fields[n].trim().parse().context("bad probability")?;
        rows.push((coords, p));
    }
    if rows.is_empty() {
        bail!("grid file is empty");
    }
    let side = rows
        .iter()
        .flat_map(|(c, _)| c.iter())
        .max()
        .map(|m| m + 1)
        .unwrap_or(0);
    if !side.is_power_of_two() {
        bail!("grid side {side} is not a power of two");
    }
    let k = side.trailing_zeros() as usize;
    let mut cells = vec![0.0; side.pow(n as u32)];
    for (coords, p) in rows {
        let mut idx = 0usize;
        for &c in &coords {
            idx = (idx << k) | c;
        }
        cells[idx] = p;
    }
    Ok(CopulaGrid::new(n, k, cells, 1e-9)?)
}

fn alpha_ratio(args: &FamilyArgs) -> Result<Rational64> {
    parse_ratio(
        args.alpha
            .as_deref()
            .ok_or_else(|| anyhow!("this family needs --alpha"))?,
    )
}

/// Builds the requested family instance with its oracle.
pub fn build_family(args: &FamilyArgs) -> Result<BuiltFamily> {
    let family = args
        .family
        .as_deref()
        .ok_or_else(|| anyhow!("--family is required"))?;
    let k = args.k;
    match family {
        "m2" | "w2" | "pi" => {
            let (kind, n) = match family {
                "m2" => (FundamentalKind::M2, 2),
                "w2" => (FundamentalKind::W2, 2),
                _ => (FundamentalKind::Pi, args.n.unwrap_or(2)),
            };
            let circuit = build_fundamental(kind, k, n)?;
            let partition = match family {
                "m2" => SetPartition::comonotone(2),
                "w2" => SetPartition::countermonotone2(),
                _ => SetPartition::independence(n),
            };
            let oracle = qcopula::copula::canonical_grid(&partition, k)?;
            Ok(BuiltFamily {
                label: format!("{family} k={k}"),
                circuit,
                oracle: Some(oracle),
                tolerance: 1e-12,
            })
        }
        "b11-pure" | "b11-mixed" => {
            let alpha = alpha_ratio(args)?;
            let alpha_f = ratio_to_f64(alpha);
            let circuit = if family == "b11-pure" {
                build_b11_pure(alpha_f, k)?
            } else {
                build_b11_mixed(alpha_f, k)?
            };
            let oracle = mixture_grid(&Mb11Spec::b11(alpha)?, k)?;
            Ok(BuiltFamily {
                label: format!("{family} alpha={alpha} k={k}"),
                circuit,
                oracle: Some(oracle),
                tolerance: 1e-12,
            })
        }
        "mn-pin" => {
            let alpha = alpha_ratio(args)?;
            let n = args.n.unwrap_or(3);
            let circuit = build_mn_pin(ratio_to_f64(alpha), n)?;
            let spec = Mb11Spec::new(
                n,
                vec![
                    (SetPartition::comonotone(n), alpha),
                    (
                        SetPartition::independence(n),
                        Ratio::from_integer(1) - alpha,
                    ),
                ],
            )?;
            Ok(BuiltFamily {
                label: format!("mn-pin alpha={alpha} n={n}"),
                circuit,
                oracle: Some(mixture_grid(&spec, 1)?),
                tolerance: 1e-12,
            })
        }
        "frechet2" => {
            let alpha = alpha_ratio(args)?;
            let beta = parse_ratio(
                args.beta
                    .as_deref()
                    .ok_or_else(|| anyhow!("frechet2 needs --beta"))?,
            )?;
            let spec = Mb11Spec::frechet2(alpha, beta)?;
            let circuit = build_mb11_mixed(&spec, k)?;
            Ok(BuiltFamily {
                label: format!("frechet2 alpha={alpha} beta={beta} k={k}"),
                circuit,
                oracle: Some(mixture_grid(&spec, k)?),
                tolerance: 1e-12,
            })
        }
        "mb11-mixed" | "mb11-pure3" | "frechet3" => {
            let n_hint = if family == "mb11-mixed" { None } else { Some(3) };
            let spec = mixture_from_args(args, n_hint)?;
            let circuit = match family {
                "mb11-mixed" => build_mb11_mixed(&spec, k)?,
                "mb11-pure3" => build_mb11_pure3(&spec, k)?,
                _ => build_frechet3_pure(&spec, k)?,
            };
            let tolerance = if family == "mb11-mixed" { 1e-12 } else { 1e-10 };
            Ok(BuiltFamily {
                label: format!("{family} k={k}"),
                circuit,
                oracle: Some(mixture_grid(&spec, k)?),
                tolerance,
            })
        }
        "benchmark4" => {
            let circuit = build_benchmark4(k)?;
            Ok(BuiltFamily {
                label: format!("benchmark4 k={k}"),
                circuit,
                oracle: Some(mixture_grid(&benchmark4_spec(), k)?),
                tolerance: 1e-12,
            })
        }
        "generic" => {
            let grid = if let Some(path) = &args.grid {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                read_grid_csv(&text)?
            } else {
                let theta = args
                    .theta
                    .ok_or_else(|| anyhow!("generic needs --theta (or --grid)"))?;
                let params = match args.copula.as_deref() {
                    Some("gumbel") | None => ArchimedeanParams::gumbel(theta)?,
                    Some("clayton") => ArchimedeanParams::clayton(theta)?,
                    Some(other) => bail!("unknown copula '{other}', expected gumbel or clayton"),
                };
                discretize_cdf(|a, b| params.cdf(a, b).unwrap_or(0.0), k)?
            };
            let k = grid.k();
            let circuit = build_generic(&grid, k)?;
            Ok(BuiltFamily {
                label: format!("generic k={k}"),
                circuit,
                oracle: Some(grid),
                tolerance: 1e-10,
            })
        }
        "fabric" => {
            let params = fabric_params(
                args.p
                    .as_deref()
                    .ok_or_else(|| anyhow!("fabric needs --p"))?,
            )?;
            let n = params.n();
            let k = params.levels();
            let circuit = build_fabric(&params, n, k)?;
            Ok(BuiltFamily {
                label: format!("fabric n={n} k={k}"),
                circuit,
                oracle: None,
                tolerance: 1e-12,
            })
        }
        other => bail!("unknown family '{other}'"),
    }
}
