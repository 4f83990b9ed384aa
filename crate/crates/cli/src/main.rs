//! Command-line front end: build, simulate, sample, verify, estimate, and
//! export copula circuits.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qcopula_cli::families::{build_family, parse_ratio, BuiltFamily, FamilyArgs};
use qcopula_cli::{csvout, json, pgm, qasm};
use qcopula::circuits::build_b11_pure;
use qcopula::copula::{mixture_grid, ratio_to_f64, CopulaGrid, Mb11Spec};
use qcopula::riskq::{
    estimate_cdf_point, estimate_cqep, estimate_var, true_cdf, true_event_probability, AeConfig,
    LossModel,
};
use qcopula::{Circuit, DiscreteDistribution};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "qcopula",
    about = "Quantum copula circuits: synthesis, simulation, verification, and risk estimation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a copula circuit and write it as JSON or OpenQASM 2.0
    Build(BuildArgs),
    /// Simulate a circuit and emit the marginal copula distribution
    Simulate(SimulateArgs),
    /// Draw seeded measurement samples from a circuit
    Sample(SampleArgs),
    /// Check a circuit against its classical oracle and the copula
    /// invariants; exit code reports the outcome
    Verify(VerifyArgs),
    /// Value-at-Risk experiment: true vs amplitude-estimated loss CDF
    Var(VarArgs),
    /// Conditional quantile exceedance probability experiment
    Cqep(CqepArgs),
    /// Render a circuit's unitary matrix structure
    Unitary(UnitaryArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Output format: json or qasm
    #[arg(long, default_value = "json")]
    format: String,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Circuit file (.json or .qasm) instead of a family specification
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a PGM heatmap of the distribution
    #[arg(long)]
    heatmap: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Args)]
struct VarArgs {
    /// B11 mixing coefficient of the risk model copula
    #[arg(long, default_value = "1/2")]
    alpha: String,
    /// Qubits per copula variable
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Phase estimation qubits
    #[arg(long, default_value_t = 7)]
    m: usize,
    /// Also bisect for the Value-at-Risk threshold at this level
    #[arg(long)]
    level: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CqepArgs {
    #[arg(long, default_value = "1/2")]
    alpha: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 7)]
    m: usize,
    /// Comma-separated quantile indices (default: every grid level)
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UnitaryArgs {
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Output format: pgm or csv
    #[arg(long, default_value = "pgm")]
    format: String,
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Build(args) => cmd_build(args).map(|_| 0),
        Command::Simulate(args) => cmd_simulate(args).map(|_| 0),
        Command::Sample(args) => cmd_sample(args).map(|_| 0),
        Command::Verify(args) => cmd_verify(args),
        Command::Var(args) => cmd_var(args).map(|_| 0),
        Command::Cqep(args) => cmd_cqep(args).map(|_| 0),
        Command::Unitary(args) => cmd_unitary(args).map(|_| 0),
    }
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Ok(json::from_json(&text)?),
        Some("qasm") => Ok(qasm::from_qasm(&text)?),
        _ => bail!(
            "unknown circuit format for {}; use .json or .qasm",
            path.display()
        ),
    }
}

fn resolve_circuit(circuit: &Option<PathBuf>, family: &FamilyArgs) -> Result<Circuit> {
    match circuit {
        Some(path) => load_circuit(path),
        None => Ok(build_family(family)?.circuit),
    }
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    let built = build_family(&args.family)?;
    let bytes = match args.format.as_str() {
        "json" => json::to_json(&built.circuit).into_bytes(),
        "qasm" => qasm::to_qasm(&built.circuit).0.into_bytes(),
        other => bail!("unknown build format '{other}', expected json or qasm"),
    };
    write_output(args.out.as_deref(), &bytes)
}

fn layout_shape(circuit: &Circuit) -> Result<(usize, usize)> {
    let n = circuit.layout.num_variables();
    let k = circuit.layout.resolution();
    if n == 0 || k == 0 {
        bail!("circuit has no variable layout; cannot marginalize");
    }
    Ok((n, k))
}

fn simulate_distribution(circuit: &Circuit) -> Result<DiscreteDistribution> {
    let state = circuit.run()?;
    Ok(circuit.variable_distribution(&state)?)
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let circuit = resolve_circuit(&args.circuit, &args.family)?;
    let (n, k) = layout_shape(&circuit)?;
    let dist = simulate_distribution(&circuit)?;
    let mut buf = Vec::new();
    match args.format.as_str() {
        "csv" => csvout::write_distribution(&mut buf, &dist, n, k)?,
        "json" => {
            let doc = serde_json::json!({
                "variables": n,
                "qubits_per_variable": k,
                "probabilities": dist.probs(),
            });
            buf = serde_json::to_vec_pretty(&doc)?;
        }
        other => bail!("unknown simulate format '{other}', expected csv or json"),
    }
    write_output(args.out.as_deref(), &buf)?;
    if let Some(path) = &args.heatmap {
        let (w, h, bytes) = pgm::distribution_raster(&dist, n, k)?;
        let mut file = fs::File::create(path)?;
        pgm::write_pgm(&mut file, w, h, &bytes)?;
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let circuit = resolve_circuit(&args.circuit, &args.family)?;
    let (n, k) = layout_shape(&circuit)?;
    let state = circuit.run()?;
    let raw = state.sample(args.shots, args.seed);
    // aggregate full-register outcomes down to the copula variables
    let keep = circuit.layout.variable_qubits();
    let top = keep.len() - 1;
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for (index, count) in raw {
        let mut outcome = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            outcome |= ((index >> q) & 1) << (top - pos);
        }
        *counts.entry(outcome).or_insert(0) += count;
    }
    let mut buf = Vec::new();
    csvout::write_counts(&mut buf, &counts, n, k)?;
    write_output(args.out.as_deref(), &buf)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let BuiltFamily {
        label,
        circuit,
        oracle,
        tolerance,
    } = build_family(&args.family)?;
    let (n, k) = layout_shape(&circuit)?;
    println!("verify: {label}");
    println!(
        "qubits: {} total ({n} variables x {k} + {} control)",
        circuit.num_qubits,
        circuit.layout.controls.len()
    );
    let dist = simulate_distribution(&circuit)?;
    let mut pass = true;
    if let Some(grid) = &oracle {
        let mut worst = 0.0f64;
        for (p, g) in dist.probs().iter().zip(grid.cells()) {
            worst = worst.max((p - g).abs());
        }
        let ok = worst <= tolerance;
        pass &= ok;
        println!(
            "max |quantum - classical| cell error: {worst:.3e} (tolerance {tolerance:.0e}): {}",
            verdict(ok)
        );
    }
    let margin_tol = if args.family.family.as_deref() == Some("generic") {
        1e-9
    } else {
        1e-12
    };
    let as_grid = CopulaGrid::new(n, k, dist.probs().to_vec(), f64::INFINITY)?;
    let (axis, deviation) = as_grid.worst_margin_deviation();
    let ok = deviation <= margin_tol;
    pass &= ok;
    println!(
        "max margin deviation: {deviation:.3e} on axis {axis} (tolerance {margin_tol:.0e}): {}",
        verdict(ok)
    );
    println!("result: {}", verdict(pass));
    Ok(if pass { 0 } else { 1 })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn risk_instance(alpha: &str, k: usize) -> Result<(Circuit, CopulaGrid, LossModel)> {
    let alpha = parse_ratio(alpha)?;
    let circuit = build_b11_pure(ratio_to_f64(alpha), k)?;
    let grid = mixture_grid(&Mb11Spec::b11(alpha)?, k)?;
    Ok((circuit, grid, LossModel::bit_concatenation(k)))
}

fn cmd_var(args: VarArgs) -> Result<()> {
    let (circuit, grid, model) = risk_instance(&args.alpha, args.k)?;
    let config = AeConfig::new(args.m).map_err(|e| anyhow!(e))?;
    let truth = true_cdf(&grid, &model);
    let mut rows = Vec::new();
    for (v, true_p) in &truth {
        let estimate = estimate_cdf_point(&model, &circuit, *v, config)?;
        rows.push((format!("{v}"), *true_p, estimate));
    }
    let mut buf = Vec::new();
    csvout::write_sweep(&mut buf, "v", &rows)?;
    write_output(args.out.as_deref(), &buf)?;
    if let Some(level) = args.level {
        let var = estimate_var(&model, &circuit, level, config)?;
        println!("VaR({level}) = {var}");
    }
    Ok(())
}

fn cmd_cqep(args: CqepArgs) -> Result<()> {
    let (circuit, grid, _) = risk_instance(&args.alpha, args.k)?;
    let config = AeConfig::new(args.m).map_err(|e| anyhow!(e))?;
    let side = 1usize << args.k;
    let q_list: Vec<usize> = match &args.q {
        Some(list) => list
            .split(',')
            .map(|s| s.trim().parse().context("bad quantile index"))
            .collect::<Result<_>>()?,
        None => (0..side).collect(),
    };
    let mut rows = Vec::new();
    for q in q_list {
        let truth = true_event_probability(&grid, q) / (1.0 - q as f64 / side as f64);
        let estimate = estimate_cqep(&circuit, q, config)?;
        rows.push((format!("{q}"), truth, estimate));
    }
    let mut buf = Vec::new();
    csvout::write_sweep(&mut buf, "q_index", &rows)?;
    write_output(args.out.as_deref(), &buf)
}

fn cmd_unitary(args: UnitaryArgs) -> Result<()> {
    let circuit = resolve_circuit(&args.circuit, &args.family)?;
    let unitary = circuit.unitary()?;
    match args.format.as_str() {
        "pgm" => {
            let (w, h, bytes) = pgm::unitary_raster(&unitary);
            let mut file = fs::File::create(&args.out)?;
            pgm::write_pgm(&mut file, w, h, &bytes)?;
        }
        "csv" => {
            let mut buf = Vec::new();
            csvout::write_unitary(&mut buf, &unitary)?;
            fs::write(&args.out, buf)?;
        }
        other => bail!("unknown unitary format '{other}', expected pgm or csv"),
    }
    Ok(())
}
