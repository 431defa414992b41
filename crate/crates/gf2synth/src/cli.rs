//! Command implementations behind the `gf2synth` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gf2synth_core::box_solvers::{SplitP2, TableKind};
use gf2synth_core::{AllToAllMode, ArchSpec, BitMatrix, Error, P2Method, Strategy, SynthOptions, TableSource};
use serde::Serialize;

use crate::cache::{save_table, TableCache};
use crate::formats::{parse_circuit, parse_matrix, write_circuit};
use crate::plan::{resolve_family, Plan};
use crate::report::{asap_depth, matrix_digest, verdicts, RunReport};

/// Default state budget for `enumerate`.
pub const DEFAULT_BUDGET: usize = 50_000_000;

#[derive(Debug, Parser)]
#[command(name = "gf2synth", version, about = "Depth-bounded CNOT synthesis on block-line architectures")]
pub struct Cli {
    /// Directory for persisted depth tables (overrides GF2SYNTH_CACHE).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a circuit for a matrix file.
    Synth {
        #[arg(short, long)]
        arch: String,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        /// Evaluate the sorting invariants after every round.
        #[arg(long)]
        check_invariants: bool,
    },
    /// Check a circuit against a matrix and an architecture.
    Verify {
        #[arg(short, long)]
        arch: String,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        circuit: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// Build a depth table and print its histogram.
    Enumerate {
        #[arg(short = 'P', long, value_parser = clap::value_parser!(u8).range(1..=3))]
        problem: u8,
        #[arg(short, long)]
        arch: String,
        /// Write the table file here.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Maximum number of stored states.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Suppress per-level progress on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// Depth statistics over random operators.
    Bench {
        /// Architecture or family with one free variable, e.g. `grid:4xc`.
        #[arg(short, long)]
        arch: String,
        /// Comma-separated qubit counts.
        #[arg(short, long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(short, long, default_value_t = 10)]
        trials: usize,
        #[arg(short, long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct StrategyArgs {
    /// All-to-all local solver mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Basic)]
    pub mode: ModeArg,
    /// Problem 2 solver for table-driven layouts.
    #[arg(long, value_enum, default_value_t = P2Arg::Auto)]
    pub p2: P2Arg,
    /// Coarse step 1 then fine steps 2 and 3 (grid:2xc, altered-grid).
    #[arg(long)]
    pub combined: bool,
}

impl StrategyArgs {
    fn strategy(&self) -> Strategy {
        Strategy {
            alltoall_mode: match self.mode {
                ModeArg::Basic => AllToAllMode::Basic,
                ModeArg::Improved => AllToAllMode::Improved,
            },
            p2_method: match self.p2 {
                P2Arg::Auto => P2Method::Auto,
                P2Arg::Exact => P2Method::Exact,
                P2Arg::Split => P2Method::Split,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Basic,
    Improved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum P2Arg {
    Auto,
    Exact,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("matrix is singular")]
    Singular,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("state budget of {budget} exceeded after {explored} states (depth {depth})")]
    Budget { budget: usize, explored: usize, depth: usize },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Singular => 3,
            CliError::Verification(_) => 4,
            CliError::Budget { .. } => 5,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Singular => CliError::Singular,
            Error::BudgetExceeded {
                budget,
                explored,
                depth,
            } => CliError::Budget {
                budget,
                explored,
                depth,
            },
            Error::NotSquare { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidArchitecture(_)
            | Error::Layout(_)
            | Error::Unsupported(_) => CliError::Input(e.to_string()),
            other => CliError::Verification(other.to_string()),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<BitMatrix, CliError> {
    parse_matrix(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_arch(s: &str) -> Result<ArchSpec, CliError> {
    s.parse().map_err(|e: Error| CliError::Input(e.to_string()))
}

fn check_size(a: &BitMatrix, arch: &ArchSpec) -> Result<(), CliError> {
    if !a.is_square() {
        return Err(CliError::Input(format!("matrix is {}x{}, not square", a.n_rows(), a.n_cols())));
    }
    if a.n_rows() != arch.n_qubits() {
        return Err(CliError::Input(format!(
            "matrix has {} rows but {arch} has {} qubits",
            a.n_rows(),
            arch.n_qubits()
        )));
    }
    Ok(())
}

fn print_json(v: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cache_for(cli_dir: Option<PathBuf>) -> TableCache {
    match cli_dir {
        Some(d) => TableCache::new(Some(d)),
        None => TableCache::from_env(),
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cache = cache_for(cli.cache_dir);
    match cli.command {
        Command::Synth {
            arch,
            input,
            output,
            strategy,
            check_invariants,
        } => cmd_synth(&cache, &arch, &input, &output, &strategy, check_invariants),
        Command::Verify {
            arch,
            input,
            circuit,
            strategy,
        } => cmd_verify(&cache, &arch, &input, &circuit, &strategy),
        Command::Enumerate {
            problem,
            arch,
            output,
            budget,
            method,
            quiet,
        } => {
            let cache = cache.with_budget(Some(budget)).with_progress(!quiet);
            cmd_enumerate(&cache, problem, &arch, output.as_deref(), method)
        }
        Command::Bench {
            arch,
            n,
            trials,
            seed,
            format,
            strategy,
        } => cmd_bench(&cache, &arch, &n, trials, seed, format, &strategy),
    }
}

fn cmd_synth(
    cache: &TableCache,
    arch: &str,
    input: &Path,
    output: &Path,
    strategy: &StrategyArgs,
    check_invariants: bool,
) -> Result<(), CliError> {
    let arch = parse_arch(arch)?;
    let a = read_matrix(input)?;
    check_size(&a, &arch)?;
    let plan = Plan::build(&arch, strategy.combined, &strategy.strategy(), cache)?;
    let opts = SynthOptions {
        check_invariants: check_invariants || SynthOptions::default().check_invariants,
    };
    let start = Instant::now();
    let circuit = plan.synth(&a, &opts)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let bound = plan.bound();
    let report = RunReport {
        digest: matrix_digest(&a),
        arch: arch.to_string(),
        strategy: plan.describe(),
        n: plan.n(),
        p: plan.layout().p,
        m: plan.layout().m,
        depth: asap_depth(&circuit),
        gates: circuit.len(),
        bound,
        elapsed_ms,
        verdicts: verdicts(&circuit, &a, plan.graph(), bound),
    };
    print_json(&report);
    if !report.verdicts.passed() {
        return Err(CliError::Verification(format!("{:?}", report.verdicts)));
    }
    fs::write(output, write_circuit(&circuit)).map_err(|e| CliError::Io(format!("{}: {e}", output.display())))
}

fn cmd_verify(
    cache: &TableCache,
    arch: &str,
    input: &Path,
    circuit: &Path,
    strategy: &StrategyArgs,
) -> Result<(), CliError> {
    let arch = parse_arch(arch)?;
    let a = read_matrix(input)?;
    check_size(&a, &arch)?;
    let c = parse_circuit(&read_text(circuit)?).map_err(|e| CliError::Input(format!("{}: {e}", circuit.display())))?;
    if c.n_qubits() != arch.n_qubits() {
        return Err(CliError::Input(format!(
            "circuit has {} qubits but {arch} has {}",
            c.n_qubits(),
            arch.n_qubits()
        )));
    }
    let start = Instant::now();
    let (graph, bound, describe, p, m) = match Plan::build(&arch, strategy.combined, &strategy.strategy(), cache) {
        Ok(plan) => (plan.graph().clone(), plan.bound(), plan.describe(), plan.layout().p, plan.layout().m),
        Err(Error::Unsupported(_)) => {
            let layout = arch.build()?;
            (layout.graph, None, "no bound".to_string(), layout.p, layout.m)
        }
        Err(e) => return Err(e.into()),
    };
    let verdicts = verdicts(&c, &a, &graph, bound);
    let report = RunReport {
        digest: matrix_digest(&a),
        arch: arch.to_string(),
        strategy: describe,
        n: a.n_rows(),
        p,
        m,
        depth: asap_depth(&c),
        gates: c.len(),
        bound,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        verdicts,
    };
    print_json(&report);
    if report.verdicts.passed() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{:?}", report.verdicts)))
    }
}

#[derive(Debug, Serialize)]
struct Histogram {
    problem: String,
    arch: String,
    method: String,
    p: usize,
    fingerprint: String,
    states: Option<usize>,
    total: u64,
    max_depth: usize,
    counts_by_depth: Vec<u64>,
    elapsed_ms: f64,
}

#[derive(Debug, Serialize)]
struct BudgetReport {
    error: &'static str,
    problem: String,
    arch: String,
    budget: usize,
    explored: usize,
    depth: usize,
}

fn cmd_enumerate(
    cache: &TableCache,
    problem: u8,
    arch_s: &str,
    output: Option<&Path>,
    method: MethodArg,
) -> Result<(), CliError> {
    let arch = parse_arch(arch_s)?;
    let layout = arch.build()?;
    let p = layout.p;
    let (kind, graph) = match problem {
        1 => (TableKind::P1, &layout.local_graph),
        2 => (TableKind::P2, &layout.local_graph),
        _ => (TableKind::P3, &layout.intra_graph),
    };
    let start = Instant::now();
    let budget_err = |e: Error| -> CliError {
        let err = CliError::from(e);
        if let CliError::Budget {
            budget,
            explored,
            depth,
        } = err
        {
            print_json(&BudgetReport {
                error: "budget exceeded",
                problem: kind.name().to_string(),
                arch: arch.to_string(),
                budget,
                explored,
                depth,
            });
        }
        err
    };
    let hist = if method == MethodArg::Split && kind == TableKind::P2 {
        if output.is_some() {
            return Err(CliError::Input("--output needs an exact table; the split method combines four".into()));
        }
        let t = |k| cache.table(k, p, graph).map_err(budget_err);
        let split = SplitP2::new(t(TableKind::P1)?, t(TableKind::FixTop)?, t(TableKind::P1Lower)?, t(TableKind::FixBottom)?)?;
        Histogram {
            problem: kind.name().to_string(),
            arch: arch.to_string(),
            method: "split".into(),
            p,
            fingerprint: graph.fingerprint(),
            states: None,
            total: split.counts_by_depth().iter().sum(),
            max_depth: split.max_depth(),
            counts_by_depth: split.counts_by_depth().to_vec(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    } else {
        let t = cache.table(kind, p, graph).map_err(budget_err)?;
        if let Some(path) = output {
            save_table(&t, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        Histogram {
            problem: kind.name().to_string(),
            arch: arch.to_string(),
            method: "exact".into(),
            p,
            fingerprint: t.fingerprint().to_string(),
            states: Some(t.len()),
            total: t.total(),
            max_depth: t.max_depth(),
            counts_by_depth: t.counts_by_depth().to_vec(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    };
    print_json(&hist);
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub arch: String,
    pub n: usize,
    pub trials: usize,
    pub mean_depth: f64,
    pub max_depth: usize,
    pub max_depth_per_n: f64,
    pub mean_gates: f64,
    pub bound: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub family: String,
    pub seed: u64,
    pub strategy: String,
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of mean depth against n.
    pub slope: Option<f64>,
}

/// Seed for trial `t` at size `n`.
pub fn trial_seed(seed: u64, n: usize, t: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ ((n as u64) << 32) ^ t as u64
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn cmd_bench(
    cache: &TableCache,
    family: &str,
    ns: &[usize],
    trials: usize,
    seed: u64,
    format: Format,
    strategy: &StrategyArgs,
) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Input("need at least one trial".into()));
    }
    let opts = SynthOptions {
        check_invariants: false,
    };
    let mut rows = Vec::new();
    let mut describe = String::new();
    for &n in ns {
        let arch = resolve_family(family, n).map_err(CliError::Input)?;
        let plan = Plan::build(&arch, strategy.combined, &strategy.strategy(), cache)?;
        describe = plan.describe();
        let bound = plan.bound();
        let (mut sum, mut max, mut gates) = (0usize, 0usize, 0usize);
        for t in 0..trials {
            let a = BitMatrix::random_invertible(n, trial_seed(seed, n, t));
            let c = plan.synth(&a, &opts)?;
            let v = verdicts(&c, &a, plan.graph(), bound);
            if !v.passed() {
                return Err(CliError::Verification(format!("{arch} trial {t}: {v:?}")));
            }
            let d = asap_depth(&c);
            sum += d;
            max = max.max(d);
            gates += c.len();
        }
        rows.push(BenchRow {
            arch: arch.to_string(),
            n,
            trials,
            mean_depth: sum as f64 / trials as f64,
            max_depth: max,
            max_depth_per_n: max as f64 / n as f64,
            mean_gates: gates as f64 / trials as f64,
            bound,
        });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mean_depth)).collect();
    let report = BenchReport {
        family: family.to_string(),
        seed,
        strategy: describe,
        slope: slope(&points),
        rows,
    };
    match format {
        Format::Json => print_json(&report),
        Format::Csv => print!("{}", bench_csv(&report)),
    }
    Ok(())
}

pub fn bench_csv(report: &BenchReport) -> String {
    let mut s = String::from("arch,n,trials,mean_depth,max_depth,max_depth_per_n,mean_gates,bound\n");
    for r in &report.rows {
        let bound = r.bound.map(|b| b.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{:.3},{},{:.4},{:.1},{}",
            r.arch, r.n, r.trials, r.mean_depth, r.max_depth, r.max_depth_per_n, r.mean_gates, bound
        );
    }
    s
}
