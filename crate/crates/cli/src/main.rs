//! `sliced`: command-line driver for the distances and experiments in
//! `sliced-core`.
//!
//! Exit codes: 0 success, 1 bad input or I/O, 2 a checked inequality
//! failed, 3 numerical non-convergence. `SLICED_THREADS` sets the size of the
//! worker pool.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use sliced_core::harness::{
    self, ExperimentConfig, ExperimentKind, SampleDesign, TransformCheck, TransformCheckConfig,
};
use sliced_core::ot_exact::{dual_gap, w1_exact_with, SolverConfig, DEFAULT_SIZE_CAP};
use sliced_core::slicing::{self, SlicedEstimate};
use sliced_core::{DiscreteMeasure, Error};

const THREADS_ENV: &str = "SLICED_THREADS";

#[derive(Parser)]
#[command(name = "sliced", version, about = "Wasserstein, sliced and k-plane sliced distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo SW_p over uniform directions
    Sw(SwArgs),
    /// Lower bound on the max-sliced distance by random search and refinement
    Msw(MswArgs),
    /// Monte Carlo k-plane sliced W1 with exact transport in each plane
    Swk(SwkArgs),
    /// Exact W1 by network simplex
    W1(W1Args),
    /// Sliced W1 on a fixed direction set
    EmpiricalSw(EmpiricalArgs),
    /// Counterexample family and the Gaussian example
    Counterexample {
        #[command(subcommand)]
        which: CounterexampleCommand,
    },
    /// Hilbert and Riesz transform checks
    TransformChecks(TransformArgs),
    /// Implied constants over a random corpus and the counterexample
    Audit(ExperimentArgs),
    /// Exponent scan of the counterexample family
    Scan(ExperimentArgs),
}

#[derive(Subcommand)]
enum CounterexampleCommand {
    /// SW1 and the W1 lower bound over an eps grid, with log-log slopes
    Scan(ScanArgs),
    /// Closed-form SW1 and W1 for the degenerate Gaussian pair, with Monte Carlo
    Gaussian(GaussianArgs),
}

#[derive(Args)]
struct PairArgs {
    /// first measure (.json or .csv with the weight in the last column)
    #[arg(long)]
    mu: PathBuf,
    /// second measure
    #[arg(long)]
    nu: PathBuf,
}

#[derive(Args)]
struct OutArg {
    /// write the JSON result here instead of stdout
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SwArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 500)]
    n_directions: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct MswArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value_t = 64)]
    n_candidates: usize,
    #[arg(long, default_value_t = 40)]
    n_refine: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SwkArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    n_frames: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct W1Args {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,
    /// dump the plan and potentials to this file
    #[arg(long)]
    plan_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct EmpiricalArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// JSON array of unit vectors; without it, quasi-uniform directions are
    /// generated from --n-directions and --seed
    #[arg(long)]
    directions: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    n_directions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// comma-separated, strictly decreasing
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// CSV output
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    json: OutArg,
}

#[derive(Args)]
struct GaussianArgs {
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// eps values for the Monte Carlo comparison
    #[arg(long, value_delimiter = ',', conflicts_with = "no_mc")]
    mc_eps: Option<Vec<f64>>,
    /// closed-form curves only
    #[arg(long)]
    no_mc: bool,
    #[arg(long)]
    n_atoms: Option<usize>,
    #[arg(long)]
    n_directions: Option<usize>,
    #[arg(long, value_enum)]
    design: Option<Design>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    json: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Design {
    Iid,
    Lattice,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    HilbertDecay,
    RieszDecay,
    Representation,
    RieszDecomp,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Riesz decay on the bump itself instead of a zero-mean derivative
    #[arg(long)]
    nonzero_mean: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON config; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    seed: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    n_instances: Option<usize>,
    #[arg(long)]
    n_directions: Option<usize>,
    /// CSV output
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    json: OutArg,
    /// print the effective config and exit
    #[arg(long)]
    print_config: bool,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Check(String),
    NonConvergence(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Quadrature(_) | Error::Solver(_) => Failure::NonConvergence(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn load_pair(p: &PairArgs) -> Result<(DiscreteMeasure, DiscreteMeasure), Failure> {
    let load = |path: &Path| {
        DiscreteMeasure::load(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    };
    Ok((load(&p.mu)?, load(&p.nu)?))
}

fn write_text(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, out: &OutArg) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).expect("result serializes");
    text.push('\n');
    match &out.json {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_sw(a: SwArgs) -> Outcome {
    let (mu, nu) = load_pair(&a.pair)?;
    emit(&slicing::sw(&mu, &nu, a.p, a.n_directions, a.seed)?, &a.out)
}

fn run_msw(a: MswArgs) -> Outcome {
    let (mu, nu) = load_pair(&a.pair)?;
    emit(&slicing::msw(&mu, &nu, a.n_candidates, a.n_refine, a.seed)?, &a.out)
}

fn run_swk(a: SwkArgs) -> Outcome {
    let (mu, nu) = load_pair(&a.pair)?;
    let config = SolverConfig { size_cap: a.size_cap };
    emit(&slicing::sw_k_with(&mu, &nu, a.k, a.n_frames, a.seed, &config)?, &a.out)
}

fn run_w1(a: W1Args) -> Outcome {
    let (mu, nu) = load_pair(&a.pair)?;
    let plan = w1_exact_with(&mu, &nu, &SolverConfig { size_cap: a.size_cap })?;
    if let Some(path) = &a.plan_out {
        write_text(path, &(plan.to_json_pretty() + "\n"))?;
    }
    let result = json!({
        "value": plan.cost,
        "dual_gap": dual_gap(&plan)?,
        "marginal_error": plan.marginal_error(),
        "n_source": mu.len(),
        "n_target": nu.len(),
    });
    emit(&result, &a.out)
}

fn run_empirical(a: EmpiricalArgs) -> Outcome {
    let (mu, nu) = load_pair(&a.pair)?;
    let dirs: Vec<Vec<f64>> = match &a.directions {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
        }
        None => slicing::deterministic_directions(mu.dim(), a.n_directions, a.seed)?,
    };
    let value = slicing::empirical_sw(&mu, &nu, &dirs)?;
    emit(
        &SlicedEstimate {
            value,
            std_error: 0.0,
            n_directions: dirs.len(),
            seed: a.seed,
            best_direction: None,
        },
        &a.out,
    )
}

fn run_counterexample_scan(a: ScanArgs) -> Outcome {
    let mut cfg = ExperimentConfig::default_for(ExperimentKind::Scan);
    cfg.dims = vec![a.d];
    if let Some(eps) = a.eps {
        cfg.eps_grid = eps;
    }
    let report = harness::run_exponent_scan(&cfg)?;
    if let Some(path) = &a.out {
        write_text(path, &report.to_csv())?;
    }
    emit(&report, &a.json)
}

fn run_gaussian(a: GaussianArgs) -> Outcome {
    let mut cfg = ExperimentConfig::default_for(ExperimentKind::Gaussian);
    if let Some(eps) = a.eps {
        cfg.eps_grid = eps;
    }
    if let Some(mc) = a.mc_eps {
        cfg.mc_eps = mc;
    }
    if a.no_mc {
        cfg.mc_eps.clear();
    }
    if let Some(n) = a.n_atoms {
        cfg.n_atoms = n;
    }
    if let Some(n) = a.n_directions {
        cfg.n_directions = n;
    }
    if let Some(seed) = a.seed {
        cfg.seeds = vec![seed];
    }
    if let Some(d) = a.design {
        cfg.sample_design = match d {
            Design::Iid => SampleDesign::Iid,
            Design::Lattice => SampleDesign::Lattice,
        };
    }
    let report = harness::run_gaussian_repro(&cfg)?;
    if let Some(path) = &a.out {
        write_text(path, &report.to_csv())?;
    }
    emit(&report, &a.json)?;
    if !report.w1_column_exact() {
        return Err(Failure::Check("W1 column differs from eps * E|Z|".into()));
    }
    Ok(())
}

fn run_transform(a: TransformArgs) -> Outcome {
    let which = match a.which {
        Which::HilbertDecay => TransformCheck::HilbertDecay,
        Which::RieszDecay => TransformCheck::RieszDecay,
        Which::Representation => TransformCheck::Representation,
        Which::RieszDecomp => TransformCheck::RieszDecomp,
    };
    let cfg = TransformCheckConfig {
        which,
        d: a.d,
        k: a.k,
        zero_mean: !a.nonzero_mean,
    };
    emit(&harness::run_transform_check(&cfg)?, &a.out)
}

fn experiment_config(kind: ExperimentKind, a: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let cfg = ExperimentConfig::from_json_str(&text)?;
            if cfg.experiment != kind {
                return Err(Failure::Input(format!("{} is not a config for this subcommand", path.display())));
            }
            cfg
        }
        None => ExperimentConfig::default_for(kind),
    };
    if let Some(s) = &a.seed {
        cfg.seeds = s.clone();
    } else if std::env::var_os("CI").is_some() {
        return Err(Failure::Input("--seed is required when CI is set".into()));
    }
    if let Some(d) = &a.d {
        cfg.dims = d.clone();
    }
    if let Some(e) = &a.eps {
        cfg.eps_grid = e.clone();
    }
    if let Some(n) = a.n_instances {
        cfg.n_instances = n;
    }
    if let Some(n) = a.n_directions {
        cfg.n_directions = n;
    }
    if a.out.is_some() {
        cfg.output.csv = a.out.clone();
    }
    if a.json.json.is_some() {
        cfg.output.json = a.json.json.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_audit(a: ExperimentArgs) -> Outcome {
    let cfg = experiment_config(ExperimentKind::Audit, &a)?;
    if a.print_config {
        println!("{}", cfg.to_json_pretty());
        return Ok(());
    }
    let audit = harness::run_bound_audit(&cfg)?;
    if let Some(path) = &cfg.output.csv {
        write_text(path, &audit.to_csv())?;
    }
    emit(&audit, &a.json)?;
    if !audit.violations.is_empty() {
        return Err(Failure::Check(audit.violations.join("; ")));
    }
    Ok(())
}

fn run_scan(a: ExperimentArgs) -> Outcome {
    let cfg = experiment_config(ExperimentKind::Scan, &a)?;
    if a.print_config {
        println!("{}", cfg.to_json_pretty());
        return Ok(());
    }
    let report = harness::run_exponent_scan(&cfg)?;
    if let Some(path) = &cfg.output.csv {
        write_text(path, &report.to_csv())?;
    }
    emit(&report, &a.json)
}

fn init_threads() -> Result<(), Failure> {
    let Some(raw) = std::env::var_os(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .to_str()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("{THREADS_ENV} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for failed checks
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = init_threads().and_then(|()| match cli.command {
        Command::Sw(a) => run_sw(a),
        Command::Msw(a) => run_msw(a),
        Command::Swk(a) => run_swk(a),
        Command::W1(a) => run_w1(a),
        Command::EmpiricalSw(a) => run_empirical(a),
        Command::Counterexample { which } => match which {
            CounterexampleCommand::Scan(a) => run_counterexample_scan(a),
            CounterexampleCommand::Gaussian(a) => run_gaussian(a),
        },
        Command::TransformChecks(a) => run_transform(a),
        Command::Audit(a) => run_audit(a),
        Command::Scan(a) => run_scan(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(2)
        }
        Err(Failure::NonConvergence(m)) => {
            eprintln!("did not converge: {m}");
            ExitCode::from(3)
        }
    }
}
