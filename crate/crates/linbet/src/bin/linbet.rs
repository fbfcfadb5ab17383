//! Command-line front end: seeded experiment runs, the paired reproduction
//! study, validation suites, the lower-bound environment and scaling fits.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use linbet::algo::AutoOr;
use linbet::env::{lower_bound_floor, lower_bound_instance};
use linbet::harness::{
    self, PlotMetric, emit_plot, fit_scaling_exponent, read_aggregate_csv, write_aggregate_csv,
    write_runs_csv,
};
use linbet::{
    AlgoConfig, AlgoKind, BanditInstance, Error, InstanceSpec, Result, TruncationConvention,
};

#[derive(Parser)]
#[command(name = "linbet", version, about = "Heavy-tailed linear bandit simulator")]
struct Cli {
    /// Worker threads for parallel repetitions (default: LINBET_JOBS or all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one instance and export CSV + plot.
    Run(RunArgs),
    /// Reproduce the paired comparison study on datasets S1-S4.
    Reproduce(ReproduceArgs),
    /// Execute fast invariant suites.
    Validate(ValidateArgs),
    /// Run the two-point lower-bound environment and compare to the floor.
    Lowerbound(LowerboundArgs),
    /// Fit the empirical regret growth exponent over several horizons.
    Scaling(ScalingArgs),
    /// Render an SVG from a previously exported aggregate CSV.
    Plot(PlotArgs),
}

#[derive(Args, Clone)]
struct AlgoArgs {
    /// Algorithm: menu, tofu, mom or crt.
    #[arg(long)]
    algo: String,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Override epsilon (defaults to the instance's).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Moment bound (b or c depending on the algorithm); defaults to the
    /// instance's declared bound.
    #[arg(long)]
    moment_bound: Option<f64>,
    /// Bound on ||theta*||; defaults to the instance's.
    #[arg(long, name = "s-bound")]
    s_bound: Option<f64>,
    /// TOFU truncation convention: proof or literal.
    #[arg(long, default_value = "proof")]
    truncation_convention: String,
}

impl AlgoArgs {
    fn to_config(&self) -> Result<AlgoConfig> {
        let mut cfg = AlgoConfig::new(AlgoKind::parse(&self.algo)?);
        cfg.lambda = self.lambda;
        cfg.delta = self.delta;
        cfg.epsilon = self.epsilon;
        if let Some(b) = self.moment_bound {
            cfg.moment_bound = AutoOr::Value(b);
        }
        if let Some(s) = self.s_bound {
            cfg.s = AutoOr::Value(s);
        }
        cfg.truncation_convention = match self.truncation_convention.as_str() {
            "proof" => TruncationConvention::Proof,
            "literal" => TruncationConvention::AlgorithmLine4,
            other => {
                return Err(Error::invalid_config(format!(
                    "unknown truncation convention {other:?} (expected proof or literal)"
                )))
            }
        };
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Dataset id (s1-s4) or a path to an instance JSON file.
    #[arg(long)]
    dataset: String,
    #[command(flatten)]
    algo: AlgoArgs,
    /// Horizon T.
    #[arg(long, short = 'T', default_value_t = 10_000)]
    horizon: u64,
    #[arg(long, default_value_t = 10)]
    reps: u32,
    #[arg(long, default_value_t = 20240001)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Skip the SVG render.
    #[arg(long)]
    no_plot: bool,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long, default_value_t = 10)]
    reps: u32,
    #[arg(long, default_value_t = 20240001)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Restrict to a subset of datasets (default: s1 s2 s3 s4).
    #[arg(long = "dataset", num_args = 1..)]
    datasets: Option<Vec<String>>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Suite name; omit to run all suites.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = 12345)]
    seed: u64,
}

#[derive(Args)]
struct LowerboundArgs {
    /// Even ambient dimension.
    #[arg(long, short = 'd', default_value_t = 2)]
    dim: usize,
    #[arg(long, short = 'T', default_value_t = 10_000)]
    horizon: u64,
    #[arg(long, default_value_t = 10)]
    reps: u32,
    #[arg(long, default_value_t = 20240001)]
    seed: u64,
    #[command(flatten)]
    algo: AlgoArgs,
    /// Output directory (optional; prints JSON to stdout regardless).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    dataset: String,
    #[command(flatten)]
    algo: AlgoArgs,
    /// Horizons to sweep.
    #[arg(long, num_args = 1.., required = true)]
    horizons: Vec<u64>,
    #[arg(long, default_value_t = 5)]
    reps: u32,
    #[arg(long, default_value_t = 20240001)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Aggregate CSV produced by run/reproduce.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Metric: payoff or regret.
    #[arg(long, default_value = "payoff")]
    metric: String,
    #[arg(long, default_value = "aggregate curves")]
    title: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    reps: u32,
    jobs: usize,
    args: Vec<String>,
}

fn write_manifest(dir: &Path, command: &str, seed: u64, reps: u32) -> Result<()> {
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        reps,
        jobs: rayon::current_num_threads(),
        args: std::env::args().collect(),
    };
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

fn load_instance(dataset: &str, seed: u64) -> Result<BanditInstance> {
    let lower = dataset.to_ascii_lowercase();
    if matches!(lower.as_str(), "s1" | "s2" | "s3" | "s4") {
        BanditInstance::generate(&InstanceSpec::Dataset { dataset: lower }, seed)
    } else if Path::new(dataset).exists() {
        BanditInstance::from_json(&std::fs::read_to_string(dataset)?)
    } else {
        Err(Error::invalid_config(format!(
            "dataset {dataset:?} is neither a known id (s1-s4) nor an existing JSON file"
        )))
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = args.algo.to_config()?;
    let instance = load_instance(&args.dataset, args.seed)?;
    std::fs::create_dir_all(&args.out)?;
    let records = harness::run_experiment(&instance, &cfg, args.horizon, args.reps, args.seed)?;
    let agg = harness::aggregate(&records)?;
    write_runs_csv(&args.out.join("runs.csv"), &records)?;
    write_aggregate_csv(&args.out.join("aggregate.csv"), std::slice::from_ref(&agg))?;
    std::fs::write(&args.out.join("instance.json"), instance.to_json()?)?;
    if !args.no_plot {
        emit_plot(
            &args.out.join("cum_payoff.svg"),
            &format!("{}: cumulative payoff, T = {}", instance.dataset, args.horizon),
            PlotMetric::CumPayoff,
            std::slice::from_ref(&agg),
        )?;
    }
    write_manifest(&args.out, "run", args.seed, args.reps)?;
    println!(
        "{} on {}: {} reps, {} effective rounds, mean final payoff {:.4}, mean final regret {:.4}",
        agg.algo,
        agg.dataset,
        agg.reps,
        agg.rounds(),
        agg.final_mean_payoff(),
        agg.final_mean_regret()
    );
    Ok(())
}

/// The paired study: MENU vs MoM on the finite-variance datasets at T = 20000
/// and TOFU vs CRT on the Pareto datasets at T = 10000.
const REPRODUCE_PAIRS: &[(&str, AlgoKind, AlgoKind, u64)] = &[
    ("s1", AlgoKind::Menu, AlgoKind::Mom, 20_000),
    ("s2", AlgoKind::Menu, AlgoKind::Mom, 20_000),
    ("s3", AlgoKind::Tofu, AlgoKind::Crt, 10_000),
    ("s4", AlgoKind::Tofu, AlgoKind::Crt, 10_000),
];

fn cmd_reproduce(args: &ReproduceArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let wanted: Option<Vec<String>> = args
        .datasets
        .as_ref()
        .map(|v| v.iter().map(|s| s.to_ascii_lowercase()).collect());
    for &(dataset, new_algo, base_algo, horizon) in REPRODUCE_PAIRS {
        if let Some(w) = &wanted {
            if !w.iter().any(|d| d == dataset) {
                continue;
            }
        }
        let instance =
            BanditInstance::generate(&InstanceSpec::Dataset { dataset: dataset.into() }, args.seed)?;
        let mut curves = Vec::new();
        for algo in [new_algo, base_algo] {
            let cfg = AlgoConfig::new(algo);
            let records =
                harness::run_experiment(&instance, &cfg, horizon, args.reps, args.seed)?;
            write_runs_csv(
                &args.out.join(format!("{dataset}_{algo}_runs.csv")),
                &records,
            )?;
            curves.push(harness::aggregate(&records)?);
        }
        write_aggregate_csv(&args.out.join(format!("{dataset}_aggregate.csv")), &curves)?;
        emit_plot(
            &args.out.join(format!("{dataset}_cum_payoff.svg")),
            &format!("{}: cumulative payoff, T = {horizon}", dataset.to_uppercase()),
            PlotMetric::CumPayoff,
            &curves,
        )?;
        println!(
            "{dataset}: {} final payoff {:.1} (std {:.1}) vs {} final payoff {:.1} (std {:.1})",
            curves[0].algo,
            curves[0].final_mean_payoff(),
            curves[0].final_std_payoff(),
            curves[1].algo,
            curves[1].final_mean_payoff(),
            curves[1].final_std_payoff(),
        );
    }
    write_manifest(&args.out, "reproduce", args.seed, args.reps)?;
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<bool> {
    let reports = match &args.suite {
        Some(s) => vec![linbet::validate::run_suite(s, args.seed)?],
        None => linbet::validate::run_all(args.seed)?,
    };
    let mut all_ok = true;
    for r in &reports {
        for c in &r.checks {
            println!(
                "[{}] {}::{} — {}",
                if c.passed { "PASS" } else { "FAIL" },
                r.suite,
                c.name,
                c.detail
            );
        }
        all_ok &= r.passed;
    }
    Ok(all_ok)
}

#[derive(Serialize)]
struct LowerboundReport {
    dim: usize,
    epsilon: f64,
    horizon: u64,
    delta_gap: f64,
    algo: String,
    reps: u32,
    mean_final_regret: f64,
    std_final_regret: f64,
    floor: f64,
    above_floor: bool,
}

fn cmd_lowerbound(args: &LowerboundArgs) -> Result<()> {
    let epsilon = args.algo.epsilon.unwrap_or(1.0);
    let lb = lower_bound_instance(args.dim, epsilon, args.horizon, args.seed)?;
    let cfg = args.algo.to_config()?;
    let records =
        harness::run_experiment(&lb.instance, &cfg, args.horizon, args.reps, args.seed)?;
    let finals: Vec<f64> = records.iter().map(|r| r.final_regret()).collect();
    let mean = finals.iter().sum::<f64>() / finals.len() as f64;
    let var =
        finals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / finals.len() as f64;
    let floor = lower_bound_floor(args.dim, epsilon, args.horizon);
    let report = LowerboundReport {
        dim: args.dim,
        epsilon,
        horizon: args.horizon,
        delta_gap: lb.delta_gap,
        algo: cfg.algo.as_str().into(),
        reps: args.reps,
        mean_final_regret: mean,
        std_final_regret: var.sqrt(),
        floor,
        above_floor: mean >= floor,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        write_runs_csv(&dir.join("runs.csv"), &records)?;
        std::fs::write(dir.join("lowerbound.json"), serde_json::to_string_pretty(&report)?)?;
        write_manifest(dir, "lowerbound", args.seed, args.reps)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScalingReport {
    dataset: String,
    algo: String,
    points: Vec<(f64, f64)>,
    slope: f64,
    intercept: f64,
    r2: f64,
}

fn cmd_scaling(args: &ScalingArgs) -> Result<()> {
    let cfg = args.algo.to_config()?;
    let instance = load_instance(&args.dataset, args.seed)?;
    let mut points = Vec::new();
    for &horizon in &args.horizons {
        let records =
            harness::run_experiment(&instance, &cfg, horizon, args.reps, args.seed)?;
        let mean =
            records.iter().map(|r| r.final_regret()).sum::<f64>() / records.len() as f64;
        points.push((horizon as f64, mean));
        eprintln!("T = {horizon}: mean final regret {mean:.4}");
    }
    let fit = fit_scaling_exponent(&points)?;
    let report = ScalingReport {
        dataset: instance.dataset.clone(),
        algo: cfg.algo.as_str().into(),
        points,
        slope: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("scaling.json"), serde_json::to_string_pretty(&report)?)?;
        write_manifest(dir, "scaling", args.seed, args.reps)?;
    }
    Ok(())
}

fn cmd_plot(args: &PlotArgs) -> Result<()> {
    let curves = read_aggregate_csv(&args.input)?;
    let metric = match args.metric.as_str() {
        "payoff" => PlotMetric::CumPayoff,
        "regret" => PlotMetric::CumRegret,
        other => {
            return Err(Error::invalid_config(format!(
                "unknown metric {other:?} (expected payoff or regret)"
            )))
        }
    };
    emit_plot(&args.out, &args.title, metric, &curves)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Reproduce(a) => cmd_reproduce(a).map(|_| true),
        Command::Validate(a) => cmd_validate(a),
        Command::Lowerbound(a) => cmd_lowerbound(a).map(|_| true),
        Command::Scaling(a) => cmd_scaling(a).map(|_| true),
        Command::Plot(a) => cmd_plot(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let jobs = cli.jobs.or_else(|| {
        std::env::var("LINBET_JOBS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    });
    if let Some(n) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: failed to configure {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ (Error::InvalidConfig(_) | Error::InvalidInput(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
