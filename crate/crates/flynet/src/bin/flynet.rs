//! Command-line front end: scenario generation, single solves, full sweeps
//! and report re-aggregation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flynet::config::{ConfigError, ExperimentConfig};
use flynet::experiment::{
    build_scenario, reaggregate, run_experiment, run_solver, ExperimentError, RunOptions,
};
use flynet::metrics::evaluate_solution;
use flynet::scenario::{load_scenario, save_scenario, RateSplit};
use flynet::solvers::SolverKind;

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(name = "flynet", version, about = "Flying-relay positioning and channel assignment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Experiment config file (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario file from a seed.
    Gen {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        seed: u64,
        /// Number of FENs.
        #[arg(long)]
        fens: usize,
        /// Total minimum rate requirement across FENs, bit/s.
        #[arg(long)]
        total_min_rate: f64,
        /// Split the requirement equally instead of randomly.
        #[arg(long)]
        equal_split: bool,
        /// Output scenario file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one solver on one scenario file and print its metrics.
    Solve {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        solver: SolverKind,
        /// RNG seed for the solver (defaults to the scenario seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Emit the per-iteration trace to stdout as JSON lines.
        #[arg(long)]
        trace: bool,
    },
    /// Run the full (solver, seed, E, rate) sweep from a config file.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// Output directory (overrides the config's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated solver list (overrides the config).
        #[arg(long, value_delimiter = ',')]
        solvers: Option<Vec<SolverKind>>,
        /// Replicates to run: a count `N` or a range `A..B`.
        #[arg(long)]
        seeds: Option<String>,
        /// Run sweep cells on N worker threads.
        #[arg(long)]
        parallel: Option<usize>,
        /// Write per-iteration solver traces.
        #[arg(long)]
        trace: bool,
        /// Abort when an exhaustive-search cell exceeds the enumeration cap
        /// instead of skipping it.
        #[arg(long)]
        strict_des: bool,
    },
    /// Re-aggregate an existing runs.csv without re-running solvers.
    Report {
        /// Existing runs.csv produced by `sweep`.
        #[arg(long)]
        runs: PathBuf,
        /// Output directory for aggregates.json and summary.txt.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(arg: &ConfigArg) -> Result<ExperimentConfig, ConfigError> {
    match &arg.config {
        Some(path) => ExperimentConfig::load(path),
        None => {
            let config = ExperimentConfig::default();
            config.validate()?;
            Ok(config)
        }
    }
}

fn parse_seed_range(text: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = text.split_once("..") {
        let start: u64 = a.trim().parse().map_err(|_| format!("bad seed range '{text}'"))?;
        let end: u64 = b.trim().parse().map_err(|_| format!("bad seed range '{text}'"))?;
        if end <= start {
            return Err(format!("empty seed range '{text}'"));
        }
        Ok((start..end).collect())
    } else {
        let count: u64 = text.trim().parse().map_err(|_| format!("bad seed count '{text}'"))?;
        if count == 0 {
            return Err("seed count must be positive".into());
        }
        Ok((0..count).collect())
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let config_err = |e: ConfigError| (EXIT_CONFIG, e.to_string());
    let runtime_err = |e: String| (EXIT_RUNTIME, e);

    match cli.command {
        Command::Gen { config, seed, fens, total_min_rate, equal_split, out } => {
            let config = load_config(&config).map_err(config_err)?;
            let split = if equal_split { RateSplit::EqualSplit } else { config.mobility.rate_split };
            let mut cfg = config.clone();
            cfg.mobility.rate_split = split;
            let scenario = build_scenario(&cfg, fens, total_min_rate, seed)
                .map_err(|e| runtime_err(e.to_string()))?;
            save_scenario(&scenario, &out).map_err(|e| runtime_err(e.to_string()))?;
            println!("wrote scenario with {fens} FENs, {} periods to {}", scenario.periods(), out.display());
            Ok(())
        }
        Command::Solve { config, scenario, solver, seed, trace } => {
            let config = load_config(&config).map_err(config_err)?;
            let scenario = load_scenario(&scenario).map_err(|e| runtime_err(e.to_string()))?;
            let rng_seed = seed.unwrap_or(scenario.seed);
            let result = run_solver(&config, &scenario, solver, rng_seed, trace)
                .map_err(|e| runtime_err(e.to_string()))?;
            let total_min_rate: f64 = scenario.fens.iter().map(|f| f.min_rate).sum();
            let report = evaluate_solution(
                &scenario,
                &result.best,
                &config.radio_params(),
                solver,
                rng_seed,
                total_min_rate,
            )
            .map_err(|e| runtime_err(e.to_string()))?;

            if let Some(records) = &result.trace {
                for record in records {
                    println!("{}", serde_json::to_string(record).expect("trace serializes"));
                }
            }
            let b = &result.best_breakdown;
            let p = result.best.hap_pos;
            println!("solver:             {solver}");
            println!("hap position:       ({:.2}, {:.2}, {:.2}) m", p.x, p.y, p.z);
            println!("assignment (MHz):   {}", result.best.assignment.display_mhz());
            println!("raw utility:        {:.4e} bit/s", b.raw_utility);
            println!("penalized utility:  {:.4e} bit/s", b.penalized_utility);
            println!(
                "penalties:          c_d={} c_bw={} c_min={:.4} c_bkh={:.4} (p_f={:.4})",
                b.c_d, b.c_bw, b.c_min_total, b.c_bkh_total, b.p_f
            );
            println!("avg FEN thp:        {:.4e} bit/s", report.avg_fen_throughput);
            println!("backhaul thp:       {:.4e} bit/s", report.backhaul_throughput);
            println!("FEN outage:         {:.4}", report.fen_outage);
            println!("backhaul outage:    {:.4}", report.backhaul_outage);
            Ok(())
        }
        Command::Sweep { config, out, solvers, seeds, parallel, trace, strict_des } => {
            let config = load_config(&config).map_err(config_err)?;
            let replicates = match seeds {
                Some(text) => Some(parse_seed_range(&text).map_err(|m| (EXIT_CONFIG, m))?),
                None => None,
            };
            let opts = RunOptions {
                out_dir: out,
                solvers,
                replicates,
                parallel,
                trace,
                strict_des,
            };
            let output = run_experiment(&config, &opts).map_err(|e| match e {
                ExperimentError::Config(c) => config_err(c),
                other => runtime_err(other.to_string()),
            })?;
            for warning in &output.warnings {
                eprintln!("warning: {warning}");
            }
            println!(
                "wrote {} run reports to {}",
                output.reports.len(),
                output.out_dir.display()
            );
            Ok(())
        }
        Command::Report { runs, out } => {
            reaggregate(&runs, &out).map_err(|e| runtime_err(e.to_string()))?;
            println!("wrote aggregates to {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
