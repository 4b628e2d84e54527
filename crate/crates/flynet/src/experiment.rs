//! Sweep orchestration: expands the (solver, seed, E, rate) grid, runs the
//! solvers, and writes the report artifacts (runs.csv, aggregates.json,
//! summary.txt, optional per-run traces).

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::metrics::{aggregate, evaluate_solution, AggregateTable, GroupBy, RunReport};
use crate::objective::penalized_utility;
use crate::scenario::{derive_seed, generate_scenario, Scenario, ScenarioError};
use crate::solvers::{
    exhaustive_search, simulated_annealing, conventional_heuristic, FitnessMode, SolverError,
    SolverKind, SolverResult,
};
use crate::Real;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("solver {solver} failed on cell (e={e}, rate={rate}, seed={seed}): {source}")]
    Solver {
        solver: SolverKind,
        e: usize,
        rate: Real,
        seed: u64,
        #[source]
        source: SolverError,
    },
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error on {path}: {message}")]
    Csv { path: String, message: String },
}

/// Run-time knobs that come from the command line rather than the config
/// file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub solvers: Option<Vec<SolverKind>>,
    /// Replicate indices to run; defaults to 0..config.seeds.
    pub replicates: Option<Vec<u64>>,
    pub parallel: Option<usize>,
    pub trace: bool,
    /// When set, an exhaustive-search cell above the enumeration cap aborts
    /// the sweep instead of being skipped with a warning.
    pub strict_des: bool,
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub reports: Vec<RunReport>,
    pub warnings: Vec<String>,
    pub out_dir: PathBuf,
}

/// Scenario seed for one sweep cell. Derived from the master seed and the
/// cell coordinates so adding cells never perturbs existing ones.
pub fn cell_seed(master_seed: u64, e: usize, total_min_rate: Real, replicate: u64) -> u64 {
    derive_seed(master_seed, &[e as u64, total_min_rate.to_bits(), replicate])
}

/// Generates the scenario for one sweep cell.
pub fn build_scenario(
    config: &ExperimentConfig,
    e: usize,
    total_min_rate: Real,
    seed: u64,
) -> Result<Scenario, ScenarioError> {
    generate_scenario(
        seed,
        e,
        total_min_rate,
        config.zone(),
        config.time_grid()?,
        config.mobility.speed,
        config.backhaul_pos(),
        config.mobility.d_min,
        config.mobility.rate_split,
    )
}

/// Runs one solver on one scenario. The solver RNG seed equals the scenario
/// seed, so a cell is fully described by its coordinates.
pub fn run_solver(
    config: &ExperimentConfig,
    scenario: &Scenario,
    solver: SolverKind,
    rng_seed: u64,
    trace: bool,
) -> Result<SolverResult, SolverError> {
    let radio = config.radio_params();
    let channels = config.channel_set()?;
    match solver {
        SolverKind::ConvH => {
            let best = conventional_heuristic(scenario, &channels);
            let best_breakdown = penalized_utility(scenario, &best, &radio, &channels)?;
            Ok(SolverResult { best, best_breakdown, iterations_run: 0, trace: None })
        }
        SolverKind::ConvSa => simulated_annealing(
            scenario,
            &radio,
            &channels,
            &config.sa_params(rng_seed),
            FitnessMode::Raw,
            config.sa.conv_sa_candidates,
            trace,
        ),
        SolverKind::Safnet => simulated_annealing(
            scenario,
            &radio,
            &channels,
            &config.sa_params(rng_seed),
            FitnessMode::Penalized,
            config.sa.safnet_candidates,
            trace,
        ),
        SolverKind::Des => exhaustive_search(scenario, &radio, &channels, &config.des_params()),
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    solver: SolverKind,
    e: usize,
    rate: Real,
    replicate: u64,
    seed: u64,
}

enum CellOutcome {
    Report(Box<(RunReport, Option<Vec<crate::solvers::TraceRecord>>)>),
    Skipped(String),
}

fn run_cell(
    config: &ExperimentConfig,
    cell: &Cell,
    trace: bool,
    strict_des: bool,
) -> Result<CellOutcome, ExperimentError> {
    let scenario = build_scenario(config, cell.e, cell.rate, cell.seed)?;
    let result = match run_solver(config, &scenario, cell.solver, cell.seed, trace) {
        Ok(result) => result,
        Err(SolverError::SearchCapExceeded { count, cap }) if !strict_des => {
            return Ok(CellOutcome::Skipped(format!(
                "skipped {} on cell (e={}, rate={:e}, seed={}): {} candidates exceed cap {}",
                cell.solver, cell.e, cell.rate, cell.seed, count, cap
            )));
        }
        Err(source) => {
            return Err(ExperimentError::Solver {
                solver: cell.solver,
                e: cell.e,
                rate: cell.rate,
                seed: cell.seed,
                source,
            });
        }
    };
    let report = evaluate_solution(
        &scenario,
        &result.best,
        &config.radio_params(),
        cell.solver,
        cell.seed,
        cell.rate,
    )
    .map_err(|e| ExperimentError::Solver {
        solver: cell.solver,
        e: cell.e,
        rate: cell.rate,
        seed: cell.seed,
        source: SolverError::Channel(e),
    })?;
    Ok(CellOutcome::Report(Box::new((report, result.trace))))
}

/// Runs the full sweep and writes runs.csv, aggregates.json and summary.txt
/// into the output directory. Infeasible solutions are results, not errors.
pub fn run_experiment(
    config: &ExperimentConfig,
    opts: &RunOptions,
) -> Result<ExperimentOutput, ExperimentError> {
    config.validate()?;
    let out_dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from(&config.out_dir));
    std::fs::create_dir_all(&out_dir).map_err(|e| ExperimentError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;

    let solvers = opts.solvers.clone().unwrap_or_else(|| config.solvers.clone());
    let replicates: Vec<u64> =
        opts.replicates.clone().unwrap_or_else(|| (0..config.seeds as u64).collect());

    let mut cells = Vec::new();
    for &solver in &solvers {
        for &e in &config.sweep.e {
            for &rate in &config.sweep.total_min_rate {
                for &replicate in &replicates {
                    let seed = cell_seed(config.master_seed, e, rate, replicate);
                    cells.push(Cell { solver, e, rate, replicate, seed });
                }
            }
        }
    }

    let outcomes: Vec<Result<CellOutcome, ExperimentError>> = match opts.parallel {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("failed to build thread pool");
            pool.install(|| {
                cells
                    .par_iter()
                    .map(|cell| run_cell(config, cell, opts.trace, opts.strict_des))
                    .collect()
            })
        }
        None => cells.iter().map(|cell| run_cell(config, cell, opts.trace, opts.strict_des)).collect(),
    };

    let mut reports = Vec::new();
    let mut warnings = Vec::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        match outcome? {
            CellOutcome::Report(boxed) => {
                let (report, trace) = *boxed;
                if let Some(trace) = trace {
                    write_trace(&out_dir, cell, &trace)?;
                }
                reports.push(report);
            }
            CellOutcome::Skipped(warning) => warnings.push(warning),
        }
    }

    // canonical row order regardless of execution order
    reports.sort_by(|a, b| {
        (a.solver, a.e, a.total_min_rate.to_bits(), a.seed).cmp(&(
            b.solver,
            b.e,
            b.total_min_rate.to_bits(),
            b.seed,
        ))
    });

    write_reports_csv(&out_dir.join("runs.csv"), &reports)?;
    if !reports.is_empty() {
        let tables = Aggregates {
            by_e: aggregate(&reports, GroupBy::E),
            by_total_min_rate: aggregate(&reports, GroupBy::TotalMinRate),
        };
        write_aggregates(&out_dir.join("aggregates.json"), &tables)?;
        write_summary(&out_dir.join("summary.txt"), &tables, &warnings)?;
    }

    Ok(ExperimentOutput { reports, warnings, out_dir })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Aggregates {
    pub by_e: AggregateTable,
    pub by_total_min_rate: AggregateTable,
}

fn write_trace(
    out_dir: &Path,
    cell: &Cell,
    trace: &[crate::solvers::TraceRecord],
) -> Result<(), ExperimentError> {
    let name = format!(
        "trace_{}_e{}_r{:e}_rep{}.jsonl",
        cell.solver, cell.e, cell.rate, cell.replicate
    );
    let path = out_dir.join(name);
    let io_err = |e: std::io::Error| ExperimentError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut file = std::fs::File::create(&path).map_err(io_err)?;
    for record in trace {
        let line = serde_json::to_string(record).expect("trace record serializes");
        writeln!(file, "{line}").map_err(io_err)?;
    }
    Ok(())
}

pub fn write_reports_csv(path: &Path, reports: &[RunReport]) -> Result<(), ExperimentError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| ExperimentError::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    for report in reports {
        writer.serialize(report).map_err(|e| ExperimentError::Csv {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    writer.flush().map_err(|e| ExperimentError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn read_reports_csv(path: &Path) -> Result<Vec<RunReport>, ExperimentError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| ExperimentError::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    reader
        .deserialize()
        .collect::<Result<Vec<RunReport>, _>>()
        .map_err(|e| ExperimentError::Csv {
            path: path.display().to_string(),
            message: e.to_string(),
        })
}

pub fn write_aggregates(path: &Path, tables: &Aggregates) -> Result<(), ExperimentError> {
    let json = serde_json::to_string_pretty(tables).expect("aggregates serialize");
    std::fs::write(path, json).map_err(|e| ExperimentError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Re-aggregates an existing runs.csv without re-running any solver.
pub fn reaggregate(
    runs_csv: &Path,
    out_dir: &Path,
) -> Result<Aggregates, ExperimentError> {
    let reports = read_reports_csv(runs_csv)?;
    std::fs::create_dir_all(out_dir).map_err(|e| ExperimentError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;
    let tables = Aggregates {
        by_e: aggregate(&reports, GroupBy::E),
        by_total_min_rate: aggregate(&reports, GroupBy::TotalMinRate),
    };
    write_aggregates(&out_dir.join("aggregates.json"), &tables)?;
    write_summary(&out_dir.join("summary.txt"), &tables, &[])?;
    Ok(tables)
}

fn write_summary(
    path: &Path,
    tables: &Aggregates,
    warnings: &[String],
) -> Result<(), ExperimentError> {
    let mut text = String::new();
    for (title, table) in [
        ("grouped by FEN count", &tables.by_e),
        ("grouped by total min rate (bit/s)", &tables.by_total_min_rate),
    ] {
        text.push_str(&format!("== Aggregates {title} ==\n"));
        for cell in &table.cells {
            text.push_str(&format!("{} @ {:e}:\n", cell.solver, cell.group_value));
            for (metric, stats) in &cell.metrics {
                text.push_str(&format!(
                    "  {:<22} mean {:.4e}  stddev {:.4e}  (n={})\n",
                    metric, stats.mean, stats.stddev, stats.count
                ));
            }
        }
        text.push('\n');
    }
    if !warnings.is_empty() {
        text.push_str("== Warnings ==\n");
        for w in warnings {
            text.push_str(w);
            text.push('\n');
        }
    }
    std::fs::write(path, text).map_err(|e| ExperimentError::Io {
        path: path.display().to_string(),
        source: e,
    })
}
