//! Evaluation metrics: per-run throughput and outage numbers, plus
//! mean/standard-deviation aggregation across seeds and sweep cells.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assignment::Solution;
use crate::channel::{ChannelError, RadioParams};
use crate::objective::compute_link_rates;
use crate::scenario::Scenario;
use crate::solvers::SolverKind;
use crate::Real;

/// One solver run on one scenario, reduced to the reported metrics.
/// `avg_fen_throughput` is the per-link average (the raw FEN sum-rate is
/// also kept, as `fen_sum_throughput`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub solver: SolverKind,
    pub seed: u64,
    pub e: usize,
    pub total_min_rate: Real,
    pub avg_fen_throughput: Real,
    pub fen_sum_throughput: Real,
    pub backhaul_throughput: Real,
    pub fen_outage: Real,
    pub backhaul_outage: Real,
}

/// Metric names in the order they appear in reports.
pub const METRIC_NAMES: [&str; 4] =
    ["avg_fen_throughput", "backhaul_throughput", "fen_outage", "backhaul_outage"];

impl RunReport {
    pub fn metric(&self, name: &str) -> Real {
        match name {
            "avg_fen_throughput" => self.avg_fen_throughput,
            "fen_sum_throughput" => self.fen_sum_throughput,
            "backhaul_throughput" => self.backhaul_throughput,
            "fen_outage" => self.fen_outage,
            "backhaul_outage" => self.backhaul_outage,
            other => panic!("unknown metric {other}"),
        }
    }
}

/// Mean, sample standard deviation and sample count for one metric cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub mean: Real,
    pub stddev: Real,
    pub count: usize,
}

/// Sweep axis to group by; the other axis is marginalized over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    E,
    TotalMinRate,
}

/// One aggregation cell: a solver at one value of the grouped axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    pub solver: SolverKind,
    /// Grouped axis value: FEN count, or total min rate in bit/s.
    pub group_value: Real,
    pub metrics: BTreeMap<String, AggregateStats>,
}

/// Full aggregation table for one grouping axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateTable {
    pub group_by: GroupBy,
    pub cells: Vec<AggregateCell>,
}

/// Computes the per-run metrics of a solution.
pub fn evaluate_solution(
    scenario: &Scenario,
    solution: &Solution,
    radio: &RadioParams,
    solver: SolverKind,
    seed: u64,
    total_min_rate: Real,
) -> Result<RunReport, ChannelError> {
    let rates = compute_link_rates(scenario, solution, radio)?;
    let e = scenario.fen_count();
    let n = scenario.periods();

    let fen_sum: Real = rates.fen_rates.iter().map(|row| row.iter().sum::<Real>()).sum::<Real>()
        / n as Real;
    let backhaul_throughput = rates.backhaul_rates.iter().sum::<Real>() / n as Real;

    let mut fen_violations = 0usize;
    for (row, fen) in rates.fen_rates.iter().zip(&scenario.fens) {
        fen_violations += row.iter().filter(|&&r| r < fen.min_rate).count();
    }
    let mut bkh_violations = 0usize;
    for t in 0..n {
        let sum: Real = rates.fen_rates.iter().map(|row| row[t]).sum();
        if sum > rates.backhaul_rates[t] {
            bkh_violations += 1;
        }
    }

    Ok(RunReport {
        solver,
        seed,
        e,
        total_min_rate,
        avg_fen_throughput: fen_sum / e as Real,
        fen_sum_throughput: fen_sum,
        backhaul_throughput,
        fen_outage: fen_violations as Real / (n * e) as Real,
        backhaul_outage: bkh_violations as Real / n as Real,
    })
}

fn mean_stddev(values: &[Real]) -> AggregateStats {
    let count = values.len();
    assert!(count >= 1, "empty aggregation group");
    let mean = values.iter().sum::<Real>() / count as Real;
    let stddev = if count == 1 {
        0.0
    } else {
        let var =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<Real>() / (count - 1) as Real;
        var.sqrt()
    };
    AggregateStats { mean, stddev, count }
}

/// Aggregates run reports per (solver, grouped-axis value), marginalizing
/// over the other sweep axis and all seeds.
pub fn aggregate(reports: &[RunReport], group_by: GroupBy) -> AggregateTable {
    assert!(!reports.is_empty(), "cannot aggregate an empty report list");
    // key ordered by (solver, group value in bit-representation order)
    let mut groups: BTreeMap<(SolverKind, u64), Vec<&RunReport>> = BTreeMap::new();
    for report in reports {
        let value = match group_by {
            GroupBy::E => report.e as Real,
            GroupBy::TotalMinRate => report.total_min_rate,
        };
        groups.entry((report.solver, value.to_bits())).or_default().push(report);
    }
    let cells = groups
        .into_iter()
        .map(|((solver, bits), members)| {
            let metrics = METRIC_NAMES
                .iter()
                .map(|&name| {
                    let values: Vec<Real> = members.iter().map(|r| r.metric(name)).collect();
                    (name.to_string(), mean_stddev(&values))
                })
                .collect();
            AggregateCell { solver, group_value: Real::from_bits(bits), metrics }
        })
        .collect();
    AggregateTable { group_by, cells }
}
