//! Solution scoring: per-link rate matrices, the raw weighted sum-rate
//! utility, the four constraint penalties, and the penalized utility
//! U = u - p_f * u used by the penalty-augmented solvers.

use serde::{Deserialize, Serialize};

use crate::assignment::{BandwidthAssignment, ChannelSet, Solution};
use crate::channel::{capacity, path_loss, snr, ChannelError, RadioParams};
use crate::scenario::{Scenario, Vec3};
use crate::Real;

/// Achieved rates per link and period, bit/s.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRates {
    /// E x N matrix: `fen_rates[j][n]` is FEN j's rate in period n.
    pub fen_rates: Vec<Vec<Real>>,
    /// Backhaul rate per period. Constant across periods while the HAP and
    /// backhaul node are static, but kept per-period for generality.
    pub backhaul_rates: Vec<Real>,
}

impl LinkRates {
    pub fn periods(&self) -> usize {
        self.backhaul_rates.len()
    }
}

/// Per-constraint penalty contributions and the resulting penalized utility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyBreakdown {
    /// Minimum-distance penalty: 1 if the HAP ever comes within d_min of a
    /// FEN (inclusive), else 0.
    pub c_d: Real,
    /// Budget penalty: 1 if the total assigned bandwidth strictly exceeds
    /// the band budget, else 0.
    pub c_bw: Real,
    /// Fraction of (FEN, period) pairs below their minimum rate, in [0, 1].
    pub c_min_total: Real,
    /// Fraction of periods where the FEN sum-rate strictly exceeds the
    /// backhaul rate, in [0, 1].
    pub c_bkh_total: Real,
    /// Sum of the four components.
    pub p_f: Real,
    /// Raw weighted time-averaged FEN sum-rate u, bit/s.
    pub raw_utility: Real,
    /// U = u - p_f * u; negative when p_f > 1.
    pub penalized_utility: Real,
}

impl PenaltyBreakdown {
    pub fn is_feasible(&self) -> bool {
        self.p_f == 0.0
    }
}

/// Path gains from one HAP position to every node over the whole timeline,
/// computed once so many assignments can be scored at that position.
#[derive(Debug, Clone)]
pub struct HapGeometry {
    /// Row-major E x N: gain of the FEN j -> HAP link in period n.
    fen_gains: Vec<Real>,
    backhaul_gain: Real,
    /// Whether any FEN comes within d_min of the HAP (inclusive) at any
    /// period.
    dmin_violated: bool,
    e: usize,
    n: usize,
}

/// Computes the per-link path gains for a candidate HAP position.
///
/// Errors if the HAP is within the distance floor of any node.
pub fn hap_geometry(
    scenario: &Scenario,
    hap_pos: Vec3,
    radio: &RadioParams,
) -> Result<HapGeometry, ChannelError> {
    let e = scenario.fen_count();
    let n = scenario.periods();
    let mut fen_gains = Vec::with_capacity(e * n);
    let mut dmin_violated = false;
    for fen in &scenario.fens {
        for &pos in &fen.trajectory.positions {
            let d = pos.distance(hap_pos);
            if d <= scenario.d_min {
                dmin_violated = true;
            }
            fen_gains.push(path_loss(d, radio.wavelength)?);
        }
    }
    let backhaul_gain = path_loss(scenario.backhaul_pos.distance(hap_pos), radio.wavelength)?;
    Ok(HapGeometry { fen_gains, backhaul_gain, dmin_violated, e, n })
}

/// Rate matrices for a full solution.
pub fn compute_link_rates(
    scenario: &Scenario,
    solution: &Solution,
    radio: &RadioParams,
) -> Result<LinkRates, ChannelError> {
    let geom = hap_geometry(scenario, solution.hap_pos, radio)?;
    Ok(rates_from_geometry(&geom, &solution.assignment, radio))
}

fn rates_from_geometry(
    geom: &HapGeometry,
    assignment: &BandwidthAssignment,
    radio: &RadioParams,
) -> LinkRates {
    let fen_rates = (0..geom.e)
        .map(|j| {
            let bw = assignment.fen_bw[j];
            (0..geom.n)
                .map(|n| rate_from_gain(geom.fen_gains[j * geom.n + n], bw, radio))
                .collect()
        })
        .collect();
    let bkh = rate_from_gain(geom.backhaul_gain, assignment.backhaul_bw, radio);
    LinkRates { fen_rates, backhaul_rates: vec![bkh; geom.n] }
}

fn rate_from_gain(gain: Real, bandwidth: Real, radio: &RadioParams) -> Real {
    capacity(bandwidth, snr(radio.tx_power, gain, bandwidth, radio.noise_psd).unwrap())
}

/// Weighted time-averaged FEN sum-rate u (the backhaul link is excluded).
pub fn raw_utility(rates: &LinkRates, weights: &[Real]) -> Real {
    let n = rates.periods() as f64;
    rates
        .fen_rates
        .iter()
        .zip(weights)
        .map(|(row, &w)| w * row.iter().sum::<Real>())
        .sum::<Real>()
        / n
}

/// Minimum-distance penalty C^d: 1 if any FEN at any period is within d_min
/// of the HAP (inclusive), else 0.
pub fn penalty_distance(scenario: &Scenario, hap_pos: Vec3) -> Real {
    let violated = scenario.fens.iter().any(|fen| {
        fen.trajectory.positions.iter().any(|&p| p.distance(hap_pos) <= scenario.d_min)
    });
    if violated {
        1.0
    } else {
        0.0
    }
}

/// Budget penalty C^BW: 1 only on strict excess over the budget, so an
/// assignment using the band exactly stays feasible.
pub fn penalty_bandwidth(assignment: &BandwidthAssignment, budget: Real) -> Real {
    if assignment.total() > budget {
        1.0
    } else {
        0.0
    }
}

/// Minimum-rate penalty: fraction of (FEN, period) pairs with
/// rate < requirement.
pub fn penalty_min_rate(rates: &LinkRates, min_rates: &[Real]) -> Real {
    let n = rates.periods();
    let e = rates.fen_rates.len();
    let violations: usize = rates
        .fen_rates
        .iter()
        .zip(min_rates)
        .map(|(row, &min)| row.iter().filter(|&&r| r < min).count())
        .sum();
    violations as f64 / (n * e) as f64
}

/// Backhaul penalty: fraction of periods where the FEN sum-rate strictly
/// exceeds the backhaul rate.
pub fn penalty_backhaul(rates: &LinkRates) -> Real {
    let n = rates.periods();
    let violations = (0..n)
        .filter(|&t| {
            let fen_sum: Real = rates.fen_rates.iter().map(|row| row[t]).sum();
            fen_sum > rates.backhaul_rates[t]
        })
        .count();
    violations as f64 / n as f64
}

/// Scores one assignment against precomputed geometry, accumulating the
/// penalties and utility in a single pass over periods and FENs.
pub fn evaluate_assignment(
    scenario: &Scenario,
    geom: &HapGeometry,
    assignment: &BandwidthAssignment,
    channels: &ChannelSet,
    radio: &RadioParams,
) -> PenaltyBreakdown {
    let e = geom.e;
    let n = geom.n;
    let c_d = if geom.dmin_violated { 1.0 } else { 0.0 };
    let c_bw = penalty_bandwidth(assignment, channels.budget);

    let fen_bw = &assignment.fen_bw;
    let backhaul_rate = rate_from_gain(geom.backhaul_gain, assignment.backhaul_bw, radio);

    let mut u = 0.0;
    let mut min_violations = 0usize;
    let mut bkh_violations = 0usize;
    for t in 0..n {
        let mut fen_sum = 0.0;
        for (j, fen) in scenario.fens.iter().enumerate() {
            let rate = rate_from_gain(geom.fen_gains[j * n + t], fen_bw[j], radio);
            if rate < fen.min_rate {
                min_violations += 1;
            }
            u += fen.weight * rate / n as f64;
            fen_sum += rate;
        }
        if fen_sum > backhaul_rate {
            bkh_violations += 1;
        }
    }
    let c_min_total = min_violations as f64 / (n * e) as f64;
    let c_bkh_total = bkh_violations as f64 / n as f64;
    let p_f = c_d + c_bw + c_min_total + c_bkh_total;
    PenaltyBreakdown {
        c_d,
        c_bw,
        c_min_total,
        c_bkh_total,
        p_f,
        raw_utility: u,
        penalized_utility: u - p_f * u,
    }
}

/// Penalized utility of a full solution.
pub fn penalized_utility(
    scenario: &Scenario,
    solution: &Solution,
    radio: &RadioParams,
    channels: &ChannelSet,
) -> Result<PenaltyBreakdown, ChannelError> {
    let geom = hap_geometry(scenario, solution.hap_pos, radio)?;
    Ok(evaluate_assignment(scenario, &geom, &solution.assignment, channels, radio))
}
