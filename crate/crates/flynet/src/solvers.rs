//! The four optimizers: proportional heuristic, conventional simulated
//! annealing on the raw utility, penalty-augmented annealing over a pruned
//! assignment list, and discrete exhaustive search over a position grid.
//!
//! All solvers are deterministic given their inputs and RNG seed. The
//! annealing RNG draw order is part of the reproducibility contract: per
//! iteration, one uniform per position coordinate, then the candidate
//! assignment index, then the acceptance uniform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{
    enumerate_assignments_with_cap, prune_assignments, round_down_to_channel, AssignmentError,
    BandwidthAssignment, ChannelSet, Solution, DEFAULT_ENUM_CAP,
};
use crate::channel::{ChannelError, RadioParams, D_FLOOR};
use crate::objective::{evaluate_assignment, hap_geometry, HapGeometry, PenaltyBreakdown};
use crate::scenario::{Scenario, Vec3, Zone};
use crate::Real;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error("candidate assignment list is empty (budget window [{lo} Hz, {hi} Hz])")]
    EmptyCandidateList { lo: f64, hi: f64 },
    #[error("exhaustive search would evaluate {count} candidates, above the cap of {cap}")]
    SearchCapExceeded { count: u128, cap: usize },
    #[error("temperature calibration did not converge (last acceptance {acceptance:.3})")]
    CalibrationFailed { acceptance: f64 },
}

/// Annealing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    /// Initial temperature, in utility units (bit/s).
    pub t_max: Real,
    /// Iteration count.
    pub s_max: usize,
    /// Position perturbation scale in meters.
    pub delta_z: Real,
    /// Spectrum under-utilization threshold for the pruned candidate list.
    pub beta: Real,
    pub rng_seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams { t_max: 1e8, s_max: 10_000, delta_z: 5.0, beta: 0.8, rng_seed: 0 }
    }
}

/// Exhaustive-search parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesParams {
    /// Grid edge length in meters.
    pub grid_step: Real,
    /// Ceiling on positions x assignments.
    pub enum_cap: usize,
}

impl Default for DesParams {
    fn default() -> Self {
        DesParams { grid_step: 1.0, enum_cap: DEFAULT_ENUM_CAP }
    }
}

/// Which utility the annealer optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitnessMode {
    /// Raw weighted sum-rate, constraints ignored.
    Raw,
    /// Penalized utility U = u - p_f * u.
    Penalized,
}

/// Which assignment candidate list the neighbour function samples from.
/// `Auto` gives the raw-fitness annealer the full enumeration and the
/// penalized annealer the budget-pruned list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CandidateList {
    #[default]
    Auto,
    Full,
    Pruned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub utility: Real,
    pub p_f: Real,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub best: Solution,
    pub best_breakdown: PenaltyBreakdown,
    pub iterations_run: usize,
    pub trace: Option<Vec<TraceRecord>>,
}

/// Solver identifiers used in configs and report rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    ConvH,
    ConvSa,
    Safnet,
    Des,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] =
        [SolverKind::ConvH, SolverKind::ConvSa, SolverKind::Safnet, SolverKind::Des];

    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::ConvH => "conv_h",
            SolverKind::ConvSa => "conv_sa",
            SolverKind::Safnet => "safnet",
            SolverKind::Des => "des",
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conv_h" => Ok(SolverKind::ConvH),
            "conv_sa" => Ok(SolverKind::ConvSa),
            "safnet" => Ok(SolverKind::Safnet),
            "des" => Ok(SolverKind::Des),
            other => Err(format!(
                "unknown solver '{other}', expected one of conv_h, conv_sa, safnet, des"
            )),
        }
    }
}

/// Proportional heuristic: bandwidth shares proportional to the rate
/// requirements (backhaul sized for the full requirement sum), HAP at the
/// requirement-weighted centroid of the backhaul and FEN trajectories.
pub fn conventional_heuristic(scenario: &Scenario, channels: &ChannelSet) -> Solution {
    let tau_bh: Real = scenario.fens.iter().map(|f| f.min_rate).sum();
    let tau_total = 2.0 * tau_bh;
    let budget = channels.budget;

    let backhaul_bw = round_down_to_channel(budget * tau_bh / tau_total, channels);
    let fen_bw = scenario
        .fens
        .iter()
        .map(|f| round_down_to_channel(budget * f.min_rate / tau_total, channels))
        .collect();

    let n = scenario.periods();
    let mut centroid = Vec3::ZERO;
    for t in 0..n {
        let mut acc = scenario.backhaul_pos.scale(tau_bh);
        for fen in &scenario.fens {
            acc = acc.add(fen.trajectory.positions[t].scale(fen.min_rate));
        }
        centroid = centroid.add(acc.scale(1.0 / tau_total));
    }
    let hap_pos = centroid.scale(1.0 / n as f64);

    Solution { hap_pos, assignment: BandwidthAssignment { fen_bw, backhaul_bw } }
}

/// Linear cooling: t = t_max * (s_max - s) / s_max, decreasing from t_max at
/// s = 0 to 0 at s = s_max.
pub fn cooling_temperature(s: usize, params: &SaParams) -> Real {
    debug_assert!(s <= params.s_max);
    params.t_max * (params.s_max - s) as Real / params.s_max as Real
}

fn fitness(breakdown: &PenaltyBreakdown, mode: FitnessMode) -> Real {
    match mode {
        FitnessMode::Raw => breakdown.raw_utility,
        FitnessMode::Penalized => breakdown.penalized_utility,
    }
}

/// Evaluation context shared by the annealing loop and the neighbour
/// function.
struct EvalCtx<'a> {
    scenario: &'a Scenario,
    radio: &'a RadioParams,
    channels: &'a ChannelSet,
    mode: FitnessMode,
}

impl EvalCtx<'_> {
    fn geometry(&self, pos: Vec3) -> Result<HapGeometry, ChannelError> {
        hap_geometry(self.scenario, pos, self.radio)
    }

    fn eval(&self, geom: &HapGeometry, assignment: &BandwidthAssignment) -> PenaltyBreakdown {
        evaluate_assignment(self.scenario, geom, assignment, self.channels, self.radio)
    }
}

/// One annealing proposal: perturb each position coordinate by
/// uniform(-1, 1) * delta_z, repair into the zone, then draw a candidate
/// assignment from the list and keep it only if it does not lower the
/// fitness at the new position. A position that falls inside the distance
/// floor of a node repairs back to the current position, like the zone
/// clamp; the objective is undefined there.
fn propose_neighbour<R: Rng>(
    rng: &mut R,
    current: &Solution,
    candidates: &[BandwidthAssignment],
    delta_z: Real,
    zone: &Zone,
    ctx: &EvalCtx<'_>,
) -> Result<(Solution, PenaltyBreakdown), SolverError> {
    let dx = rng.random_range(-1.0..=1.0) * delta_z;
    let dy = rng.random_range(-1.0..=1.0) * delta_z;
    let dz = rng.random_range(-1.0..=1.0) * delta_z;
    let mut pos = zone.clamp(current.hap_pos.add(Vec3::new(dx, dy, dz)));

    let geom = match ctx.geometry(pos) {
        Ok(geom) => geom,
        Err(ChannelError::BelowDistanceFloor { .. }) => {
            pos = current.hap_pos;
            ctx.geometry(pos)?
        }
        Err(e) => return Err(e.into()),
    };
    let keep = ctx.eval(&geom, &current.assignment);
    let idx = rng.random_range(0..candidates.len());
    let candidate = &candidates[idx];
    let (assignment, breakdown) = if candidate == &current.assignment {
        (current.assignment.clone(), keep)
    } else {
        let cand_eval = ctx.eval(&geom, candidate);
        if fitness(&cand_eval, ctx.mode) >= fitness(&keep, ctx.mode) {
            (candidate.clone(), cand_eval)
        } else {
            (current.assignment.clone(), keep)
        }
    };
    Ok((Solution { hap_pos: pos, assignment }, breakdown))
}

/// Public wrapper around the proposal move, for direct testing and reuse.
pub fn neighbour<R: Rng>(
    rng: &mut R,
    current: &Solution,
    candidates: &[BandwidthAssignment],
    params: &SaParams,
    scenario: &Scenario,
    radio: &RadioParams,
    channels: &ChannelSet,
    mode: FitnessMode,
) -> Result<Solution, SolverError> {
    if candidates.is_empty() {
        return Err(SolverError::EmptyCandidateList {
            lo: params.beta * channels.budget,
            hi: channels.budget,
        });
    }
    let ctx = EvalCtx { scenario, radio, channels, mode };
    propose_neighbour(rng, current, candidates, params.delta_z, &scenario.zone, &ctx)
        .map(|(s, _)| s)
}

fn candidate_assignments(
    e: usize,
    channels: &ChannelSet,
    beta: Real,
    list: CandidateList,
    mode: FitnessMode,
) -> Result<Vec<BandwidthAssignment>, SolverError> {
    let all = enumerate_assignments_with_cap(e, channels, DEFAULT_ENUM_CAP)?;
    let pruned = match list {
        CandidateList::Full => return Ok(all),
        CandidateList::Pruned => prune_assignments(&all, channels.budget, beta),
        CandidateList::Auto => match mode {
            FitnessMode::Raw => return Ok(all),
            FitnessMode::Penalized => prune_assignments(&all, channels.budget, beta),
        },
    };
    if pruned.is_empty() {
        return Err(SolverError::EmptyCandidateList {
            lo: beta * channels.budget,
            hi: channels.budget,
        });
    }
    Ok(pruned)
}

/// Simulated annealing with a linear cooling schedule and Metropolis
/// acceptance, initialized from the proportional heuristic.
///
/// `FitnessMode::Raw` with the full candidate list is the conventional
/// annealer; `FitnessMode::Penalized` with the pruned list is the
/// penalty-augmented variant.
pub fn simulated_annealing(
    scenario: &Scenario,
    radio: &RadioParams,
    channels: &ChannelSet,
    params: &SaParams,
    mode: FitnessMode,
    candidate_list: CandidateList,
    record_trace: bool,
) -> Result<SolverResult, SolverError> {
    let ctx = EvalCtx { scenario, radio, channels, mode };
    let candidates =
        candidate_assignments(scenario.fen_count(), channels, params.beta, candidate_list, mode)?;

    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let init = conventional_heuristic(scenario, channels);
    let init_breakdown = ctx.eval(&ctx.geometry(init.hap_pos)?, &init.assignment);

    let mut current = init.clone();
    let mut current_fit = fitness(&init_breakdown, mode);
    let mut best = init;
    let mut best_breakdown = init_breakdown;
    let mut best_fit = current_fit;
    let mut trace = record_trace.then(|| Vec::with_capacity(params.s_max));

    for s in 0..params.s_max {
        let t = cooling_temperature(s, params);
        let (candidate, breakdown) =
            propose_neighbour(&mut rng, &current, &candidates, params.delta_z, &scenario.zone, &ctx)?;
        let cand_fit = fitness(&breakdown, mode);
        let delta = cand_fit - current_fit;
        let r: f64 = rng.random_range(0.0..1.0);
        // at t = 0 the Metropolis rule degenerates to greedy acceptance
        let accepted = delta >= 0.0 || (t > 0.0 && r < (delta / t).exp());
        if accepted {
            current = candidate.clone();
            current_fit = cand_fit;
        }
        if cand_fit > best_fit {
            best = candidate;
            best_breakdown = breakdown;
            best_fit = cand_fit;
        }
        if let Some(trace) = trace.as_mut() {
            trace.push(TraceRecord {
                iteration: s,
                utility: cand_fit,
                p_f: breakdown.p_f,
                accepted,
            });
        }
    }

    Ok(SolverResult { best, best_breakdown, iterations_run: params.s_max, trace })
}

/// Grid points along one axis: 0, step, 2*step, ... up to the extent.
fn axis_points(extent: Real, step: Real) -> Vec<Real> {
    let k = (extent / step).floor() as usize;
    (0..=k).map(|i| i as Real * step).collect()
}

/// Discrete exhaustive search: every grid position crossed with every
/// channel assignment, scored by the penalized utility. Ties keep the first
/// candidate in (position, assignment) lexicographic order. Grid points
/// closer than the distance floor to any node are skipped.
pub fn exhaustive_search(
    scenario: &Scenario,
    radio: &RadioParams,
    channels: &ChannelSet,
    params: &DesParams,
) -> Result<SolverResult, SolverError> {
    let e = scenario.fen_count();
    let xs = axis_points(scenario.zone.size.x, params.grid_step);
    let ys = axis_points(scenario.zone.size.y, params.grid_step);
    let zs = axis_points(scenario.zone.size.z, params.grid_step);
    let positions = xs.len() as u128 * ys.len() as u128 * zs.len() as u128;
    let combos = (channels.values.len() as u128).pow(e as u32 + 1);
    let count = positions * combos;
    if count > params.enum_cap as u128 {
        return Err(SolverError::SearchCapExceeded { count, cap: params.enum_cap });
    }
    let assignments = enumerate_assignments_with_cap(e, channels, params.enum_cap)?;

    let ctx = EvalCtx { scenario, radio, channels, mode: FitnessMode::Penalized };
    let mut best: Option<(Solution, PenaltyBreakdown)> = None;
    let mut evaluated = 0usize;
    for &x in &xs {
        for &y in &ys {
            for &z in &zs {
                let pos = Vec3::new(x, y, z);
                if too_close_to_any_node(scenario, pos) {
                    continue;
                }
                let geom = ctx.geometry(pos)?;
                for assignment in &assignments {
                    let breakdown = ctx.eval(&geom, assignment);
                    evaluated += 1;
                    let better = match &best {
                        None => true,
                        Some((_, b)) => breakdown.penalized_utility > b.penalized_utility,
                    };
                    if better {
                        best = Some((
                            Solution { hap_pos: pos, assignment: assignment.clone() },
                            breakdown,
                        ));
                    }
                }
            }
        }
    }
    let (best, best_breakdown) = best.ok_or(SolverError::SearchCapExceeded {
        count: 0,
        cap: params.enum_cap,
    })?;
    Ok(SolverResult { best, best_breakdown, iterations_run: evaluated, trace: None })
}

fn too_close_to_any_node(scenario: &Scenario, pos: Vec3) -> bool {
    if scenario.backhaul_pos.distance(pos) < D_FLOOR {
        return true;
    }
    scenario
        .fens
        .iter()
        .any(|f| f.trajectory.positions.iter().any(|&p| p.distance(pos) < D_FLOOR))
}

/// Searches for a starting temperature that yields a neighbour acceptance
/// rate inside `[0.78, 0.82]` over `probes` constant-temperature iterations,
/// by bisection on t.
pub fn calibrate_t_max(
    scenario: &Scenario,
    radio: &RadioParams,
    channels: &ChannelSet,
    params: &SaParams,
    mode: FitnessMode,
    probes: usize,
) -> Result<Real, SolverError> {
    let ctx = EvalCtx { scenario, radio, channels, mode };
    let candidates = candidate_assignments(
        scenario.fen_count(),
        channels,
        params.beta,
        CandidateList::Auto,
        mode,
    )?;
    let init = conventional_heuristic(scenario, channels);
    let init_fit = fitness(&ctx.eval(&ctx.geometry(init.hap_pos)?, &init.assignment), mode);

    let acceptance = |t: Real| -> Result<f64, SolverError> {
        let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
        let mut current = init.clone();
        let mut current_fit = init_fit;
        let mut accepted = 0usize;
        for _ in 0..probes {
            let (candidate, breakdown) =
                propose_neighbour(&mut rng, &current, &candidates, params.delta_z, &scenario.zone, &ctx)?;
            let cand_fit = fitness(&breakdown, mode);
            let delta = cand_fit - current_fit;
            let r: f64 = rng.random_range(0.0..1.0);
            if delta >= 0.0 || (t > 0.0 && r < (delta / t).exp()) {
                accepted += 1;
                current = candidate;
                current_fit = cand_fit;
            }
        }
        Ok(accepted as f64 / probes as f64)
    };

    let mut lo: Real = 1.0;
    let mut hi: Real = 1e16;
    let mut last = 0.0;
    for _ in 0..80 {
        let t = (lo * hi).sqrt();
        last = acceptance(t)?;
        if (0.78..=0.82).contains(&last) {
            return Ok(t);
        }
        if last < 0.80 {
            lo = t;
        } else {
            hi = t;
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    Err(SolverError::CalibrationFailed { acceptance: last })
}
