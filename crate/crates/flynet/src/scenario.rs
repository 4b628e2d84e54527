//! Mission world: coverage zone, discretized timeline, FEN trajectories,
//! backhaul node and per-FEN QoS requirements, plus seeded random scenario
//! generation and a lossless file format.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Real;

/// Tolerance on the normalized-weight sum.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Granularity of the random rate-requirement partition, bit/s.
const RATE_GRANULARITY: f64 = 1e6;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("zone dimensions must satisfy Zx > 0, Zy > 0, Zz >= 0, got {0:?}")]
    InvalidZone(Vec3),
    #[error("time grid invalid: horizon {horizon} s is not an integer multiple of period {period} s")]
    NonIntegralPeriods { horizon: f64, period: f64 },
    #[error("time grid invalid: period must be positive, got {0} s")]
    NonPositivePeriod(f64),
    #[error("scenario must contain at least one FEN")]
    NoFens,
    #[error("d_min must be positive, got {0} m")]
    NonPositiveDmin(f64),
    #[error("fen[{fen}]: trajectory has {got} positions, time grid requires {expected}")]
    TrajectoryLength { fen: usize, got: usize, expected: usize },
    #[error("fen[{fen}]: trajectory position {period} = {pos:?} lies outside the zone")]
    PositionOutsideZone { fen: usize, period: usize, pos: Vec3 },
    #[error("fen[{fen}]: weight must be positive, got {weight}")]
    NonPositiveWeight { fen: usize, weight: f64 },
    #[error("fen[{fen}]: min_rate must be positive, got {min_rate}")]
    NonPositiveMinRate { fen: usize, min_rate: f64 },
    #[error("weights not normalized: sum is {0}, expected 1")]
    WeightsNotNormalized(f64),
    #[error("fen[{fen}]: no positions given and no generator speed in the file")]
    MissingTrajectory { fen: usize },
    #[error("total_min_rate must be positive, got {0}")]
    NonPositiveTotalRate(f64),
    #[error("position {0:?} has a non-finite component")]
    NonFinitePosition(Vec3),
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario file {path}: {message}")]
    Parse { path: String, message: String },
}

/// 3D point/vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: Real,
    pub y: Real,
    pub z: Real,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: Real, y: Real, z: Real) -> Self {
        Vec3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Euclidean distance between two points.
    pub fn distance(self, other: Vec3) -> Real {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn add(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    pub fn sub(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    pub fn scale(self, k: Real) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

/// Cuboid coverage zone anchored at the origin. A zero z-extent yields a
/// planar scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub size: Vec3,
}

impl Zone {
    pub fn new(x: Real, y: Real, z: Real) -> Self {
        Zone { size: Vec3::new(x, y, z) }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.size.is_finite() && self.size.x > 0.0 && self.size.y > 0.0 && self.size.z >= 0.0)
        {
            return Err(ScenarioError::InvalidZone(self.size));
        }
        Ok(())
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= 0.0
            && p.x <= self.size.x
            && p.y >= 0.0
            && p.y <= self.size.y
            && p.z >= 0.0
            && p.z <= self.size.z
    }

    /// Closest in-zone point to `p` (component-wise clamp).
    pub fn clamp(&self, p: Vec3) -> Vec3 {
        Vec3::new(
            p.x.clamp(0.0, self.size.x),
            p.y.clamp(0.0, self.size.y),
            p.z.clamp(0.0, self.size.z),
        )
    }
}

/// Evenly spaced discrete timeline: `periods()` positions sampled every
/// `period` seconds over `horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Total horizon T in seconds.
    pub horizon: Real,
    /// Period duration in seconds.
    pub period: Real,
}

impl TimeGrid {
    pub fn new(horizon: Real, period: Real) -> Result<Self, ScenarioError> {
        let grid = TimeGrid { horizon, period };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.period > 0.0 && self.period.is_finite() && self.horizon.is_finite()) {
            return Err(ScenarioError::NonPositivePeriod(self.period));
        }
        let ratio = self.horizon / self.period;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 * n.max(1.0) {
            return Err(ScenarioError::NonIntegralPeriods {
                horizon: self.horizon,
                period: self.period,
            });
        }
        Ok(())
    }

    /// Number of time periods N.
    pub fn periods(&self) -> usize {
        (self.horizon / self.period).round() as usize
    }
}

/// Per-period positions of one FEN, fixed within each period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trajectory {
    pub positions: Vec<Vec3>,
}

/// One FEN: its trajectory, normalized utility weight, and minimum rate
/// requirement in bit/s.
#[derive(Debug, Clone, PartialEq)]
pub struct FenSpec {
    pub trajectory: Trajectory,
    pub weight: Real,
    pub min_rate: Real,
}

/// Complete mission world.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub zone: Zone,
    pub time: TimeGrid,
    pub fens: Vec<FenSpec>,
    pub backhaul_pos: Vec3,
    pub d_min: Real,
    pub seed: u64,
}

impl Scenario {
    pub fn fen_count(&self) -> usize {
        self.fens.len()
    }

    pub fn periods(&self) -> usize {
        self.time.periods()
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.zone.validate()?;
        self.time.validate()?;
        if self.fens.is_empty() {
            return Err(ScenarioError::NoFens);
        }
        if !(self.d_min > 0.0) {
            return Err(ScenarioError::NonPositiveDmin(self.d_min));
        }
        let n = self.periods();
        for (j, fen) in self.fens.iter().enumerate() {
            if !(fen.weight > 0.0) {
                return Err(ScenarioError::NonPositiveWeight { fen: j, weight: fen.weight });
            }
            if !(fen.min_rate > 0.0) {
                return Err(ScenarioError::NonPositiveMinRate { fen: j, min_rate: fen.min_rate });
            }
            if fen.trajectory.positions.len() != n {
                return Err(ScenarioError::TrajectoryLength {
                    fen: j,
                    got: fen.trajectory.positions.len(),
                    expected: n,
                });
            }
            for (i, &p) in fen.trajectory.positions.iter().enumerate() {
                if !p.is_finite() {
                    return Err(ScenarioError::NonFinitePosition(p));
                }
                if !self.zone.contains(p) {
                    return Err(ScenarioError::PositionOutsideZone { fen: j, period: i, pos: p });
                }
            }
        }
        let wsum: f64 = self.fens.iter().map(|f| f.weight).sum();
        if (wsum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(ScenarioError::WeightsNotNormalized(wsum));
        }
        Ok(())
    }
}

/// How the total minimum-rate requirement is partitioned across FENs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RateSplit {
    /// Normalized uniform(0,1) draws, rounded to 1 Mbit/s with the remainder
    /// assigned to the last FEN.
    #[default]
    Random,
    /// Equal share per FEN (toy-scenario mode).
    EqualSplit,
}

/// Stable seed derivation so that sub-streams never collide across
/// (fen index, sweep cell, replicate) coordinates.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut z = splitmix64(master ^ 0x9e37_79b9_7f4a_7c15);
    for &p in parts {
        z = splitmix64(z ^ splitmix64(p.wrapping_add(0x6a09_e667_f3bc_c909)));
    }
    z
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn uniform_in_zone<R: Rng>(rng: &mut R, zone: &Zone) -> Vec3 {
    Vec3::new(
        rng.random_range(0.0..=zone.size.x),
        rng.random_range(0.0..=zone.size.y),
        rng.random_range(0.0..=zone.size.z),
    )
}

/// Random-waypoint trajectory: pick a uniform waypoint in the zone, move
/// toward it at constant `speed`, pick a new waypoint on arrival; positions
/// sampled every `period` seconds. Stays in-zone by construction.
fn random_waypoint_trajectory<R: Rng>(
    rng: &mut R,
    zone: &Zone,
    speed: Real,
    periods: usize,
    period: Real,
) -> Trajectory {
    let mut pos = uniform_in_zone(rng, zone);
    let mut waypoint = uniform_in_zone(rng, zone);
    let mut positions = Vec::with_capacity(periods);
    let step = speed * period;
    for _ in 0..periods {
        positions.push(pos);
        let mut remaining = step;
        while remaining > 0.0 {
            let d = pos.distance(waypoint);
            if d <= remaining {
                pos = waypoint;
                remaining -= d;
                waypoint = uniform_in_zone(rng, zone);
                if pos.distance(waypoint) == 0.0 {
                    break;
                }
            } else {
                let dir = waypoint.sub(pos).scale(1.0 / d);
                pos = zone.clamp(pos.add(dir.scale(remaining)));
                remaining = 0.0;
            }
        }
    }
    Trajectory { positions }
}

/// Partitions `total` bit/s across `e` FENs. Every share is a positive
/// multiple of 1 Mbit/s except possibly the last, which absorbs the
/// remainder so the shares sum to `total` exactly.
fn partition_min_rates<R: Rng>(rng: &mut R, e: usize, total: Real, split: RateSplit) -> Vec<Real> {
    if e == 1 {
        return vec![total];
    }
    let mut rates = match split {
        RateSplit::EqualSplit => {
            let base = (total / e as f64 / RATE_GRANULARITY).floor() * RATE_GRANULARITY;
            vec![base.max(RATE_GRANULARITY); e - 1]
        }
        RateSplit::Random => {
            let draws: Vec<f64> = (0..e).map(|_| rng.random_range(0.0..1.0)).collect();
            let sum: f64 = draws.iter().sum();
            draws[..e - 1]
                .iter()
                .map(|u| {
                    ((u / sum * total / RATE_GRANULARITY).floor() * RATE_GRANULARITY)
                        .max(RATE_GRANULARITY)
                })
                .collect()
        }
    };
    let mut last = total - rates.iter().sum::<f64>();
    // keep every FEN requirement positive
    while last < RATE_GRANULARITY {
        let (idx, _) = rates
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        if rates[idx] <= RATE_GRANULARITY {
            break;
        }
        rates[idx] -= RATE_GRANULARITY;
        last += RATE_GRANULARITY;
    }
    rates.push(last);
    rates
}

/// Generates a reproducible random scenario.
///
/// Draw order is part of the contract: first per-FEN integer weights, then
/// the rate partition, then each FEN trajectory from its own sub-stream
/// derived from `(seed, fen index)`.
#[allow(clippy::too_many_arguments)]
pub fn generate_scenario(
    seed: u64,
    e: usize,
    total_min_rate: Real,
    zone: Zone,
    time: TimeGrid,
    speed: Real,
    backhaul_pos: Vec3,
    d_min: Real,
    split: RateSplit,
) -> Result<Scenario, ScenarioError> {
    zone.validate()?;
    time.validate()?;
    if e == 0 {
        return Err(ScenarioError::NoFens);
    }
    if !(total_min_rate > 0.0) {
        return Err(ScenarioError::NonPositiveTotalRate(total_min_rate));
    }
    if !(d_min > 0.0) {
        return Err(ScenarioError::NonPositiveDmin(d_min));
    }

    let mut master = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0]));
    let raw_weights: Vec<u32> = (0..e).map(|_| master.random_range(1..=5u32)).collect();
    let weight_sum: f64 = raw_weights.iter().map(|&w| w as f64).sum();
    let weights: Vec<f64> = raw_weights.iter().map(|&w| w as f64 / weight_sum).collect();

    let min_rates = partition_min_rates(&mut master, e, total_min_rate, split);

    let n = time.periods();
    let fens = (0..e)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[1, j as u64]));
            FenSpec {
                trajectory: random_waypoint_trajectory(&mut rng, &zone, speed, n, time.period),
                weight: weights[j],
                min_rate: min_rates[j],
            }
        })
        .collect();

    let scenario = Scenario { zone, time, fens, backhaul_pos, d_min, seed };
    scenario.validate()?;
    Ok(scenario)
}

// --- file format -----------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct FenFile {
    weight: f64,
    min_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    positions: Option<Vec<Vec3>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    zone: Zone,
    time: TimeGrid,
    backhaul_pos: Vec3,
    d_min: f64,
    seed: u64,
    /// Generator speed (m/s) for FENs without an explicit position list.
    #[serde(skip_serializing_if = "Option::is_none")]
    speed: Option<f64>,
    fens: Vec<FenFile>,
}

/// Writes a scenario with explicit position lists; the canonical form
/// round-trips losslessly through [`load_scenario`].
pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<(), ScenarioError> {
    let file = ScenarioFile {
        zone: scenario.zone,
        time: scenario.time,
        backhaul_pos: scenario.backhaul_pos,
        d_min: scenario.d_min,
        seed: scenario.seed,
        speed: None,
        fens: scenario
            .fens
            .iter()
            .map(|f| FenFile {
                weight: f.weight,
                min_rate: f.min_rate,
                positions: Some(f.trajectory.positions.clone()),
            })
            .collect(),
    };
    let text = toml::to_string(&file).map_err(|e| ScenarioError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    std::fs::write(path, text).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Loads and validates a scenario file. FENs without an explicit position
/// list get a random-waypoint trajectory regenerated from the file's seed
/// and `speed` field.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let file: ScenarioFile = toml::from_str(&text).map_err(|e| ScenarioError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let n = file.time.periods();
    file.time.validate()?;
    let fens = file
        .fens
        .into_iter()
        .enumerate()
        .map(|(j, f)| {
            let trajectory = match f.positions {
                Some(positions) => Trajectory { positions },
                None => {
                    let speed =
                        file.speed.ok_or(ScenarioError::MissingTrajectory { fen: j })?;
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(derive_seed(file.seed, &[1, j as u64]));
                    random_waypoint_trajectory(&mut rng, &file.zone, speed, n, file.time.period)
                }
            };
            Ok(FenSpec { trajectory, weight: f.weight, min_rate: f.min_rate })
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    let scenario = Scenario {
        zone: file.zone,
        time: file.time,
        fens,
        backhaul_pos: file.backhaul_pos,
        d_min: file.d_min,
        seed: file.seed,
    };
    scenario.validate()?;
    Ok(scenario)
}
