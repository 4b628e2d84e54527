//! Joint relay positioning and discrete channel-bandwidth assignment for
//! two-tier flying networks.
//!
//! A fleet of flying edge nodes (FENs) follows known trajectories inside a
//! coverage zone; a single flying relay (HAP) forwards their traffic to a
//! fixed backhaul node. The library models the per-link radio capacity,
//! evaluates a constrained weighted sum-rate objective, and ships four
//! solvers for the joint position/assignment problem:
//!
//! - a proportional heuristic (weighted centroid + proportional bandwidth),
//! - conventional simulated annealing on the raw utility,
//! - penalty-augmented simulated annealing over a pruned assignment list,
//! - discrete exhaustive search over a position grid.
//!
//! The `metrics` and `experiment` modules turn solver outputs into
//! throughput/outage reports and seeded Monte-Carlo sweeps.

pub mod assignment;
pub mod channel;
pub mod config;
pub mod experiment;
pub mod metrics;
pub mod objective;
pub mod scenario;
pub mod solvers;

/// Scalar type used by the concrete simulation stack. The channel math in
/// [`channel`] is generic over `num_traits::Float`; everything above it is
/// instantiated at this alias.
pub type Real = f64;

pub use assignment::{BandwidthAssignment, ChannelSet, Solution};
pub use channel::RadioParams;
pub use objective::PenaltyBreakdown;
pub use scenario::{Scenario, Vec3, Zone};
pub use solvers::{SaParams, SolverResult};
