//! Discrete channel-bandwidth domain: the supported channel set, assignment
//! vectors (one slot per FEN link plus one backhaul slot, backhaul last),
//! full enumeration, and the two-step budget/underuse pruning used by the
//! annealing neighbour function.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::Vec3;
use crate::Real;

/// Default ceiling on the enumeration size |C|^(E+1); beyond it exhaustive
/// search refuses to run.
pub const DEFAULT_ENUM_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssignmentError {
    #[error("channel set must be non-empty, strictly ascending and positive")]
    InvalidChannelSet,
    #[error("budget {budget} Hz is below the largest supported channel {max} Hz")]
    BudgetBelowMaxChannel { budget: f64, max: f64 },
    #[error(
        "enumeration of {count} assignments exceeds the cap of {cap}; reduce the FEN count"
    )]
    EnumerationCapExceeded { count: u128, cap: usize },
    #[error("assignment has {got} FEN slots, scenario has {expected}")]
    SlotCountMismatch { got: usize, expected: usize },
    #[error("bandwidth {0} Hz is not in the supported channel set")]
    UnsupportedBandwidth(f64),
}

/// Supported channel bandwidths (ascending, Hz) and the total band budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    pub values: Vec<Real>,
    pub budget: Real,
}

impl ChannelSet {
    pub fn new(values: Vec<Real>, budget: Real) -> Result<Self, AssignmentError> {
        let set = ChannelSet { values, budget };
        set.validate()?;
        Ok(set)
    }

    /// IEEE 802.11 channel widths {20, 40, 80, 160} MHz with a 320 MHz budget.
    pub fn default_80211() -> Self {
        ChannelSet { values: vec![20e6, 40e6, 80e6, 160e6], budget: 320e6 }
    }

    pub fn validate(&self) -> Result<(), AssignmentError> {
        if self.values.is_empty()
            || self.values[0] <= 0.0
            || self.values.windows(2).any(|w| w[0] >= w[1])
            || self.values.iter().any(|v| !v.is_finite())
        {
            return Err(AssignmentError::InvalidChannelSet);
        }
        let max = *self.values.last().unwrap();
        if self.budget < max {
            return Err(AssignmentError::BudgetBelowMaxChannel { budget: self.budget, max });
        }
        Ok(())
    }

    pub fn min_value(&self) -> Real {
        self.values[0]
    }

    pub fn contains(&self, bw: Real) -> bool {
        self.values.contains(&bw)
    }
}

/// Channel bandwidths assigned to each link: FEN slots in FEN index order,
/// backhaul slot last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthAssignment {
    pub fen_bw: Vec<Real>,
    pub backhaul_bw: Real,
}

impl BandwidthAssignment {
    pub fn total(&self) -> Real {
        self.fen_bw.iter().sum::<Real>() + self.backhaul_bw
    }

    pub fn validate(&self, channels: &ChannelSet, e: usize) -> Result<(), AssignmentError> {
        if self.fen_bw.len() != e {
            return Err(AssignmentError::SlotCountMismatch { got: self.fen_bw.len(), expected: e });
        }
        for &bw in self.fen_bw.iter().chain(std::iter::once(&self.backhaul_bw)) {
            if !channels.contains(bw) {
                return Err(AssignmentError::UnsupportedBandwidth(bw));
            }
        }
        Ok(())
    }

    /// Report form: labeled MHz integers, e.g.
    /// `{fen[0]: 80, fen[1]: 40, backhaul: 160}`.
    pub fn display_mhz(&self) -> String {
        let mut parts: Vec<String> = self
            .fen_bw
            .iter()
            .enumerate()
            .map(|(j, bw)| format!("fen[{j}]: {}", (bw / 1e6).round() as i64))
            .collect();
        parts.push(format!("backhaul: {}", (self.backhaul_bw / 1e6).round() as i64));
        format!("{{{}}}", parts.join(", "))
    }
}

/// A candidate solution: HAP position plus the bandwidth assignment.
/// Position feasibility is scored by the objective, not enforced here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub hap_pos: Vec3,
    pub assignment: BandwidthAssignment,
}

/// Enumerates all |C|^(e+1) assignments in lexicographic order over channel
/// indices, first FEN slot most significant, backhaul slot last.
pub fn enumerate_assignments(
    e: usize,
    channels: &ChannelSet,
) -> Result<Vec<BandwidthAssignment>, AssignmentError> {
    enumerate_assignments_with_cap(e, channels, DEFAULT_ENUM_CAP)
}

pub fn enumerate_assignments_with_cap(
    e: usize,
    channels: &ChannelSet,
    cap: usize,
) -> Result<Vec<BandwidthAssignment>, AssignmentError> {
    assert!(e >= 1, "need at least one FEN link");
    let k = channels.values.len();
    let slots = e + 1;
    let count = (k as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(AssignmentError::EnumerationCapExceeded { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0usize; slots];
    loop {
        out.push(BandwidthAssignment {
            fen_bw: idx[..e].iter().map(|&i| channels.values[i]).collect(),
            backhaul_bw: channels.values[idx[e]],
        });
        // odometer increment, last slot fastest
        let mut slot = slots;
        loop {
            if slot == 0 {
                return Ok(out);
            }
            slot -= 1;
            idx[slot] += 1;
            if idx[slot] < k {
                break;
            }
            idx[slot] = 0;
        }
    }
}

/// Retains assignments whose total bandwidth lies in [beta * budget, budget]:
/// drops over-budget combinations first, then spectrum-under-utilizing ones.
pub fn prune_assignments(
    all: &[BandwidthAssignment],
    budget: Real,
    beta: Real,
) -> Vec<BandwidthAssignment> {
    assert!(beta > 0.0 && beta <= 1.0, "beta must be in (0, 1]");
    let floor = beta * budget;
    all.iter()
        .filter(|a| {
            let total = a.total();
            total <= budget && total >= floor
        })
        .cloned()
        .collect()
}

/// Largest supported channel not exceeding `raw`, clamped up to the smallest
/// channel when `raw` falls below it so no link ends up with zero bandwidth.
pub fn round_down_to_channel(raw: Real, channels: &ChannelSet) -> Real {
    assert!(raw >= 0.0, "raw bandwidth must be non-negative");
    channels
        .values
        .iter()
        .rev()
        .find(|&&v| v <= raw)
        .copied()
        .unwrap_or(channels.min_value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mhz(values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| v * 1e6).collect()
    }

    #[test]
    fn enumeration_cardinality() {
        let channels = ChannelSet::default_80211();
        assert_eq!(enumerate_assignments(1, &channels).unwrap().len(), 16);
        assert_eq!(enumerate_assignments(3, &channels).unwrap().len(), 256);
        let single = ChannelSet::new(vec![20e6], 320e6).unwrap();
        let all = enumerate_assignments(2, &single).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].fen_bw, vec![20e6, 20e6]);
        assert_eq!(all[0].backhaul_bw, 20e6);
    }

    #[test]
    fn enumeration_has_no_duplicates_and_is_lexicographic() {
        let channels = ChannelSet::default_80211();
        for e in 1..=4 {
            let all = enumerate_assignments(e, &channels).unwrap();
            assert_eq!(all.len(), 4usize.pow(e as u32 + 1));
            for pair in all.windows(2) {
                let key = |a: &BandwidthAssignment| {
                    let mut v = a.fen_bw.clone();
                    v.push(a.backhaul_bw);
                    v
                };
                assert!(key(&pair[0]) < key(&pair[1]));
            }
        }
    }

    #[test]
    fn enumeration_cap() {
        let channels = ChannelSet::default_80211();
        let err = enumerate_assignments_with_cap(3, &channels, 100).unwrap_err();
        assert!(matches!(err, AssignmentError::EnumerationCapExceeded { count: 256, .. }));
    }

    #[test]
    fn pruning_window() {
        let channels = ChannelSet::default_80211();
        let all = enumerate_assignments(3, &channels).unwrap();
        let pruned = prune_assignments(&all, 320e6, 0.8);
        let feasible = BandwidthAssignment { fen_bw: mhz(&[80.0, 40.0, 40.0]), backhaul_bw: 160e6 };
        let over = BandwidthAssignment { fen_bw: mhz(&[160.0, 160.0, 160.0]), backhaul_bw: 20e6 };
        assert!(pruned.contains(&feasible));
        assert!(!pruned.contains(&over));
        // brute-force re-check of both bounds
        let expected = all.iter().filter(|a| a.total() >= 0.8 * 320e6 && a.total() <= 320e6).count();
        assert_eq!(pruned.len(), expected);
        for a in &all {
            let retained = pruned.contains(a);
            let in_window = a.total() >= 256e6 && a.total() <= 320e6;
            assert_eq!(retained, in_window);
        }
    }

    #[test]
    fn pruning_degenerate_beta_one() {
        let channels = ChannelSet::default_80211();
        let all = enumerate_assignments(1, &channels).unwrap();
        let pruned = prune_assignments(&all, 320e6, 1.0);
        assert!(!pruned.is_empty());
        for a in &pruned {
            assert_eq!(a.total(), 320e6);
        }
    }

    #[test]
    fn round_down_examples() {
        let channels = ChannelSet::default_80211();
        assert_eq!(round_down_to_channel(53.33e6, &channels), 40e6);
        assert_eq!(round_down_to_channel(160e6, &channels), 160e6);
        assert_eq!(round_down_to_channel(5e6, &channels), 20e6);
        assert_eq!(round_down_to_channel(0.0, &channels), 20e6);
    }

    #[test]
    fn round_down_is_idempotent_and_bounded() {
        let channels = ChannelSet::default_80211();
        for raw in [20e6, 21e6, 39e6, 40e6, 100e6, 159e6, 500e6] {
            let r = round_down_to_channel(raw, &channels);
            assert_eq!(round_down_to_channel(r, &channels), r);
            if raw >= channels.min_value() {
                assert!(r <= raw);
            }
        }
    }

    #[test]
    fn channel_set_validation() {
        assert!(ChannelSet::new(vec![], 320e6).is_err());
        assert!(ChannelSet::new(vec![40e6, 20e6], 320e6).is_err());
        assert!(ChannelSet::new(vec![20e6, 20e6], 320e6).is_err());
        assert!(ChannelSet::new(vec![20e6, 160e6], 100e6).is_err());
        assert!(ChannelSet::new(vec![20e6, 160e6], 160e6).is_ok());
    }

    #[test]
    fn display_mhz_labels_slots() {
        let a = BandwidthAssignment { fen_bw: mhz(&[80.0, 40.0, 40.0]), backhaul_bw: 160e6 };
        assert_eq!(a.display_mhz(), "{fen[0]: 80, fen[1]: 40, fen[2]: 40, backhaul: 160}");
    }
}
