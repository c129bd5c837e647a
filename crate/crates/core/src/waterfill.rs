//! Single-receiver water-filling with per-channel power caps.
//!
//! Both directions share the clamp structure
//! `p_m = clamp(level - 1/g_m, 0, cap_m)`. The total power is piecewise
//! linear in the level and the rate is piecewise `A·log2(level) + c`, with
//! breakpoints at `1/g_m` (channel opens) and `1/g_m + cap_m` (channel
//! saturates). Sorting the `2M` breakpoints and sweeping them locates the
//! level in closed form, so no iterative root finding is needed.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::bits;

/// Parallel channels seen by one receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelVector {
    /// Gain-to-noise ratios `α/η`, per watt.
    gains: Vec<f64>,
    caps: Vec<f64>,
}

impl ChannelVector {
    pub fn new(gains: Vec<f64>, caps: Vec<f64>) -> Result<Self> {
        if gains.len() != caps.len() {
            return Err(Error::Channel(format!(
                "{} gains but {} caps",
                gains.len(),
                caps.len()
            )));
        }
        if let Some(g) = gains.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(Error::Channel(format!(
                "gain {g} is not a nonnegative number"
            )));
        }
        if let Some(c) = caps.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(Error::Channel(format!("cap {c} is not positive")));
        }
        Ok(ChannelVector { gains, caps })
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn caps(&self) -> &[f64] {
        &self.caps
    }

    /// Rate with every positive-gain channel at its cap.
    pub fn saturated_rate(&self) -> f64 {
        self.gains
            .iter()
            .zip(&self.caps)
            .map(|(&g, &c)| bits(g * c))
            .sum()
    }

    /// `Σ log2(1 + g_m p_m)`.
    pub fn rate(&self, powers: &[f64]) -> f64 {
        self.gains
            .iter()
            .zip(powers)
            .map(|(&g, &p)| bits(g * p))
            .sum()
    }

    fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&m| self.gains[m] > 0.0)
    }

    /// Powers for a given water level; exact caps are returned when the level
    /// reaches a channel's saturation breakpoint.
    fn powers_at(&self, level: f64) -> Vec<f64> {
        self.gains
            .iter()
            .zip(&self.caps)
            .map(|(&g, &c)| {
                if g <= 0.0 {
                    return 0.0;
                }
                let floor = g.recip();
                if level >= floor + c {
                    c
                } else if level <= floor {
                    0.0
                } else {
                    level - floor
                }
            })
            .collect()
    }

    fn result_at(&self, level: f64) -> WaterfillResult {
        let powers = self.powers_at(level);
        WaterfillResult {
            value: self.rate(&powers),
            total_power: powers.iter().sum(),
            water_level: level,
            powers,
        }
    }
}

/// Output of either water-filling direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterfillResult {
    pub powers: Vec<f64>,
    pub water_level: f64,
    /// Achieved rate, bits/s/Hz.
    pub value: f64,
    pub total_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InverseOutcome {
    Solved(WaterfillResult),
    /// The target exceeds the rate with every channel at its cap.
    Infeasible {
        max_rate: f64,
    },
}

impl InverseOutcome {
    pub fn solved(self) -> Option<WaterfillResult> {
        match self {
            InverseOutcome::Solved(r) => Some(r),
            InverseOutcome::Infeasible { .. } => None,
        }
    }
}

#[derive(Clone, Copy)]
struct Breakpoint {
    at: f64,
    channel: usize,
    opens: bool,
}

fn sorted_breakpoints(floors: impl Iterator<Item = (usize, f64, f64)>) -> Vec<Breakpoint> {
    let mut events: Vec<Breakpoint> = floors
        .flat_map(|(m, floor, cap)| {
            [
                Breakpoint {
                    at: floor,
                    channel: m,
                    opens: true,
                },
                Breakpoint {
                    at: floor + cap,
                    channel: m,
                    opens: false,
                },
            ]
        })
        .collect();
    // Openings sort before closings at equal positions so the slope never
    // goes negative mid-sweep.
    events.sort_unstable_by(|a, b| {
        a.at.total_cmp(&b.at)
            .then_with(|| match (a.opens, b.opens) {
                (true, false) => Ordering::Less,
                (false, true) => Ordering::Greater,
                _ => Ordering::Equal,
            })
    });
    events
}

/// Smallest level `L` with `Σ clamp(L - floor_m, 0, cap_m) = volume`.
///
/// Requires `0 ≤ volume < Σ cap_m`; returns the top breakpoint otherwise.
fn level_for_volume(floors: &[f64], caps: &[f64], volume: f64) -> f64 {
    let events = sorted_breakpoints(
        floors
            .iter()
            .zip(caps)
            .enumerate()
            .map(|(m, (&f, &c))| (m, f, c)),
    );
    let Some(first) = events.first() else {
        return 0.0;
    };
    let mut position = first.at;
    let mut filled = 0.0;
    let mut slope = 0.0;
    for event in &events {
        let reached = filled + slope * (event.at - position);
        if reached >= volume && slope > 0.0 {
            return position + (volume - filled) / slope;
        }
        filled = reached;
        position = event.at;
        slope += if event.opens { 1.0 } else { -1.0 };
    }
    position
}

/// Maximizes `Σ log2(1 + g_m p_m)` subject to `Σ p_m ≤ budget` and
/// `0 ≤ p_m ≤ cap_m`.
///
/// When the positive-gain caps fit inside the budget every such channel is
/// saturated and the budget is slack; otherwise the budget is spent exactly.
/// Runs in `O(M log M)`.
pub fn waterfill_capped(channel: &ChannelVector, budget: f64) -> Result<WaterfillResult> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::NonPositiveBudget(budget));
    }
    let active: Vec<usize> = channel.active().collect();
    if active.is_empty() {
        return Ok(WaterfillResult {
            powers: vec![0.0; channel.len()],
            water_level: 0.0,
            value: 0.0,
            total_power: 0.0,
        });
    }
    let floors: Vec<f64> = active.iter().map(|&m| channel.gains[m].recip()).collect();
    let caps: Vec<f64> = active.iter().map(|&m| channel.caps[m]).collect();
    let cap_total: f64 = caps.iter().sum();

    let level = if cap_total <= budget {
        floors
            .iter()
            .zip(&caps)
            .map(|(f, c)| f + c)
            .fold(f64::NEG_INFINITY, f64::max)
    } else {
        level_for_volume(&floors, &caps, budget)
    };
    Ok(channel.result_at(level))
}

/// Minimizes `Σ p_m` subject to `Σ log2(1 + g_m p_m) ≥ target` and
/// `0 ≤ p_m ≤ cap_m`. The rate constraint is active at the optimum.
pub fn inverse_waterfill_capped(channel: &ChannelVector, target: f64) -> Result<InverseOutcome> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::NonPositiveTarget(target));
    }
    let max_rate = channel.saturated_rate();
    if max_rate < target {
        return Ok(InverseOutcome::Infeasible { max_rate });
    }

    let events = sorted_breakpoints(
        channel
            .active()
            .map(|m| (m, channel.gains[m].recip(), channel.caps[m])),
    );
    // Inside a segment the rate is `saturated + Σ_open log2(g) + open·log2(L)`.
    let mut open = 0.0;
    let mut open_log_gain = 0.0;
    let mut saturated = 0.0;
    let mut level = events.last().map_or(0.0, |e| e.at);
    for event in &events {
        let rate_here = if open > 0.0 {
            saturated + open_log_gain + open * event.at.log2()
        } else {
            saturated
        };
        if rate_here >= target && open > 0.0 {
            level = ((target - saturated - open_log_gain) / open).exp2();
            // Snap rounding noise onto the breakpoint so saturated channels
            // report their cap exactly.
            if event.at - level <= 4.0 * f64::EPSILON * event.at {
                level = event.at;
            }
            break;
        }
        let g = channel.gains[event.channel];
        if event.opens {
            open += 1.0;
            open_log_gain += g.log2();
        } else {
            open -= 1.0;
            open_log_gain -= g.log2();
            saturated += bits(g * channel.caps[event.channel]);
        }
    }
    Ok(InverseOutcome::Solved(channel.result_at(level)))
}

/// Euclidean projection of `point` onto `{0 ≤ p ≤ caps, Σ p ≤ budget}`.
///
/// The projection is `clamp(point - λ, 0, cap)` for the smallest `λ ≥ 0`
/// meeting the budget, located by the same breakpoint sweep.
pub(crate) fn project_capped_simplex(point: &[f64], caps: &[f64], budget: f64) -> Vec<f64> {
    let clamped: Vec<f64> = point
        .iter()
        .zip(caps)
        .map(|(&y, &c)| y.clamp(0.0, c))
        .collect();
    if clamped.iter().sum::<f64>() <= budget {
        return clamped;
    }
    let floors: Vec<f64> = point.iter().map(|y| -y).collect();
    let level = level_for_volume(&floors, caps, budget);
    point
        .iter()
        .zip(caps)
        .map(|(&y, &c)| (level + y).clamp(0.0, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn channel(gains: &[f64], caps: &[f64]) -> ChannelVector {
        ChannelVector::new(gains.to_vec(), caps.to_vec()).unwrap()
    }

    #[test]
    fn symmetric_channels_split_evenly() {
        let r = waterfill_capped(&channel(&[1.0, 1.0], &[10.0, 10.0]), 2.0).unwrap();
        assert_eq!(r.powers, vec![1.0, 1.0]);
        assert!((r.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unequal_channels_match_grid_search() {
        // Grid oracle over p1 in [0, 2], p2 = 2 - p1.
        let objective = |p1: f64| (1.0 + p1).log2() + (1.0 + 3.0 * (2.0 - p1)).log2();
        let (best_p1, best_value) = (0..=200_000)
            .map(|i| i as f64 * 1e-5)
            .map(|p| (p, objective(p)))
            .fold(
                (0.0, f64::NEG_INFINITY),
                |a, b| if b.1 > a.1 { b } else { a },
            );
        assert!((best_p1 - 2.0 / 3.0).abs() < 1e-4);

        let r = waterfill_capped(&channel(&[1.0, 3.0], &[10.0, 10.0]), 2.0).unwrap();
        assert!((r.powers[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((r.powers[1] - 4.0 / 3.0).abs() < 1e-14);
        assert!((r.water_level - 5.0 / 3.0).abs() < 1e-14);
        assert!((r.value - (25.0f64 / 3.0).log2()).abs() < 1e-14);
        assert!((r.value - best_value).abs() < 1e-8);
        assert!((r.value - 3.0589).abs() < 1e-4);
    }

    #[test]
    fn caps_bind_and_budget_is_slack() {
        let r = waterfill_capped(&channel(&[1.0, 1.0], &[0.5, 0.5]), 2.0).unwrap();
        assert_eq!(r.powers, vec![0.5, 0.5]);
        assert_eq!(r.total_power, 1.0);
    }

    #[test]
    fn zero_gains_get_nothing() {
        let r = waterfill_capped(&channel(&[0.0, 0.0], &[1.0, 1.0]), 1.0).unwrap();
        assert_eq!(r.powers, vec![0.0, 0.0]);
        assert_eq!(r.value, 0.0);

        let r = waterfill_capped(&channel(&[0.0, 2.0], &[1.0, 5.0]), 1.0).unwrap();
        assert_eq!(r.powers, vec![0.0, 1.0]);
    }

    #[test]
    fn nonpositive_budget_is_rejected() {
        let ch = channel(&[1.0], &[1.0]);
        assert!(matches!(
            waterfill_capped(&ch, 0.0),
            Err(Error::NonPositiveBudget(_))
        ));
        assert!(waterfill_capped(&ch, -1.0).is_err());
    }

    #[test]
    fn weak_channel_stays_dry() {
        // Level 1/0.5 = 2 is never reached with budget 0.5 on the strong channel.
        let r = waterfill_capped(&channel(&[4.0, 0.5], &[10.0, 10.0]), 0.5).unwrap();
        assert_eq!(r.powers[1], 0.0);
        assert!((r.powers[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inverse_single_channel() {
        let r = inverse_waterfill_capped(&channel(&[1.0], &[10.0]), 1.0)
            .unwrap()
            .solved()
            .unwrap();
        assert!((r.powers[0] - 1.0).abs() < 1e-15);
        assert!((r.total_power - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_is_dual_of_forward_example() {
        let target = (25.0f64 / 3.0).log2();
        let r = inverse_waterfill_capped(&channel(&[1.0, 3.0], &[10.0, 10.0]), target)
            .unwrap()
            .solved()
            .unwrap();
        assert!((r.powers[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.powers[1] - 4.0 / 3.0).abs() < 1e-12);
        assert!((r.total_power - 2.0).abs() < 1e-12);
        assert!((r.value - target).abs() < 1e-10);
    }

    #[test]
    fn inverse_infeasible_beyond_saturation() {
        let out = inverse_waterfill_capped(&channel(&[1.0, 1.0], &[1.0, 1.0]), 3.0).unwrap();
        assert_eq!(out, InverseOutcome::Infeasible { max_rate: 2.0 });
    }

    #[test]
    fn inverse_at_exact_saturation_uses_full_caps() {
        let out = inverse_waterfill_capped(&channel(&[63.0, 127.0, 127.0], &[1.0; 3]), 20.0)
            .unwrap()
            .solved()
            .unwrap();
        assert_eq!(out.powers, vec![1.0, 1.0, 1.0]);
        assert_eq!(out.value, 20.0);
    }

    #[test]
    fn inverse_rejects_nonpositive_target() {
        assert!(inverse_waterfill_capped(&channel(&[1.0], &[1.0]), 0.0).is_err());
    }

    #[test]
    fn projection_inside_box_is_clamp() {
        let p = project_capped_simplex(&[0.2, -1.0, 5.0], &[1.0, 1.0, 1.0], 10.0);
        assert_eq!(p, vec![0.2, 0.0, 1.0]);
    }

    #[test]
    fn projection_onto_budget_face() {
        // Shift λ = 0.5 brings (1.5, 1.0) to (1.0, 0.5).
        let p = project_capped_simplex(&[1.5, 1.0], &[10.0, 10.0], 1.5);
        assert!((p[0] - 1.0).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn channel_vector_rejects_bad_input() {
        assert!(ChannelVector::new(vec![1.0], vec![]).is_err());
        assert!(ChannelVector::new(vec![-1.0], vec![1.0]).is_err());
        assert!(ChannelVector::new(vec![1.0], vec![0.0]).is_err());
    }
}
