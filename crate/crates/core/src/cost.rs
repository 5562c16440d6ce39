//! Integer cost representation.
//!
//! Edge costs on the primitive graph are quantized to ticks so that path
//! costs are exact integer sums: Bellman consistency, triangle inequalities,
//! and prefix-optimality checks compare with zero tolerance, and value arrays
//! are bitwise identical across runs.

/// Ticks per cost unit (1 tick = 1e-9 cost units).
pub const TICKS_PER_UNIT: f64 = 1e9;

/// Sentinel for an unreachable node.
pub const INF: u64 = u64::MAX;

pub fn to_ticks(cost: f64) -> u64 {
    debug_assert!(cost.is_finite() && cost >= 0.0);
    (cost * TICKS_PER_UNIT).round() as u64
}

pub fn to_cost(ticks: u64) -> f64 {
    if ticks == INF {
        f64::INFINITY
    } else {
        ticks as f64 / TICKS_PER_UNIT
    }
}
