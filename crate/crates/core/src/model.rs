//! Cycle-average receive-rate of the AIMD window.
//!
//! Without random effects the window evolves through identical cycles. Each
//! cycle climbs one Interest per round from `floor(W_max/2)` to `W_max`, where
//! `W_max` is the largest window whose sharing keeps every path within its
//! pipeline capacity. The lossy round at `W_max` belongs to the cycle, so `T`
//! and `A` both run over the inclusive range `floor(W_max/2)..=W_max`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::path::{rtt, Scenario, ScenarioError, SweepParam};
use crate::sharing::{Sharer, SharingVector};
use crate::strategy::StrategyId;

/// Window search gives up past this size.
pub const WINDOW_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid scenario: {}", join(.0))]
    InvalidScenario(Vec<ScenarioError>),
    #[error("no feasible window: a window of 1 already exceeds a pipeline capacity")]
    NoFeasibleWindow,
    #[error(
        "window search exceeded {WINDOW_CAP}; capacities are unbounded for practical purposes"
    )]
    Unbounded,
}

fn join(errs: &[ScenarioError]) -> String {
    errs.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundStats {
    /// Window held during the round.
    pub w_k: u64,
    pub per_path_pending: SharingVector,
    /// Receive rate of each path in messages/s.
    pub per_path_rate: Vec<f64>,
    /// Aggregate receive rate in messages/s.
    pub b_k: f64,
    /// Round duration in seconds.
    pub x_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleStats {
    pub w_max: u64,
    /// Interests sent per cycle.
    pub t_interests: u64,
    /// Cycle duration in seconds.
    pub a_seconds: f64,
    pub y_msgs_per_s: f64,
    pub y_gross_bps: f64,
    pub y_net_bps: f64,
    /// Rounds with a non-zero window, in increasing window order.
    pub rounds: Vec<RoundStats>,
}

fn check(scenario: &Scenario) -> Result<(), ModelError> {
    scenario.validate().map_err(ModelError::InvalidScenario)
}

/// Largest window whose sharing respects every pipeline capacity.
pub fn wmax(scenario: &Scenario, strategy: StrategyId) -> Result<u64, ModelError> {
    check(scenario)?;
    let mut sharer = Sharer::new(scenario, strategy);
    sharer.advance_to(1);
    if !sharer.feasible() {
        return Err(ModelError::NoFeasibleWindow);
    }
    match strategy {
        StrategyId::Pe | StrategyId::Ug => closed_form_search(scenario, strategy),
        _ => {
            // greedy sharing only ever adds, so the first violation ends the search
            while sharer.feasible() {
                if sharer.total() >= WINDOW_CAP {
                    return Err(ModelError::Unbounded);
                }
                sharer.step();
            }
            Ok(sharer.total() - 1)
        }
    }
}

/// Exponential probe followed by bisection; relies on feasibility being
/// monotone in the window.
fn closed_form_search(scenario: &Scenario, strategy: StrategyId) -> Result<u64, ModelError> {
    let feasible = |w: u64| {
        let mut sh = Sharer::new(scenario, strategy);
        sh.advance_to(w);
        sh.feasible()
    };
    let mut lo = 1;
    let mut hi = 2;
    while feasible(hi) {
        if hi >= WINDOW_CAP {
            return Err(ModelError::Unbounded);
        }
        lo = hi;
        hi *= 2;
    }
    // invariant: feasible(lo) && !feasible(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Evaluates one steady-state cycle.
pub fn cycle(scenario: &Scenario, strategy: StrategyId) -> Result<CycleStats, ModelError> {
    let w_max = wmax(scenario, strategy)?;
    let w_min = w_max / 2;
    let rates = scenario.msg_rates();

    let mut sharer = Sharer::new(scenario, strategy);
    let mut rounds = Vec::with_capacity((w_max - w_min + 1) as usize);
    let mut a_seconds = 0.0;
    for w_k in w_min.max(1)..=w_max {
        sharer.advance_to(w_k);
        let pending = sharer.vector();
        let per_path_rate: Vec<f64> = scenario
            .paths
            .iter()
            .zip(&rates)
            .zip(&pending.per_path)
            .map(|((path, &r), &p)| p / rtt(path, p, r))
            .collect();
        let b_k: f64 = per_path_rate.iter().sum();
        let x_k = w_k as f64 / b_k;
        a_seconds += x_k;
        rounds.push(RoundStats {
            w_k,
            per_path_pending: pending,
            per_path_rate,
            b_k,
            x_k,
        });
    }

    let t_interests = (w_min..=w_max).sum::<u64>();
    let y_msgs_per_s = t_interests as f64 / a_seconds;
    Ok(CycleStats {
        w_max,
        t_interests,
        a_seconds,
        y_msgs_per_s,
        y_gross_bps: y_msgs_per_s * scenario.msg_bits(),
        y_net_bps: y_msgs_per_s * 8.0 * f64::from(scenario.payload_bytes),
        rounds,
    })
}

/// Evaluates [`cycle`] for each value of one path parameter. Point failures
/// are returned in place; they do not stop the sweep.
pub fn sweep_model(
    base: &Scenario,
    strategy: StrategyId,
    param: SweepParam,
    values: &[f64],
) -> Vec<(f64, Result<CycleStats, ModelError>)> {
    values
        .par_iter()
        .map(|&v| {
            let point = param
                .apply(base, v)
                .map_err(|e| ModelError::InvalidScenario(vec![e]))
                .and_then(|s| cycle(&s, strategy));
            (v, point)
        })
        .collect()
}
