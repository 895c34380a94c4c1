//! Sharing functions `P(H)`: the average number of pending Interests each
//! strategy places on every path when `H` Interests are outstanding in total.
//!
//! PE and UG have the closed form `H/N` and yield real-valued vectors. RE, CF
//! and FPF are defined by greedy procedures that add one Interest at a time to
//! the best-scoring path, so their vectors are integral.
//!
//! Greedy ties are resolved first by the smaller pending count and then by
//! the lower path index. The pending-count step makes identical paths fill in
//! alternation instead of one after the other.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::path::{pipeline_capacity, rtt, Scenario};
use crate::strategy::StrategyId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharingVector {
    /// Total pending Interests `H`.
    pub total: u64,
    /// Allocation per path, in path order.
    pub per_path: Vec<f64>,
}

impl SharingVector {
    pub fn sum(&self) -> f64 {
        self.per_path.iter().sum()
    }
}

/// Incremental evaluator of a strategy's sharing function.
///
/// Stepping from `H` to `H + 1` costs `O(N)`, so walking a whole window range
/// is linear in the range instead of quadratic.
#[derive(Debug, Clone)]
pub struct Sharer<'a> {
    scenario: &'a Scenario,
    strategy: StrategyId,
    rates: Vec<f64>,
    capacities: Vec<u64>,
    counts: Vec<u64>,
    total: u64,
}

impl<'a> Sharer<'a> {
    pub fn new(scenario: &'a Scenario, strategy: StrategyId) -> Self {
        let rates = scenario.msg_rates();
        let capacities = scenario
            .paths
            .iter()
            .zip(&rates)
            .map(|(p, &r)| pipeline_capacity(p, r))
            .collect();
        Sharer {
            scenario,
            strategy,
            rates,
            capacities,
            counts: vec![0; scenario.len()],
            total: 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn capacities(&self) -> &[u64] {
        &self.capacities
    }

    fn is_closed_form(&self) -> bool {
        matches!(self.strategy, StrategyId::Pe | StrategyId::Ug)
    }

    /// Adds one pending Interest.
    pub fn step(&mut self) {
        if !self.is_closed_form() {
            let i = self.pick();
            self.counts[i] += 1;
        }
        self.total += 1;
    }

    /// Advances to `h`; no-op when already at or past it.
    pub fn advance_to(&mut self, h: u64) {
        if self.is_closed_form() {
            self.total = self.total.max(h);
            return;
        }
        while self.total < h {
            self.step();
        }
    }

    /// Current allocation `P(total)`.
    pub fn vector(&self) -> SharingVector {
        let per_path = if self.is_closed_form() {
            let n = self.scenario.len() as f64;
            vec![self.total as f64 / n; self.scenario.len()]
        } else {
            self.counts.iter().map(|&c| c as f64).collect()
        };
        SharingVector {
            total: self.total,
            per_path,
        }
    }

    /// True when `P_i(total) <= C_i` on every path.
    pub fn feasible(&self) -> bool {
        if self.is_closed_form() {
            let share = self.total as f64 / self.scenario.len() as f64;
            self.capacities.iter().all(|&c| share <= c as f64)
        } else {
            self.counts
                .iter()
                .zip(&self.capacities)
                .all(|(p, c)| p <= c)
        }
    }

    fn path_rtt(&self, i: usize) -> f64 {
        rtt(
            &self.scenario.paths[i],
            self.counts[i] as f64,
            self.rates[i],
        )
    }

    fn score(&self, i: usize) -> f64 {
        match self.strategy {
            StrategyId::Cf => self.counts[i] as f64 / self.path_rtt(i).sqrt(),
            _ => self.path_rtt(i),
        }
    }

    fn better(&self, a: usize, b: usize) -> bool {
        match self.score(a).total_cmp(&self.score(b)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => (self.counts[a], a) < (self.counts[b], b),
        }
    }

    fn pick(&self) -> usize {
        let best_of = |candidates: &mut dyn Iterator<Item = usize>| {
            candidates.reduce(|best, i| if self.better(i, best) { i } else { best })
        };
        if self.strategy == StrategyId::Fpf {
            let mut eligible =
                (0..self.counts.len()).filter(|&i| self.counts[i] < self.capacities[i]);
            if let Some(i) = best_of(&mut eligible) {
                return i;
            }
            // every pipeline full: overflow to the fastest path
        }
        best_of(&mut (0..self.counts.len())).expect("scenario has at least one path")
    }
}

/// `P(h)` for any strategy.
pub fn share(scenario: &Scenario, strategy: StrategyId, h: u64) -> SharingVector {
    let mut sharer = Sharer::new(scenario, strategy);
    sharer.advance_to(h);
    sharer.vector()
}

/// Pending-Interest equalization: `H/N` on every path.
pub fn share_pe(scenario: &Scenario, h: u64) -> SharingVector {
    share(scenario, StrategyId::Pe, h)
}

/// RTT equalization: each Interest goes to the path with the lowest RTT.
pub fn share_re(scenario: &Scenario, h: u64) -> SharingVector {
    share(scenario, StrategyId::Re, h)
}

/// RTT-weighted round robin. Its fixed point coincides with [`share_pe`].
pub fn share_ug(scenario: &Scenario, h: u64) -> SharingVector {
    share(scenario, StrategyId::Ug, h)
}

/// Pending-weighted round robin: equalizes `P_i / sqrt(RTT_i)`.
pub fn share_cf(scenario: &Scenario, h: u64) -> SharingVector {
    share(scenario, StrategyId::Cf, h)
}

/// Fast pipeline filling: lowest-RTT path among those below capacity.
pub fn share_fpf(scenario: &Scenario, h: u64) -> SharingVector {
    share(scenario, StrategyId::Fpf, h)
}
