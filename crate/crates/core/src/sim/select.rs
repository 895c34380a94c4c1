//! Online, per-Interest face selection.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::strategy::StrategyId;

/// Per-face bookkeeping kept by the forwarding node.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FaceState {
    /// Interests forwarded on this face and not yet answered or lost.
    pub pending: u64,
    /// Smoothed round trip of Data returning on this face.
    pub srtt: Option<f64>,
    /// Deficit counter for the weighted round robin strategies.
    pub rr_credit: f64,
    /// Estimated pipeline capacity (estimated FPF mode).
    pub est_capacity: Option<u64>,
    /// Smallest round trip sampled on this face.
    pub min_rtt: Option<f64>,
    /// Smallest spacing between consecutive Data arrivals on this face,
    /// i.e. the bottleneck service time once two messages queued back to back.
    pub min_gap: Option<f64>,
}

impl FaceState {
    /// Round trip the next Interest on this face is expected to see:
    /// propagation-bound while the pipe is short, queue-bound once `pending`
    /// messages take longer than that to drain.
    pub fn predicted_rtt(&self) -> Option<f64> {
        let base = self.min_rtt?;
        Some(match self.min_gap {
            Some(gap) => base.max(self.pending as f64 * gap),
            None => base,
        })
    }
}

/// RTT signal used by the lowest-RTT strategies (RE, FPF).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RttEstimator {
    /// [`FaceState::predicted_rtt`] from measured minimum RTT and spacing.
    #[default]
    Pipeline,
    /// The EWMA `srtt` alone.
    Smoothed,
}

impl RttEstimator {
    /// Sort key for lowest-RTT selection; unprobed faces come first.
    fn key(self, face: &FaceState) -> f64 {
        let rtt = match self {
            RttEstimator::Pipeline => face.predicted_rtt(),
            RttEstimator::Smoothed => face.srtt,
        };
        rtt.unwrap_or(f64::NEG_INFINITY)
    }
}

/// Where FPF takes its per-face capacities from.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Capacities {
    Oracle(Vec<u64>),
    Estimated,
}

impl Capacities {
    fn get(&self, face: usize, state: &FaceState) -> Option<u64> {
        match self {
            Capacities::Oracle(c) => Some(c[face]),
            Capacities::Estimated => state.est_capacity,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Selector {
    strategy: StrategyId,
    capacities: Capacities,
    estimator: RttEstimator,
    rng: Option<ChaCha8Rng>,
}

impl Selector {
    /// `seed == 0` selects deterministic lowest-index tie-breaking.
    pub fn new(
        strategy: StrategyId,
        capacities: Capacities,
        estimator: RttEstimator,
        seed: u64,
    ) -> Self {
        Selector {
            strategy,
            capacities,
            estimator,
            rng: (seed != 0).then(|| ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    pub fn select(&mut self, faces: &mut [FaceState]) -> usize {
        assert!(!faces.is_empty(), "no faces to select from");
        let all: Vec<usize> = (0..faces.len()).collect();
        let est = self.estimator;
        match self.strategy {
            StrategyId::Pe => self.argmin(&all, |i| faces[i].pending as f64),
            StrategyId::Re => self.argmin(&all, |i| est.key(&faces[i])),
            StrategyId::Fpf => {
                let eligible: Vec<usize> = all
                    .iter()
                    .copied()
                    .filter(|&i| match self.capacities.get(i, &faces[i]) {
                        Some(c) => faces[i].pending < c,
                        None => true,
                    })
                    .collect();
                let pool = if eligible.is_empty() { &all } else { &eligible };
                self.argmin(pool, |i| est.key(&faces[i]))
            }
            StrategyId::Ug => {
                let unprobed: Vec<usize> = all
                    .iter()
                    .copied()
                    .filter(|&i| faces[i].srtt.is_none())
                    .collect();
                if !unprobed.is_empty() {
                    return self.pick(&unprobed);
                }
                let weights: Vec<f64> = faces.iter().map(|f| 1.0 / f.srtt.unwrap()).collect();
                self.round_robin(faces, &weights)
            }
            StrategyId::Cf => {
                let idle: Vec<usize> = all
                    .iter()
                    .copied()
                    .filter(|&i| faces[i].pending == 0)
                    .collect();
                if !idle.is_empty() {
                    return self.pick(&idle);
                }
                let weights: Vec<f64> = faces.iter().map(|f| 1.0 / f.pending as f64).collect();
                self.round_robin(faces, &weights)
            }
        }
    }

    /// Deficit round robin: every face earns its normalized weight, the
    /// richest face is served and pays one unit.
    fn round_robin(&mut self, faces: &mut [FaceState], weights: &[f64]) -> usize {
        let norm: f64 = weights.iter().sum();
        for (f, w) in faces.iter_mut().zip(weights) {
            f.rr_credit += w / norm;
        }
        let all: Vec<usize> = (0..faces.len()).collect();
        let chosen = self.argmin(&all, |i| -faces[i].rr_credit);
        faces[chosen].rr_credit -= 1.0;
        chosen
    }

    fn argmin(&mut self, pool: &[usize], key: impl Fn(usize) -> f64) -> usize {
        let best = pool.iter().map(|&i| key(i)).fold(f64::INFINITY, f64::min);
        let tied: Vec<usize> = pool.iter().copied().filter(|&i| key(i) == best).collect();
        // empty only with NaN keys
        if tied.is_empty() {
            return self.pick(pool);
        }
        self.pick(&tied)
    }

    fn pick(&mut self, tied: &[usize]) -> usize {
        match &mut self.rng {
            Some(rng) if tied.len() > 1 => tied[rng.gen_range(0..tied.len())],
            _ => tied[0],
        }
    }
}
