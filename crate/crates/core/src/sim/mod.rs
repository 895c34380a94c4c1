//! Packet-level discrete-event simulator.
//!
//! One AIMD receiver drives a forwarding node that spreads Interests over `N`
//! paths. Each path is an upstream delay line, an instantly answering source,
//! a drop-tail FIFO bottleneck and a downstream delay line. A single run is
//! single-threaded over a time-ordered event queue; sweeps run points in
//! parallel.

mod event;
mod select;

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::path::{Scenario, ScenarioError, SweepParam};
use crate::strategy::StrategyId;

use event::{EventKind, EventQueue, Msg};
use select::{Capacities, Selector};

pub use select::{FaceState, RttEstimator};

/// How the receiver learns that a Data message was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LossSignal {
    /// At the drop instant.
    #[default]
    OracleImmediate,
    /// When an Interest timeout of twice the receiver's smoothed RTT expires.
    Timeout,
}

/// Source of the per-face capacities used by FPF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CapacityMode {
    /// Exact pipeline capacity of each path.
    #[default]
    Oracle,
    /// Three quarters of the face's in-flight count at its latest loss.
    Estimated,
}

/// Timeout multiplier applied to the smoothed RTT in timeout mode.
pub const RTT_FACTOR: f64 = 2.0;
/// Timeout used before any RTT sample exists.
pub const INITIAL_TIMEOUT: f64 = 1.0;
/// Guard factor applied to the in-flight count at loss.
pub const CAPACITY_GUARD: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Simulated seconds to run. Exactly one of `duration` and
    /// `total_chunks` must be set.
    pub duration: Option<f64>,
    /// Stop once this many distinct chunks have been delivered.
    pub total_chunks: Option<u64>,
    /// Seconds at the start of a duration run excluded from the rate.
    pub warmup: f64,
    pub initial_window: u32,
    /// Zero keeps lowest-index tie-breaking; other values seed random ties.
    pub seed: u64,
    pub loss_signal: LossSignal,
    pub fpf_capacity_mode: CapacityMode,
    pub rtt_smoothing_alpha: f64,
    /// RTT signal for the lowest-RTT strategies.
    pub rtt_estimator: RttEstimator,
    pub trace_window: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            duration: Some(300.0),
            total_chunks: None,
            warmup: 0.0,
            initial_window: 1,
            seed: 0,
            loss_signal: LossSignal::OracleImmediate,
            fpf_capacity_mode: CapacityMode::Oracle,
            rtt_smoothing_alpha: 0.125,
            rtt_estimator: RttEstimator::Pipeline,
            trace_window: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("exactly one of duration and total_chunks must be set")]
    StopCondition,
    #[error("duration must be a positive number of seconds, got {0}")]
    Duration(f64),
    #[error("total_chunks must be positive")]
    TotalChunks,
    #[error("warmup must be non-negative and shorter than the duration, got {0}")]
    Warmup(f64),
    #[error("warmup is only meaningful with a duration stop condition")]
    WarmupWithChunks,
    #[error("initial window must be at least 1")]
    InitialWindow,
    #[error("rtt smoothing alpha must lie in (0, 1], got {0}")]
    Alpha(f64),
}

impl SimConfig {
    pub fn with_duration(duration: f64) -> Self {
        SimConfig {
            duration: Some(duration),
            ..SimConfig::default()
        }
    }

    pub fn with_chunks(total_chunks: u64) -> Self {
        SimConfig {
            duration: None,
            total_chunks: Some(total_chunks),
            ..SimConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), Vec<ConfigError>> {
        let mut errs = Vec::new();
        match (self.duration, self.total_chunks) {
            (Some(d), None) => {
                if !(d.is_finite() && d > 0.0) {
                    errs.push(ConfigError::Duration(d));
                } else if !(self.warmup >= 0.0 && self.warmup < d) {
                    errs.push(ConfigError::Warmup(self.warmup));
                }
            }
            (None, Some(n)) => {
                if n == 0 {
                    errs.push(ConfigError::TotalChunks);
                }
                if self.warmup != 0.0 {
                    errs.push(ConfigError::WarmupWithChunks);
                }
            }
            _ => errs.push(ConfigError::StopCondition),
        }
        if self.initial_window == 0 {
            errs.push(ConfigError::InitialWindow);
        }
        let a = self.rtt_smoothing_alpha;
        if !(a > 0.0 && a <= 1.0) {
            errs.push(ConfigError::Alpha(a));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid scenario: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidScenario(Vec<ScenarioError>),
    #[error("invalid simulator configuration: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidConfig(Vec<ConfigError>),
}

/// A multiplicative decrease of the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halving {
    pub time: f64,
    /// Effective window just before the decrease (the cycle peak).
    pub from: u64,
    /// Effective window right after it.
    pub to: u64,
}

/// All-time counters of one face.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FaceCounters {
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    /// Pending Interests when the run stopped.
    pub in_flight: u64,
    pub max_pending: u64,
    /// Largest number of messages waiting in the bottleneck buffer.
    pub max_queue: u64,
    /// Deliveries that overtook an earlier Interest sent on the same face.
    pub reordered: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Data delivered inside the measurement interval.
    pub delivered_msgs: u64,
    /// Length of the measurement interval in seconds.
    pub elapsed: f64,
    pub rate_msgs_per_s: f64,
    pub gross_bps: f64,
    pub net_bps: f64,
    /// Detected Data losses over the whole run.
    pub losses: u64,
    pub loss_times: Vec<f64>,
    pub halvings: Vec<Halving>,
    /// Measured deliveries per face; sums to `delivered_msgs`.
    pub per_face_delivered: Vec<u64>,
    pub faces: Vec<FaceCounters>,
    /// Largest effective window reached.
    pub peak_window: u64,
    /// `(time, effective window)` at start and at every change.
    pub window_trace: Option<Vec<(f64, u64)>>,
}

impl SimResult {
    /// Cycle peaks (window at each decrease).
    pub fn peaks(&self) -> Vec<u64> {
        self.halvings.iter().map(|h| h.from).collect()
    }
}

/// Drop-tail FIFO; the message in service does not occupy a buffer slot.
#[derive(Debug, Default)]
struct Bottleneck {
    in_service: Option<Msg>,
    waiting: VecDeque<Msg>,
}

struct Engine<'a> {
    scenario: &'a Scenario,
    config: &'a SimConfig,
    service_time: Vec<f64>,
    events: EventQueue,
    faces: Vec<FaceState>,
    counters: Vec<FaceCounters>,
    last_delivered_seq: Vec<Option<u64>>,
    last_arrival: Vec<Option<f64>>,
    links: Vec<Bottleneck>,
    selector: Selector,

    window: f64,
    in_flight: u64,
    next_chunk: u64,
    retransmit: VecDeque<u64>,
    receiver_srtt: Option<f64>,
    last_halving: Option<f64>,

    delivered_total: u64,
    measured: u64,
    per_face_measured: Vec<u64>,
    loss_times: Vec<f64>,
    halvings: Vec<Halving>,
    peak_window: u64,
    trace: Option<Vec<(f64, u64)>>,
}

impl<'a> Engine<'a> {
    fn new(scenario: &'a Scenario, strategy: StrategyId, config: &'a SimConfig) -> Self {
        let n = scenario.len();
        let capacities = match config.fpf_capacity_mode {
            CapacityMode::Oracle => Capacities::Oracle(scenario.capacities()),
            CapacityMode::Estimated => Capacities::Estimated,
        };
        let window = f64::from(config.initial_window);
        Engine {
            scenario,
            config,
            service_time: scenario.msg_rates().iter().map(|r| 1.0 / r).collect(),
            events: EventQueue::default(),
            faces: vec![FaceState::default(); n],
            counters: vec![FaceCounters::default(); n],
            last_delivered_seq: vec![None; n],
            last_arrival: vec![None; n],
            links: (0..n).map(|_| Bottleneck::default()).collect(),
            selector: Selector::new(strategy, capacities, config.rtt_estimator, config.seed),
            window,
            in_flight: 0,
            next_chunk: 0,
            retransmit: VecDeque::new(),
            receiver_srtt: None,
            last_halving: None,
            delivered_total: 0,
            measured: 0,
            per_face_measured: vec![0; n],
            loss_times: Vec::new(),
            halvings: Vec::new(),
            peak_window: window.floor() as u64,
            trace: config
                .trace_window
                .then(|| vec![(0.0, window.floor() as u64)]),
        }
    }

    fn effective_window(&self) -> u64 {
        self.window.floor() as u64
    }

    fn set_window(&mut self, now: f64, w: f64) {
        let before = self.effective_window();
        self.window = w;
        let after = self.effective_window();
        if after != before {
            self.peak_window = self.peak_window.max(after);
            if let Some(t) = &mut self.trace {
                t.push((now, after));
            }
        }
    }

    fn next_needed(&mut self) -> Option<u64> {
        if let Some(c) = self.retransmit.pop_front() {
            return Some(c);
        }
        match self.config.total_chunks {
            Some(total) if self.next_chunk >= total => None,
            _ => {
                let c = self.next_chunk;
                self.next_chunk += 1;
                Some(c)
            }
        }
    }

    fn fill_window(&mut self, now: f64) {
        while self.in_flight < self.effective_window() {
            let Some(chunk) = self.next_needed() else {
                break;
            };
            let face = self.selector.select(&mut self.faces);
            let c = &mut self.counters[face];
            let seq = c.sent;
            c.sent += 1;
            self.faces[face].pending += 1;
            c.max_pending = c.max_pending.max(self.faces[face].pending);
            self.in_flight += 1;
            let timeout = self
                .receiver_srtt
                .map_or(INITIAL_TIMEOUT, |s| RTT_FACTOR * s);
            let msg = Msg {
                face,
                chunk,
                seq,
                sent_at: now,
                timeout,
            };
            let delay = self.scenario.paths[face].delay;
            self.events
                .push(now + delay, EventKind::InterestAtSource(msg));
        }
    }

    fn on_interest(&mut self, now: f64, msg: Msg) {
        let face = msg.face;
        let limit = self.scenario.paths[face].buffer_msgs as usize;
        let link = &mut self.links[face];
        if link.in_service.is_none() {
            link.in_service = Some(msg);
            self.events.push(
                now + self.service_time[face],
                EventKind::ServiceDone { face },
            );
        } else if link.waiting.len() < limit {
            link.waiting.push_back(msg);
            let queued = link.waiting.len() as u64;
            let c = &mut self.counters[face];
            c.max_queue = c.max_queue.max(queued);
        } else {
            self.counters[face].dropped += 1;
            match self.config.loss_signal {
                LossSignal::OracleImmediate => self.on_loss(now, msg),
                LossSignal::Timeout => {
                    let at = now.max(msg.sent_at + msg.timeout);
                    self.events.push(at, EventKind::LossDetected(msg));
                }
            }
        }
    }

    fn on_service_done(&mut self, now: f64, face: usize) {
        let link = &mut self.links[face];
        let done = link
            .in_service
            .take()
            .expect("service completion on idle link");
        link.in_service = link.waiting.pop_front();
        if link.in_service.is_some() {
            self.events.push(
                now + self.service_time[face],
                EventKind::ServiceDone { face },
            );
        }
        let delay = self.scenario.paths[face].delay;
        self.events
            .push(now + delay, EventKind::DataAtReceiver(done));
    }

    fn on_data(&mut self, now: f64, msg: Msg) {
        let face = msg.face;
        let alpha = self.config.rtt_smoothing_alpha;
        let sample = now - msg.sent_at;
        let ewma =
            |old: Option<f64>| Some(old.map_or(sample, |s| (1.0 - alpha) * s + alpha * sample));

        let f = &mut self.faces[face];
        f.pending -= 1;
        f.srtt = ewma(f.srtt);
        f.min_rtt = Some(f.min_rtt.map_or(sample, |m| m.min(sample)));
        if let Some(prev) = self.last_arrival[face] {
            let gap = now - prev;
            f.min_gap = Some(f.min_gap.map_or(gap, |m| m.min(gap)));
        }
        self.last_arrival[face] = Some(now);
        self.receiver_srtt = ewma(self.receiver_srtt);
        self.in_flight -= 1;

        let c = &mut self.counters[face];
        c.delivered += 1;
        if let Some(prev) = self.last_delivered_seq[face] {
            if msg.seq < prev {
                c.reordered += 1;
            }
        }
        self.last_delivered_seq[face] = Some(msg.seq);

        self.delivered_total += 1;
        if now >= self.config.warmup {
            self.measured += 1;
            self.per_face_measured[face] += 1;
        }

        let w = self.window + 1.0 / self.window;
        self.set_window(now, w);
        self.fill_window(now);
    }

    fn on_loss(&mut self, now: f64, msg: Msg) {
        let face = msg.face;
        let f = &mut self.faces[face];
        if self.config.fpf_capacity_mode == CapacityMode::Estimated {
            let est = (f.pending as f64 * CAPACITY_GUARD).floor() as u64;
            f.est_capacity = Some(est.max(1));
        }
        f.pending -= 1;
        self.in_flight -= 1;
        self.loss_times.push(now);
        self.retransmit.push_front(msg.chunk);

        // Interests sent before the latest decrease belong to its loss round.
        let fresh = self.last_halving.is_none_or(|t| msg.sent_at >= t);
        if fresh {
            let from = self.effective_window();
            let to = (from / 2).max(1);
            self.halvings.push(Halving {
                time: now,
                from,
                to,
            });
            self.last_halving = Some(now);
            self.set_window(now, to as f64);
        }
        self.fill_window(now);
    }

    fn done(&self, next_time: f64) -> bool {
        match (self.config.duration, self.config.total_chunks) {
            (Some(d), _) => next_time > d,
            (None, Some(total)) => self.delivered_total >= total,
            (None, None) => true,
        }
    }

    fn run(mut self) -> SimResult {
        self.fill_window(0.0);
        let mut now = 0.0;
        while let Some(t) = self.events.peek_time() {
            if self.done(t) {
                break;
            }
            let (t, kind) = self.events.pop().expect("peeked");
            now = t;
            match kind {
                EventKind::InterestAtSource(m) => self.on_interest(now, m),
                EventKind::ServiceDone { face } => self.on_service_done(now, face),
                EventKind::DataAtReceiver(m) => self.on_data(now, m),
                EventKind::LossDetected(m) => self.on_loss(now, m),
            }
        }
        self.finish(now)
    }

    fn finish(mut self, now: f64) -> SimResult {
        let elapsed = match self.config.duration {
            Some(d) => d - self.config.warmup,
            None => now,
        };
        for (c, f) in self.counters.iter_mut().zip(&self.faces) {
            c.in_flight = f.pending;
        }
        let rate = if elapsed > 0.0 {
            self.measured as f64 / elapsed
        } else {
            0.0
        };
        SimResult {
            delivered_msgs: self.measured,
            elapsed,
            rate_msgs_per_s: rate,
            gross_bps: rate * self.scenario.msg_bits(),
            net_bps: rate * 8.0 * f64::from(self.scenario.payload_bytes),
            losses: self.loss_times.len() as u64,
            loss_times: self.loss_times,
            halvings: self.halvings,
            per_face_delivered: self.per_face_measured,
            faces: self.counters,
            peak_window: self.peak_window,
            window_trace: self.trace,
        }
    }
}

/// Simulates one transfer.
pub fn run(
    scenario: &Scenario,
    strategy: StrategyId,
    config: &SimConfig,
) -> Result<SimResult, SimError> {
    scenario.validate().map_err(SimError::InvalidScenario)?;
    config.validate().map_err(SimError::InvalidConfig)?;
    Ok(Engine::new(scenario, strategy, config).run())
}

/// One selection decision on a snapshot of face state, with a fresh selector
/// built from the scenario and configuration.
pub fn select_face(
    strategy: StrategyId,
    faces: &mut [FaceState],
    scenario: &Scenario,
    config: &SimConfig,
) -> usize {
    let capacities = match config.fpf_capacity_mode {
        CapacityMode::Oracle => Capacities::Oracle(scenario.capacities()),
        CapacityMode::Estimated => Capacities::Estimated,
    };
    Selector::new(strategy, capacities, config.rtt_estimator, config.seed).select(faces)
}

/// Runs an independent simulation per value; order follows `values`.
pub fn sweep_sim(
    base: &Scenario,
    strategy: StrategyId,
    param: SweepParam,
    values: &[f64],
    config: &SimConfig,
) -> Vec<(f64, Result<SimResult, SimError>)> {
    values
        .par_iter()
        .map(|&v| {
            let point = param
                .apply(base, v)
                .map_err(|e| SimError::InvalidScenario(vec![e]))
                .and_then(|s| run(&s, strategy, config));
            (v, point)
        })
        .collect()
}

#[cfg(test)]
mod tests;
