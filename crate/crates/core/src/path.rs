//! Scenario description and per-path formulas.

use serde::{Deserialize, Serialize};

/// One upstream/downstream path.
///
/// The upstream direction is a pure delay line. The downstream direction is a
/// FIFO bottleneck holding up to `buffer_msgs` waiting Data messages, drained
/// at `rate_bps`, followed by the same propagation delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    /// One-way propagation delay in seconds (applied in both directions).
    pub delay: f64,
    /// Bottleneck drain rate in bits per second.
    pub rate_bps: f64,
    /// Bottleneck buffer size in Data messages.
    pub buffer_msgs: u32,
}

impl PathSpec {
    pub fn new(delay: f64, rate_bps: f64, buffer_msgs: u32) -> Self {
        PathSpec {
            delay,
            rate_bps,
            buffer_msgs,
        }
    }

    /// Convenience constructor in the units experiments are written in.
    pub fn from_ms_mbps(delay_ms: f64, rate_mbps: f64, buffer_msgs: u32) -> Self {
        PathSpec::new(delay_ms * 1e-3, rate_mbps * 1e6, buffer_msgs)
    }
}

/// Full input to the model and to the simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub paths: Vec<PathSpec>,
    /// Total Data message size on the wire.
    pub data_msg_bytes: u32,
    /// Application payload carried by one Data message.
    pub payload_bytes: u32,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("empty path list")]
    EmptyPaths,
    #[error("payload exceeds message size")]
    PayloadExceedsMessage,
    #[error("payload size must be positive")]
    ZeroPayload,
    #[error("path {index}: delay must be a positive finite number of seconds, got {value}")]
    BadDelay { index: usize, value: f64 },
    #[error("path {index}: rate must be a positive finite number of bits/s, got {value}")]
    BadRate { index: usize, value: f64 },
    #[error("path index {index} out of range for {len} paths")]
    PathIndex { index: usize, len: usize },
}

impl Scenario {
    pub fn new(paths: Vec<PathSpec>, data_msg_bytes: u32, payload_bytes: u32) -> Self {
        Scenario {
            paths,
            data_msg_bytes,
            payload_bytes,
        }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Bits carried per Data message on the wire.
    pub fn msg_bits(&self) -> f64 {
        8.0 * f64::from(self.data_msg_bytes)
    }

    /// Drain rate of path `index` in Data messages per second.
    pub fn rate_msgs(&self, index: usize) -> Result<f64, ScenarioError> {
        let path = self.paths.get(index).ok_or(ScenarioError::PathIndex {
            index,
            len: self.paths.len(),
        })?;
        Ok(path.rate_bps / self.msg_bits())
    }

    /// Message rates of all paths, in path order.
    pub fn msg_rates(&self) -> Vec<f64> {
        let bits = self.msg_bits();
        self.paths.iter().map(|p| p.rate_bps / bits).collect()
    }

    /// Integer pipeline capacities of all paths, in path order.
    pub fn capacities(&self) -> Vec<u64> {
        self.paths
            .iter()
            .zip(self.msg_rates())
            .map(|(p, r)| pipeline_capacity(p, r))
            .collect()
    }

    /// Returns every violated invariant, not just the first.
    pub fn validate(&self) -> Result<(), Vec<ScenarioError>> {
        let mut errs = Vec::new();
        if self.paths.is_empty() {
            errs.push(ScenarioError::EmptyPaths);
        }
        if self.payload_bytes == 0 {
            errs.push(ScenarioError::ZeroPayload);
        }
        if self.payload_bytes > self.data_msg_bytes {
            errs.push(ScenarioError::PayloadExceedsMessage);
        }
        for (index, p) in self.paths.iter().enumerate() {
            if !(p.delay.is_finite() && p.delay > 0.0) {
                errs.push(ScenarioError::BadDelay {
                    index,
                    value: p.delay,
                });
            }
            if !(p.rate_bps.is_finite() && p.rate_bps > 0.0) {
                errs.push(ScenarioError::BadRate {
                    index,
                    value: p.rate_bps,
                });
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Two-path scenario used throughout the evaluation: path 1 has
    /// 20 ms / 10 Mbps / 20 messages, path 2 is parameterised.
    pub fn two_path(delay2_ms: f64, rate2_mbps: f64) -> Self {
        Scenario::new(
            vec![
                PathSpec::from_ms_mbps(20.0, 10.0, 20),
                PathSpec::from_ms_mbps(delay2_ms, rate2_mbps, 20),
            ],
            4876,
            4096,
        )
    }
}

/// Which path parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepKind {
    /// One-way delay, values in seconds.
    Delay,
    /// Bottleneck rate, values in bits per second.
    Rate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepParam {
    /// Zero-based index of the path being varied.
    pub path: usize,
    pub kind: SweepKind,
}

impl SweepParam {
    pub fn delay(path: usize) -> Self {
        SweepParam {
            path,
            kind: SweepKind::Delay,
        }
    }

    pub fn rate(path: usize) -> Self {
        SweepParam {
            path,
            kind: SweepKind::Rate,
        }
    }

    /// Copy of `base` with the swept parameter set to `value`.
    pub fn apply(&self, base: &Scenario, value: f64) -> Result<Scenario, ScenarioError> {
        let mut s = base.clone();
        let len = s.paths.len();
        let path = s.paths.get_mut(self.path).ok_or(ScenarioError::PathIndex {
            index: self.path,
            len,
        })?;
        match self.kind {
            SweepKind::Delay => path.delay = value,
            SweepKind::Rate => path.rate_bps = value,
        }
        Ok(s)
    }
}

/// Round-trip time of a path holding `pending` in-flight messages:
/// propagation-bound below the bandwidth-delay product, queue-bound above it.
pub fn rtt(path: &PathSpec, pending: f64, msg_rate: f64) -> f64 {
    (2.0 * path.delay).max(pending / msg_rate)
}

/// Messages a path holds in flight before its buffer overflows:
/// `floor(2·delay·rate + buffer)`.
pub fn pipeline_capacity(path: &PathSpec, msg_rate: f64) -> u64 {
    // 1e-9 absorbs representation error when 2·delay·rate is integral.
    (2.0 * path.delay * msg_rate + f64::from(path.buffer_msgs) + 1e-9).floor() as u64
}
