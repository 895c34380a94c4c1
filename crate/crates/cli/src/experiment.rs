//! Experiment files.
//!
//! The format is one `key = value` pair per line; `#` starts a comment. Path
//! keys (`path.delay_ms`, `path.rate_mbps`, `path.buffer_msgs`) describe the
//! current path, and repeating a key that the current path already has starts
//! the next one. All other keys may appear at most once.
//!
//! ```text
//! data_msg_bytes = 4876
//! payload_bytes  = 4096
//! path.delay_ms = 20
//! path.rate_mbps = 10
//! path.buffer_msgs = 20
//! path.delay_ms = 120
//! path.rate_mbps = 10
//! path.buffer_msgs = 20
//! strategies = pe, fpf
//! mode = both
//! sweep.path = 2
//! sweep.param = delay_ms
//! sweep.from = 20
//! sweep.to = 200
//! sweep.step = 20
//! sim.duration_s = 400
//! sim.warmup_s = 100
//! output = out/fig10
//! ```

use std::path::PathBuf;
use std::str::FromStr;

use icnmp::{
    CapacityMode, LossSignal, PathSpec, RttEstimator, Scenario, ScenarioError, SimConfig,
    StrategyId, SweepParam,
};

/// Sweeps with more points than this are rejected as likely typos.
pub const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Model,
    Sim,
    Both,
}

impl Mode {
    pub fn model(self) -> bool {
        matches!(self, Mode::Model | Mode::Both)
    }

    pub fn sim(self) -> bool {
        matches!(self, Mode::Sim | Mode::Both)
    }
}

/// Swept path parameter, in the units the file uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepUnit {
    DelayMs,
    RateMbps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Zero-based path index (the file uses 1-based numbering).
    pub path: usize,
    pub unit: SweepUnit,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl SweepSpec {
    /// Points from `from` to `to` inclusive, in file units.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.from + k as f64 * self.step).collect()
    }

    pub fn param(&self) -> SweepParam {
        match self.unit {
            SweepUnit::DelayMs => SweepParam::delay(self.path),
            SweepUnit::RateMbps => SweepParam::rate(self.path),
        }
    }

    /// Converts a file-unit value to the SI value the library expects.
    pub fn to_si(&self, value: f64) -> f64 {
        match self.unit {
            SweepUnit::DelayMs => value * 1e-3,
            SweepUnit::RateMbps => value * 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub strategies: Vec<StrategyId>,
    pub mode: Mode,
    pub sweep: Option<SweepSpec>,
    pub sim: SimConfig,
    /// Output file prefix; `-rates.csv` etc. are appended.
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid experiment: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Default)]
struct PathDraft {
    delay_ms: Option<f64>,
    rate_mbps: Option<f64>,
    buffer_msgs: Option<u32>,
}

#[derive(Debug, Default)]
struct SweepDraft {
    path: Option<usize>,
    unit: Option<SweepUnit>,
    from: Option<f64>,
    to: Option<f64>,
    step: Option<f64>,
}

/// Parses and validates an experiment description.
pub fn parse(text: &str) -> Result<ExperimentSpec, LoadError> {
    let mut paths: Vec<PathDraft> = Vec::new();
    let mut sweep = SweepDraft::default();
    let mut any_sweep = false;
    let mut seen: Vec<String> = Vec::new();
    let mut data_msg_bytes = 4876;
    let mut payload_bytes = 4096;
    let mut strategies = StrategyId::ALL.to_vec();
    let mut mode = Mode::Both;
    let mut sim = SimConfig::default();
    let mut output = PathBuf::from("icnmp");

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| ParseError { line, message };
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        if value.is_empty() {
            return Err(err(format!("missing value for `{key}`")).into());
        }

        if let Some(field) = key.strip_prefix("path.") {
            let starts_new = match paths.last() {
                None => true,
                Some(p) => match field {
                    "delay_ms" => p.delay_ms.is_some(),
                    "rate_mbps" => p.rate_mbps.is_some(),
                    "buffer_msgs" => p.buffer_msgs.is_some(),
                    _ => return Err(err(format!("unknown key `{key}`")).into()),
                },
            };
            if starts_new {
                paths.push(PathDraft::default());
            }
            let p = paths.last_mut().unwrap();
            match field {
                "delay_ms" => p.delay_ms = Some(number(value, line)?),
                "rate_mbps" => p.rate_mbps = Some(number(value, line)?),
                "buffer_msgs" => p.buffer_msgs = Some(integer(value, line)?),
                _ => return Err(err(format!("unknown key `{key}`")).into()),
            }
            continue;
        }

        if seen.iter().any(|k| k == key) {
            return Err(err(format!("duplicate key `{key}`")).into());
        }
        seen.push(key.to_string());
        match key {
            "data_msg_bytes" => data_msg_bytes = integer(value, line)?,
            "payload_bytes" => payload_bytes = integer(value, line)?,
            "strategies" => strategies = parse_strategies(value).map_err(err)?,
            "mode" => {
                mode = choice(
                    value,
                    line,
                    "mode",
                    &[
                        ("model", Mode::Model),
                        ("sim", Mode::Sim),
                        ("both", Mode::Both),
                    ],
                )?
            }
            "output" => output = PathBuf::from(value),
            "sweep.path" => {
                any_sweep = true;
                let n: usize = integer(value, line)?;
                if n == 0 {
                    return Err(err("sweep.path is 1-based".into()).into());
                }
                sweep.path = Some(n - 1);
            }
            "sweep.param" => {
                any_sweep = true;
                let units = [
                    ("delay_ms", SweepUnit::DelayMs),
                    ("rate_mbps", SweepUnit::RateMbps),
                ];
                sweep.unit = Some(choice(value, line, "sweep parameter", &units)?);
            }
            "sweep.from" => (any_sweep, sweep.from) = (true, Some(number(value, line)?)),
            "sweep.to" => (any_sweep, sweep.to) = (true, Some(number(value, line)?)),
            "sweep.step" => (any_sweep, sweep.step) = (true, Some(number(value, line)?)),
            "sim.duration_s" => sim.duration = Some(number(value, line)?),
            "sim.total_chunks" => sim.total_chunks = Some(integer(value, line)?),
            "sim.warmup_s" => sim.warmup = number(value, line)?,
            "sim.initial_window" => sim.initial_window = integer(value, line)?,
            "sim.seed" => sim.seed = integer(value, line)?,
            "sim.loss_signal" => {
                let opts = [
                    ("oracle", LossSignal::OracleImmediate),
                    ("timeout", LossSignal::Timeout),
                ];
                sim.loss_signal = choice(value, line, "loss signal", &opts)?;
            }
            "sim.fpf_capacity" => {
                let opts = [
                    ("oracle", CapacityMode::Oracle),
                    ("estimated", CapacityMode::Estimated),
                ];
                sim.fpf_capacity_mode = choice(value, line, "capacity mode", &opts)?;
            }
            "sim.rtt_alpha" => sim.rtt_smoothing_alpha = number(value, line)?,
            "sim.rtt_estimator" => {
                let opts = [
                    ("pipeline", RttEstimator::Pipeline),
                    ("smoothed", RttEstimator::Smoothed),
                ];
                sim.rtt_estimator = choice(value, line, "rtt estimator", &opts)?;
            }
            "sim.trace" => {
                sim.trace_window = choice(value, line, "flag", &[("true", true), ("false", false)])?
            }
            _ => return Err(err(format!("unknown key `{key}`")).into()),
        }
    }

    // a chunk budget replaces the default duration unless both are given
    if seen.iter().any(|k| k == "sim.total_chunks") && !seen.iter().any(|k| k == "sim.duration_s") {
        sim.duration = None;
    }

    let mut problems = Vec::new();
    let mut specs = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let n = i + 1;
        match (p.delay_ms, p.rate_mbps, p.buffer_msgs) {
            (Some(d), Some(r), Some(b)) => specs.push(PathSpec::from_ms_mbps(d, r, b)),
            _ => {
                for (name, missing) in [
                    ("delay_ms", p.delay_ms.is_none()),
                    ("rate_mbps", p.rate_mbps.is_none()),
                    ("buffer_msgs", p.buffer_msgs.is_none()),
                ] {
                    if missing {
                        problems.push(format!("path {n}: missing path.{name}"));
                    }
                }
            }
        }
    }
    // path values are checked here so messages use the file's units
    for (i, p) in paths.iter().enumerate() {
        let n = i + 1;
        if let Some(d) = p.delay_ms.filter(|d| !(d.is_finite() && *d > 0.0)) {
            problems.push(format!("path {n}: delay_ms must be positive, got {d}"));
        }
        if let Some(r) = p.rate_mbps.filter(|r| !(r.is_finite() && *r > 0.0)) {
            problems.push(format!("path {n}: rate_mbps must be positive, got {r}"));
        }
    }
    let scenario = Scenario::new(specs, data_msg_bytes, payload_bytes);
    if let Err(errs) = scenario.validate() {
        problems.extend(
            errs.iter()
                .filter(|e| {
                    !matches!(
                        e,
                        ScenarioError::BadDelay { .. } | ScenarioError::BadRate { .. }
                    )
                })
                .filter(|e| paths.is_empty() || **e != ScenarioError::EmptyPaths)
                .map(|e| e.to_string()),
        );
    }
    if let Err(errs) = sim.validate() {
        problems.extend(errs.iter().map(|e| format!("sim: {e}")));
    }

    let sweep = if any_sweep {
        match sweep_from_draft(sweep, paths.len()) {
            Ok(s) => Some(s),
            Err(mut errs) => {
                problems.append(&mut errs);
                None
            }
        }
    } else {
        None
    };

    if problems.is_empty() {
        Ok(ExperimentSpec {
            scenario,
            strategies,
            mode,
            sweep,
            sim,
            output,
        })
    } else {
        Err(LoadError::Invalid(problems))
    }
}

fn sweep_from_draft(d: SweepDraft, n_paths: usize) -> Result<SweepSpec, Vec<String>> {
    let mut errs = Vec::new();
    let mut need = |name: &str, present: bool| {
        if !present {
            errs.push(format!("sweep: missing sweep.{name}"));
        }
    };
    need("path", d.path.is_some());
    need("param", d.unit.is_some());
    need("from", d.from.is_some());
    need("to", d.to.is_some());
    need("step", d.step.is_some());
    if !errs.is_empty() {
        return Err(errs);
    }
    let s = SweepSpec {
        path: d.path.unwrap(),
        unit: d.unit.unwrap(),
        from: d.from.unwrap(),
        to: d.to.unwrap(),
        step: d.step.unwrap(),
    };
    if s.path >= n_paths {
        errs.push(format!(
            "sweep: path {} does not exist ({n_paths} paths)",
            s.path + 1
        ));
    }
    if !(s.from.is_finite() && s.from > 0.0) {
        errs.push(format!("sweep: from must be positive, got {}", s.from));
    }
    if !(s.to.is_finite() && s.to >= s.from) {
        errs.push(format!("sweep: to must be at least from, got {}", s.to));
    }
    if !(s.step.is_finite() && s.step > 0.0) {
        errs.push(format!("sweep: step must be positive, got {}", s.step));
    }
    if errs.is_empty() && (s.to - s.from) / s.step >= MAX_SWEEP_POINTS as f64 {
        errs.push(format!("sweep: more than {MAX_SWEEP_POINTS} points"));
    }
    if errs.is_empty() {
        Ok(s)
    } else {
        Err(errs)
    }
}

/// Comma-separated strategy tokens, e.g. `pe, fpf`.
pub fn parse_strategies(value: &str) -> Result<Vec<StrategyId>, String> {
    let mut out = Vec::new();
    for token in value.split(',').map(str::trim) {
        let st = StrategyId::from_str(token).map_err(|e| e.to_string())?;
        if !out.contains(&st) {
            out.push(st);
        }
    }
    Ok(out)
}

/// One of a fixed set of keywords.
fn choice<T: Copy>(
    value: &str,
    line: usize,
    what: &str,
    options: &[(&str, T)],
) -> Result<T, ParseError> {
    options
        .iter()
        .find(|(name, _)| *name == value)
        .map(|&(_, v)| v)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            ParseError {
                line,
                message: format!(
                    "unknown {what} `{value}` (expected one of {})",
                    names.join(", ")
                ),
            }
        })
}

fn number(value: &str, line: usize) -> Result<f64, ParseError> {
    value.parse().map_err(|_| ParseError {
        line,
        message: format!("expected a number, got `{value}`"),
    })
}

fn integer<T: FromStr>(value: &str, line: usize) -> Result<T, ParseError> {
    value.parse().map_err(|_| ParseError {
        line,
        message: format!("expected a non-negative integer, got `{value}`"),
    })
}
