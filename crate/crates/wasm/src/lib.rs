//! Browser bindings. Every entry point takes a scenario as JSON and returns
//! its result as a JSON string, which keeps the JavaScript side to
//! `JSON.parse`.
//!
//! Scenario JSON:
//!
//! ```json
//! {"paths": [{"delay_ms": 20, "rate_mbps": 10, "buffer_msgs": 20},
//!            {"delay_ms": 120, "rate_mbps": 10, "buffer_msgs": 20}],
//!  "data_msg_bytes": 4876, "payload_bytes": 4096}
//! ```
//!
//! The two size fields are optional.

use icnmp::{cycle, run, share, PathSpec, Scenario, SimConfig, StrategyId, SweepParam};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Upper bounds that keep a single call interactive.
pub const MAX_POINTS: usize = 400;
pub const MAX_SIM_SECONDS: f64 = 1000.0;
pub const MAX_PENDING: u64 = 2000;

#[derive(Debug, Deserialize)]
struct PathIn {
    delay_ms: f64,
    rate_mbps: f64,
    buffer_msgs: u32,
}

#[derive(Debug, Deserialize)]
struct ScenarioIn {
    paths: Vec<PathIn>,
    #[serde(default = "default_msg")]
    data_msg_bytes: u32,
    #[serde(default = "default_payload")]
    payload_bytes: u32,
}

fn default_msg() -> u32 {
    4876
}

fn default_payload() -> u32 {
    4096
}

fn scenario(json: &str) -> Result<Scenario, String> {
    let s: ScenarioIn = serde_json::from_str(json).map_err(|e| format!("bad scenario: {e}"))?;
    // checked here so messages use the page's units and numbering
    for (i, p) in s.paths.iter().enumerate() {
        if !(p.delay_ms.is_finite() && p.delay_ms > 0.0) {
            return Err(format!("path {}: delay must be positive (ms)", i + 1));
        }
        if !(p.rate_mbps.is_finite() && p.rate_mbps > 0.0) {
            return Err(format!("path {}: rate must be positive (Mbps)", i + 1));
        }
    }
    let paths = s
        .paths
        .iter()
        .map(|p| PathSpec::from_ms_mbps(p.delay_ms, p.rate_mbps, p.buffer_msgs))
        .collect();
    let scenario = Scenario::new(paths, s.data_msg_bytes, s.payload_bytes);
    scenario.validate().map_err(|errs| {
        errs.iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    })?;
    Ok(scenario)
}

fn strategy(token: &str) -> Result<StrategyId, String> {
    token
        .parse()
        .map_err(|e: icnmp::ParseStrategyError| e.to_string())
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

#[derive(Serialize)]
struct Curve {
    strategy: StrategyId,
    /// Model gross rate in Mbps; `null` where the model has no solution.
    model_mbps: Vec<Option<f64>>,
    w_max: Vec<Option<u64>>,
    /// Present when the simulator was requested.
    sim_mbps: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct SweepOut {
    values: Vec<f64>,
    curves: Vec<Curve>,
}

/// Receive rate of every strategy while one parameter of path `path` (0-based)
/// varies. `param` is `delay_ms` or `rate_mbps`; sweep values use that unit.
/// `sim_seconds > 0` adds simulated rates measured after a quarter of the run.
pub fn rate_sweep_json(
    scenario_json: &str,
    path: usize,
    param: &str,
    from: f64,
    to: f64,
    step: f64,
    sim_seconds: f64,
) -> Result<String, String> {
    let base = scenario(scenario_json)?;
    let (sweep, scale) = match param {
        "delay_ms" => (SweepParam::delay(path), 1e-3),
        "rate_mbps" => (SweepParam::rate(path), 1e6),
        _ => return Err(format!("unknown sweep parameter `{param}`")),
    };
    if !(from > 0.0 && to >= from && step > 0.0) {
        return Err("sweep needs 0 < from <= to and step > 0".into());
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    if n > MAX_POINTS {
        return Err(format!("at most {MAX_POINTS} points"));
    }
    if !(0.0..=MAX_SIM_SECONDS).contains(&sim_seconds) {
        return Err(format!(
            "simulated time must lie in 0..={MAX_SIM_SECONDS} s"
        ));
    }
    let values: Vec<f64> = (0..n).map(|k| from + k as f64 * step).collect();
    let scenarios = values
        .iter()
        .map(|&v| sweep.apply(&base, v * scale).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(bad) = scenarios.iter().find_map(|s| s.validate().err()) {
        return Err(bad
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join("; "));
    }
    let cfg = SimConfig {
        warmup: sim_seconds / 4.0,
        ..SimConfig::with_duration(sim_seconds)
    };

    let mut curves = Vec::new();
    for st in StrategyId::ALL {
        let model: Vec<_> = scenarios.iter().map(|s| cycle(s, st).ok()).collect();
        let sim_mbps = (sim_seconds > 0.0).then(|| {
            scenarios
                .iter()
                .map(|s| run(s, st, &cfg).expect("validated").gross_bps / 1e6)
                .collect()
        });
        curves.push(Curve {
            strategy: st,
            model_mbps: model
                .iter()
                .map(|c| c.as_ref().map(|c| c.y_gross_bps / 1e6))
                .collect(),
            w_max: model.iter().map(|c| c.as_ref().map(|c| c.w_max)).collect(),
            sim_mbps,
        });
    }
    Ok(to_json(&SweepOut { values, curves }))
}

#[derive(Serialize)]
struct TraceOut {
    strategy: StrategyId,
    /// `[time_s, window]` at start and at every change.
    trace: Vec<(f64, u64)>,
    peaks: Vec<u64>,
    model_w_max: Option<u64>,
    gross_mbps: f64,
    capacities: Vec<u64>,
    per_path_delivered: Vec<u64>,
}

/// Simulated congestion window over `seconds` of one transfer.
pub fn window_trace_json(
    scenario_json: &str,
    strategy_token: &str,
    seconds: f64,
    seed: u64,
) -> Result<String, String> {
    let s = scenario(scenario_json)?;
    let st = strategy(strategy_token)?;
    if !(seconds > 0.0 && seconds <= MAX_SIM_SECONDS) {
        return Err(format!(
            "simulated time must lie in (0, {MAX_SIM_SECONDS}] s"
        ));
    }
    let cfg = SimConfig {
        seed,
        trace_window: true,
        ..SimConfig::with_duration(seconds)
    };
    let r = run(&s, st, &cfg).map_err(|e| e.to_string())?;
    Ok(to_json(&TraceOut {
        strategy: st,
        peaks: r.peaks(),
        trace: r.window_trace.unwrap_or_default(),
        model_w_max: cycle(&s, st).ok().map(|c| c.w_max),
        gross_mbps: r.gross_bps / 1e6,
        capacities: s.capacities(),
        per_path_delivered: r.per_face_delivered,
    }))
}

#[derive(Serialize)]
struct SharingOut {
    strategy: StrategyId,
    capacities: Vec<u64>,
    /// `per_path[i][h]` is path `i`'s share of `h` pending Interests.
    per_path: Vec<Vec<f64>>,
    w_max: Option<u64>,
}

/// Sharing function of one strategy for `0..=h_max` pending Interests.
pub fn sharing_json(
    scenario_json: &str,
    strategy_token: &str,
    h_max: u64,
) -> Result<String, String> {
    let s = scenario(scenario_json)?;
    let st = strategy(strategy_token)?;
    if h_max > MAX_PENDING {
        return Err(format!("at most {MAX_PENDING} pending Interests"));
    }
    let mut per_path = vec![Vec::with_capacity(h_max as usize + 1); s.len()];
    for h in 0..=h_max {
        for (col, p) in per_path.iter_mut().zip(share(&s, st, h).per_path) {
            col.push(p);
        }
    }
    Ok(to_json(&SharingOut {
        strategy: st,
        capacities: s.capacities(),
        per_path,
        w_max: icnmp::wmax(&s, st).ok(),
    }))
}

#[wasm_bindgen]
pub fn rate_sweep(
    scenario_json: &str,
    path: usize,
    param: &str,
    from: f64,
    to: f64,
    step: f64,
    sim_seconds: f64,
) -> Result<String, JsValue> {
    rate_sweep_json(scenario_json, path, param, from, to, step, sim_seconds)
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn window_trace(
    scenario_json: &str,
    strategy: &str,
    seconds: f64,
    seed: u32,
) -> Result<String, JsValue> {
    window_trace_json(scenario_json, strategy, seconds, u64::from(seed))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sharing(scenario_json: &str, strategy: &str, h_max: u32) -> Result<String, JsValue> {
    sharing_json(scenario_json, strategy, u64::from(h_max)).map_err(|e| JsValue::from_str(&e))
}
