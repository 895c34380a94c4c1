//! Experiment runner: loads an experiment file, evaluates the model and/or
//! the simulator over an optional sweep, and writes CSV tables.

pub mod experiment;
pub mod output;

use std::path::{Path, PathBuf};

use icnmp::{
    cycle, run, sweep_model, sweep_sim, CycleStats, ModelError, SimError, SimResult, StrategyId,
};

pub use experiment::{
    parse, parse_strategies, ExperimentSpec, LoadError, Mode, ParseError, SweepSpec, SweepUnit,
};
pub use output::{fmt_sig, RateRow, Source};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Analytical model only.
    Model,
    /// Simulator only.
    Sim,
    /// Whatever the file's `mode` asks for; the file must define a sweep.
    Sweep,
    /// One simulation of the base scenario with window traces; model rows
    /// are kept when the file's mode includes them.
    Trace,
}

/// Command-line values that take precedence over the experiment file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub strategies: Option<Vec<StrategyId>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Invalid(String),
    #[error("{strategy} {source_name} failed{}: {message}", at(.value))]
    Point {
        strategy: StrategyId,
        source_name: &'static str,
        value: Option<f64>,
        message: String,
    },
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn at(value: &Option<f64>) -> String {
    value
        .map(|v| format!(" at sweep value {}", fmt_sig(v)))
        .unwrap_or_default()
}

impl CliError {
    /// 1 usage, 2 validation, 3 runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Load(_) | CliError::Invalid(_) => 2,
            CliError::Point { .. } | CliError::Io { .. } => 3,
        }
    }
}

pub fn load_experiment(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse(&text)?)
}

/// Applies the subcommand and the overrides to a loaded experiment.
pub fn prepare(
    mut spec: ExperimentSpec,
    command: Command,
    overrides: Overrides,
) -> Result<ExperimentSpec, CliError> {
    if let Some(s) = overrides.strategies {
        if s.is_empty() {
            return Err(CliError::Invalid("no strategies selected".into()));
        }
        spec.strategies.clear();
        for st in s {
            if !spec.strategies.contains(&st) {
                spec.strategies.push(st);
            }
        }
    }
    if let Some(seed) = overrides.seed {
        spec.sim.seed = seed;
    }
    if let Some(out) = overrides.out {
        spec.output = out;
    }
    match command {
        Command::Model => spec.mode = Mode::Model,
        Command::Sim => spec.mode = Mode::Sim,
        Command::Sweep => {
            if spec.sweep.is_none() {
                return Err(CliError::Invalid(
                    "the experiment defines no sweep (sweep.* keys)".into(),
                ));
            }
        }
        Command::Trace => {
            if spec.mode == Mode::Model {
                spec.mode = Mode::Sim;
            }
            spec.sweep = None;
            spec.sim.trace_window = true;
        }
    }
    Ok(spec)
}

/// Computed tables, not yet written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Ordered by sweep value, then strategy as listed, then model before sim.
    pub rows: Vec<RateRow>,
    pub traces: Vec<(StrategyId, Vec<(f64, u64)>)>,
}

fn model_row(value: Option<f64>, strategy: StrategyId, c: &CycleStats) -> RateRow {
    RateRow {
        sweep_value: value,
        strategy,
        source: Source::Model,
        y_msgs_per_s: c.y_msgs_per_s,
        y_gross_mbps: c.y_gross_bps / 1e6,
        y_net_mbps: c.y_net_bps / 1e6,
        w_max_or_peak: c.w_max,
    }
}

fn sim_row(value: Option<f64>, strategy: StrategyId, r: &SimResult) -> RateRow {
    RateRow {
        sweep_value: value,
        strategy,
        source: Source::Sim,
        y_msgs_per_s: r.rate_msgs_per_s,
        y_gross_mbps: r.gross_bps / 1e6,
        y_net_mbps: r.net_bps / 1e6,
        w_max_or_peak: r.peak_window,
    }
}

fn point_error(
    strategy: StrategyId,
    source: Source,
    value: Option<f64>,
    message: String,
) -> CliError {
    CliError::Point {
        strategy,
        source_name: source.as_str(),
        value,
        message,
    }
}

/// Runs every (point, strategy, source) of the experiment. The first failing
/// point aborts the experiment.
pub fn evaluate(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    let values: Vec<Option<f64>> = match &spec.sweep {
        Some(sw) => sw.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    // [strategy][point]
    let mut model: Vec<Vec<Result<CycleStats, ModelError>>> = Vec::new();
    let mut sim: Vec<Vec<Result<SimResult, SimError>>> = Vec::new();
    for &st in &spec.strategies {
        match &spec.sweep {
            Some(sw) => {
                let si: Vec<f64> = sw.values().iter().map(|&v| sw.to_si(v)).collect();
                if spec.mode.model() {
                    model.push(
                        sweep_model(&spec.scenario, st, sw.param(), &si)
                            .into_iter()
                            .map(|p| p.1)
                            .collect(),
                    );
                }
                if spec.mode.sim() {
                    sim.push(
                        sweep_sim(&spec.scenario, st, sw.param(), &si, &spec.sim)
                            .into_iter()
                            .map(|p| p.1)
                            .collect(),
                    );
                }
            }
            None => {
                if spec.mode.model() {
                    model.push(vec![cycle(&spec.scenario, st)]);
                }
                if spec.mode.sim() {
                    sim.push(vec![run(&spec.scenario, st, &spec.sim)]);
                }
            }
        }
    }

    let mut rows = Vec::new();
    let mut traces = Vec::new();
    for (i, &value) in values.iter().enumerate() {
        for (k, &st) in spec.strategies.iter().enumerate() {
            if let Some(m) = model.get(k) {
                let c = m[i]
                    .as_ref()
                    .map_err(|e| point_error(st, Source::Model, value, e.to_string()))?;
                rows.push(model_row(value, st, c));
            }
            if let Some(s) = sim.get(k) {
                let r = s[i]
                    .as_ref()
                    .map_err(|e| point_error(st, Source::Sim, value, e.to_string()))?;
                rows.push(sim_row(value, st, r));
                if let Some(t) = &r.window_trace {
                    if spec.sweep.is_none() {
                        traces.push((st, t.clone()));
                    }
                }
            }
        }
    }
    Ok(Outcome { rows, traces })
}

/// Writes the rates table and any window traces; returns the files written.
pub fn write_outcome(prefix: &Path, outcome: &Outcome) -> Result<Vec<PathBuf>, CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    let mut written = Vec::new();
    let rates = output::rates_path(prefix);
    output::write_file(&rates, |w| output::write_rates(w, &outcome.rows)).map_err(io(&rates))?;
    written.push(rates);
    for (st, trace) in &outcome.traces {
        let path = output::window_path(prefix, *st);
        output::write_file(&path, |w| output::write_window(w, trace)).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// Evaluates the experiment and writes its output files.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<(Outcome, Vec<PathBuf>), CliError> {
    let outcome = evaluate(spec)?;
    let files = write_outcome(&spec.output, &outcome)?;
    Ok((outcome, files))
}

/// Human-readable table for the terminal.
pub fn render_table(rows: &[RateRow]) -> String {
    let mut s = format!(
        "{:>12} {:>8} {:>6} {:>14} {:>12} {:>10} {:>8}\n",
        "sweep", "strategy", "source", "msgs/s", "gross Mbps", "net Mbps", "window"
    );
    for r in rows {
        s.push_str(&format!(
            "{:>12} {:>8} {:>6} {:>14.3} {:>12.4} {:>10.4} {:>8}\n",
            r.sweep_value.map(fmt_sig).unwrap_or_else(|| "-".into()),
            r.strategy.as_str(),
            r.source.as_str(),
            r.y_msgs_per_s,
            r.y_gross_mbps,
            r.y_net_mbps,
            r.w_max_or_peak
        ));
    }
    s
}
