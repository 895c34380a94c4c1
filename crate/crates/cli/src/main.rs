use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use icnmp::StrategyId;
use icnmp_cli::{
    load_experiment, prepare, render_table, run_experiment, CliError, Command, Overrides,
};

/// Receive-rate model and simulator for multipath Interest forwarding.
///
/// Experiment files give delays in ms (path.delay_ms), rates in Mbps
/// (path.rate_mbps), buffers in Data messages (path.buffer_msgs) and message
/// sizes in bytes (data_msg_bytes, payload_bytes). Simulated time is in
/// seconds (sim.duration_s, sim.warmup_s).
///
/// Exit status: 0 ok, 1 usage error, 2 invalid experiment, 3 runtime error.
#[derive(Parser)]
#[command(name = "icnmp", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the analytical model (over the sweep if one is defined).
    Model(Common),
    /// Run the simulator (over the sweep if one is defined).
    Sim(Common),
    /// Run the experiment's sweep in the mode it specifies.
    Sweep(Common),
    /// Simulate the base scenario and write window traces.
    Trace(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment file.
    #[arg(long, value_name = "FILE")]
    experiment: PathBuf,
    /// Comma-separated strategies (pe, re, ug, cf, fpf); replaces the file's list.
    #[arg(long, value_name = "LIST", value_delimiter = ',', value_parser = strategy)]
    strategy: Vec<StrategyId>,
    /// Tie-breaking seed; 0 always picks the lowest face index.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file prefix; `-rates.csv` and `-window-<strategy>.csv` are appended.
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
}

fn strategy(s: &str) -> Result<StrategyId, String> {
    s.trim()
        .parse()
        .map_err(|e: icnmp::ParseStrategyError| e.to_string())
}

fn execute(command: Command, args: Common) -> Result<(), CliError> {
    let spec = load_experiment(&args.experiment)?;
    let overrides = Overrides {
        strategies: (!args.strategy.is_empty()).then_some(args.strategy),
        seed: args.seed,
        out: args.out,
    };
    let spec = prepare(spec, command, overrides)?;
    let (outcome, files) = run_experiment(&spec)?;
    print!("{}", render_table(&outcome.rows));
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, args) = match cli.command {
        Cmd::Model(a) => (Command::Model, a),
        Cmd::Sim(a) => (Command::Sim, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Trace(a) => (Command::Trace, a),
    };
    match execute(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
