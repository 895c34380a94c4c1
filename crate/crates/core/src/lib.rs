//! Receive-rate model and discrete-event simulator for per-packet multipath
//! Interest forwarding under a receiver-driven, loss-based AIMD window.
//!
//! The crate is organised in four layers:
//!
//! * [`path`]: scenario description (paths, message sizing) and the
//!   elementary per-path formulas (RTT approximation, pipeline capacity).
//! * [`sharing`]: the sharing functions `P(H)` of the five forwarding
//!   strategies, i.e. how `H` pending Interests split across paths.
//! * [`model`]: closed-form cycle evaluation of the AIMD receive-rate.
//! * [`sim`]: a packet-level event-driven simulator running the same
//!   strategies as online per-Interest deciders.

pub mod model;
pub mod path;
pub mod sharing;
pub mod sim;
mod strategy;

pub use model::{cycle, sweep_model, wmax, CycleStats, ModelError, RoundStats};
pub use path::{pipeline_capacity, rtt, PathSpec, Scenario, ScenarioError, SweepKind, SweepParam};
pub use sharing::{share, Sharer, SharingVector};
pub use sim::{
    run, select_face, sweep_sim, CapacityMode, FaceState, LossSignal, RttEstimator, SimConfig,
    SimError, SimResult,
};
pub use strategy::{ParseStrategyError, StrategyId};
