//! Handover-aware trajectory planning for cellular-connected UAVs.
//!
//! A UAV flies at fixed altitude from a start to a finish point and must
//! stay inside the coverage disk of its serving ground base station (GBS)
//! at all times. [`solver::solve`] picks the association sequence that
//! minimizes the number of handovers under a mission-time budget, using a
//! Lagrangian relaxation of the constrained shortest path problem on the
//! [`graph::CoverageGraph`] followed by a K-shortest-path search.
//! [`trajectory`] turns a sequence into a max-speed polyline and checks any
//! plan against the continuous-time constraints.

pub mod baselines;
pub mod error;
pub mod graph;
pub mod model;
pub mod solver;
pub mod sweep;
pub mod trajectory;

pub use error::{GraphError, ModelError, SolveError, TrajectoryError};
pub use graph::{build_graph, CoverageGraph, Path, Vertex};
pub use model::{
    coverage_radius, generate_scenario, snr, validate_scenario, CoverageDisk, Diagnostic, Gbs,
    Endpoints, GenSpec, Mix, Point, RadioParams, Scenario,
};
pub use solver::{solve, DualState, Method, Plan, SolverConfig, SolverMeta, StepRule};
pub use trajectory::{validate_plan, FlightTrace, Waypoint};
pub use baselines::{genetic_plan, shortest_time_plan, GaConfig};
pub use sweep::{run_sweep, Axis, SweepRow, SweepSpec};
