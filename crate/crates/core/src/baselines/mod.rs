//! Comparison planners that share the coverage graph and trajectory
//! construction with [`crate::solver`] but optimize a different objective.

mod genetic;

pub use genetic::{genetic_plan, GaConfig};

use crate::error::SolveError;
use crate::graph::build_graph;
use crate::model::Scenario;
use crate::solver::{shortest_distance_path, Method, Plan, SolverMeta};

/// Fastest mission that keeps coverage, ignoring handovers entirely.
pub fn shortest_time_plan(scenario: &Scenario) -> Result<Plan, SolveError> {
    scenario.check()?;
    let graph = build_graph(scenario);
    let path = shortest_distance_path(&graph).ok_or(SolveError::Infeasible {
        min_mission_time_s: None,
    })?;
    let time = graph.path_time(&path, scenario.v_max).expect("valid path");
    if time > scenario.t_max {
        return Err(SolveError::Infeasible {
            min_mission_time_s: Some(time),
        });
    }
    let mut meta = SolverMeta::new(Method::ShortestTime);
    meta.candidates_examined = 1;
    Ok(Plan::from_association(scenario, &graph.association(&path), meta)?)
}
