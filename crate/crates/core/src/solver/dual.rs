//! Lagrangian dual of the time-constrained min-handover path problem.
//!
//! Relaxing `f_T(I) <= T_max` with a multiplier `lambda >= 0` leaves an
//! ordinary shortest-path problem with edge weight
//! `handover + lambda * distance / v_max`. The dual function
//! `g(lambda) = min_I f_H(I) + lambda * (f_T(I) - T_max)` is concave and is
//! maximized by projected subgradient ascent.

use serde::{Deserialize, Serialize};

use super::dijkstra::{shortest_to_finish, Blocked};
use super::{PathScore, SolverConfig, StepRule};
use crate::error::SolveError;
use crate::graph::{CoverageGraph, Edge, Path};
use crate::model::Scenario;

/// Shortest start-to-finish path under `handover + lambda * distance / v_max`.
pub fn shortest_path_combined(graph: &CoverageGraph, lambda: f64, v_max: f64) -> Option<Path> {
    assert!(lambda >= 0.0, "lambda must be nonnegative");
    let weight = combined_weight(lambda, v_max);
    let blocked = Blocked::none(graph.vertex_count());
    shortest_to_finish(graph, graph.start(), &weight, &blocked).map(|(v, _)| Path::new(v))
}

pub(crate) fn combined_weight(lambda: f64, v_max: f64) -> impl Fn(&Edge) -> f64 {
    move |e: &Edge| f64::from(e.handover_weight) + lambda * e.distance / v_max
}

/// Path minimizing total distance (and therefore mission time).
pub fn shortest_distance_path(graph: &CoverageGraph) -> Option<Path> {
    let blocked = Blocked::none(graph.vertex_count());
    shortest_to_finish(graph, graph.start(), &|e: &Edge| e.distance, &blocked).map(|(v, _)| Path::new(v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualIterate {
    pub lambda: f64,
    pub dual_value: f64,
    pub handovers: u32,
    pub mission_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct DualState {
    /// Multiplier with the best dual value seen.
    pub lambda: f64,
    /// Best feasible path seen across all iterates (min handovers, then
    /// min time, then vertex order), including the distance-shortest path.
    pub best_feasible: Option<Path>,
    /// Best (largest) dual value seen; a lower bound on the optimum.
    pub dual_value: f64,
    /// Number of subgradient iterations run.
    pub iteration: usize,
    pub history: Vec<DualIterate>,
}

pub fn solve_dual(
    graph: &CoverageGraph,
    scenario: &Scenario,
    config: &SolverConfig,
) -> Result<DualState, SolveError> {
    config.check()?;
    let v_max = scenario.v_max;
    let t_max = scenario.t_max;
    let s0 = config.step_size(t_max);

    let mut lambda = config.initial_lambda;
    let mut best_lambda = lambda;
    let mut best_dual = f64::NEG_INFINITY;
    let mut best: Option<(PathScore, Path)> = None;
    let mut history = Vec::new();
    let mut iteration = 0;

    let consider = |path: &Path, best: &mut Option<(PathScore, Path)>| {
        let score = PathScore::of(graph, path, v_max);
        if score.mission_time_s <= t_max && best.as_ref().is_none_or(|(b, _)| score < *b) {
            *best = Some((score.clone(), path.clone()));
        }
        score
    };

    while iteration < config.max_dual_iters {
        iteration += 1;
        let Some(path) = shortest_path_combined(graph, lambda, v_max) else {
            return Err(SolveError::Infeasible {
                min_mission_time_s: None,
            });
        };
        let score = consider(&path, &mut best);
        let subgradient = score.mission_time_s - t_max;
        let dual = f64::from(score.handovers) + lambda * subgradient;
        history.push(DualIterate {
            lambda,
            dual_value: dual,
            handovers: score.handovers,
            mission_time_s: score.mission_time_s,
        });
        if dual > best_dual {
            best_dual = dual;
            best_lambda = lambda;
        }

        if subgradient.abs() <= config.feasibility_tolerance {
            break;
        }
        // constraint slack at lambda = 0: the iterate would repeat forever
        if lambda == 0.0 && subgradient <= 0.0 {
            break;
        }
        // integral objective: a feasible value within one of the bound is optimal
        if let Some((b, _)) = &best {
            if f64::from(b.handovers) < best_dual + 1.0 - 1e-9 {
                break;
            }
        }

        let step = match config.step_rule {
            StepRule::Diminishing { .. } => s0 / iteration as f64,
            StepRule::Constant { .. } => s0,
        };
        lambda = (lambda + step * subgradient).max(0.0);
    }

    let fastest = shortest_distance_path(graph).expect("connected: combined search succeeded");
    let fastest_score = consider(&fastest, &mut best);
    if best.is_none() {
        return Err(SolveError::Infeasible {
            min_mission_time_s: Some(fastest_score.mission_time_s),
        });
    }

    Ok(DualState {
        lambda: best_lambda,
        best_feasible: best.map(|(_, p)| p),
        dual_value: best_dual,
        iteration,
        history,
    })
}
