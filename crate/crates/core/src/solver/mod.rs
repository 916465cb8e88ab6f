//! Min-handover planning under a mission-time budget.
//!
//! [`solve`] runs projected subgradient ascent on the Lagrangian dual
//! ([`dual::solve_dual`]), then enumerates the K best paths under the
//! dual-optimal combined weight ([`yen::yen_k_shortest`]) and keeps the best
//! feasible candidate. [`oracle::exhaustive_oracle`] gives the exact answer
//! on small instances for comparison.

mod dijkstra;
pub mod dual;
pub mod oracle;
pub mod yen;

use std::cmp::Ordering;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

pub use dual::{shortest_distance_path, shortest_path_combined, solve_dual, DualIterate, DualState};
pub use oracle::{exhaustive_oracle, exhaustive_oracle_with_cap, DEFAULT_ORACLE_CAP};
pub use yen::yen_k_shortest;

use crate::error::{ModelError, SolveError, TrajectoryError};
use crate::graph::{build_graph, CoverageGraph, Path};
use crate::model::{Point, Scenario};
use crate::trajectory::{self, Waypoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StepRule {
    /// `s_k = s0 / k`.
    Diminishing {
        #[serde(default)]
        s0: Option<f64>,
    },
    /// `s_k = s0`.
    Constant {
        #[serde(default)]
        s0: Option<f64>,
    },
}

impl StepRule {
    fn s0(&self) -> Option<f64> {
        match *self {
            StepRule::Diminishing { s0 } | StepRule::Constant { s0 } => s0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Number of K-shortest-path candidates examined after the dual phase.
    pub k_candidates: usize,
    pub max_dual_iters: usize,
    pub initial_lambda: f64,
    /// Subgradient step rule; an absent `s0` means `1 / t_max`.
    pub step_rule: StepRule,
    /// Stop the dual phase once `|f_T - t_max|` is this small (seconds).
    pub feasibility_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k_candidates: 50,
            max_dual_iters: 200,
            initial_lambda: 0.0,
            step_rule: StepRule::Diminishing { s0: None },
            feasibility_tolerance: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn check(&self) -> Result<(), SolveError> {
        let bad = |msg: String| Err(SolveError::Config(msg));
        if self.k_candidates == 0 {
            return bad("k_candidates must be at least 1".into());
        }
        if self.max_dual_iters == 0 {
            return bad("max_dual_iters must be at least 1".into());
        }
        if !(self.initial_lambda >= 0.0 && self.initial_lambda.is_finite()) {
            return bad(format!("initial_lambda must be >= 0 (got {})", self.initial_lambda));
        }
        if !(self.feasibility_tolerance >= 0.0) {
            return bad(format!(
                "feasibility_tolerance must be >= 0 (got {})",
                self.feasibility_tolerance
            ));
        }
        if let Some(s0) = self.step_rule.s0() {
            if !(s0 > 0.0 && s0.is_finite()) {
                return bad(format!("step size s0 must be positive (got {s0})"));
            }
        }
        Ok(())
    }

    pub(crate) fn step_size(&self, t_max: f64) -> f64 {
        self.step_rule
            .s0()
            .unwrap_or(if t_max > 0.0 { 1.0 / t_max } else { 1.0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Proposed,
    ShortestTime,
    Genetic,
    Exhaustive,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::ShortestTime => "shortest_time",
            Method::Genetic => "genetic",
            Method::Exhaustive => "exhaustive",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "proposed" => Ok(Method::Proposed),
            "shortest_time" => Ok(Method::ShortestTime),
            "genetic" => Ok(Method::Genetic),
            "exhaustive" => Ok(Method::Exhaustive),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub method: Method,
    #[serde(default)]
    pub lambda_star: Option<f64>,
    #[serde(default)]
    pub dual_value: Option<f64>,
    #[serde(default)]
    pub dual_iterations: usize,
    #[serde(default)]
    pub candidates_examined: usize,
    pub feasible: bool,
}

impl SolverMeta {
    pub fn new(method: Method) -> Self {
        SolverMeta {
            method,
            lambda_star: None,
            dual_value: None,
            dual_iterations: 0,
            candidates_examined: 0,
            feasible: true,
        }
    }
}

/// A complete mission: association sequence, its handover count and time,
/// handover locations and the timed trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub association: Vec<u32>,
    pub handovers: u32,
    pub mission_time_s: f64,
    /// `u_0 = start, u_1 .. u_N, u_{N+1} = finish`.
    pub handover_points_m: Vec<Point>,
    pub waypoints: Vec<Waypoint>,
    pub solver_meta: SolverMeta,
}

impl Plan {
    pub fn from_association(
        scenario: &Scenario,
        association: &[u32],
        mut meta: SolverMeta,
    ) -> Result<Plan, TrajectoryError> {
        let handover_points_m = trajectory::handover_points(scenario, association)?;
        let waypoints = trajectory::build_trajectory(scenario, association)?;
        let mission_time_s = trajectory::mission_time(scenario, association)?;
        meta.feasible = mission_time_s <= scenario.t_max + trajectory::TIME_SLACK_S;
        Ok(Plan {
            association: association.to_vec(),
            handovers: association.len() as u32 - 1,
            mission_time_s,
            handover_points_m,
            waypoints,
            solver_meta: meta,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_json(text: &str) -> Result<Plan, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Plan, ModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Plan::from_json(&text)
    }
}

/// Ranking key shared by every planner: fewer handovers, then shorter
/// mission, then lexicographically smaller association.
#[derive(Debug, Clone, PartialEq)]
pub struct PathScore {
    pub handovers: u32,
    pub mission_time_s: f64,
    pub association: Vec<u32>,
}

impl PathScore {
    pub fn of(graph: &CoverageGraph, path: &Path, v_max: f64) -> PathScore {
        PathScore {
            handovers: graph.path_handovers(path).expect("valid path"),
            mission_time_s: graph.path_time(path, v_max).expect("valid path"),
            association: graph.association(path),
        }
    }
}

impl Eq for PathScore {}

impl PartialOrd for PathScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PathScore {
    fn cmp(&self, other: &Self) -> Ordering {
        self.handovers
            .cmp(&other.handovers)
            .then_with(|| self.mission_time_s.total_cmp(&other.mission_time_s))
            .then_with(|| self.association.cmp(&other.association))
    }
}

/// Plan the mission with the fewest handovers that fits the time budget.
pub fn solve(scenario: &Scenario, config: &SolverConfig) -> Result<Plan, SolveError> {
    scenario.check()?;
    config.check()?;
    let graph = build_graph(scenario);
    solve_on_graph(&graph, scenario, config)
}

/// [`solve`] on a prebuilt graph (which must come from `scenario`).
pub fn solve_on_graph(
    graph: &CoverageGraph,
    scenario: &Scenario,
    config: &SolverConfig,
) -> Result<Plan, SolveError> {
    let dual = solve_dual(graph, scenario, config)?;
    let v_max = scenario.v_max;

    let mut best: Option<(PathScore, Path)> = dual
        .best_feasible
        .as_ref()
        .map(|p| (PathScore::of(graph, p, v_max), p.clone()));

    let weight = dual::combined_weight(dual.lambda, v_max);
    let candidates = yen_k_shortest(graph, weight, config.k_candidates);
    for (path, _) in &candidates {
        let score = PathScore::of(graph, path, v_max);
        if score.mission_time_s <= scenario.t_max && best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, path.clone()));
        }
    }

    let (score, _) = best.expect("dual phase yields a feasible path or an error");
    let mut meta = SolverMeta::new(Method::Proposed);
    meta.lambda_star = Some(dual.lambda);
    meta.dual_value = Some(dual.dual_value);
    meta.dual_iterations = dual.iteration;
    meta.candidates_examined = candidates.len() + 1;
    Ok(Plan::from_association(scenario, &score.association, meta)?)
}
