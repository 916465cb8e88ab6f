//! Exhaustive search over simple start-to-finish paths, for small graphs.

use super::dual::shortest_distance_path;
use super::{Method, PathScore, Plan, SolverMeta};
use crate::error::SolveError;
use crate::graph::{build_graph, CoverageGraph, Path};
use crate::model::Scenario;

pub const DEFAULT_ORACLE_CAP: usize = 10;

pub fn exhaustive_oracle(scenario: &Scenario) -> Result<Plan, SolveError> {
    exhaustive_oracle_with_cap(scenario, DEFAULT_ORACLE_CAP)
}

/// Globally optimal plan (same ranking as [`super::solve`]) by depth-first
/// enumeration. Refuses graphs with more than `cap` station vertices.
pub fn exhaustive_oracle_with_cap(scenario: &Scenario, cap: usize) -> Result<Plan, SolveError> {
    scenario.check()?;
    let graph = build_graph(scenario);
    if graph.gbs_count() > cap {
        return Err(SolveError::TooLarge {
            gbs: graph.gbs_count(),
            cap,
        });
    }
    let mut search = Search {
        graph: &graph,
        t_max: scenario.t_max,
        v_max: scenario.v_max,
        stack: vec![graph.start()],
        on_stack: vec![false; graph.vertex_count()],
        best: None,
        visited_paths: 0,
    };
    search.on_stack[graph.start()] = true;
    search.descend(0.0, 0);

    let visited = search.visited_paths;
    match search.best {
        Some((_, path)) => {
            let mut meta = SolverMeta::new(Method::Exhaustive);
            meta.candidates_examined = visited;
            Ok(Plan::from_association(scenario, &graph.association(&path), meta)?)
        }
        None => Err(SolveError::Infeasible {
            min_mission_time_s: shortest_distance_path(&graph)
                .map(|p| graph.path_time(&p, scenario.v_max).expect("valid path")),
        }),
    }
}

struct Search<'a> {
    graph: &'a CoverageGraph,
    t_max: f64,
    v_max: f64,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    best: Option<(PathScore, Path)>,
    visited_paths: usize,
}

impl Search<'_> {
    fn descend(&mut self, distance: f64, handovers: u32) {
        let here = *self.stack.last().expect("stack holds the start");
        for e in self.graph.neighbors(here) {
            let v = e.to;
            if self.on_stack[v] || v == self.graph.start() {
                continue;
            }
            if here == self.graph.start() && v == self.graph.finish() {
                continue;
            }
            let d = distance + e.distance;
            let h = handovers + u32::from(e.handover_weight);
            // distances only grow along a walk
            if d / self.v_max > self.t_max {
                continue;
            }
            if v == self.graph.finish() {
                self.visited_paths += 1;
                let mut vertices = self.stack.clone();
                vertices.push(v);
                let path = Path::new(vertices);
                let score = PathScore::of(self.graph, &path, self.v_max);
                if score.mission_time_s <= self.t_max && self.best.as_ref().is_none_or(|(b, _)| score < *b) {
                    self.best = Some((score, path));
                }
                continue;
            }
            if self.best.as_ref().is_some_and(|(b, _)| h > b.handovers) {
                continue;
            }
            self.stack.push(v);
            self.on_stack[v] = true;
            self.descend(d, h);
            self.on_stack[v] = false;
            self.stack.pop();
        }
    }
}
