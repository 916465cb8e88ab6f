//! Penalty-based genetic search over association sequences.
//!
//! Individuals are duplicate-free lists of covered station vertices. They
//! need not be paths of the coverage graph: every missing edge (start to
//! first, consecutive stations, last to finish) costs one penalty, as does
//! every second over the time budget.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::graph::{build_graph, CoverageGraph, Path};
use crate::model::Scenario;
use crate::solver::{shortest_distance_path, Method, PathScore, Plan, SolverMeta};

const TOURNAMENT: usize = 3;
const ELITES: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub seed: u64,
    /// Fitness cost per second over budget and per missing edge.
    pub infeasibility_penalty: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 100,
            generations: 200,
            crossover_rate: 0.9,
            mutation_rate: 0.3,
            seed: 0,
            infeasibility_penalty: 10.0,
        }
    }
}

impl GaConfig {
    pub fn check(&self) -> Result<(), SolveError> {
        let bad = |msg: String| Err(SolveError::Config(msg));
        if self.population_size == 0 || self.generations == 0 {
            return bad("population_size and generations must be at least 1".into());
        }
        for (name, p) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1] (got {p})"));
            }
        }
        if !(self.infeasibility_penalty >= 0.0 && self.infeasibility_penalty.is_finite()) {
            return bad(format!(
                "infeasibility_penalty must be >= 0 (got {})",
                self.infeasibility_penalty
            ));
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Individual {
    genes: Vec<usize>,
    fitness: f64,
    /// `Some` when the genes form a feasible graph path.
    score: Option<PathScore>,
}

struct Problem<'a> {
    graph: &'a CoverageGraph,
    t_max: f64,
    v_max: f64,
    penalty: f64,
    stations: Vec<usize>,
}

impl Problem<'_> {
    fn evaluate(&self, genes: Vec<usize>) -> Individual {
        let g = self.graph;
        let mut stops = Vec::with_capacity(genes.len() + 2);
        stops.push(g.start());
        stops.extend_from_slice(&genes);
        stops.push(g.finish());

        let mut missing = 0u32;
        let mut distance = 0.0;
        for w in stops.windows(2) {
            distance += g.position(w[0]).dist(g.position(w[1]));
            if g.edge(w[0], w[1]).is_none() {
                missing += 1;
            }
        }
        let time = distance / self.v_max;
        let handovers = genes.len().saturating_sub(1) as f64;
        let over = (time - self.t_max).max(0.0);
        let fitness = handovers + self.penalty * (over + f64::from(missing));
        let score = (missing == 0 && time <= self.t_max).then(|| PathScore::of(g, &Path::new(stops), self.v_max));
        Individual { genes, fitness, score }
    }

    /// A random walk from a station covering the start, stopping at random
    /// once the finish is reachable.
    fn random_walk(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let g = self.graph;
        let first: Vec<usize> = g
            .neighbors(g.start())
            .iter()
            .map(|e| e.to)
            .filter(|&v| v != g.finish())
            .collect();
        let Some(&head) = first.choose(rng).or_else(|| self.stations.choose(rng)) else {
            return Vec::new();
        };
        let mut genes = vec![head];
        loop {
            let here = *genes.last().unwrap();
            if g.edge(here, g.finish()).is_some() && rng.gen_bool(0.5) {
                break;
            }
            let next: Vec<usize> = g
                .neighbors(here)
                .iter()
                .map(|e| e.to)
                .filter(|&v| v != g.start() && v != g.finish() && !genes.contains(&v))
                .collect();
            match next.choose(rng) {
                Some(&v) => genes.push(v),
                None => break,
            }
        }
        genes
    }

    fn mutate(&self, genes: &mut Vec<usize>, rng: &mut ChaCha8Rng) {
        match rng.gen_range(0..3) {
            0 => {
                let unused: Vec<usize> = self.stations.iter().copied().filter(|v| !genes.contains(v)).collect();
                if let Some(&v) = unused.choose(rng) {
                    let at = rng.gen_range(0..=genes.len());
                    genes.insert(at, v);
                }
            }
            1 if genes.len() > 1 => {
                let at = rng.gen_range(0..genes.len());
                genes.remove(at);
            }
            2 if genes.len() > 1 => {
                let a = rng.gen_range(0..genes.len());
                let b = rng.gen_range(0..genes.len());
                genes.swap(a, b);
            }
            _ => {}
        }
    }
}

/// Head of `a`, then the tail of `b` minus anything already taken.
fn crossover(a: &[usize], b: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let cut_a = rng.gen_range(1..=a.len());
    let cut_b = rng.gen_range(0..b.len());
    let mut child = a[..cut_a].to_vec();
    for &v in &b[cut_b..] {
        if !child.contains(&v) {
            child.push(v);
        }
    }
    child
}

fn tournament<'p>(pop: &'p [Individual], rng: &mut ChaCha8Rng) -> &'p Individual {
    (0..TOURNAMENT)
        .map(|_| &pop[rng.gen_range(0..pop.len())])
        .min_by(|x, y| x.fitness.total_cmp(&y.fitness))
        .expect("tournament is nonempty")
}

/// Best feasible sequence found by a seeded genetic search.
pub fn genetic_plan(scenario: &Scenario, config: &GaConfig) -> Result<Plan, SolveError> {
    scenario.check()?;
    config.check()?;
    let graph = build_graph(scenario);
    let infeasible = || SolveError::Infeasible {
        min_mission_time_s: shortest_distance_path(&graph)
            .map(|p| graph.path_time(&p, scenario.v_max).expect("valid path")),
    };
    let stations: Vec<usize> = (1..=graph.gbs_count()).collect();
    if stations.is_empty() {
        return Err(infeasible());
    }
    let problem = Problem {
        graph: &graph,
        t_max: scenario.t_max,
        v_max: scenario.v_max,
        penalty: config.infeasibility_penalty,
        stations,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let seeds: Vec<Vec<usize>> = (0..config.population_size)
        .map(|_| problem.random_walk(&mut rng))
        .collect();
    let mut pop: Vec<Individual> = seeds.into_par_iter().map(|g| problem.evaluate(g)).collect();
    let mut best: Option<PathScore> = None;
    let mut evaluated = pop.len();

    for generation in 0..=config.generations {
        for ind in &pop {
            if let Some(s) = &ind.score {
                if best.as_ref().is_none_or(|b| s < b) {
                    best = Some(s.clone());
                }
            }
        }
        if generation == config.generations {
            break;
        }

        pop.sort_by(|x, y| x.fitness.total_cmp(&y.fitness).then_with(|| x.genes.cmp(&y.genes)));
        let mut next: Vec<Vec<usize>> = pop.iter().take(ELITES).map(|i| i.genes.clone()).collect();
        while next.len() < config.population_size {
            let a = tournament(&pop, &mut rng);
            let mut child = if rng.gen_bool(config.crossover_rate) {
                let b = tournament(&pop, &mut rng);
                crossover(&a.genes, &b.genes, &mut rng)
            } else {
                a.genes.clone()
            };
            if rng.gen_bool(config.mutation_rate) {
                problem.mutate(&mut child, &mut rng);
            }
            if child.is_empty() {
                child.push(*problem.stations.choose(&mut rng).expect("stations nonempty"));
            }
            next.push(child);
        }
        evaluated += next.len();
        pop = next.into_par_iter().map(|g| problem.evaluate(g)).collect();
    }

    let score = best.ok_or_else(infeasible)?;
    let mut meta = SolverMeta::new(Method::Genetic);
    meta.candidates_examined = evaluated;
    Ok(Plan::from_association(scenario, &score.association, meta)?)
}
