//! Yen's K shortest loopless paths on the coverage graph.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use super::dijkstra::{sequence_cost, shortest_to_finish, Blocked};
use crate::graph::{CoverageGraph, Edge, Path};

struct Candidate {
    cost: f64,
    path: Vec<usize>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.path.cmp(&other.path))
    }
}

/// Up to `k` distinct loopless start-to-finish paths in nondecreasing
/// weight, ties broken by vertex order. The first path is the plain
/// shortest path under `weight`.
pub fn yen_k_shortest<F>(graph: &CoverageGraph, weight: F, k: usize) -> Vec<(Path, f64)>
where
    F: Fn(&Edge) -> f64,
{
    let n = graph.vertex_count();
    let mut accepted: Vec<Vec<usize>> = Vec::new();
    if k == 0 {
        return Vec::new();
    }
    let Some((first, _)) = shortest_to_finish(graph, graph.start(), &weight, &Blocked::none(n)) else {
        return Vec::new();
    };
    accepted.push(first);

    let mut pending: BTreeSet<Candidate> = BTreeSet::new();
    let mut known: HashSet<Vec<usize>> = accepted.iter().cloned().collect();

    while accepted.len() < k {
        let last = accepted.last().expect("nonempty").clone();
        for i in 0..last.len() - 1 {
            let spur = last[i];
            let root = &last[..=i];
            let mut blocked = Blocked::none(n);
            for p in &accepted {
                if p.len() > i + 1 && &p[..=i] == root {
                    blocked.block_edge(p[i], p[i + 1]);
                }
            }
            for &v in &root[..i] {
                blocked.vertices[v] = true;
            }
            let Some((tail, _)) = shortest_to_finish(graph, spur, &weight, &blocked) else {
                continue;
            };
            let mut path = root[..i].to_vec();
            path.extend(tail);
            if known.insert(path.clone()) {
                let cost = sequence_cost(graph, &path, &weight);
                pending.insert(Candidate { cost, path });
            }
        }
        match pending.pop_first() {
            Some(best) => accepted.push(best.path),
            None => break,
        }
    }

    accepted
        .into_iter()
        .map(|v| {
            let cost = sequence_cost(graph, &v, &weight);
            (Path::new(v), cost)
        })
        .collect()
}
