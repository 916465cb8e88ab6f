use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::graph::{CoverageGraph, Edge};

#[derive(Clone, Copy)]
struct Entry {
    cost: f64,
    vertex: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Vertices and undirected edges a search may not use.
#[derive(Default)]
pub(crate) struct Blocked {
    pub vertices: Vec<bool>,
    pub edges: HashSet<(usize, usize)>,
}

impl Blocked {
    pub fn none(n: usize) -> Self {
        Blocked {
            vertices: vec![false; n],
            edges: HashSet::new(),
        }
    }

    pub fn block_edge(&mut self, a: usize, b: usize) {
        self.edges.insert((a.min(b), a.max(b)));
    }

    fn edge_blocked(&self, a: usize, b: usize) -> bool {
        !self.edges.is_empty() && self.edges.contains(&(a.min(b), a.max(b)))
    }
}

fn chain(pred: &[usize], mut v: usize, source: usize) -> Vec<usize> {
    let mut out = vec![v];
    while v != source {
        v = pred[v];
        out.push(v);
    }
    out.reverse();
    out
}

/// Label-setting shortest path from `source` to the graph's finish vertex
/// under a nonnegative per-edge weight.
///
/// The start and finish vertices are never used as intermediate stops.
/// Among equal-cost paths the lexicographically smallest vertex sequence
/// wins. Returns the vertex sequence and its cost.
pub(crate) fn shortest_to_finish<F>(
    graph: &CoverageGraph,
    source: usize,
    weight: &F,
    blocked: &Blocked,
) -> Option<(Vec<usize>, f64)>
where
    F: Fn(&Edge) -> f64,
{
    let n = graph.vertex_count();
    let target = graph.finish();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        vertex: source,
    });

    while let Some(Entry { cost, vertex: u }) = heap.pop() {
        if settled[u] || cost > dist[u] {
            continue;
        }
        settled[u] = true;
        if u == target {
            break;
        }
        if u == graph.start() && u != source {
            continue;
        }
        for e in graph.neighbors(u) {
            let v = e.to;
            if settled[v] || blocked.vertices[v] || blocked.edge_blocked(u, v) {
                continue;
            }
            let w = weight(e);
            debug_assert!(w >= 0.0, "negative edge weight {w}");
            let nd = cost + w;
            let better = if nd < dist[v] {
                true
            } else if nd == dist[v] {
                let mut via_u = chain(&pred, u, source);
                via_u.push(v);
                via_u < chain(&pred, v, source)
            } else {
                false
            };
            if better {
                dist[v] = nd;
                pred[v] = u;
                heap.push(Entry { cost: nd, vertex: v });
            }
        }
    }

    settled[target].then(|| (chain(&pred, target, source), dist[target]))
}

/// Cost of a vertex sequence, summed edge by edge from the front.
pub(crate) fn sequence_cost<F>(graph: &CoverageGraph, vertices: &[usize], weight: &F) -> f64
where
    F: Fn(&Edge) -> f64,
{
    vertices
        .windows(2)
        .map(|w| weight(graph.edge(w[0], w[1]).expect("sequence follows edges")))
        .sum()
}
