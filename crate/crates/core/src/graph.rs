//! Coverage graph over {start, stations, finish}.
//!
//! Two stations are adjacent when their coverage disks touch or overlap, and
//! the start/finish vertices are adjacent to every station whose disk
//! contains them. Every edge carries a handover weight (1 between two
//! stations, 0 otherwise) and a distance weight (horizontal distance between
//! the endpoints' positions).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::model::{CoverageDisk, Point, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Vertex {
    Start,
    Gbs(u32),
    Finish,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Start => f.write_str("U0"),
            Vertex::Gbs(id) => write!(f, "G{id}"),
            Vertex::Finish => f.write_str("UF"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Index of the far endpoint.
    pub to: usize,
    pub handover_weight: u8,
    /// Meters.
    pub distance: f64,
}

/// A start-to-finish walk stored as vertex indices of a [`CoverageGraph`].
///
/// Ordering is lexicographic on the indices, which matches the vertex-id
/// order (start, ascending station ids, finish).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub vertices: Vec<usize>,
}

impl Path {
    pub fn new(vertices: Vec<usize>) -> Self {
        Path { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct CoverageGraph {
    vertices: Vec<Vertex>,
    adjacency: Vec<Vec<Edge>>,
    positions: Vec<Point>,
    disks: BTreeMap<u32, CoverageDisk>,
}

/// Build the coverage graph. Stations without a coverage disk at the UAV
/// altitude are left out; a disconnected result is legal.
pub fn build_graph(scenario: &Scenario) -> CoverageGraph {
    let disks = scenario.coverage_disks();

    let mut vertices = Vec::with_capacity(disks.len() + 2);
    let mut positions = Vec::with_capacity(disks.len() + 2);
    vertices.push(Vertex::Start);
    positions.push(scenario.start);
    for (&id, disk) in &disks {
        vertices.push(Vertex::Gbs(id));
        positions.push(disk.center);
    }
    vertices.push(Vertex::Finish);
    positions.push(scenario.finish);

    let n = vertices.len();
    let finish = n - 1;
    let radii: Vec<f64> = disks.values().map(|d| d.radius).collect();
    let mut adjacency = vec![Vec::new(); n];
    let mut link = |a: usize, b: usize, handover_weight: u8| {
        let distance = positions[a].dist(positions[b]);
        adjacency[a].push(Edge {
            to: b,
            handover_weight,
            distance,
        });
        adjacency[b].push(Edge {
            to: a,
            handover_weight,
            distance,
        });
    };

    for i in 1..finish {
        let r = radii[i - 1];
        if scenario.start.dist(positions[i]) <= r {
            link(0, i, 0);
        }
    }
    for i in 1..finish {
        for j in (i + 1)..finish {
            if positions[i].dist(positions[j]) <= radii[i - 1] + radii[j - 1] {
                link(i, j, 1);
            }
        }
    }
    for i in 1..finish {
        if scenario.finish.dist(positions[i]) <= radii[i - 1] {
            link(i, finish, 0);
        }
    }
    for edges in &mut adjacency {
        edges.sort_by_key(|e| e.to);
    }

    CoverageGraph {
        vertices,
        adjacency,
        positions,
        disks,
    }
}

impl CoverageGraph {
    pub fn start(&self) -> usize {
        0
    }

    pub fn finish(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of station vertices.
    pub fn gbs_count(&self) -> usize {
        self.vertices.len() - 2
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        self.vertices[index]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn position(&self, index: usize) -> Point {
        self.positions[index]
    }

    pub fn neighbors(&self, index: usize) -> &[Edge] {
        &self.adjacency[index]
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<&Edge> {
        let edges = self.adjacency.get(a)?;
        edges
            .binary_search_by_key(&b, |e| e.to)
            .ok()
            .map(|i| &edges[i])
    }

    pub fn disks(&self) -> &BTreeMap<u32, CoverageDisk> {
        &self.disks
    }

    pub fn disk(&self, id: u32) -> Option<&CoverageDisk> {
        self.disks.get(&id)
    }

    pub fn index_of(&self, vertex: Vertex) -> Option<usize> {
        match vertex {
            Vertex::Start => Some(self.start()),
            Vertex::Finish => Some(self.finish()),
            Vertex::Gbs(_) => self.vertices[1..self.finish()]
                .binary_search(&vertex)
                .ok()
                .map(|i| i + 1),
        }
    }

    /// Path `start, G_{I_0}, .., G_{I_N}, finish` for an association
    /// sequence, checking every hop against the edge set.
    pub fn path_from_association(&self, association: &[u32]) -> Result<Path, GraphError> {
        let mut vertices = Vec::with_capacity(association.len() + 2);
        vertices.push(self.start());
        for &id in association {
            let idx = self.index_of(Vertex::Gbs(id)).ok_or_else(|| {
                GraphError::MalformedPath(format!("GBS {id} is not a graph vertex"))
            })?;
            vertices.push(idx);
        }
        vertices.push(self.finish());
        let path = Path::new(vertices);
        self.check_path(&path)?;
        Ok(path)
    }

    pub fn association(&self, path: &Path) -> Vec<u32> {
        path.vertices
            .iter()
            .filter_map(|&v| match self.vertices.get(v) {
                Some(Vertex::Gbs(id)) => Some(*id),
                _ => None,
            })
            .collect()
    }

    /// A valid path runs start -> finish over existing edges without
    /// repeating a vertex.
    pub fn check_path(&self, path: &Path) -> Result<(), GraphError> {
        let v = &path.vertices;
        let malformed = |msg: String| Err(GraphError::MalformedPath(msg));
        if v.len() < 2 || v[0] != self.start() || v[v.len() - 1] != self.finish() {
            return malformed("must run from the start vertex to the finish vertex".into());
        }
        let mut seen = vec![false; self.vertex_count()];
        for &i in v {
            if i >= self.vertex_count() {
                return malformed(format!("vertex index {i} out of range"));
            }
            if std::mem::replace(&mut seen[i], true) {
                return malformed(format!("vertex {} repeated", self.vertices[i]));
            }
        }
        for w in v.windows(2) {
            if self.edge(w[0], w[1]).is_none() {
                return malformed(format!(
                    "no edge between {} and {}",
                    self.vertices[w[0]], self.vertices[w[1]]
                ));
            }
        }
        Ok(())
    }

    fn edges_of<'a>(&'a self, path: &'a Path) -> impl Iterator<Item = &'a Edge> + 'a {
        path.vertices
            .windows(2)
            .map(|w| self.edge(w[0], w[1]).expect("checked path"))
    }

    /// Number of handovers along the path (sum of handover weights).
    pub fn path_handovers(&self, path: &Path) -> Result<u32, GraphError> {
        self.check_path(path)?;
        Ok(self.edges_of(path).map(|e| u32::from(e.handover_weight)).sum())
    }

    /// Total horizontal length of the path in meters.
    pub fn path_distance(&self, path: &Path) -> Result<f64, GraphError> {
        self.check_path(path)?;
        Ok(self.edges_of(path).map(|e| e.distance).sum())
    }

    /// Mission time in seconds when the path is flown at `v_max`.
    pub fn path_time(&self, path: &Path, v_max: f64) -> Result<f64, GraphError> {
        Ok(self.path_distance(path)? / v_max)
    }

    /// Edge list as CSV (`u,v,handover_weight,distance_m`), each undirected
    /// edge once with `u < v` in vertex order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v,handover_weight,distance_m\n");
        for (a, edges) in self.adjacency.iter().enumerate() {
            for e in edges.iter().filter(|e| e.to > a) {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    self.vertices[a], self.vertices[e.to], e.handover_weight, e.distance
                );
            }
        }
        out
    }
}
