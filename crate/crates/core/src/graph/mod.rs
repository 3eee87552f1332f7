//! Compressed undirected graphs and the operations the solver pipeline
//! needs on them: ingestion, induced subgraphs and random instances.
//!
//! Vertices are dense `u32` indices assigned in first-appearance order of
//! the original ids found in the input. Every module speaks internal
//! indices; [`Labels`] maps back to what the input file called a vertex.

mod generate;
mod parse;

use std::fmt;

use thiserror::Error;

pub use generate::generate_er;
pub use parse::{parse_edge_list, write_snap, Format, ParseSummary, Parsed};

/// Internal vertex index.
pub type VertexId = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("input contains no vertices")]
    EmptyInput,
    #[error("vertex count {0} overflows the 32-bit index type")]
    TooManyVertices(u64),
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: u64, n: usize },
    #[error("vertex set is not strictly increasing at position {0}")]
    UnsortedVertexSet(usize),
    #[error("unknown format `{0}` (expected snap, mtx or dimacs)")]
    UnknownFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Original vertex ids as they appeared in the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Labels {
    Numeric(Vec<u64>),
    Text(Vec<String>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Numeric(v) => v.len(),
            Labels::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Simple undirected graph in compressed sparse row form.
///
/// Neighbor lists are strictly increasing, symmetric, and free of
/// self-loops. The graph never changes after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    labels: Option<Labels>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m())
            .finish()
    }
}

impl Graph {
    /// Builds a graph on `n` vertices from an arbitrary edge list.
    ///
    /// Self-loops are dropped and each unordered pair is kept once, so a
    /// directed input is symmetrized. Panics if an endpoint is `>= n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Graph {
        Self::build(n, edges).0
    }

    /// Like [`Graph::from_edges`] but also reports how many self-loops and
    /// redundant (duplicate or reversed) edges were discarded.
    pub(crate) fn build(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> (Graph, usize, usize) {
        let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
        let mut self_loops = 0;
        let mut input_edges = 0usize;
        for (u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge ({u}, {v}) out of range");
            input_edges += 1;
            if u == v {
                self_loops += 1;
                continue;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        let redundant = input_edges - self_loops - pairs.len();

        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0; offsets[n]];
        // Pairs are sorted by (u, v), so every list receives its smaller
        // neighbors first, each run in increasing order: no per-list sort.
        for &(u, v) in &pairs {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        let graph = Graph { offsets, neighbors, labels: None };
        (graph, self_loops, redundant)
    }

    pub fn complete(n: usize) -> Graph {
        let n32 = n as VertexId;
        Graph::from_edges(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v))))
    }

    pub fn empty(n: usize) -> Graph {
        Graph::from_edges(n, std::iter::empty())
    }

    pub fn with_labels(mut self, labels: Labels) -> Graph {
        assert_eq!(labels.len(), self.n(), "label count must match vertex count");
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    /// Original id of `v`, or the internal index when the graph is unlabeled.
    pub fn label(&self, v: VertexId) -> String {
        match &self.labels {
            Some(Labels::Numeric(ids)) => ids[v as usize].to_string(),
            Some(Labels::Text(ids)) => ids[v as usize].clone(),
            None => v.to_string(),
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.n() as VertexId
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u).iter().copied().filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    pub fn is_clique(&self, vertices: &[VertexId]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| u != v && self.has_edge(u, v)))
    }

    /// Edge density `2m / (n (n - 1))`, zero for fewer than two vertices.
    pub fn density(&self) -> f64 {
        let n = self.n() as f64;
        if self.n() < 2 {
            0.0
        } else {
            2.0 * self.m() as f64 / (n * (n - 1.0))
        }
    }

    /// Subgraph induced by `subset`, plus the map from new index to old index.
    ///
    /// Because `subset` is sorted, the returned mapping is increasing and the
    /// induced graph keeps the relative vertex order of `self`.
    pub fn induced_subgraph(&self, subset: &VertexSet) -> Result<(Graph, Vec<VertexId>), GraphError> {
        if let Some(&last) = subset.as_slice().last() {
            if last as usize >= self.n() {
                return Err(GraphError::VertexOutOfRange { vertex: last as u64, n: self.n() });
            }
        }
        let members = subset.as_slice();
        let k = members.len();
        let mut offsets = Vec::with_capacity(k + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        for &v in members {
            let adj = self.neighbors(v);
            // pick the cheaper side of the intersection
            if adj.len() <= k {
                for &w in adj {
                    if let Ok(j) = members.binary_search(&w) {
                        neighbors.push(j as VertexId);
                    }
                }
            } else {
                for (j, &w) in members.iter().enumerate() {
                    if adj.binary_search(&w).is_ok() {
                        neighbors.push(j as VertexId);
                    }
                }
            }
            offsets.push(neighbors.len());
        }
        let graph = Graph { offsets, neighbors, labels: None };
        Ok((graph, members.to_vec()))
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let degrees = self.vertices().map(|v| self.degree(v));
        let (min, max) = degrees.fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)));
        DegreeStats {
            max_degree: max,
            min_degree: if self.n() == 0 { 0 } else { min },
            density: self.density(),
        }
    }
}

/// Δ(G), δ(G) and edge density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeStats {
    pub max_degree: usize,
    pub min_degree: usize,
    pub density: f64,
}

/// Strictly increasing list of internal vertex indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VertexSet(Vec<VertexId>);

impl VertexSet {
    pub fn new(vertices: Vec<VertexId>) -> Result<VertexSet, GraphError> {
        if let Some(i) = vertices.windows(2).position(|w| w[0] >= w[1]) {
            return Err(GraphError::UnsortedVertexSet(i + 1));
        }
        Ok(VertexSet(vertices))
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut vertices: Vec<VertexId>) -> VertexSet {
        vertices.sort_unstable();
        vertices.dedup();
        VertexSet(vertices)
    }

    pub(crate) fn from_sorted_unchecked(vertices: Vec<VertexId>) -> VertexSet {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        VertexSet(vertices)
    }

    pub fn all(n: usize) -> VertexSet {
        VertexSet((0..n as VertexId).collect())
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<VertexId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The 6-cycle a-b-c-d-e-f-a with chord a-d. Indices are assigned
    /// c=0, b=1, e=2, f=3, d=4, a=5 so that smallest-index tie breaking
    /// peels the vertices in the order c, b, e, f, d, a.
    pub fn hexagon_with_chord() -> Graph {
        let idx = |c: char| "cbefda".find(c).unwrap() as VertexId;
        let edges = ["ab", "bc", "cd", "de", "ef", "fa", "ad"].map(|e| {
            let mut it = e.chars();
            (idx(it.next().unwrap()), idx(it.next().unwrap()))
        });
        Graph::from_edges(6, edges)
            .with_labels(Labels::Text("cbefda".chars().map(String::from).collect()))
    }

    pub fn by_label(g: &Graph, name: &str) -> VertexId {
        g.vertices().find(|&v| g.label(v) == name).unwrap()
    }
}
