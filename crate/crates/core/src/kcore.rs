//! Core numbers, degeneracy ordering, and the subproblem enumeration built
//! on top of them.
//!
//! Peeling a minimum-core vertex at a time yields an order in which every
//! vertex `v` has at most `K(v)` neighbors placed after it. Taking the last
//! `K(G)` vertices as one block and every earlier vertex together with its
//! later neighbors as another gives `n - K(G) + 1` subproblems that jointly
//! contain every clique of the graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{Graph, VertexId, VertexSet};

/// Degeneracy order plus per-vertex core numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreDecomposition {
    /// Vertices in peeling order; core numbers are non-decreasing along it.
    pub order: Vec<VertexId>,
    /// `core[v]` is the core number K(v).
    pub core: Vec<u32>,
    /// K(G), the largest core number (zero for the empty graph).
    pub k_graph: u32,
    /// Inverse of `order`.
    pub position: Vec<u32>,
}

impl CoreDecomposition {
    /// Number of neighbors of `v` that come after it in `order`.
    pub fn later_degree(&self, g: &Graph, v: VertexId) -> usize {
        let p = self.position[v as usize];
        g.neighbors(v).iter().filter(|&&u| self.position[u as usize] > p).count()
    }
}

/// Peels the graph one vertex at a time, always removing a vertex of
/// minimum current core value and breaking ties by smallest index.
///
/// A neighbor's value is only decremented while it exceeds the value of the
/// vertex being removed, which makes the removal value of each vertex its
/// core number. Buckets hold stale entries lazily; only the bucket being
/// drained is kept in a heap to honor the tie rule, so the cost is
/// O(n + m + n log n).
pub fn core_decompose(g: &Graph) -> CoreDecomposition {
    let n = g.n();
    let mut value: Vec<u32> = g.vertices().map(|v| g.degree(v) as u32).collect();
    let max_degree = value.iter().copied().max().unwrap_or(0) as usize;
    let mut buckets: Vec<Vec<VertexId>> = vec![Vec::new(); max_degree + 1];
    for v in g.vertices() {
        buckets[value[v as usize] as usize].push(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut current: BinaryHeap<Reverse<VertexId>> = BinaryHeap::new();
    let mut level = 0usize;
    while order.len() < n {
        if current.is_empty() {
            // Advance to the next bucket holding a live vertex of exactly
            // that value; entries left behind by decrements are stale.
            while level < buckets.len() {
                let bucket = std::mem::take(&mut buckets[level]);
                current.extend(
                    bucket
                        .into_iter()
                        .filter(|&v| !removed[v as usize] && value[v as usize] as usize == level)
                        .map(Reverse),
                );
                if !current.is_empty() {
                    break;
                }
                level += 1;
            }
        }
        let Reverse(v) = current.pop().expect("a live vertex remains");
        if removed[v as usize] {
            continue;
        }
        removed[v as usize] = true;
        order.push(v);
        let k = value[v as usize];
        for &u in g.neighbors(v) {
            let u_val = value[u as usize];
            if !removed[u as usize] && u_val > k {
                value[u as usize] = u_val - 1;
                if u_val - 1 == k {
                    current.push(Reverse(u));
                } else {
                    buckets[(u_val - 1) as usize].push(u);
                }
            }
        }
    }
    let mut position = vec![0u32; n];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i as u32;
    }
    let k_graph = value.iter().copied().max().unwrap_or(0);
    CoreDecomposition { order, core: value, k_graph, position }
}

/// A block of the decomposition: a root vertex that is assumed to be in the
/// clique, and the candidates that may join it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subproblem {
    /// `None` for the seed block made of the last `K(G)` vertices.
    pub root: Option<VertexId>,
    pub candidates: VertexSet,
    /// K(root), or K(G) for the seed.
    pub kcore_bound: u32,
    /// Colors DSATUR needed on the candidates, once computed.
    pub color_bound: Option<u32>,
    pub level: u32,
}

impl Subproblem {
    /// Number of vertices the block accounts for: candidates plus root.
    pub fn size(&self) -> usize {
        self.candidates.len() + usize::from(self.root.is_some())
    }

    /// Upper bound on the largest clique inside this block, root included.
    pub fn upper_bound(&self) -> usize {
        let mut inner = self.candidates.len().min(self.kcore_bound as usize);
        if let Some(colors) = self.color_bound {
            inner = inner.min(colors as usize);
        }
        inner + usize::from(self.root.is_some())
    }
}

/// Lazily yields the seed block followed by one block per remaining vertex,
/// walking the degeneracy order from position `n - K(G) - 1` down to 0.
///
/// Any clique whose earliest member (in `cd.order`) is `w` lies inside
/// `{w} ∪ candidates(w)`; cliques starting inside the last `K(G)` positions
/// lie inside the seed. Exactly `n - K(G) + 1` blocks are produced for a
/// non-empty graph, and a single empty seed for the empty graph.
pub fn enumerate_subproblems<'a>(
    g: &'a Graph,
    cd: &'a CoreDecomposition,
) -> impl Iterator<Item = Subproblem> + 'a {
    let n = g.n();
    let k = cd.k_graph as usize;
    let seed_start = n.saturating_sub(k);
    let seed = Subproblem {
        root: None,
        candidates: VertexSet::from_unsorted(cd.order[seed_start..].to_vec()),
        kcore_bound: cd.k_graph,
        color_bound: None,
        level: 1,
    };
    let roots = (0..seed_start).rev().map(move |pos| {
        let w = cd.order[pos];
        let later: Vec<VertexId> = g
            .neighbors(w)
            .iter()
            .copied()
            .filter(|&u| cd.position[u as usize] as usize > pos)
            .collect();
        Subproblem {
            root: Some(w),
            candidates: VertexSet::from_sorted_unchecked(later),
            kcore_bound: cd.core[w as usize],
            color_bound: None,
            level: 1,
        }
    });
    std::iter::once(seed).chain(roots)
}
