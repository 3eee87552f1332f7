//! Exact maximum clique by branch and bound, and a greedy heuristic for
//! quick lower bounds.

mod bitset;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::{Graph, VertexId, VertexSet};
use crate::kcore::{core_decompose, enumerate_subproblems};

/// Graphs below this many vertices are searched with bitset rows; larger
/// ones are first split along their degeneracy order.
pub const DENSE_LIMIT: usize = 4096;

/// A set of pairwise adjacent vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Clique {
    pub vertices: VertexSet,
}

impl Clique {
    pub fn new(vertices: Vec<VertexId>) -> Clique {
        Clique { vertices: VertexSet::from_unsorted(vertices) }
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BnbConfig {
    /// Only cliques strictly larger than this are sought.
    pub initial_lower_bound: usize,
    /// Give up after expanding this many search nodes.
    pub node_limit: Option<u64>,
    /// Bound branches with a greedy coloring instead of the candidate count.
    pub use_coloring_bound: bool,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig { initial_lower_bound: 0, node_limit: None, use_coloring_bound: true }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BnbStats {
    pub nodes: u64,
    pub prunes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactOutcome {
    /// Largest clique found above the initial lower bound, if any.
    pub clique: Option<Clique>,
    /// False when the node limit cut the search short.
    pub optimal: bool,
    pub stats: BnbStats,
}

/// Finds a maximum clique of `g` if one is larger than
/// `cfg.initial_lower_bound`.
///
/// Small graphs are relabeled so that the last vertices of the degeneracy
/// order come first, then searched with a growing clique whose candidate
/// set shrinks to `P ∩ N(v)` at every branch. Branches are cut when the
/// number of color classes over the remaining candidates cannot lift the
/// growing clique past the incumbent.
pub fn max_clique_exact(g: &Graph, cfg: &BnbConfig) -> ExactOutcome {
    let mut stats = BnbStats::default();
    let mut budget = cfg.node_limit;
    let (clique, optimal) = search(g, cfg, cfg.initial_lower_bound, &mut budget, &mut stats);
    ExactOutcome { clique: clique.map(Clique::new), optimal, stats }
}

fn search(
    g: &Graph,
    cfg: &BnbConfig,
    lower_bound: usize,
    budget: &mut Option<u64>,
    stats: &mut BnbStats,
) -> (Option<Vec<VertexId>>, bool) {
    if g.n() <= lower_bound {
        return (None, true);
    }
    if g.n() < DENSE_LIMIT {
        search_dense(g, cfg, lower_bound, budget, stats)
    } else {
        search_sparse(g, cfg, lower_bound, budget, stats)
    }
}

fn search_dense(
    g: &Graph,
    cfg: &BnbConfig,
    lower_bound: usize,
    budget: &mut Option<u64>,
    stats: &mut BnbStats,
) -> (Option<Vec<VertexId>>, bool) {
    let n = g.n();
    let cd = core_decompose(g);
    // rank 0 is the last vertex peeled
    let to_vertex: Vec<VertexId> = cd.order.iter().rev().copied().collect();
    let mut rank = vec![0usize; n];
    for (r, &v) in to_vertex.iter().enumerate() {
        rank[v as usize] = r;
    }
    let stride = n.div_ceil(64);
    let mut rows = vec![0u64; n * stride];
    for v in g.vertices() {
        let r = rank[v as usize];
        for &u in g.neighbors(v) {
            let c = rank[u as usize];
            rows[r * stride + c / 64] |= 1 << (c % 64);
        }
    }
    let mut kernel = bitset::Kernel::new(n, &rows, lower_bound, cfg.use_coloring_bound, *budget);
    kernel.run();
    stats.nodes += kernel.stats.nodes;
    stats.prunes += kernel.stats.prunes;
    if let Some(b) = budget.as_mut() {
        *b = b.saturating_sub(kernel.stats.nodes);
    }
    let clique = (!kernel.best_clique.is_empty())
        .then(|| kernel.best_clique.iter().map(|&r| to_vertex[r as usize]).collect());
    (clique, !kernel.aborted)
}

/// Splits a large graph into root-plus-later-neighbors blocks and searches
/// each block that could still beat the incumbent.
fn search_sparse(
    g: &Graph,
    cfg: &BnbConfig,
    lower_bound: usize,
    budget: &mut Option<u64>,
    stats: &mut BnbStats,
) -> (Option<Vec<VertexId>>, bool) {
    let cd = core_decompose(g);
    let mut best = lower_bound;
    let mut best_clique = None;
    for sub in enumerate_subproblems(g, &cd) {
        if sub.upper_bound() <= best {
            stats.prunes += 1;
            continue;
        }
        let root_count = usize::from(sub.root.is_some());
        let (block, map) = g.induced_subgraph(&sub.candidates).expect("candidates are vertices of g");
        let (found, complete) = search(&block, cfg, best.saturating_sub(root_count), budget, stats);
        if let Some(inner) = found {
            let mut clique: Vec<VertexId> = inner.iter().map(|&v| map[v as usize]).collect();
            clique.extend(sub.root);
            if clique.len() > best {
                best = clique.len();
                best_clique = Some(clique);
            }
        } else if sub.candidates.is_empty() && root_count > best {
            best = 1;
            best_clique = Some(vec![sub.root.unwrap()]);
        }
        if !complete {
            return (best_clique, false);
        }
    }
    (best_clique, true)
}

/// Grows a maximal clique by repeatedly adding the candidate with the most
/// neighbors among the remaining candidates. `seed` only breaks ties.
pub fn greedy_clique_heuristic(g: &Graph, seed: u64) -> Clique {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<VertexId> = g.vertices().collect();
    let mut is_candidate = vec![true; g.n()];
    let mut clique = Vec::new();
    while !candidates.is_empty() {
        let scores: Vec<usize> = candidates
            .iter()
            .map(|&v| g.neighbors(v).iter().filter(|&&u| is_candidate[u as usize]).count())
            .collect();
        let top = *scores.iter().max().unwrap();
        let tied: Vec<VertexId> =
            candidates.iter().zip(&scores).filter(|(_, &s)| s == top).map(|(&v, _)| v).collect();
        let pick = *tied.choose(&mut rng).unwrap();
        clique.push(pick);
        let next: Vec<VertexId> =
            g.neighbors(pick).iter().copied().filter(|&u| is_candidate[u as usize]).collect();
        for &v in &candidates {
            is_candidate[v as usize] = false;
        }
        for &v in &next {
            is_candidate[v as usize] = true;
        }
        candidates = next;
    }
    Clique::new(clique)
}
