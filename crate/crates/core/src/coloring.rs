//! DSATUR coloring. The number of colors it uses is an upper bound on the
//! clique number, which the orchestrator uses to discard dense subproblems.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashSet};

use crate::graph::{Graph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringResult {
    pub colors_used: u32,
    /// Color index of every vertex.
    pub assignment: Vec<u32>,
}

/// Colors `g` greedily, always picking the uncolored vertex that sees the
/// most distinct neighbor colors, then the one of higher degree, then the
/// lower index, and giving it the smallest color not used by a neighbor.
pub fn dsatur_color(g: &Graph) -> ColoringResult {
    let n = g.n();
    let mut assignment: Vec<Option<u32>> = vec![None; n];
    let mut seen: Vec<HashSet<u32>> = vec![HashSet::new(); n];
    // (saturation, degree, Reverse(index)); the maximum is next
    let mut queue: BTreeSet<(usize, usize, Reverse<VertexId>)> =
        g.vertices().map(|v| (0, g.degree(v), Reverse(v))).collect();
    let mut colors_used = 0;
    while let Some((_, _, Reverse(v))) = queue.pop_last() {
        let taken = &seen[v as usize];
        let color = (0..).find(|c| !taken.contains(c)).unwrap();
        assignment[v as usize] = Some(color);
        colors_used = colors_used.max(color + 1);
        for &u in g.neighbors(v) {
            if assignment[u as usize].is_some() {
                continue;
            }
            let sat = seen[u as usize].len();
            if seen[u as usize].insert(color) {
                queue.remove(&(sat, g.degree(u), Reverse(u)));
                queue.insert((sat + 1, g.degree(u), Reverse(u)));
            }
        }
    }
    ColoringResult { colors_used, assignment: assignment.into_iter().map(Option::unwrap).collect() }
}
