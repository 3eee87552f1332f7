//! Slow reference computations used only by tests.
//!
//! Everything here works on a dense boolean adjacency matrix and depends on
//! nothing else in the crate, so integration tests can include this file
//! directly and check the library against it.

#![allow(dead_code)]

pub type Matrix = Vec<Vec<bool>>;

pub fn matrix_from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Matrix {
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in edges {
        let (u, v) = (u as usize, v as usize);
        if u != v {
            adj[u][v] = true;
            adj[v][u] = true;
        }
    }
    adj
}

/// Clique number by plain recursion: extend with every later candidate.
pub fn clique_number(adj: &Matrix) -> usize {
    fn grow(adj: &Matrix, candidates: &[usize], size: usize, best: &mut usize) {
        *best = (*best).max(size);
        for (i, &v) in candidates.iter().enumerate() {
            let next: Vec<usize> = candidates[i + 1..].iter().copied().filter(|&u| adj[v][u]).collect();
            grow(adj, &next, size + 1, best);
        }
    }
    let all: Vec<usize> = (0..adj.len()).collect();
    let mut best = 0;
    grow(adj, &all, 0, &mut best);
    best
}

/// Every maximum clique as a bitmask over at most 32 vertices, by testing
/// all subsets.
pub fn maximum_clique_masks(adj: &Matrix) -> Vec<u32> {
    let n = adj.len();
    assert!(n <= 20, "exhaustive enumeration limited to 20 vertices");
    let mut best = 0;
    let mut masks = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let is_clique = members
            .iter()
            .enumerate()
            .all(|(i, &u)| members[i + 1..].iter().all(|&v| adj[u][v]));
        if !is_clique {
            continue;
        }
        if members.len() > best {
            best = members.len();
            masks.clear();
        }
        if members.len() == best {
            masks.push(mask);
        }
    }
    masks
}

/// Core numbers by repeatedly deleting every vertex of degree <= k and
/// raising k when nothing is left to delete. Quadratic, independent of any
/// bucket structure.
pub fn core_numbers(adj: &Matrix) -> Vec<usize> {
    let n = adj.len();
    let mut alive = vec![true; n];
    let mut core = vec![0; n];
    let mut remaining = n;
    let mut k = 0;
    while remaining > 0 {
        let mut removed_any = true;
        while removed_any {
            removed_any = false;
            for v in 0..n {
                if !alive[v] {
                    continue;
                }
                let deg = (0..n).filter(|&u| alive[u] && adj[v][u]).count();
                if deg <= k {
                    alive[v] = false;
                    core[v] = k;
                    remaining -= 1;
                    removed_any = true;
                }
            }
        }
        k += 1;
    }
    core
}

/// Two-coloring by breadth-first search, `None` if an odd cycle exists.
pub fn two_coloring(adj: &Matrix) -> Option<Vec<u8>> {
    let n = adj.len();
    let mut color: Vec<Option<u8>> = vec![None; n];
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(0);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let c = color[v].unwrap();
            for u in 0..n {
                if !adj[v][u] {
                    continue;
                }
                match color[u] {
                    None => {
                        color[u] = Some(1 - c);
                        queue.push_back(u);
                    }
                    Some(cu) if cu == c => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(color.into_iter().map(Option::unwrap).collect())
}

/// Minimum of `energy` over all assignments of `dim` bits and every
/// assignment (as a bitmask) attaining it, compared with tolerance `eps`.
pub fn exhaustive_minima(dim: usize, energy: impl Fn(&[bool]) -> f64, eps: f64) -> (f64, Vec<u32>) {
    assert!(dim <= 20, "exhaustive enumeration limited to 20 variables");
    let mut best = f64::INFINITY;
    let mut argmin = Vec::new();
    let mut bits = vec![false; dim];
    for mask in 0u32..(1u32 << dim) {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = mask >> i & 1 == 1;
        }
        let e = energy(&bits);
        if e < best - eps {
            best = e;
            argmin.clear();
        }
        if (e - best).abs() <= eps {
            argmin.push(mask);
        }
    }
    (best, argmin)
}
