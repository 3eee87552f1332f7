//! Dense branch-and-bound kernel over bitset adjacency rows.

use super::BnbStats;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)] }
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect_into(&self, row: &[u64], out: &mut BitSet) {
        for ((o, a), b) in out.words.iter_mut().zip(&self.words).zip(row) {
            *o = a & b;
        }
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn subtract_row(&mut self, row: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(row) {
            *a &= !b;
        }
    }
}

/// Recolor a child when its candidate set has shrunk to at most this
/// fraction of the set the inherited coloring was computed on.
const RECOLOR_RATIO: f64 = 0.75;

/// Candidates of a search node in branching order, each with an upper bound
/// on the clique size available among it and every entry before it.
struct NodeList {
    /// `(vertex, color class)` sorted by class.
    entries: Vec<(u32, u32)>,
    /// Size of the candidate set the classes were computed for.
    colored_size: usize,
}

pub(super) struct Kernel<'a> {
    n: usize,
    stride: usize,
    adj: &'a [u64],
    use_coloring: bool,
    node_limit: Option<u64>,
    pub best: usize,
    pub best_clique: Vec<u32>,
    current: Vec<u32>,
    pub stats: BnbStats,
    pub aborted: bool,
}

impl<'a> Kernel<'a> {
    /// `adj` holds `n` rows of `n.div_ceil(64)` words. Only cliques larger
    /// than `lower_bound` are recorded.
    pub fn new(n: usize, adj: &'a [u64], lower_bound: usize, use_coloring: bool, node_limit: Option<u64>) -> Self {
        Kernel {
            n,
            stride: n.div_ceil(64),
            adj,
            use_coloring,
            node_limit,
            best: lower_bound,
            best_clique: Vec::new(),
            current: Vec::new(),
            stats: BnbStats::default(),
            aborted: false,
        }
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.stride..(v + 1) * self.stride]
    }

    pub fn run(&mut self) {
        let mut all = BitSet::new(self.n);
        for v in 0..self.n {
            all.insert(v);
        }
        let list = self.fresh_list(&all);
        self.expand(all, list);
    }

    /// Sequential greedy coloring: class after class, take the lowest
    /// uncolored vertex not adjacent to anything already in the class.
    fn color(&self, p: &BitSet) -> Vec<(u32, u32)> {
        let mut uncolored = p.clone();
        let mut out = Vec::with_capacity(p.count());
        let mut class = 0;
        while !uncolored.is_empty() {
            class += 1;
            let mut open = uncolored.clone();
            while let Some(v) = open.first() {
                open.remove(v);
                open.subtract_row(self.row(v));
                uncolored.remove(v);
                out.push((v as u32, class));
            }
        }
        out
    }

    fn fresh_list(&self, p: &BitSet) -> NodeList {
        if self.use_coloring {
            let entries = self.color(p);
            NodeList { colored_size: entries.len(), entries }
        } else {
            let entries: Vec<(u32, u32)> =
                (0..self.n).filter(|&v| p.contains(v)).enumerate().map(|(i, v)| (v as u32, i as u32 + 1)).collect();
            NodeList { colored_size: entries.len(), entries }
        }
    }

    /// Restricts the parent's classes to `p`; a subset of a proper coloring
    /// stays proper, so bounds are recounted as distinct classes seen.
    fn inherited_list(&self, parent: &NodeList, p: &BitSet) -> NodeList {
        let entries = parent.entries.iter().copied().filter(|&(v, _)| p.contains(v as usize)).collect();
        NodeList { entries, colored_size: parent.colored_size }
    }

    fn expand(&mut self, mut p: BitSet, list: NodeList) {
        self.stats.nodes += 1;
        if let Some(limit) = self.node_limit {
            if self.stats.nodes > limit {
                self.aborted = true;
                return;
            }
        }
        // Bound for entry i = number of distinct classes among entries[..=i].
        let mut bounds = Vec::with_capacity(list.entries.len());
        let mut distinct = 0;
        let mut last_class = 0;
        for &(_, class) in &list.entries {
            if class != last_class {
                distinct += 1;
                last_class = class;
            }
            bounds.push(distinct);
        }
        let mut child = BitSet::new(self.n);
        for i in (0..list.entries.len()).rev() {
            if self.current.len() + bounds[i] <= self.best {
                self.stats.prunes += 1;
                return;
            }
            let v = list.entries[i].0 as usize;
            self.current.push(v as u32);
            p.intersect_into(self.row(v), &mut child);
            if child.is_empty() {
                if self.current.len() > self.best {
                    self.best = self.current.len();
                    self.best_clique = self.current.clone();
                }
            } else {
                let size = child.count();
                let next = if !self.use_coloring || size as f64 <= RECOLOR_RATIO * list.colored_size as f64 {
                    self.fresh_list(&child)
                } else {
                    self.inherited_list(&list, &child)
                };
                self.expand(child.clone(), next);
            }
            self.current.pop();
            if self.aborted {
                return;
            }
            p.remove(v);
        }
    }
}
