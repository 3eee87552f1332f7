//! QUBO encoding of clique subproblems, block-diagonal packing of several
//! subproblems into one device call, and decoding of device samples.
//!
//! A subproblem with candidates `C` becomes one binary variable per
//! candidate with energy
//!
//! ```text
//! E(x) = -A * sum_i x_i + B * sum_{i<j, {c_i, c_j} not an edge} x_i x_j
//! ```
//!
//! with `A = 1`, `B = 2`. This is maximum independent set on the complement
//! of `G[C]`. Any selected clique has energy `-|S|`; adding a vertex that
//! breaks the clique costs at least `B - A > 0`, so minima are exactly the
//! maximum cliques. The root is adjacent to every candidate and always in
//! the optimum, so it is not encoded.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::ops::Range;

use thiserror::Error;

use crate::graph::{Graph, VertexId, VertexSet};
use crate::kcore::Subproblem;

/// Reward per selected vertex.
pub const SELECT_REWARD: f64 = 1.0;
/// Penalty per selected non-adjacent pair.
pub const CONFLICT_PENALTY: f64 = 2.0;

#[derive(Debug, Error)]
pub enum QuboError {
    #[error("subproblem {0} has no candidates to encode")]
    EmptySubproblem(usize),
    #[error("subproblem {index} needs {needed} variables but the device holds {device_size}")]
    TooLarge { index: usize, needed: usize, device_size: usize },
    #[error("bitstring has {got} bits, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Minimize `offset + sum_i linear[i] x_i + sum_{i<j} quadratic[(i,j)] x_i x_j`
/// over `x` in `{0,1}^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Qubo {
    pub dim: usize,
    pub linear: Vec<f64>,
    /// Upper-triangular couplings, keys `(i, j)` with `i < j`, never zero.
    pub quadratic: BTreeMap<(u32, u32), f64>,
    pub offset: f64,
}

impl Qubo {
    pub fn new(dim: usize) -> Qubo {
        Qubo { dim, linear: vec![0.0; dim], quadratic: BTreeMap::new(), offset: 0.0 }
    }

    pub fn add_linear(&mut self, i: usize, coeff: f64) {
        self.linear[i] += coeff;
    }

    /// Adds to the `(i, j)` coupling; `i == j` folds into the linear term
    /// since `x_i^2 = x_i`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, coeff: f64) {
        assert!(i < self.dim && j < self.dim);
        if i == j {
            self.add_linear(i, coeff);
            return;
        }
        let key = (i.min(j) as u32, i.max(j) as u32);
        let entry = self.quadratic.entry(key).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.quadratic.remove(&key);
        }
    }

    pub fn energy(&self, bits: &[bool]) -> f64 {
        assert_eq!(bits.len(), self.dim);
        let mut e = self.offset;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                e += self.linear[i];
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if bits[i as usize] && bits[j as usize] {
                e += c;
            }
        }
        e
    }

    /// Symmetric neighbor lists of the coupling graph.
    pub fn couplings(&self) -> Vec<Vec<(u32, f64)>> {
        let mut adj = vec![Vec::new(); self.dim];
        for (&(i, j), &c) in &self.quadratic {
            adj[i as usize].push((j, c));
            adj[j as usize].push((i, c));
        }
        adj
    }

    /// Plain coordinate text: `dim` on the first line, then `i j coeff`
    /// with the diagonal holding linear terms, in row-major order. A
    /// nonzero offset is written as a `# offset` comment.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.dim).unwrap();
        if self.offset != 0.0 {
            writeln!(out, "# offset {}", self.offset).unwrap();
        }
        let mut entries: Vec<(u32, u32, f64)> = self
            .linear
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (i as u32, i as u32, c))
            .collect();
        entries.extend(self.quadratic.iter().map(|(&(i, j), &c)| (i, j, c)));
        entries.sort_by_key(|&(i, j, _)| (i, j));
        for (i, j, c) in entries {
            writeln!(out, "{i} {j} {c}").unwrap();
        }
        out
    }

    pub fn from_coordinate_text<R: BufRead>(reader: R) -> Result<Qubo, QuboError> {
        let mut qubo: Option<Qubo> = None;
        let mut offset = 0.0;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let err = |message: &str| QuboError::Parse { line: lineno, message: message.to_string() };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("offset") {
                    offset = v.trim().parse().map_err(|_| err("invalid offset"))?;
                }
                continue;
            }
            let fields: Vec<&str> = line.split_ascii_whitespace().collect();
            match (&mut qubo, fields.as_slice()) {
                (None, [dim]) => qubo = Some(Qubo::new(dim.parse().map_err(|_| err("invalid dimension"))?)),
                (None, _) => return Err(err("expected dimension line")),
                (Some(q), [i, j, c]) => {
                    let i: usize = i.parse().map_err(|_| err("invalid row"))?;
                    let j: usize = j.parse().map_err(|_| err("invalid column"))?;
                    let c: f64 = c.parse().map_err(|_| err("invalid coefficient"))?;
                    if i >= q.dim || j >= q.dim {
                        return Err(err("index out of range"));
                    }
                    q.add_quadratic(i, j, c);
                }
                (Some(_), _) => return Err(err("expected `i j coeff`")),
            }
        }
        let mut qubo = qubo.ok_or(QuboError::Parse { line: 0, message: "empty input".into() })?;
        qubo.offset = offset;
        Ok(qubo)
    }
}

/// Encodes the clique problem on `G[vertices]`.
pub fn vertices_to_qubo(parent: &Graph, vertices: &VertexSet) -> Qubo {
    let vs = vertices.as_slice();
    let mut q = Qubo::new(vs.len());
    for i in 0..vs.len() {
        q.add_linear(i, -SELECT_REWARD);
        for j in i + 1..vs.len() {
            if !parent.has_edge(vs[i], vs[j]) {
                q.add_quadratic(i, j, CONFLICT_PENALTY);
            }
        }
    }
    q
}

/// Encodes one subproblem; variable `i` stands for `mapping[i]` in `parent`.
pub fn clique_to_qubo(sub: &Subproblem, parent: &Graph) -> Result<(Qubo, Vec<VertexId>), QuboError> {
    if sub.candidates.is_empty() {
        return Err(QuboError::EmptySubproblem(0));
    }
    Ok((vertices_to_qubo(parent, &sub.candidates), sub.candidates.as_slice().to_vec()))
}

/// How much device capacity a packed subproblem consumes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Accounting {
    /// One slot per candidate; the root is implied.
    #[default]
    RootExcluded,
    /// One extra slot for the root, as if it were encoded too.
    RootInclusive,
}

impl Accounting {
    pub fn cost(self, sub: &Subproblem) -> usize {
        match self {
            Accounting::RootExcluded => sub.candidates.len(),
            Accounting::RootInclusive => sub.size(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Index of the subproblem in the list handed to [`pack`].
    pub subproblem: usize,
    pub range: Range<usize>,
    /// `vertices[k]` is the parent vertex of variable `range.start + k`.
    pub vertices: Vec<VertexId>,
    pub root: Option<VertexId>,
}

/// Several subproblems sharing one block-diagonal QUBO.
#[derive(Clone, Debug, PartialEq)]
pub struct PackedQubo {
    pub qubo: Qubo,
    pub blocks: Vec<Block>,
    /// Capacity used under [`Accounting::RootInclusive`].
    pub root_inclusive_size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Packing {
    pub packed: PackedQubo,
    /// Indices of the subproblems that did not fit, in priority order.
    pub leftovers: Vec<usize>,
}

/// [`pack_with`] using root-excluded accounting.
pub fn pack(subs: &[Subproblem], parent: &Graph, device_size: usize) -> Result<Packing, QuboError> {
    pack_with(subs, parent, device_size, Accounting::RootExcluded)
}

/// First-fit-decreasing packing: subproblems are visited by descending
/// attached bound (k-core bound, tightened by the color bound when known;
/// ties keep input order) and admitted whenever they still fit, skipping
/// those that do not.
pub fn pack_with(
    subs: &[Subproblem],
    parent: &Graph,
    device_size: usize,
    accounting: Accounting,
) -> Result<Packing, QuboError> {
    for (index, sub) in subs.iter().enumerate() {
        if sub.candidates.is_empty() {
            return Err(QuboError::EmptySubproblem(index));
        }
        let needed = accounting.cost(sub);
        if needed > device_size {
            return Err(QuboError::TooLarge { index, needed, device_size });
        }
    }
    let mut order: Vec<usize> = (0..subs.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(attached_bound(&subs[i])));

    let mut used = 0;
    let mut chosen = Vec::new();
    let mut leftovers = Vec::new();
    for i in order {
        let cost = accounting.cost(&subs[i]);
        if used + cost <= device_size {
            used += cost;
            chosen.push(i);
        } else {
            leftovers.push(i);
        }
    }

    let dim = chosen.iter().map(|&i| subs[i].candidates.len()).sum();
    let mut qubo = Qubo::new(dim);
    let mut blocks = Vec::with_capacity(chosen.len());
    let mut start = 0;
    for i in chosen {
        let sub = &subs[i];
        let block = vertices_to_qubo(parent, &sub.candidates);
        for (k, &c) in block.linear.iter().enumerate() {
            qubo.add_linear(start + k, c);
        }
        for (&(a, b), &c) in &block.quadratic {
            qubo.add_quadratic(start + a as usize, start + b as usize, c);
        }
        let end = start + block.dim;
        blocks.push(Block {
            subproblem: i,
            range: start..end,
            vertices: sub.candidates.as_slice().to_vec(),
            root: sub.root,
        });
        start = end;
    }
    let root_inclusive_size = dim + blocks.iter().filter(|b| b.root.is_some()).count();
    Ok(Packing { packed: PackedQubo { qubo, blocks, root_inclusive_size }, leftovers })
}

fn attached_bound(sub: &Subproblem) -> u32 {
    sub.color_bound.map_or(sub.kcore_bound, |c| c.min(sub.kcore_bound))
}

/// One block of a device sample, mapped back to parent vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub subproblem: usize,
    pub root: Option<VertexId>,
    /// Selected candidates after repair; pairwise adjacent.
    pub vertices: Vec<VertexId>,
    /// Vertices removed to restore the clique property.
    pub dropped: usize,
}

impl Decoded {
    /// Clique size through the root, counting the root itself.
    pub fn clique_size(&self) -> usize {
        self.vertices.len() + usize::from(self.root.is_some())
    }
}

/// Splits `bits` into blocks and turns each into a clique.
///
/// Conflicts are read off the penalty couplings, which exist exactly for
/// non-adjacent candidate pairs. While any remain, the selected variable in
/// the most conflicts is dropped (ties: highest variable index).
pub fn decode(packed: &PackedQubo, bits: &[bool]) -> Result<Vec<Decoded>, QuboError> {
    let q = &packed.qubo;
    if bits.len() != q.dim {
        return Err(QuboError::LengthMismatch { got: bits.len(), expected: q.dim });
    }
    let couplings = q.couplings();
    let mut out = Vec::with_capacity(packed.blocks.len());
    for block in &packed.blocks {
        let mut selected: Vec<usize> = block.range.clone().filter(|&i| bits[i]).collect();
        let mut dropped = 0;
        loop {
            let conflicts = |i: usize, sel: &[usize]| {
                couplings[i]
                    .iter()
                    .filter(|&&(j, c)| c > 0.0 && sel.binary_search(&(j as usize)).is_ok())
                    .count()
            };
            let worst = selected
                .iter()
                .map(|&i| (conflicts(i, &selected), i))
                .max()
                .filter(|&(count, _)| count > 0);
            match worst {
                Some((_, i)) => {
                    selected.retain(|&s| s != i);
                    dropped += 1;
                }
                None => break,
            }
        }
        out.push(Decoded {
            subproblem: block.subproblem,
            root: block.root,
            vertices: selected.iter().map(|&i| block.vertices[i - block.range.start]).collect(),
            dropped,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::{max_clique_exact, BnbConfig};
    use crate::graph::fixtures::{by_label, hexagon_with_chord};
    use crate::graph::generate_er;
    use crate::kcore::{core_decompose, enumerate_subproblems};
    use crate::oracle;
    use proptest::prelude::*;

    fn sub(root: Option<u32>, cands: Vec<u32>, bound: u32) -> Subproblem {
        Subproblem {
            root,
            candidates: VertexSet::from_unsorted(cands),
            kcore_bound: bound,
            color_bound: None,
            level: 1,
        }
    }

    fn hexagon_root_e() -> (Graph, Subproblem) {
        let g = hexagon_with_chord();
        let cd = core_decompose(&g);
        let e = by_label(&g, "e");
        let s = enumerate_subproblems(&g, &cd).find(|s| s.root == Some(e)).unwrap();
        (g, s)
    }

    #[test]
    fn hexagon_root_e_minima_are_singletons() {
        let (g, s) = hexagon_root_e();
        let (q, map) = clique_to_qubo(&s, &g).unwrap();
        assert_eq!(q.dim, 2);
        let (min, argmin) = oracle::exhaustive_minima(q.dim, |b| q.energy(b), 1e-9);
        assert_eq!(min, -1.0);
        assert_eq!(argmin, [0b01, 0b10]);
        assert_eq!(map.len(), 2);
    }

    #[test]
    fn triangle_minimum_is_all_ones() {
        let g = Graph::complete(3);
        let (q, _) = clique_to_qubo(&sub(None, vec![0, 1, 2], 2), &g).unwrap();
        assert!(q.quadratic.is_empty());
        let (min, argmin) = oracle::exhaustive_minima(3, |b| q.energy(b), 1e-9);
        assert_eq!((min, argmin), (-3.0, vec![0b111]));
    }

    #[test]
    fn empty_candidates_rejected() {
        let g = Graph::complete(3);
        assert!(matches!(clique_to_qubo(&sub(Some(0), vec![], 2), &g), Err(QuboError::EmptySubproblem(_))));
    }

    #[test]
    fn whole_graph_minima_are_maximum_cliques() {
        let g = generate_er(12, 0.4, 5);
        let all = VertexSet::all(12);
        let q = vertices_to_qubo(&g, &all);
        let (min, argmin) = oracle::exhaustive_minima(12, |b| q.energy(b), 1e-9);
        let adj = oracle::matrix_from_edges(12, g.edges());
        let expected = oracle::maximum_clique_masks(&adj);
        assert_eq!(argmin, expected);
        let omega = max_clique_exact(&g, &BnbConfig::default()).clique.unwrap().size();
        assert_eq!(min, -(omega as f64));
    }

    #[test]
    fn pack_two_small_blocks() {
        let g = Graph::complete(6);
        let subs = [sub(Some(0), vec![1, 2], 2), sub(Some(3), vec![4, 5], 2)];
        let packing = pack(&subs, &g, 21).unwrap();
        assert_eq!(packing.packed.qubo.dim, 4);
        assert_eq!(packing.packed.blocks.len(), 2);
        assert!(packing.leftovers.is_empty());
        assert_eq!(packing.packed.root_inclusive_size, 6);
    }

    #[test]
    fn pack_exact_fit() {
        let g = Graph::complete(6);
        let packing = pack(&[sub(Some(0), vec![1, 2, 3, 4, 5], 5)], &g, 5).unwrap();
        assert_eq!(packing.packed.blocks.len(), 1);
        assert!(packing.leftovers.is_empty());
    }

    #[test]
    fn pack_first_fit_decreasing_with_skip() {
        let g = Graph::complete(30);
        let subs = [
            sub(Some(0), (1..11).collect(), 10),
            sub(Some(11), (12..22).collect(), 10),
            sub(Some(22), (23..28).collect(), 5),
        ];
        let packing = pack(&subs, &g, 16).unwrap();
        let packed: Vec<usize> = packing.packed.blocks.iter().map(|b| b.subproblem).collect();
        assert_eq!(packed, [0, 2]);
        assert_eq!(packing.leftovers, [1]);
        assert_eq!(packing.packed.qubo.dim, 15);
    }

    #[test]
    fn pack_root_inclusive_accounting() {
        let g = Graph::complete(30);
        let subs: Vec<_> = (0..4).map(|k| sub(Some(k * 7), (k * 7 + 1..k * 7 + 7).collect(), 6)).collect();
        let packing = pack_with(&subs, &g, 21, Accounting::RootInclusive).unwrap();
        assert_eq!(packing.packed.blocks.len(), 3);
        assert_eq!(packing.packed.root_inclusive_size, 21);
        assert_eq!(packing.leftovers, [3]);
    }

    #[test]
    fn pack_rejects_oversized() {
        let g = Graph::complete(30);
        let err = pack(&[sub(Some(0), (1..10).collect(), 9)], &g, 8).unwrap_err();
        assert!(matches!(err, QuboError::TooLarge { index: 0, needed: 9, device_size: 8 }));
    }

    #[test]
    fn pack_blocks_do_not_couple() {
        let g = generate_er(40, 0.5, 3);
        let cd = core_decompose(&g);
        let subs: Vec<_> = enumerate_subproblems(&g, &cd).filter(|s| !s.candidates.is_empty()).take(5).collect();
        let packing = pack(&subs, &g, 200).unwrap();
        let blocks = &packing.packed.blocks;
        let block_of = |v: u32| blocks.iter().position(|b| b.range.contains(&(v as usize))).unwrap();
        for &(i, j) in packing.packed.qubo.quadratic.keys() {
            assert_eq!(block_of(i), block_of(j));
        }
        let mut cover: Vec<usize> = blocks.iter().flat_map(|b| b.range.clone()).collect();
        cover.sort();
        assert_eq!(cover, (0..packing.packed.qubo.dim).collect::<Vec<_>>());
    }

    #[test]
    fn decode_all_zero() {
        let g = Graph::complete(6);
        let subs = [sub(Some(0), vec![1, 2], 2), sub(None, vec![4, 5], 2)];
        let packing = pack(&subs, &g, 21).unwrap();
        let decoded = decode(&packing.packed, &[false; 4]).unwrap();
        assert!(decoded.iter().all(|d| d.vertices.is_empty() && d.dropped == 0));
        assert_eq!(decoded[0].clique_size(), 1);
        assert_eq!(decoded[1].clique_size(), 0);
    }

    #[test]
    fn decode_repairs_conflicting_pair() {
        let (g, s) = hexagon_root_e();
        let packing = pack(&[s], &g, 2).unwrap();
        let decoded = decode(&packing.packed, &[true, true]).unwrap();
        assert_eq!(decoded[0].dropped, 1);
        assert_eq!(decoded[0].clique_size(), 2);
        let mut clique = decoded[0].vertices.clone();
        clique.push(decoded[0].root.unwrap());
        assert!(g.is_clique(&clique));
    }

    #[test]
    fn decode_length_mismatch() {
        let g = Graph::complete(3);
        let packing = pack(&[sub(Some(0), vec![1, 2], 2)], &g, 4).unwrap();
        assert!(matches!(
            decode(&packing.packed, &[true]),
            Err(QuboError::LengthMismatch { got: 1, expected: 2 })
        ));
    }

    #[test]
    fn decode_exact_minimum_recovers_omega() {
        for seed in 0..10 {
            let g = generate_er(10, 0.5, seed);
            let s = sub(None, (0..10).collect(), 10);
            let packing = pack(&[s], &g, 10).unwrap();
            let q = &packing.packed.qubo;
            let (_, argmin) = oracle::exhaustive_minima(10, |b| q.energy(b), 1e-9);
            let bits: Vec<bool> = (0..10).map(|i| argmin[0] >> i & 1 == 1).collect();
            let decoded = decode(&packing.packed, &bits).unwrap();
            let omega = max_clique_exact(&g, &BnbConfig::default()).clique.unwrap().size();
            assert_eq!(decoded[0].clique_size(), omega);
            assert_eq!(decoded[0].dropped, 0);
        }
    }

    #[test]
    fn coordinate_text_round_trip() {
        let g = generate_er(8, 0.5, 2);
        let mut q = vertices_to_qubo(&g, &VertexSet::all(8));
        q.offset = 1.5;
        let text = q.to_coordinate_text();
        assert!(text.starts_with("8\n# offset 1.5\n0 0 -1\n"));
        let back = Qubo::from_coordinate_text(text.as_bytes()).unwrap();
        assert_eq!(back, q);
        assert!(Qubo::from_coordinate_text("2\n0 5 1\n".as_bytes()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn packed_energy_is_sum_of_block_energies(seed in any::<u64>(), mask in any::<u64>()) {
            let g = generate_er(30, 0.4, seed);
            let cd = core_decompose(&g);
            let subs: Vec<_> = enumerate_subproblems(&g, &cd).filter(|s| !s.candidates.is_empty()).take(4).collect();
            let packing = pack(&subs, &g, 1000).unwrap();
            let packed = &packing.packed;
            let bits: Vec<bool> = (0..packed.qubo.dim).map(|i| mask >> (i % 64) & 1 == 1).collect();
            let total: f64 = packed.blocks.iter().map(|b| {
                let q = vertices_to_qubo(&g, &subs[b.subproblem].candidates);
                q.energy(&bits[b.range.clone()])
            }).sum();
            prop_assert_eq!(packed.qubo.energy(&bits), total);
        }

        #[test]
        fn decode_of_clique_indicator_is_identity(seed in any::<u64>(), pick in any::<u64>()) {
            let g = generate_er(14, 0.6, seed);
            let c = crate::clique::greedy_clique_heuristic(&g, pick);
            let s = sub(None, (0..14).collect(), 14);
            let packing = pack(&[s], &g, 14).unwrap();
            let bits: Vec<bool> = (0..14).map(|v| c.vertices.contains(v)).collect();
            let decoded = decode(&packing.packed, &bits).unwrap();
            prop_assert_eq!(decoded[0].dropped, 0);
            prop_assert_eq!(&decoded[0].vertices, &c.vertices.as_slice().to_vec());
            prop_assert_eq!(packing.packed.qubo.energy(&bits), -(c.size() as f64));
        }
    }
}
