use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, VertexId};

/// Erdős–Rényi G(n, p): each of the `n (n - 1) / 2` pairs is an edge
/// independently with probability `p`.
///
/// Uses geometric skipping over the lexicographic pair sequence
/// (Batagelj & Brandes), so the cost is O(n + m) rather than O(n²). The
/// stream comes from `ChaCha8Rng::seed_from_u64(seed)`, whose output is
/// specified independently of platform and word size.
///
/// Panics unless `0 <= p <= 1`.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Graph {
    assert!((0.0..=1.0).contains(&p), "edge probability {p} outside [0, 1]");
    assert!(n <= VertexId::MAX as usize, "vertex count {n} overflows the index type");
    if p == 0.0 || n < 2 {
        return Graph::empty(n);
    }
    if p == 1.0 {
        return Graph::complete(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    // Pair (v, w) with w < v; walk v = 1.. and w = 0..v, skipping
    // Geometric(p) - 1 pairs between successive edges.
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.gen();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as VertexId, v as VertexId));
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_probabilities() {
        let g = generate_er(5, 0.0, 9);
        assert_eq!((g.n(), g.m()), (5, 0));
        let k = generate_er(5, 1.0, 9);
        assert_eq!(k.m(), 10);
        assert_eq!(generate_er(0, 0.5, 1).n(), 0);
        assert_eq!(generate_er(1, 0.5, 1).m(), 0);
    }

    #[test]
    fn edge_count_within_binomial_band() {
        // m ~ Binomial(C(200,2), 0.3): mean 5970, sd sqrt(19900 * 0.21)
        let pairs = 200.0 * 199.0 / 2.0;
        let mean = 0.3 * pairs;
        let sd = (pairs * 0.3 * 0.7f64).sqrt();
        for seed in [1, 2, 42] {
            let m = generate_er(200, 0.3, seed).m() as f64;
            assert!((m - mean).abs() <= 4.0 * sd, "seed {seed}: m = {m}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_er(300, 0.2, 77);
        let b = generate_er(300, 0.2, 77);
        assert_eq!(a, b);
        assert_ne!(a, generate_er(300, 0.2, 78));
    }

    #[test]
    fn pairs_are_roughly_uniform() {
        // Every pair should be hit about p * samples times: a bias in the
        // skipping arithmetic shows up as a skewed first or last pair.
        let n = 6;
        let samples = 4000;
        let mut hits = vec![vec![0u32; n]; n];
        for seed in 0..samples {
            for (u, v) in generate_er(n, 0.25, seed).edges() {
                hits[u as usize][v as usize] += 1;
            }
        }
        let sd = (samples as f64 * 0.25 * 0.75).sqrt();
        for u in 0..n {
            for v in u + 1..n {
                let dev = (hits[u][v] as f64 - 0.25 * samples as f64).abs();
                assert!(dev < 5.0 * sd, "pair ({u},{v}) hit {} times", hits[u][v]);
            }
        }
    }
}
