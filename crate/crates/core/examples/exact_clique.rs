//! Exact branch and bound against the greedy heuristic on random graphs.
//!
//! ```text
//! cargo run --release --example exact_clique -- 300 0.5
//! ```

use std::time::Instant;

use hybrid_clique::clique::{greedy_clique_heuristic, max_clique_exact, BnbConfig};
use hybrid_clique::graph::generate_er;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let p: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.5);

    println!("{:>5} {:>8} {:>6} {:>10} {:>10} {:>9}", "seed", "greedy", "exact", "nodes", "prunes", "ms");
    for seed in 0..5 {
        let g = generate_er(n, p, seed);
        let greedy = greedy_clique_heuristic(&g, seed);
        let start = Instant::now();
        let out = max_clique_exact(&g, &BnbConfig::default());
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let exact = out.clique.map_or(0, |c| c.size());
        println!(
            "{seed:>5} {:>8} {exact:>6} {:>10} {:>10} {ms:>9.2}",
            greedy.size(),
            out.stats.nodes,
            out.stats.prunes
        );
    }

    // a warm start skips every clique no larger than the bound
    let g = generate_er(n, p, 0);
    let greedy = greedy_clique_heuristic(&g, 0);
    let warm = BnbConfig { initial_lower_bound: greedy.size(), ..BnbConfig::default() };
    let out = max_clique_exact(&g, &warm);
    println!("warm start from {}: {} nodes", greedy.size(), out.stats.nodes);
}
