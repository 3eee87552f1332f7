//! DSATUR color counts as an upper bound on the clique number.
//!
//! ```text
//! cargo run --release --example dsatur_bound
//! ```

use hybrid_clique::clique::{max_clique_exact, BnbConfig};
use hybrid_clique::coloring::dsatur_color;
use hybrid_clique::graph::generate_er;
use hybrid_clique::kcore::core_decompose;

fn main() {
    println!("{:>6} {:>6} {:>7} {:>6} {:>6}", "n", "p", "omega", "K+1", "colors");
    for (n, p) in [(100, 0.1), (100, 0.3), (100, 0.5), (100, 0.7), (100, 0.9)] {
        let g = generate_er(n, p, 1);
        let omega = max_clique_exact(&g, &BnbConfig::default()).clique.map_or(0, |c| c.size());
        let k = core_decompose(&g).k_graph;
        let colors = dsatur_color(&g).colors_used;
        println!("{n:>6} {p:>6.1} {omega:>7} {:>6} {colors:>6}", k + 1);
    }
}
