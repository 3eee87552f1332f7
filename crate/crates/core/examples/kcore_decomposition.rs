//! Degeneracy order, core numbers and the root-plus-later-neighbors blocks
//! of the six-vertex fixture.
//!
//! ```text
//! cargo run --example kcore_decomposition
//! ```

use std::fs::File;
use std::io::BufReader;

use hybrid_clique::graph::{parse_edge_list, Format};
use hybrid_clique::kcore::{core_decompose, enumerate_subproblems};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/six_vertex.txt");
    let g = parse_edge_list(BufReader::new(File::open(path)?), Format::Snap)?.graph;
    let cd = core_decompose(&g);

    let order: Vec<String> = cd.order.iter().map(|&v| g.label(v)).collect();
    println!("peeling order: {}", order.join(" "));
    for &v in &cd.order {
        println!("  K({}) = {}", g.label(v), cd.core[v as usize]);
    }
    println!("K(G) = {}", cd.k_graph);

    let subs: Vec<_> = enumerate_subproblems(&g, &cd).collect();
    println!("{} subproblems (n - K(G) + 1 = {})", subs.len(), g.n() - cd.k_graph as usize + 1);
    for s in &subs {
        let root = s.root.map_or_else(|| "seed".to_string(), |r| g.label(r));
        let cands: Vec<String> = s.candidates.iter().map(|v| g.label(v)).collect();
        println!("  {root:>4} -> {{{}}}  bound {}", cands.join(", "), s.upper_bound());
    }
    Ok(())
}
