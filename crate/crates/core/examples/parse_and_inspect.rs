//! Load an edge list and print its basic shape.
//!
//! ```text
//! cargo run --example parse_and_inspect -- path/to/graph.txt [snap|mtx|dimacs]
//! ```
//!
//! Without arguments the bundled six-vertex fixture is used.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use hybrid_clique::graph::{parse_edge_list, Format};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/six_vertex.txt"));
    let format = match args.next() {
        Some(f) => f.parse()?,
        None => Format::from_path(&path),
    };
    let parsed = parse_edge_list(BufReader::new(File::open(&path)?), format)?;
    let g = &parsed.graph;
    let stats = g.degree_stats();
    println!("{}: {} vertices, {} edges", path.display(), g.n(), g.m());
    println!("degree max {} min {}, density {:.6}", stats.max_degree, stats.min_degree, stats.density);
    println!(
        "dropped {} self-loops, {} repeated edges, ignored {} weights",
        parsed.summary.self_loops, parsed.summary.redundant_edges, parsed.summary.weights_ignored
    );
    if g.n() <= 20 {
        for v in g.vertices() {
            let nbrs: Vec<String> = g.neighbors(v).iter().map(|&u| g.label(u)).collect();
            println!("  {} -> {}", g.label(v), nbrs.join(" "));
        }
    }
    Ok(())
}
