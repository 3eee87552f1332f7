//! Per-level decomposition statistics of random graphs, averaged over ten
//! seeds per row.
//!
//! ```text
//! cargo run --release --example table2_statistics
//! ```

use hybrid_clique::graph::generate_er;
use hybrid_clique::orchestrator::{decomposition_statistics, HybridConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = [(200, 0.3), (200, 0.4), (200, 0.5), (500, 0.3), (1000, 0.1)];
    let samples = 10;
    println!("{:<14} {:>6} {:>6}   {:>24}   {:>24}   {:>24}", "graph", "K(G)", "omega", "level 1", "level 2", "level 3");
    for (n, p) in rows {
        let mut k = 0.0;
        let mut omega = 0.0;
        let mut levels = [[0.0f64; 4]; 3];
        for seed in 0..samples {
            let g = generate_er(n, p, seed);
            let r = decomposition_statistics(&g, 3, &HybridConfig::default())?;
            k += r.k_graph as f64;
            omega += r.omega as f64;
            for l in &r.levels {
                let row = &mut levels[l.level as usize - 1];
                row[0] += l.num_subproblems as f64;
                row[1] += l.max as f64;
                row[2] += l.min as f64;
                row[3] += l.avg;
            }
        }
        let s = samples as f64;
        let cells: Vec<String> = levels
            .iter()
            .map(|r| format!("{:>9.1} {:>4.0} {:>4.0} {:>4.0}", r[0] / s, r[1] / s, r[2] / s, r[3] / s))
            .collect();
        println!("ER({n},{p}){:<4} {:>6.1} {:>6.1}   {}", "", k / s, omega / s, cells.join("   "));
    }
    Ok(())
}
