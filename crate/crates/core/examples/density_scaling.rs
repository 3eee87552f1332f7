//! Subproblems sent to a 45- or 65-variable device as the density of a
//! 500-vertex random graph grows. Prints CSV for plotting elsewhere.
//!
//! ```text
//! cargo run --release --example density_scaling > scaling.csv
//! ```

use hybrid_clique::backend::{DeviceSpec, SaParams};
use hybrid_clique::graph::generate_er;
use hybrid_clique::orchestrator::{solve_hybrid, HybridConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples = 3;
    println!("density,device_size,mean_subproblems,std_subproblems,mean_calls");
    for p in [0.05, 0.1, 0.15, 0.2, 0.25, 0.3] {
        for size in [45, 65] {
            let mut counts = Vec::new();
            let mut calls = 0.0;
            for seed in 0..samples {
                let g = generate_er(500, p, seed);
                let cfg = HybridConfig {
                    device: Some(DeviceSpec::new(size, 0.0, "sa")?),
                    decomposition_level: 3,
                    sa: SaParams { sweeps: 300, restarts: 2, seed, ..SaParams::default() },
                    ..HybridConfig::default()
                };
                let r = solve_hybrid(&g, &cfg)?;
                counts.push(r.device_solved as f64);
                calls += r.device_calls as f64;
            }
            let mean = counts.iter().sum::<f64>() / samples as f64;
            let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / samples as f64;
            println!("{p},{size},{mean:.1},{:.1},{:.1}", var.sqrt(), calls / samples as f64);
        }
    }
    Ok(())
}
