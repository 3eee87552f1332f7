//! Full hybrid solve with a small simulated device, next to a CPU-only run.
//!
//! ```text
//! cargo run --release --example hybrid_solve -- [device size] [levels]
//! ```

use hybrid_clique::backend::{DeviceSpec, SaParams};
use hybrid_clique::graph::generate_er;
use hybrid_clique::orchestrator::{solve_hybrid, HybridConfig, SolveReport};

fn show(label: &str, r: &SolveReport) {
    println!(
        "{label:<8} omega {:>2}  K(G) {:>3}  calls {:>4}  device {:>5}  cpu {:>5}  pruned {:>6}  t_total {:.3} s",
        r.omega,
        r.k_graph,
        r.device_calls,
        r.device_solved,
        r.cpu_solved,
        r.pruned,
        r.t_total
    );
    for l in &r.levels {
        println!(
            "         level {}: {} generated, {} kept, sizes {}..{} (avg {:.1})",
            l.level, l.generated, l.num_subproblems, l.min, l.max, l.avg
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(21);
    let levels: u32 = args.next().and_then(|a| a.parse().ok()).unwrap_or(2);
    let g = generate_er(400, 0.1, 11);

    let cpu = solve_hybrid(&g, &HybridConfig { decomposition_level: levels, ..HybridConfig::default() })?;
    show("cpu", &cpu);

    let cfg = HybridConfig {
        device: Some(DeviceSpec::new(size, 0.02, "sa")?),
        decomposition_level: levels,
        sa: SaParams { seed: 5, ..SaParams::default() },
        ..HybridConfig::default()
    };
    let hybrid = solve_hybrid(&g, &cfg)?;
    show("hybrid", &hybrid);
    assert_eq!(cpu.omega, hybrid.omega);
    Ok(())
}
