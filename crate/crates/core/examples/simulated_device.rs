//! Plug a custom device into the solver. This one wraps the annealer and
//! logs every call it receives.
//!
//! ```text
//! cargo run --release --example simulated_device
//! ```

use std::sync::Mutex;

use hybrid_clique::backend::{Device, DeviceSpec, SaParams, Sample, SimulatedAnnealer};
use hybrid_clique::graph::generate_er;
use hybrid_clique::orchestrator::{solve_hybrid_with, HybridConfig};
use hybrid_clique::qubo::Qubo;

struct Logged {
    inner: SimulatedAnnealer,
    log: Mutex<Vec<(usize, usize, f64)>>,
}

impl Device for Logged {
    fn spec(&self) -> &DeviceSpec {
        self.inner.spec()
    }

    fn submit(&self, q: &Qubo, call_index: u64) -> Sample {
        let sample = self.inner.submit(q, call_index);
        self.log.lock().unwrap().push((q.dim, q.quadratic.len(), sample.energy));
        sample
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = DeviceSpec::new(45, 0.05, "logged annealer")?;
    let device = Logged {
        inner: SimulatedAnnealer::new(spec, SaParams { sweeps: 500, ..SaParams::default() }),
        log: Mutex::new(Vec::new()),
    };
    let g = generate_er(300, 0.12, 3);
    let cfg = HybridConfig { decomposition_level: 2, ..HybridConfig::default() };
    let report = solve_hybrid_with(&g, &cfg, Some(&device))?;

    for (i, (dim, couplings, energy)) in device.log.lock().unwrap().iter().enumerate().take(10) {
        println!("call {i:>3}: {dim:>3} variables, {couplings:>4} couplings, energy {energy}");
    }
    println!(
        "omega {} after {} calls; t_comm {:.2} s, t_noncpu {:.4} s",
        report.omega, report.device_calls, report.t_comm, report.t_noncpu
    );
    Ok(())
}
