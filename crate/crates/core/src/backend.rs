//! Non-CPU device abstraction, the rule-based decision maker, and a
//! simulated annealing reference device.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::kcore::Subproblem;
use crate::qubo::Qubo;

#[derive(Debug, Error, PartialEq)]
pub enum BackendError {
    #[error("device size must be at least 1")]
    ZeroSize,
    #[error("communication cost must be finite and non-negative, got {0}")]
    BadCommCost(f64),
    #[error("density threshold must lie in [0, 1], got {0}")]
    BadDensity(f64),
    #[error("invalid annealing parameters: {0}")]
    BadParams(&'static str),
    #[error("unknown policy `{0}` (expected always-device, size-only or density-threshold)")]
    UnknownPolicy(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviceSpec {
    /// Largest number of variables accepted in one call.
    pub size: usize,
    /// Simulated seconds charged per call.
    pub comm_cost: f64,
    pub name: String,
}

impl DeviceSpec {
    pub fn new(size: usize, comm_cost: f64, name: impl Into<String>) -> Result<DeviceSpec, BackendError> {
        if size == 0 {
            return Err(BackendError::ZeroSize);
        }
        if !(comm_cost.is_finite() && comm_cost >= 0.0) {
            return Err(BackendError::BadCommCost(comm_cost));
        }
        Ok(DeviceSpec { size, comm_cost, name: name.into() })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyMode {
    /// Same as `SizeOnly`.
    AlwaysDevice,
    #[default]
    SizeOnly,
    /// Only subproblems at least `density_min` dense.
    DensityThreshold,
}

impl FromStr for PolicyMode {
    type Err = BackendError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "always-device" | "always_device" => Ok(PolicyMode::AlwaysDevice),
            "size-only" | "size_only" => Ok(PolicyMode::SizeOnly),
            "density-threshold" | "density_threshold" => Ok(PolicyMode::DensityThreshold),
            other => Err(BackendError::UnknownPolicy(other.to_string())),
        }
    }
}

impl fmt::Display for PolicyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyMode::AlwaysDevice => "always-device",
            PolicyMode::SizeOnly => "size-only",
            PolicyMode::DensityThreshold => "density-threshold",
        })
    }
}

/// Decides which subproblems the device should see.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DecisionPolicy {
    pub mode: PolicyMode,
    pub density_min: f64,
}

impl DecisionPolicy {
    pub fn new(mode: PolicyMode, density_min: f64) -> Result<DecisionPolicy, BackendError> {
        if !(0.0..=1.0).contains(&density_min) {
            return Err(BackendError::BadDensity(density_min));
        }
        Ok(DecisionPolicy { mode, density_min })
    }

    /// The non-size part of the decision.
    pub fn accepts(&self, sub: &Subproblem, parent: &Graph) -> bool {
        match self.mode {
            PolicyMode::AlwaysDevice | PolicyMode::SizeOnly => true,
            PolicyMode::DensityThreshold => candidate_density(sub, parent) >= self.density_min,
        }
    }
}

/// Density of the subgraph induced by the candidates.
pub fn candidate_density(sub: &Subproblem, parent: &Graph) -> f64 {
    parent.induced_subgraph(&sub.candidates).map(|(h, _)| h.density()).unwrap_or(0.0)
}

/// True when the candidates fit on the device and the policy accepts them.
pub fn is_well_suited(sub: &Subproblem, parent: &Graph, spec: &DeviceSpec, policy: &DecisionPolicy) -> bool {
    sub.candidates.len() <= spec.size && policy.accepts(sub, parent)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaParams {
    pub sweeps: u32,
    pub restarts: u32,
    pub beta_initial: f64,
    pub beta_final: f64,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams { sweeps: 2000, restarts: 8, beta_initial: 0.1, beta_final: 10.0, seed: 0 }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<(), BackendError> {
        if self.sweeps == 0 {
            return Err(BackendError::BadParams("sweeps must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(BackendError::BadParams("restarts must be at least 1"));
        }
        if !(self.beta_initial > 0.0 && self.beta_initial <= self.beta_final && self.beta_final.is_finite()) {
            return Err(BackendError::BadParams("need 0 < beta_initial <= beta_final"));
        }
        Ok(())
    }
}

/// Single-flip Metropolis annealing with a geometric inverse-temperature
/// schedule, best of `restarts` runs. Returns the lowest-energy state seen
/// and its energy evaluated from scratch.
pub fn solve_qubo_sa(q: &Qubo, params: &SaParams) -> (Vec<bool>, f64) {
    let dim = q.dim;
    if dim == 0 {
        return (Vec::new(), q.offset);
    }
    let couplings = q.couplings();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let sweeps = params.sweeps.max(1);
    let ratio = if sweeps > 1 {
        (params.beta_final / params.beta_initial).powf(1.0 / (sweeps - 1) as f64)
    } else {
        1.0
    };

    let mut best_bits = vec![false; dim];
    let mut best_energy = f64::INFINITY;
    let mut bits = vec![false; dim];
    // field[i] = energy change of setting x_i from 0 to 1
    let mut field = vec![0.0; dim];
    for _ in 0..params.restarts.max(1) {
        for b in bits.iter_mut() {
            *b = rng.gen();
        }
        for i in 0..dim {
            field[i] = q.linear[i]
                + couplings[i].iter().filter(|&&(j, _)| bits[j as usize]).map(|&(_, c)| c).sum::<f64>();
        }
        let mut energy = q.energy(&bits);
        if energy < best_energy {
            best_energy = energy;
            best_bits.copy_from_slice(&bits);
        }
        let mut beta = params.beta_initial;
        for _ in 0..sweeps {
            for i in 0..dim {
                let delta = if bits[i] { -field[i] } else { field[i] };
                if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                    bits[i] = !bits[i];
                    energy += delta;
                    let sign = if bits[i] { 1.0 } else { -1.0 };
                    for &(j, c) in &couplings[i] {
                        field[j as usize] += sign * c;
                    }
                    if energy < best_energy - 1e-12 {
                        best_energy = energy;
                        best_bits.copy_from_slice(&bits);
                    }
                }
            }
            beta *= ratio;
        }
    }
    let exact = q.energy(&best_bits);
    (best_bits, exact)
}

/// One answer from a device.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub bits: Vec<bool>,
    pub energy: f64,
    /// Compute time spent on the device.
    pub elapsed: Duration,
}

/// Something that accepts QUBOs of bounded size.
///
/// Implementations keep no state between calls; the call index lets them
/// derive a distinct random stream per call. Call counting and the
/// communication charge are the caller's business.
pub trait Device: Send + Sync {
    fn spec(&self) -> &DeviceSpec;
    fn submit(&self, q: &Qubo, call_index: u64) -> Sample;
}

/// Reference device backed by [`solve_qubo_sa`].
#[derive(Clone, Debug)]
pub struct SimulatedAnnealer {
    pub spec: DeviceSpec,
    pub params: SaParams,
}

impl SimulatedAnnealer {
    pub fn new(spec: DeviceSpec, params: SaParams) -> SimulatedAnnealer {
        SimulatedAnnealer { spec, params }
    }
}

impl Device for SimulatedAnnealer {
    fn spec(&self) -> &DeviceSpec {
        &self.spec
    }

    fn submit(&self, q: &Qubo, call_index: u64) -> Sample {
        assert!(q.dim <= self.spec.size, "QUBO of dimension {} exceeds device size {}", q.dim, self.spec.size);
        let params = SaParams { seed: self.params.seed ^ call_index.wrapping_mul(0x9E37_79B9_7F4A_7C15), ..self.params };
        let start = Instant::now();
        let (bits, energy) = solve_qubo_sa(q, &params);
        Sample { bits, energy, elapsed: start.elapsed() }
    }
}
