//! End-to-end hybrid solve: decompose, route, prune, pack, call the device,
//! aggregate. Also keeps the per-level statistics and the cost model
//! `t_total = t_cpu + t_comm + t_noncpu`.

use std::cmp::Reverse;
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use log::{debug, info};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::backend::{DecisionPolicy, Device, DeviceSpec, SaParams, SimulatedAnnealer};
use crate::clique::{greedy_clique_heuristic, max_clique_exact, BnbConfig, Clique};
use crate::coloring::dsatur_color;
use crate::graph::{Graph, VertexId, VertexSet};
use crate::kcore::{core_decompose, enumerate_subproblems, CoreDecomposition, Subproblem};
use crate::qubo::{decode, pack_with, Accounting, QuboError};

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error("decomposition level must be at least 1")]
    ZeroLevel,
    #[error(
        "subproblem at level {level} (root {root}, {candidates} candidates) cannot be placed: \
         not suited to the device, CPU fallback disabled and no decomposition levels left"
    )]
    Unroutable { level: u32, root: String, candidates: usize },
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error("failed to start worker pool: {0}")]
    Pool(String),
}

/// Which form of the k-core stop rule to apply to rooted subproblems.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneRule {
    /// Drop when `1 + K(root) <= best`. Never loses a maximum clique.
    #[default]
    Safe,
    /// Drop when `K(root) <= best`. Can miss a clique of size `K(root) + 1`;
    /// only useful for matching published subproblem counts.
    BareCore,
}

impl FromStr for PruneRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "safe" => Ok(PruneRule::Safe),
            "bare-core" | "bare" => Ok(PruneRule::BareCore),
            other => Err(format!("unknown prune rule `{other}` (expected safe or bare-core)")),
        }
    }
}

impl fmt::Display for PruneRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PruneRule::Safe => "safe",
            PruneRule::BareCore => "bare-core",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HybridConfig {
    /// `None` runs on the CPU only.
    pub device: Option<DeviceSpec>,
    pub policy: DecisionPolicy,
    /// Deepest decomposition level, at least 1.
    pub decomposition_level: u32,
    pub use_dsatur_prune: bool,
    pub sa: SaParams,
    /// Solve subproblems the device cannot take on the CPU.
    pub cpu_fallback: bool,
    /// Seed the incumbent with a greedy clique before decomposing.
    pub initial_heuristic: bool,
    pub prune_rule: PruneRule,
    /// Turns every prune test off; results must not change.
    pub pruning: bool,
    pub accounting: Accounting,
    /// Decompose every subproblem down to the last level, then solve there
    /// on the CPU, pruning levels 2+ against the incumbent from before them.
    /// Used for decomposition statistics.
    pub force_decomposition: bool,
    /// Worker threads for CPU subproblems; 1 keeps everything sequential.
    pub threads: usize,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            device: None,
            policy: DecisionPolicy::default(),
            decomposition_level: 1,
            use_dsatur_prune: true,
            sa: SaParams::default(),
            cpu_fallback: true,
            initial_heuristic: true,
            prune_rule: PruneRule::Safe,
            pruning: true,
            accounting: Accounting::RootExcluded,
            force_decomposition: false,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelStats {
    pub level: u32,
    /// Subproblems produced at this level before pruning.
    pub generated: usize,
    /// Subproblems that survived pruning and were solved or split further.
    pub num_subproblems: usize,
    /// Candidate-set sizes over the survivors.
    pub max: usize,
    pub min: usize,
    pub avg: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub best_clique: Clique,
    pub omega: usize,
    pub k_graph: u32,
    pub levels: Vec<LevelStats>,
    pub device_calls: u64,
    /// Subproblems answered by the device.
    pub device_solved: usize,
    /// Subproblems answered by the CPU branch and bound.
    pub cpu_solved: usize,
    /// Subproblems with no candidates, answered by their root alone.
    pub trivial: usize,
    pub pruned: usize,
    /// Variables sent to the device over all calls.
    pub device_variables: usize,
    /// Same, counting one extra slot per root.
    pub device_variables_root_inclusive: usize,
    pub t_cpu: f64,
    pub t_comm: f64,
    pub t_noncpu: f64,
    pub t_total: f64,
}

impl SolveReport {
    pub fn subproblems_solved(&self) -> usize {
        self.device_solved + self.cpu_solved
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PruneReason {
    Size,
    KCore,
    Coloring,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Keep,
    Drop(PruneReason),
}

/// Decides whether `sub` can still contain a clique larger than `best`.
///
/// `best` must already discount any vertices fixed above `sub`. Tests run
/// cheapest first: candidate count, k-core bound, then DSATUR colors on the
/// candidates (dense blocks and levels 2+ only). A computed color count is
/// cached in `sub.color_bound`.
pub fn prune_subproblem(
    sub: &mut Subproblem,
    best: usize,
    use_dsatur: bool,
    rule: PruneRule,
    parent: &Graph,
) -> Verdict {
    let r = usize::from(sub.root.is_some());
    if r + sub.candidates.len() <= best {
        return Verdict::Drop(PruneReason::Size);
    }
    let k = sub.kcore_bound as usize;
    let kcore_drop = match (rule, sub.root) {
        (PruneRule::BareCore, Some(_)) => k <= best,
        _ => r + k <= best,
    };
    if kcore_drop {
        return Verdict::Drop(PruneReason::KCore);
    }
    if use_dsatur {
        let colors = match sub.color_bound {
            Some(c) => Some(c),
            None => {
                let (h, _) = parent.induced_subgraph(&sub.candidates).expect("candidates lie in parent");
                (sub.level >= 2 || h.density() >= 0.5).then(|| dsatur_color(&h).colors_used)
            }
        };
        sub.color_bound = colors;
        if let Some(c) = colors {
            if r + c as usize <= best {
                return Verdict::Drop(PruneReason::Coloring);
            }
        }
    }
    Verdict::Keep
}

/// Runs the hybrid solve with the simulated annealer as device.
pub fn solve_hybrid(g: &Graph, cfg: &HybridConfig) -> Result<SolveReport, OrchestratorError> {
    let device = cfg.device.clone().map(|spec| SimulatedAnnealer::new(spec, cfg.sa));
    solve_hybrid_with(g, cfg, device.as_ref().map(|d| d as &dyn Device))
}

/// Runs the hybrid solve against any device; `cfg.device` is ignored.
pub fn solve_hybrid_with(
    g: &Graph,
    cfg: &HybridConfig,
    device: Option<&dyn Device>,
) -> Result<SolveReport, OrchestratorError> {
    if cfg.decomposition_level == 0 {
        return Err(OrchestratorError::ZeroLevel);
    }
    let device = if cfg.force_decomposition { None } else { device };
    let start = Instant::now();
    let cd = core_decompose(g);
    let mut run = Run::new(g, cfg, device);
    if cfg.initial_heuristic && g.n() > 0 {
        let c = greedy_clique_heuristic(g, cfg.sa.seed);
        debug!("heuristic clique of size {}", c.size());
        run.offer(c.vertices.into_vec());
    }
    run.execute(&cd)?;

    let t_noncpu = run.t_noncpu;
    let t_cpu = (start.elapsed().as_secs_f64() - t_noncpu).max(0.0);
    let t_comm = run.device_calls as f64 * device.map_or(0.0, |d| d.spec().comm_cost);
    let t_total = t_cpu + t_comm + t_noncpu;
    let best_clique = Clique::new(run.best_clique.clone());
    info!(
        "omega {} with {} device calls, {} CPU solves, {} pruned",
        best_clique.size(),
        run.device_calls,
        run.cpu_solved,
        run.pruned
    );
    Ok(SolveReport {
        omega: best_clique.size(),
        best_clique,
        k_graph: cd.k_graph,
        levels: run.level_stats(),
        device_calls: run.device_calls,
        device_solved: run.device_solved,
        cpu_solved: run.cpu_solved,
        trivial: run.trivial,
        pruned: run.pruned,
        device_variables: run.device_variables,
        device_variables_root_inclusive: run.device_variables_root_inclusive,
        t_cpu,
        t_comm,
        t_noncpu,
        t_total,
    })
}

/// Decomposition statistics: every subproblem is split down to `levels`
/// and the last level is solved on the CPU. Level 1 is pruned against the
/// running best; every deeper level against the best clique known before
/// that level started, so its counts do not depend on the order in which
/// its own subproblems are solved.
pub fn decomposition_statistics(g: &Graph, levels: u32, base: &HybridConfig) -> Result<SolveReport, OrchestratorError> {
    let cfg = HybridConfig { device: None, decomposition_level: levels, force_decomposition: true, ..base.clone() };
    solve_hybrid(g, &cfg)
}

/// A subproblem together with the roots fixed at shallower levels.
#[derive(Clone, Debug)]
struct Task {
    prefix: Vec<VertexId>,
    sub: Subproblem,
}

impl Task {
    fn fixed(&self) -> usize {
        self.prefix.len()
    }

    fn full_clique(&self, inner: impl IntoIterator<Item = VertexId>) -> Vec<VertexId> {
        let mut c = self.prefix.clone();
        c.extend(self.sub.root);
        c.extend(inner);
        c
    }
}

enum Route {
    Trivial,
    Device,
    Cpu,
    Decompose,
}

#[derive(Default)]
struct LevelAcc {
    generated: usize,
    sizes: Vec<usize>,
}

/// Tasks pulled from the device queue per call; enough to fill the device
/// several times over while keeping the per-call work bounded.
const PACK_WINDOW_FACTOR: usize = 8;

struct Run<'a> {
    g: &'a Graph,
    cfg: &'a HybridConfig,
    device: Option<&'a dyn Device>,
    best: usize,
    best_clique: Vec<VertexId>,
    /// Incumbent the current level is pruned against, when levels are
    /// pruned as a whole rather than against the running best.
    frozen: Option<usize>,
    levels: Vec<LevelAcc>,
    device_calls: u64,
    device_solved: usize,
    cpu_solved: usize,
    trivial: usize,
    pruned: usize,
    device_variables: usize,
    device_variables_root_inclusive: usize,
    t_noncpu: f64,
}

impl<'a> Run<'a> {
    fn new(g: &'a Graph, cfg: &'a HybridConfig, device: Option<&'a dyn Device>) -> Self {
        Run {
            g,
            cfg,
            device,
            best: 0,
            best_clique: Vec::new(),
            frozen: None,
            levels: Vec::new(),
            device_calls: 0,
            device_solved: 0,
            cpu_solved: 0,
            trivial: 0,
            pruned: 0,
            device_variables: 0,
            device_variables_root_inclusive: 0,
            t_noncpu: 0.0,
        }
    }

    fn offer(&mut self, clique: Vec<VertexId>) {
        if clique.len() > self.best {
            debug_assert!(self.g.is_clique(&clique));
            debug!("incumbent {} -> {}", self.best, clique.len());
            self.best = clique.len();
            self.best_clique = clique;
        }
    }

    fn level_acc(&mut self, level: u32) -> &mut LevelAcc {
        let i = level as usize - 1;
        if self.levels.len() <= i {
            self.levels.resize_with(i + 1, LevelAcc::default);
        }
        &mut self.levels[i]
    }

    fn record(&mut self, task: &Task) {
        if task.sub.level == 0 {
            return;
        }
        let size = task.sub.candidates.len();
        self.level_acc(task.sub.level).sizes.push(size);
    }

    fn level_stats(&self) -> Vec<LevelStats> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, acc)| {
                let n = acc.sizes.len();
                LevelStats {
                    level: i as u32 + 1,
                    generated: acc.generated,
                    num_subproblems: n,
                    max: acc.sizes.iter().copied().max().unwrap_or(0),
                    min: acc.sizes.iter().copied().min().unwrap_or(0),
                    avg: if n == 0 { 0.0 } else { acc.sizes.iter().sum::<usize>() as f64 / n as f64 },
                }
            })
            .collect()
    }

    /// True when `task` should be dropped against the current incumbent.
    fn prune(&mut self, task: &mut Task) -> bool {
        if !self.cfg.pruning || task.sub.level == 0 {
            return false;
        }
        let local = self.frozen.unwrap_or(self.best).saturating_sub(task.fixed());
        let verdict = prune_subproblem(&mut task.sub, local, self.cfg.use_dsatur_prune, self.cfg.prune_rule, self.g);
        if verdict != Verdict::Keep {
            self.pruned += 1;
            return true;
        }
        false
    }

    fn route(&self, task: &Task) -> Result<Route, OrchestratorError> {
        let sub = &task.sub;
        let level = sub.level;
        if level > 0 && sub.candidates.is_empty() {
            return Ok(Route::Trivial);
        }
        let can_split = level < self.cfg.decomposition_level;
        if self.cfg.force_decomposition {
            return Ok(if can_split { Route::Decompose } else { Route::Cpu });
        }
        match self.device {
            Some(dev) => {
                let fits = self.cfg.accounting.cost(sub) <= dev.spec().size;
                let accepts = self.cfg.policy.accepts(sub, self.g);
                if fits && accepts {
                    return Ok(Route::Device);
                }
                if level == 0 || (accepts && can_split) {
                    return Ok(Route::Decompose);
                }
            }
            None if level == 0 => return Ok(Route::Decompose),
            None => {}
        }
        if self.cfg.cpu_fallback {
            Ok(Route::Cpu)
        } else if can_split {
            Ok(Route::Decompose)
        } else {
            Err(OrchestratorError::Unroutable {
                level,
                root: sub.root.map_or_else(|| "none".to_string(), |r| self.g.label(r)),
                candidates: sub.candidates.len(),
            })
        }
    }

    fn execute(&mut self, cd: &CoreDecomposition) -> Result<(), OrchestratorError> {
        let whole = Task {
            prefix: Vec::new(),
            sub: Subproblem {
                root: None,
                candidates: VertexSet::all(self.g.n()),
                kcore_bound: cd.k_graph + 1,
                color_bound: None,
                level: 0,
            },
        };
        let mut frontier = vec![whole];
        let parallel = self.cfg.threads > 1;
        let pool = if parallel {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(self.cfg.threads)
                    .build()
                    .map_err(|e| OrchestratorError::Pool(e.to_string()))?,
            )
        } else {
            None
        };

        for level in 0..=self.cfg.decomposition_level {
            if frontier.is_empty() {
                break;
            }
            if level > 0 {
                self.level_acc(level).generated = frontier.len();
                frontier.sort_by_key(|t| Reverse(t.sub.kcore_bound));
            }
            self.frozen = (self.cfg.force_decomposition && level >= 2).then_some(self.best);
            let mut device_queue = VecDeque::new();
            let mut cpu_queue = Vec::new();
            let mut split = Vec::new();
            for mut task in frontier.drain(..) {
                if self.prune(&mut task) {
                    continue;
                }
                match self.route(&task)? {
                    Route::Trivial => {
                        self.trivial += 1;
                        let clique = task.full_clique([]);
                        self.offer(clique);
                    }
                    Route::Device => device_queue.push_back(task),
                    Route::Cpu if parallel || self.frozen.is_some() => cpu_queue.push(task),
                    Route::Cpu => self.solve_on_cpu(task),
                    Route::Decompose => split.push(task),
                }
            }
            match &pool {
                Some(pool) => pool.install(|| self.solve_on_cpu_parallel(cpu_queue)),
                None => cpu_queue.into_iter().for_each(|t| self.solve_on_cpu(t)),
            }
            self.drain_device_queue(device_queue)?;

            let mut next = Vec::new();
            for mut task in split {
                if self.prune(&mut task) {
                    continue;
                }
                self.record(&task);
                next.extend(self.decompose(&task, (level == 0).then_some(cd)));
            }
            frontier = next;
        }
        Ok(())
    }

    fn decompose(&self, task: &Task, whole: Option<&CoreDecomposition>) -> Vec<Task> {
        let level = task.sub.level + 1;
        if let Some(cd) = whole {
            return enumerate_subproblems(self.g, cd)
                .map(|sub| Task { prefix: Vec::new(), sub: Subproblem { level, ..sub } })
                .collect();
        }
        let (h, map) = self.g.induced_subgraph(&task.sub.candidates).expect("candidates lie in the graph");
        let cd = core_decompose(&h);
        let mut prefix = task.prefix.clone();
        prefix.extend(task.sub.root);
        enumerate_subproblems(&h, &cd)
            .map(|s| Task {
                prefix: prefix.clone(),
                sub: Subproblem {
                    root: s.root.map(|r| map[r as usize]),
                    // `map` is increasing, so the image stays sorted
                    candidates: VertexSet::from_sorted_unchecked(s.candidates.iter().map(|v| map[v as usize]).collect()),
                    kcore_bound: s.kcore_bound,
                    color_bound: None,
                    level,
                },
            })
            .collect()
    }

    fn solve_on_cpu(&mut self, task: Task) {
        self.record(&task);
        self.cpu_solved += 1;
        if let Some(clique) = solve_task_exact(self.g, &task, self.best) {
            self.offer(clique);
        }
    }

    fn solve_on_cpu_parallel(&mut self, tasks: Vec<Task>) {
        if tasks.is_empty() {
            return;
        }
        let best = AtomicUsize::new(self.best);
        let found: Mutex<Vec<Vec<VertexId>>> = Mutex::new(Vec::new());
        let g = self.g;
        let cfg = self.cfg;
        let reprune = cfg.pruning && self.frozen.is_none();
        let solved: Vec<Option<Task>> = tasks
            .into_par_iter()
            .map(|mut task| {
                if reprune {
                    let local = best.load(Ordering::Relaxed).saturating_sub(task.fixed());
                    if prune_subproblem(&mut task.sub, local, cfg.use_dsatur_prune, cfg.prune_rule, g) != Verdict::Keep {
                        return None;
                    }
                }
                if let Some(clique) = solve_task_exact(g, &task, best.load(Ordering::Relaxed)) {
                    best.fetch_max(clique.len(), Ordering::Relaxed);
                    found.lock().unwrap().push(clique);
                }
                Some(task)
            })
            .collect();
        for entry in solved {
            match entry {
                Some(task) => {
                    self.record(&task);
                    self.cpu_solved += 1;
                }
                None => self.pruned += 1,
            }
        }
        let mut found = found.into_inner().unwrap();
        // deterministic pick among equally large cliques
        found.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        if let Some(c) = found.into_iter().next() {
            self.offer(c);
        }
    }

    fn drain_device_queue(&mut self, mut queue: VecDeque<Task>) -> Result<(), OrchestratorError> {
        let Some(device) = self.device else {
            debug_assert!(queue.is_empty());
            return Ok(());
        };
        let size = device.spec().size;
        let window = size.max(1) * PACK_WINDOW_FACTOR;
        while !queue.is_empty() {
            let mut batch = Vec::new();
            while batch.len() < window {
                let Some(mut task) = queue.pop_front() else { break };
                if !self.prune(&mut task) {
                    batch.push(task);
                }
            }
            if batch.is_empty() {
                break;
            }
            let subs: Vec<Subproblem> = batch.iter().map(|t| t.sub.clone()).collect();
            let packing = pack_with(&subs, self.g, size, self.cfg.accounting)?;
            let packed = &packing.packed;
            let sample = device.submit(&packed.qubo, self.device_calls);
            self.device_calls += 1;
            self.t_noncpu += sample.elapsed.as_secs_f64();
            self.device_variables += packed.qubo.dim;
            self.device_variables_root_inclusive += packed.root_inclusive_size;
            debug!(
                "device call {}: {} blocks, {} variables, energy {}",
                self.device_calls,
                packed.blocks.len(),
                packed.qubo.dim,
                sample.energy
            );
            for d in decode(packed, &sample.bits)? {
                let task = &batch[d.subproblem];
                self.record(task);
                self.device_solved += 1;
                let clique = task.full_clique(d.vertices);
                self.offer(clique);
            }
            for &i in packing.leftovers.iter().rev() {
                queue.push_front(batch[i].clone());
            }
        }
        Ok(())
    }
}

/// Exact clique through `task` if it beats `best`.
fn solve_task_exact(g: &Graph, task: &Task, best: usize) -> Option<Vec<VertexId>> {
    let fixed = task.fixed() + usize::from(task.sub.root.is_some());
    let (h, map) = g.induced_subgraph(&task.sub.candidates).expect("candidates lie in the graph");
    let cfg = BnbConfig { initial_lower_bound: best.saturating_sub(fixed), ..BnbConfig::default() };
    let inner = max_clique_exact(&h, &cfg).clique;
    match inner {
        Some(c) => Some(task.full_clique(c.vertices.iter().map(|v| map[v as usize]))),
        None if fixed > best => Some(task.full_clique([])),
        None => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{PolicyMode, Sample};
    use crate::graph::fixtures::{by_label, hexagon_with_chord};
    use crate::graph::generate_er;
    use crate::oracle;
    use crate::qubo::Qubo;
    use std::sync::atomic::AtomicU64;

    fn cpu_only() -> HybridConfig {
        HybridConfig { initial_heuristic: false, ..HybridConfig::default() }
    }

    fn with_device(size: usize, levels: u32) -> HybridConfig {
        HybridConfig {
            device: Some(DeviceSpec::new(size, 0.25, "sa").unwrap()),
            decomposition_level: levels,
            ..HybridConfig::default()
        }
    }

    fn omega_oracle(g: &Graph) -> usize {
        oracle::clique_number(&oracle::matrix_from_edges(g.n(), g.edges()))
    }

    #[test]
    fn hexagon_cpu_only_solves_three() {
        let g = hexagon_with_chord();
        let r = solve_hybrid(&g, &cpu_only()).unwrap();
        assert_eq!((r.omega, r.k_graph), (2, 2));
        assert_eq!(r.cpu_solved, 3);
        assert_eq!(r.pruned, 2);
        assert_eq!(r.levels[0].generated, 5);
        assert_eq!(r.levels[0].num_subproblems, 3);
        assert_eq!(r.device_calls, 0);
    }

    #[test]
    fn hexagon_device_of_two_solves_three() {
        let g = hexagon_with_chord();
        let cfg = HybridConfig { initial_heuristic: false, ..with_device(2, 1) };
        let r = solve_hybrid(&g, &cfg).unwrap();
        assert_eq!(r.omega, 2);
        assert_eq!(r.device_solved, 3);
        assert_eq!(r.device_calls, 3);
        assert_eq!(r.cpu_solved, 0);
        assert!(g.is_clique(r.best_clique.vertices.as_slice()));
    }

    #[test]
    fn whole_graph_on_device_when_it_fits() {
        let g = hexagon_with_chord();
        let r = solve_hybrid(&g, &with_device(6, 1)).unwrap();
        assert_eq!(r.omega, 2);
        assert_eq!(r.device_calls, 1);
        assert_eq!(r.device_solved, 1);
        assert!(r.levels.is_empty());
    }

    #[test]
    fn prune_rules() {
        let g = hexagon_with_chord();
        let f = by_label(&g, "f");
        let mut empty = Subproblem { root: Some(f), candidates: VertexSet::all(0), kcore_bound: 2, color_bound: None, level: 1 };
        assert_eq!(prune_subproblem(&mut empty, 2, true, PruneRule::Safe, &g), Verdict::Drop(PruneReason::Size));

        let k = Graph::complete(5);
        let mut k4 = Subproblem { root: Some(0), candidates: VertexSet::new(vec![1, 2, 3, 4]).unwrap(), kcore_bound: 4, color_bound: None, level: 1 };
        assert_eq!(prune_subproblem(&mut k4, 4, true, PruneRule::Safe, &k), Verdict::Keep);
        assert_eq!(prune_subproblem(&mut k4, 5, true, PruneRule::Safe, &k), Verdict::Drop(PruneReason::Size));
        assert_eq!(k4.color_bound, Some(4));

        // large candidate set, low core number
        let mut loose = Subproblem { root: Some(0), candidates: VertexSet::new(vec![1, 2, 3, 4]).unwrap(), kcore_bound: 2, color_bound: None, level: 1 };
        assert_eq!(prune_subproblem(&mut loose, 2, false, PruneRule::Safe, &k), Verdict::Keep);
        assert_eq!(prune_subproblem(&mut loose, 3, false, PruneRule::Safe, &k), Verdict::Drop(PruneReason::KCore));
        assert_eq!(prune_subproblem(&mut loose, 2, false, PruneRule::BareCore, &k), Verdict::Drop(PruneReason::KCore));

        // sparse level-1 block is not colored, level 2 is
        let c6 = Graph::from_edges(7, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)]);
        let mut ring = Subproblem { root: Some(0), candidates: VertexSet::new(vec![1, 2, 3, 4, 5, 6]).unwrap(), kcore_bound: 6, color_bound: None, level: 1 };
        assert_eq!(prune_subproblem(&mut ring, 3, true, PruneRule::Safe, &c6), Verdict::Keep);
        assert_eq!(ring.color_bound, None);
        ring.level = 2;
        assert_eq!(prune_subproblem(&mut ring, 3, true, PruneRule::Safe, &c6), Verdict::Drop(PruneReason::Coloring));
        assert_eq!(ring.color_bound, Some(2));
    }

    #[test]
    fn dsatur_rule_on_dense_level_two() {
        let g = generate_er(500, 0.4, 1);
        let cd = core_decompose(&g);
        let top = enumerate_subproblems(&g, &cd).nth(1).unwrap();
        let (h, map) = g.induced_subgraph(&top.candidates).unwrap();
        let hcd = core_decompose(&h);
        let mut checked = 0;
        for s in enumerate_subproblems(&h, &hcd).filter(|s| s.root.is_some()) {
            let (inner, _) = h.induced_subgraph(&s.candidates).unwrap();
            let colors = dsatur_color(&inner).colors_used as usize;
            let best = colors + 1;
            if s.candidates.len() + 1 <= best || s.kcore_bound as usize + 1 <= best {
                continue;
            }
            let mut lifted = Subproblem {
                root: s.root.map(|r| map[r as usize]),
                candidates: VertexSet::from_unsorted(s.candidates.iter().map(|v| map[v as usize]).collect()),
                kcore_bound: s.kcore_bound,
                color_bound: None,
                level: 2,
            };
            assert_eq!(prune_subproblem(&mut lifted, best, true, PruneRule::Safe, &g), Verdict::Drop(PruneReason::Coloring));
            assert_eq!(prune_subproblem(&mut lifted, best - 1, true, PruneRule::Safe, &g), Verdict::Keep);
            checked += 1;
        }
        assert!(checked > 0);
    }

    #[test]
    fn matches_oracle_across_modes() {
        for seed in 0..40u64 {
            let n = 8 + (seed % 20) as usize;
            let p = 0.2 + 0.6 * ((seed * 7) % 10) as f64 / 10.0;
            let g = generate_er(n, p, seed);
            let omega = omega_oracle(&g);
            for levels in 1..=3 {
                let r = solve_hybrid(&g, &HybridConfig { sa: SaParams { seed, ..Default::default() }, ..with_device(6, levels) }).unwrap();
                assert_eq!(r.omega, omega, "seed {seed} levels {levels}");
                assert!(g.is_clique(r.best_clique.vertices.as_slice()));
                let r = solve_hybrid(&g, &HybridConfig { decomposition_level: levels, ..cpu_only() }).unwrap();
                assert_eq!(r.omega, omega);
                let r = decomposition_statistics(&g, levels, &HybridConfig::default()).unwrap();
                assert_eq!(r.omega, omega);
            }
        }
    }

    #[test]
    fn pruning_does_not_change_omega() {
        for seed in 0..30u64 {
            let g = generate_er(25, 0.5, seed);
            let on = solve_hybrid(&g, &with_device(8, 2)).unwrap();
            let off = solve_hybrid(&g, &HybridConfig { pruning: false, ..with_device(8, 2) }).unwrap();
            assert_eq!(on.omega, off.omega);
            assert_eq!(off.pruned, 0);
        }
    }

    #[test]
    fn accounting_identity_and_call_bound() {
        let g = generate_er(60, 0.3, 2);
        let r = solve_hybrid(&g, &with_device(12, 2)).unwrap();
        assert_eq!(r.t_total, r.t_cpu + r.t_comm + r.t_noncpu);
        assert_eq!(r.t_comm, r.device_calls as f64 * 0.25);
        assert!(r.device_calls as usize <= r.device_solved);
        assert_eq!(r.omega, r.best_clique.size());
    }

    #[test]
    fn level_one_generated_follows_counting_law() {
        let g = generate_er(120, 0.2, 5);
        let cd = core_decompose(&g);
        let r = solve_hybrid(&g, &HybridConfig::default()).unwrap();
        assert_eq!(r.levels[0].generated, g.n() - cd.k_graph as usize + 1);
        let l = &r.levels[0];
        assert!(l.num_subproblems == 0 || (l.min as f64 <= l.avg && l.avg <= l.max as f64));
    }

    #[test]
    fn deeper_levels_under_forced_decomposition() {
        let g = generate_er(80, 0.5, 3);
        let r = decomposition_statistics(&g, 3, &HybridConfig::default()).unwrap();
        assert_eq!(r.levels.len(), 3);
        assert_eq!(r.omega, max_clique_exact(&g, &BnbConfig::default()).clique.unwrap().size());
        assert!(r.levels.iter().all(|l| l.num_subproblems <= l.generated));
    }

    #[test]
    fn unroutable_without_fallback() {
        let g = generate_er(40, 0.6, 1);
        let cfg = HybridConfig { cpu_fallback: false, initial_heuristic: false, ..with_device(3, 1) };
        let err = solve_hybrid(&g, &cfg).unwrap_err();
        assert!(matches!(err, OrchestratorError::Unroutable { level: 1, .. }));
        assert!(matches!(
            solve_hybrid(&g, &HybridConfig { decomposition_level: 0, ..cpu_only() }),
            Err(OrchestratorError::ZeroLevel)
        ));
    }

    #[test]
    fn density_policy_sends_sparse_blocks_to_cpu() {
        let g = generate_er(60, 0.15, 4);
        let cfg = HybridConfig {
            policy: DecisionPolicy::new(PolicyMode::DensityThreshold, 1.0).unwrap(),
            initial_heuristic: false,
            ..with_device(30, 1)
        };
        let r = solve_hybrid(&g, &cfg).unwrap();
        assert_eq!(r.omega, omega_oracle(&g));
        assert!(r.cpu_solved > 0);
    }

    #[test]
    fn threads_agree_with_sequential() {
        for seed in 0..6 {
            let g = generate_er(150, 0.3, seed);
            let one = solve_hybrid(&g, &cpu_only()).unwrap();
            let four = solve_hybrid(&g, &HybridConfig { threads: 4, ..cpu_only() }).unwrap();
            assert_eq!(one.omega, four.omega);
        }
    }

    #[test]
    fn root_inclusive_accounting_packs_fewer() {
        let g = generate_er(40, 0.3, 6);
        let ex = solve_hybrid(&g, &HybridConfig { initial_heuristic: false, pruning: false, ..with_device(12, 1) }).unwrap();
        let inc = solve_hybrid(
            &g,
            &HybridConfig { initial_heuristic: false, pruning: false, accounting: Accounting::RootInclusive, ..with_device(12, 1) },
        )
        .unwrap();
        assert!(inc.device_calls >= ex.device_calls);
        assert_eq!(ex.omega, inc.omega);
        assert!(inc.device_variables_root_inclusive <= inc.device_calls as usize * 12);
    }

    struct CountingDevice {
        inner: SimulatedAnnealer,
        calls: AtomicU64,
    }

    impl Device for CountingDevice {
        fn spec(&self) -> &DeviceSpec {
            self.inner.spec()
        }
        fn submit(&self, q: &Qubo, call_index: u64) -> Sample {
            assert!(q.dim <= self.spec().size);
            self.calls.fetch_add(1, Ordering::Relaxed);
            self.inner.submit(q, call_index)
        }
    }

    #[test]
    fn custom_device_sees_every_call() {
        let g = generate_er(50, 0.4, 8);
        let dev = CountingDevice {
            inner: SimulatedAnnealer::new(DeviceSpec::new(10, 1.0, "count").unwrap(), SaParams::default()),
            calls: AtomicU64::new(0),
        };
        let cfg = HybridConfig { decomposition_level: 2, ..HybridConfig::default() };
        let r = solve_hybrid_with(&g, &cfg, Some(&dev)).unwrap();
        assert_eq!(dev.calls.load(Ordering::Relaxed), r.device_calls);
        assert_eq!(r.t_comm, r.device_calls as f64);
        assert_eq!(r.omega, max_clique_exact(&g, &BnbConfig::default()).clique.unwrap().size());
    }

    #[test]
    fn empty_graph() {
        let r = solve_hybrid(&Graph::empty(0), &HybridConfig::default()).unwrap();
        assert_eq!(r.omega, 0);
        let r = solve_hybrid(&Graph::empty(3), &with_device(2, 1)).unwrap();
        assert_eq!(r.omega, 1);
    }
}
