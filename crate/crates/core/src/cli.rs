//! Command-line front end: `solve`, `stats`, `gen` and `bench`.
//!
//! Exit codes: 0 success, 1 benchmark mismatch, 2 bad input or flags,
//! 3 solver failure.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;
use serde::Serialize;

use crate::backend::{DecisionPolicy, DeviceSpec, PolicyMode, SaParams};
use crate::graph::{generate_er, parse_edge_list, write_snap, Format, Graph};
use crate::orchestrator::{decomposition_statistics, solve_hybrid, HybridConfig, LevelStats, PruneRule, SolveReport};
use crate::qubo::Accounting;

/// Environment variable naming the directory that holds benchmark graphs.
pub const DATA_DIR_ENV: &str = "HYBRID_CLIQUE_DATA";

/// Expected values bundled with the crate.
pub const DATASET_MANIFEST: &str = include_str!("../data/snap_manifest.tsv");

#[derive(Debug, Parser)]
#[command(name = "hybrid-clique", version, about = "Maximum clique by k-core decomposition and device offloading")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find a maximum clique.
    Solve(SolveArgs),
    /// Per-level decomposition statistics.
    Stats(StatsArgs),
    /// Write a random graph as a SNAP edge list.
    Gen(GenArgs),
    /// CPU-only runs over a manifest of datasets, checked against expected values.
    Bench(BenchArgs),
}

/// `er:<n>:<p>:<seed>`; a seed of `_` takes the sample index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub p: f64,
    pub seed: Option<u64>,
}

impl GenSpec {
    pub fn seed_for(&self, sample: u64) -> u64 {
        self.seed.unwrap_or(sample)
    }
}

impl FromStr for GenSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, n, p, seed] = parts.as_slice() else {
            return Err(format!("expected er:<n>:<p>:<seed|_>, got `{s}`"));
        };
        if *kind != "er" {
            return Err(format!("unknown generator `{kind}`"));
        }
        let n = n.parse().map_err(|_| format!("invalid vertex count `{n}`"))?;
        let p: f64 = p.parse().map_err(|_| format!("invalid probability `{p}`"))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(format!("probability {p} outside [0, 1]"));
        }
        let seed = match *seed {
            "_" => None,
            s => Some(s.parse().map_err(|_| format!("invalid seed `{s}`"))?),
        };
        Ok(GenSpec { n, p, seed })
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge-list file.
    #[arg(long, required_unless_present = "gen", conflicts_with = "gen")]
    pub input: Option<PathBuf>,
    /// Random graph `er:<n>:<p>:<seed|_>`.
    #[arg(long)]
    pub gen: Option<GenSpec>,
    /// snap, mtx or dimacs; guessed from the extension when absent.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Table,
    Machine,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Deepest decomposition level.
    #[arg(long, default_value_t = 1)]
    pub levels: u32,
    /// Skip the coloring prune.
    #[arg(long)]
    pub no_dsatur: bool,
    /// Skip the greedy clique that seeds the incumbent.
    #[arg(long)]
    pub no_heuristic: bool,
    #[arg(long, default_value = "safe")]
    pub prune_rule: PruneRule,
    /// Seed for the heuristic and the annealer.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for CPU subproblems.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, value_enum, default_value = "table")]
    pub output: OutputMode,
    /// Leave timings out so repeated runs print identical output.
    #[arg(long)]
    pub omit_timings: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Device capacity in variables; 0 means no device.
    #[arg(long, default_value_t = 0)]
    pub device_size: usize,
    /// Simulated seconds charged per device call.
    #[arg(long, default_value_t = 0.0)]
    pub comm_cost: f64,
    #[arg(long, default_value = "size-only")]
    pub policy: String,
    /// Minimum density for the density-threshold policy.
    #[arg(long, default_value_t = 0.5)]
    pub density_min: f64,
    /// Never use the device.
    #[arg(long)]
    pub cpu_only: bool,
    /// Fail instead of solving unsuitable subproblems on the CPU.
    #[arg(long)]
    pub no_cpu_fallback: bool,
    /// Charge one device slot per root as well as per candidate.
    #[arg(long)]
    pub root_inclusive: bool,
    #[arg(long, default_value_t = 2000)]
    pub sweeps: u32,
    #[arg(long, default_value_t = 8)]
    pub restarts: u32,
    #[arg(long, default_value_t = 0.1)]
    pub beta_initial: f64,
    #[arg(long, default_value_t = 10.0)]
    pub beta_final: f64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Average over this many graphs; needs a `_` generator seed.
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Random graph `er:<n>:<p>:<seed>`.
    #[arg(long)]
    pub gen: GenSpec,
    /// Destination file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Manifest TSV; the bundled table when absent.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Dataset directory; defaults to $HYBRID_CLIQUE_DATA, then `data`.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Only run these datasets (comma separated names).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long, default_value = "safe")]
    pub prune_rule: PruneRule,
    #[arg(long, value_enum, default_value = "table")]
    pub output: OutputMode,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Solver(String),
    Mismatch(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::Mismatch(k) => write!(f, "{k} benchmark row(s) disagree with the expected values"),
        }
    }
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("hybrid-clique: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Stats(a) => cmd_stats(a, out),
        Command::Gen(a) => cmd_gen(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Input(e.to_string())
}

pub fn read_graph(path: &Path, format: Option<Format>) -> Result<Graph, CliError> {
    let format = format.unwrap_or_else(|| Format::from_path(path));
    let file = File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let parsed = parse_edge_list(BufReader::new(file), format)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let s = &parsed.summary;
    if s.self_loops + s.redundant_edges > 0 {
        log::info!("dropped {} self-loops and {} repeated edges", s.self_loops, s.redundant_edges);
    }
    Ok(parsed.graph)
}

fn load(input: &InputArgs, sample: u64) -> Result<Graph, CliError> {
    match (&input.input, &input.gen) {
        (Some(path), _) => {
            let format = match input.format.as_deref() {
                Some(f) => Some(f.parse::<Format>().map_err(|e| CliError::Input(e.to_string()))?),
                None => None,
            };
            read_graph(path, format)
        }
        (None, Some(spec)) => Ok(generate_er(spec.n, spec.p, spec.seed_for(sample))),
        (None, None) => Err(CliError::Input("one of --input or --gen is required".into())),
    }
}

fn base_config(s: &SearchArgs) -> Result<HybridConfig, CliError> {
    if s.levels == 0 {
        return Err(CliError::Input("--levels must be at least 1".into()));
    }
    if s.threads == 0 {
        return Err(CliError::Input("--threads must be at least 1".into()));
    }
    Ok(HybridConfig {
        decomposition_level: s.levels,
        use_dsatur_prune: !s.no_dsatur,
        initial_heuristic: !s.no_heuristic,
        prune_rule: s.prune_rule,
        threads: s.threads,
        sa: SaParams { seed: s.seed, ..SaParams::default() },
        ..HybridConfig::default()
    })
}

pub fn solve_config(a: &SolveArgs) -> Result<HybridConfig, CliError> {
    let mut cfg = base_config(&a.search)?;
    let bad = |e: crate::backend::BackendError| CliError::Input(e.to_string());
    let sa = SaParams {
        sweeps: a.sweeps,
        restarts: a.restarts,
        beta_initial: a.beta_initial,
        beta_final: a.beta_final,
        seed: a.search.seed,
    };
    sa.validate().map_err(bad)?;
    let mode: PolicyMode = a.policy.parse().map_err(bad)?;
    cfg.policy = DecisionPolicy::new(mode, a.density_min).map_err(bad)?;
    cfg.sa = sa;
    cfg.cpu_fallback = !a.no_cpu_fallback;
    cfg.accounting = if a.root_inclusive { Accounting::RootInclusive } else { Accounting::RootExcluded };
    cfg.device = if a.cpu_only || a.device_size == 0 {
        None
    } else {
        Some(DeviceSpec::new(a.device_size, a.comm_cost, "simulated-annealer").map_err(bad)?)
    };
    if a.comm_cost < 0.0 || !a.comm_cost.is_finite() {
        return Err(CliError::Input(format!("invalid --comm-cost {}", a.comm_cost)));
    }
    Ok(cfg)
}

/// Stable machine-readable form of a [`SolveReport`].
#[derive(Debug, Serialize)]
pub struct SolveDocument {
    pub n: usize,
    pub m: usize,
    pub omega: usize,
    pub k_graph: u32,
    pub best_clique: Vec<String>,
    pub levels: Vec<LevelStats>,
    pub device_calls: u64,
    pub device_solved: usize,
    pub cpu_solved: usize,
    pub trivial: usize,
    pub pruned: usize,
    pub device_variables: usize,
    pub device_variables_root_inclusive: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_cpu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_comm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_noncpu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_total: Option<f64>,
}

impl SolveDocument {
    pub fn new(g: &Graph, r: &SolveReport, timings: bool) -> SolveDocument {
        let t = |x: f64| timings.then_some(x);
        SolveDocument {
            n: g.n(),
            m: g.m(),
            omega: r.omega,
            k_graph: r.k_graph,
            best_clique: r.best_clique.vertices.iter().map(|v| g.label(v)).collect(),
            levels: r.levels.clone(),
            device_calls: r.device_calls,
            device_solved: r.device_solved,
            cpu_solved: r.cpu_solved,
            trivial: r.trivial,
            pruned: r.pruned,
            device_variables: r.device_variables,
            device_variables_root_inclusive: r.device_variables_root_inclusive,
            t_cpu: t(r.t_cpu),
            t_comm: t(r.t_comm),
            t_noncpu: t(r.t_noncpu),
            t_total: t(r.t_total),
        }
    }
}

pub fn render_table(doc: &SolveDocument) -> String {
    let mut s = String::new();
    writeln!(s, "vertices            {}", doc.n).unwrap();
    writeln!(s, "edges               {}", doc.m).unwrap();
    writeln!(s, "K(G)                {}", doc.k_graph).unwrap();
    writeln!(s, "omega               {}", doc.omega).unwrap();
    writeln!(s, "clique              {}", doc.best_clique.join(" ")).unwrap();
    writeln!(s, "device calls        {}", doc.device_calls).unwrap();
    writeln!(s, "solved on device    {}", doc.device_solved).unwrap();
    writeln!(s, "solved on CPU       {}", doc.cpu_solved).unwrap();
    writeln!(s, "trivial             {}", doc.trivial).unwrap();
    writeln!(s, "pruned              {}", doc.pruned).unwrap();
    writeln!(
        s,
        "device variables    {} ({} with roots)",
        doc.device_variables, doc.device_variables_root_inclusive
    )
    .unwrap();
    if !doc.levels.is_empty() {
        s.push_str(&level_table(doc.levels.iter().map(|l| {
            (l.level, l.generated as f64, l.num_subproblems as f64, l.max as f64, l.min as f64, l.avg)
        })));
    }
    if let (Some(cpu), Some(comm), Some(non), Some(total)) = (doc.t_cpu, doc.t_comm, doc.t_noncpu, doc.t_total) {
        writeln!(s, "t_cpu {cpu:.6} s  t_comm {comm:.6} s  t_noncpu {non:.6} s  t_total {total:.6} s").unwrap();
    }
    s
}

fn level_table(rows: impl Iterator<Item = (u32, f64, f64, f64, f64, f64)>) -> String {
    let mut s = format!("{:>5} {:>12} {:>12} {:>8} {:>8} {:>8}\n", "level", "generated", "subprobs", "max", "min", "avg");
    for (level, generated, count, max, min, avg) in rows {
        writeln!(s, "{level:>5} {generated:>12.1} {count:>12.1} {max:>8.1} {min:>8.1} {avg:>8.2}").unwrap();
    }
    s
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    writeln!(out, "{text}").map_err(io_err)
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = solve_config(a)?;
    let g = load(&a.input, 0)?;
    let report = solve_hybrid(&g, &cfg).map_err(|e| CliError::Solver(e.to_string()))?;
    let doc = SolveDocument::new(&g, &report, !a.search.omit_timings);
    match a.search.output {
        OutputMode::Table => write!(out, "{}", render_table(&doc)).map_err(io_err),
        OutputMode::Machine => emit(out, &doc),
    }
}

/// Means over samples.
#[derive(Debug, Serialize)]
pub struct StatsDocument {
    pub samples: u64,
    pub n: f64,
    pub m: f64,
    pub k_graph: f64,
    pub omega: f64,
    pub levels: Vec<MeanLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_total: Option<f64>,
}

#[derive(Debug, Default, Serialize)]
pub struct MeanLevel {
    pub level: u32,
    pub generated: f64,
    pub num_subproblems: f64,
    pub max: f64,
    pub min: f64,
    pub avg: f64,
}

fn cmd_stats(a: &StatsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = base_config(&a.search)?;
    if a.samples == 0 {
        return Err(CliError::Input("--samples must be at least 1".into()));
    }
    if a.samples > 1 && !matches!(a.input.gen, Some(GenSpec { seed: None, .. })) {
        return Err(CliError::Input("--samples above 1 needs --gen with a `_` seed".into()));
    }
    let k = a.samples as f64;
    let mut doc = StatsDocument { samples: a.samples, n: 0.0, m: 0.0, k_graph: 0.0, omega: 0.0, levels: Vec::new(), t_total: None };
    let mut t_total = 0.0;
    for sample in 0..a.samples {
        let g = load(&a.input, sample)?;
        let r = decomposition_statistics(&g, cfg.decomposition_level, &cfg).map_err(|e| CliError::Solver(e.to_string()))?;
        doc.n += g.n() as f64 / k;
        doc.m += g.m() as f64 / k;
        doc.k_graph += r.k_graph as f64 / k;
        doc.omega += r.omega as f64 / k;
        t_total += r.t_total;
        for l in &r.levels {
            let i = l.level as usize - 1;
            if doc.levels.len() <= i {
                doc.levels.resize_with(i + 1, MeanLevel::default);
            }
            let m = &mut doc.levels[i];
            m.level = l.level;
            m.generated += l.generated as f64 / k;
            m.num_subproblems += l.num_subproblems as f64 / k;
            m.max += l.max as f64 / k;
            m.min += l.min as f64 / k;
            m.avg += l.avg / k;
        }
    }
    if !a.search.omit_timings {
        doc.t_total = Some(t_total / k);
    }
    match a.search.output {
        OutputMode::Machine => emit(out, &doc),
        OutputMode::Table => {
            let mut s = String::new();
            writeln!(s, "samples {}  n {:.1}  m {:.1}  K(G) {:.2}  omega {:.2}", doc.samples, doc.n, doc.m, doc.k_graph, doc.omega).unwrap();
            s.push_str(&level_table(
                doc.levels.iter().map(|l| (l.level, l.generated, l.num_subproblems, l.max, l.min, l.avg)),
            ));
            if let Some(t) = doc.t_total {
                writeln!(s, "mean time {t:.6} s").unwrap();
            }
            write!(out, "{s}").map_err(io_err)
        }
    }
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = generate_er(a.gen.n, a.gen.p, a.gen.seed_for(0));
    match &a.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let mut w = io::BufWriter::new(file);
            write_snap(&g, &mut w).and_then(|_| w.flush()).map_err(io_err)
        }
        None => write_snap(&g, out).map_err(io_err),
    }
}

/// One row of a benchmark manifest.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifestRow {
    pub name: String,
    pub file: String,
    pub format: Format,
    pub n: usize,
    pub m: usize,
    pub k_graph: u32,
    pub omega: usize,
    pub subproblems: usize,
}

/// Tab-separated manifest with a header line; `#` lines are ignored.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRow>, CliError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| CliError::Input(format!("manifest line {}: {what}", i + 1));
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 8 {
            return Err(bad("expected 8 tab-separated fields"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad("invalid number"));
        rows.push(ManifestRow {
            name: f[0].to_string(),
            file: f[1].to_string(),
            format: f[2].parse().map_err(|_| bad("unknown format"))?,
            n: num(f[3])?,
            m: num(f[4])?,
            k_graph: num(f[5])? as u32,
            omega: num(f[6])?,
            subproblems: num(f[7])?,
        });
    }
    Ok(rows)
}

/// Result of one benchmark row; `None` fields mean the dataset was absent.
#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub status: &'static str,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub k_graph: Option<u32>,
    pub omega: Option<usize>,
    pub subproblems: Option<usize>,
    pub expected_k_graph: u32,
    pub expected_omega: usize,
    pub expected_subproblems: usize,
    pub seconds: Option<f64>,
}

pub fn data_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"))
}

/// Runs the configuration used for the dataset table: CPU only, no
/// heuristic, one level of decomposition.
pub fn bench_config(rule: PruneRule) -> HybridConfig {
    HybridConfig { initial_heuristic: false, prune_rule: rule, ..HybridConfig::default() }
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match &a.manifest {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        None => DATASET_MANIFEST.to_string(),
    };
    let dir = data_dir(a.data_dir.as_deref());
    let cfg = bench_config(a.prune_rule);
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for row in parse_manifest(&text)? {
        if !a.only.is_empty() && !a.only.contains(&row.name) {
            continue;
        }
        let mut result = BenchRow {
            name: row.name.clone(),
            status: "skipped",
            n: None,
            m: None,
            k_graph: None,
            omega: None,
            subproblems: None,
            expected_k_graph: row.k_graph,
            expected_omega: row.omega,
            expected_subproblems: row.subproblems,
            seconds: None,
        };
        let path = dir.join(&row.file);
        if !path.exists() {
            warn!("{}: {} not found, skipping", row.name, path.display());
            rows.push(result);
            continue;
        }
        let g = read_graph(&path, Some(row.format))?;
        let start = Instant::now();
        let r = solve_hybrid(&g, &cfg).map_err(|e| CliError::Solver(e.to_string()))?;
        result.seconds = Some(start.elapsed().as_secs_f64());
        result.n = Some(g.n());
        result.m = Some(g.m());
        result.k_graph = Some(r.k_graph);
        result.omega = Some(r.omega);
        result.subproblems = Some(r.subproblems_solved());
        let ok = r.k_graph == row.k_graph && r.omega == row.omega;
        result.status = if ok { "ok" } else { "MISMATCH" };
        mismatches += usize::from(!ok);
        rows.push(result);
    }
    match a.output {
        OutputMode::Machine => emit(out, &rows)?,
        OutputMode::Table => {
            let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
            let mut s = format!(
                "{:<16} {:>9} {:>10} {:>10} {:>10} {:>14} {:>10}  status\n",
                "graph", "n", "m", "K(G)", "omega", "subprobs", "seconds"
            );
            for r in &rows {
                writeln!(
                    s,
                    "{:<16} {:>9} {:>10} {:>10} {:>10} {:>14} {:>10}  {}",
                    r.name,
                    opt(r.n.map(|v| v.to_string())),
                    opt(r.m.map(|v| v.to_string())),
                    format!("{}/{}", opt(r.k_graph.map(|v| v.to_string())), r.expected_k_graph),
                    format!("{}/{}", opt(r.omega.map(|v| v.to_string())), r.expected_omega),
                    format!("{}/{}", opt(r.subproblems.map(|v| v.to_string())), r.expected_subproblems),
                    opt(r.seconds.map(|t| format!("{t:.3}"))),
                    r.status
                )
                .unwrap();
            }
            write!(out, "{s}").map_err(io_err)?;
        }
    }
    if mismatches > 0 {
        return Err(CliError::Mismatch(mismatches));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<(), CliError>, String) {
        let cli = Cli::try_parse_from(std::iter::once("hybrid-clique").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let res = run(&cli, &mut buf);
        (res, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn gen_spec_grammar() {
        assert_eq!("er:200:0.3:42".parse(), Ok(GenSpec { n: 200, p: 0.3, seed: Some(42) }));
        let s: GenSpec = "er:10:1:_".parse().unwrap();
        assert_eq!((s.seed_for(3), s.seed), (3, None));
        for bad in ["er:10:0.5", "ba:10:0.5:1", "er:x:0.5:1", "er:10:1.5:1", "er:10:0.5:-1"] {
            assert!(bad.parse::<GenSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn bundled_manifest_parses() {
        let rows = parse_manifest(DATASET_MANIFEST).unwrap();
        assert_eq!(rows.len(), 10);
        let amazon = rows.iter().find(|r| r.name == "com-Amazon").unwrap();
        assert_eq!((amazon.k_graph, amazon.omega, amazon.subproblems), (6, 7, 3));
        assert!(parse_manifest("h\nonly\ttwo\n").is_err());
    }

    #[test]
    fn solve_machine_output_is_reproducible() {
        let args = ["solve", "--gen", "er:60:0.4:3", "--device-size", "12", "--levels", "2", "--output", "machine", "--omit-timings"];
        let (r1, a) = run_args(&args);
        let (r2, b) = run_args(&args);
        assert!(r1.is_ok() && r2.is_ok());
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert!(v.get("t_total").is_none());
        assert!(v["omega"].as_u64().unwrap() >= 2);
    }

    #[test]
    fn stats_on_complete_graph() {
        let (r, text) = run_args(&["stats", "--gen", "er:5:1.0:1", "--output", "machine", "--omit-timings", "--no-heuristic"]);
        assert!(r.is_ok());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["k_graph"], 4.0);
        assert_eq!(v["levels"][0]["generated"], 2.0);
        assert_eq!(v["levels"][0]["max"], 4.0);
    }

    #[test]
    fn input_errors() {
        let (r, _) = run_args(&["solve", "--input", "/nonexistent/graph.txt"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_args(&["solve", "--gen", "er:10:0.5:1", "--levels", "0"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_args(&["solve", "--gen", "er:10:0.5:1", "--policy", "sometimes"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_args(&["stats", "--gen", "er:10:0.5:1", "--samples", "3"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        assert!(Cli::try_parse_from(["hybrid-clique", "solve"]).is_err());
        assert!(Cli::try_parse_from(["hybrid-clique", "solve", "--input", "a", "--gen", "er:1:0:1"]).is_err());
    }

    #[test]
    fn solver_error_exit_code() {
        let (r, _) = run_args(&["solve", "--gen", "er:40:0.6:1", "--device-size", "3", "--no-cpu-fallback", "--no-heuristic"]);
        assert_eq!(r.unwrap_err().exit_code(), 3);
    }

    #[test]
    fn bench_skips_missing_datasets() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let (r, text) = run_args(&["bench", "--data-dir", d, "--output", "machine"]);
        assert!(r.is_ok());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v.as_array().unwrap().iter().all(|row| row["status"] == "skipped"));
    }

    #[test]
    fn bench_flags_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("k4.txt"), "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
        let manifest = dir.path().join("m.tsv");
        std::fs::write(&manifest, "name\tfile\tformat\tn\tm\tk\tomega\tsubs\nk4\tk4.txt\tsnap\t4\t6\t3\t4\t1\nwrong\tk4.txt\tsnap\t4\t6\t3\t5\t1\n").unwrap();
        let d = dir.path().to_str().unwrap();
        let m = manifest.to_str().unwrap();
        let (r, text) = run_args(&["bench", "--manifest", m, "--data-dir", d, "--only", "k4"]);
        assert!(r.is_ok(), "{text}");
        let (r, text) = run_args(&["bench", "--manifest", m, "--data-dir", d]);
        assert!(matches!(r, Err(CliError::Mismatch(1))));
        assert!(text.contains("MISMATCH"));
    }
}
