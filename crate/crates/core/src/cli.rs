//! Command-line interface: `generate`, `solve`, `tune`, `evolve`, `bench`,
//! and `report` subcommands over the library.
//!
//! Exit codes: 0 on success, 1 for usage problems (bad flags, missing config
//! file), 2 for runtime failures (unreadable data, solver errors).

use crate::bench::{
    format_summary_table, read_cells_csv_file, run_benchmark, write_cells_csv_file, BenchConfig,
};
use crate::bnb::{run_bnb, BnbConfig};
use crate::dsl::ScoreProgram;
use crate::evolve::{evolve_loop, EvolutionConfig, HistoryLog, IslandDatabase, LlmVariant};
use crate::features::feature_docs_table;
use crate::generators::{preset, FamilySpec, PRESET_NAMES};
use crate::io::{checksum_hex, read_instance, write_instance, Manifest, ManifestEntry};
use crate::metrics::summarize;
use crate::milp::MilpInstance;
use crate::policy::BranchingPolicy;
use crate::tune::{
    optimize_params, write_trial_log_csv, CostMeasure, CostMetric, OptBudget, SolveLimits,
};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "branchlab",
    version,
    about = "Desk-scale MILP branch-and-bound lab: generate instances, solve, tune score programs, evolve policies, and benchmark"
)]
struct Cli {
    /// Base RNG seed for the subcommand.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML key/value config file; CLI flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for benchmark fan-out (0 = rayon default).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Suppress informational output (results still print).
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a batch of instances plus a manifest.
    Generate(GenerateArgs),
    /// Solve one instance with one branching policy.
    Solve(SolveArgs),
    /// Tune a score program's parameters on an instance subset.
    Tune(TuneArgs),
    /// Run the LLM-driven policy-discovery loop from a config file.
    Evolve(EvolveArgs),
    /// Benchmark policies across instances into a report CSV.
    Bench(BenchArgs),
    /// Summarize run artifacts (bench CSV, database, trial log, history).
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Named size preset (see `--list-presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Family name (setcover, cauctions, facilities, indset) with explicit
    /// size flags.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    items: Option<usize>,
    #[arg(long)]
    bids: Option<usize>,
    #[arg(long)]
    facilities: Option<usize>,
    #[arg(long)]
    customers: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    affinity: Option<usize>,
    /// Number of instances (seeds base_seed..base_seed+count).
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output directory (created if missing).
    #[arg(long, required_unless_present = "list_presets")]
    out: Option<PathBuf>,
    /// Print available presets and exit.
    #[arg(long)]
    list_presets: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Instance file (.mip).
    #[arg(long)]
    instance: PathBuf,
    /// Policy: random, most_fractional, pseudocost, strong_branching,
    /// reliability, or program:<file.spl>.
    #[arg(long, default_value = "most_fractional")]
    policy: String,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args, Debug)]
struct TuneArgs {
    /// Score program to tune (.spl).
    #[arg(long)]
    program: PathBuf,
    /// Instance file or directory of .mip files (the tuning subset).
    #[arg(long)]
    instances: PathBuf,
    /// Cost metric: nodes (default), gap, or time.
    #[arg(long)]
    metric: Option<String>,
    /// Per-solve time limit for the gap metric (seconds).
    #[arg(long)]
    gap_time_limit: Option<f64>,
    /// Trial budget (cost evaluations, θ⁰ included).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    time_limit: Option<f64>,
    /// Write the per-trial log CSV here.
    #[arg(long)]
    trial_log: Option<PathBuf>,
    /// Write the tuned program (params set to θ*) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvolveArgs {}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Instance file or directory of .mip files.
    #[arg(long)]
    instances: PathBuf,
    /// Comma-separated policies (same names as `solve --policy`).
    #[arg(long)]
    policies: String,
    /// Report CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Bench report CSV → per-policy summary table.
    #[arg(long)]
    bench: Option<PathBuf>,
    /// Evolution database JSONL → record table and best program.
    #[arg(long)]
    db: Option<PathBuf>,
    /// Evolution history CSV → convergence curve summary.
    #[arg(long)]
    history: Option<PathBuf>,
    /// Tuner trial-log CSV → best trial summary.
    #[arg(long)]
    trial_log: Option<PathBuf>,
    /// Print the 91-feature documentation table.
    #[arg(long)]
    features: bool,
}

/// Command failure, split by exit code.
enum CmdError {
    Usage(String),
    Runtime(String),
}

use CmdError::{Runtime, Usage};

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        Runtime(e.to_string())
    }
}

/// Optional values sourced from the global `--config` TOML file. Every key
/// is optional here; subcommands validate what they actually need.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    workers: Option<usize>,
    node_limit: Option<u64>,
    time_limit: Option<f64>,
    metric: Option<String>,
    gap_time_limit: Option<f64>,
    tune_iterations: Option<u64>,
    // Evolution-only keys.
    instances_dir: Option<PathBuf>,
    subset: Option<Vec<usize>>,
    db: Option<PathBuf>,
    events: Option<PathBuf>,
    history: Option<PathBuf>,
    iterations: Option<u64>,
    island_count: Option<u32>,
    inspirations_k: Option<usize>,
    exploration_prob: Option<f64>,
    exploitation_prob: Option<f64>,
    llm_mode: Option<String>,
    llm_fixture: Option<PathBuf>,
    llm_endpoint: Option<String>,
    llm_model: Option<String>,
    llm_api_key_env: Option<String>,
    llm_temperature: Option<f64>,
    llm_top_p: Option<f64>,
    llm_max_tokens: Option<u64>,
    llm_timeout_s: Option<f64>,
    llm_retries: Option<u32>,
}

/// Loaded config plus the directory its relative paths resolve against.
struct LoadedConfig {
    values: ConfigFile,
    base_dir: PathBuf,
}

impl LoadedConfig {
    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

/// Runs the CLI against stdout. Returns the process exit code.
pub fn run<I>(argv: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let mut stdout = std::io::stdout();
    run_with(argv, &mut stdout)
}

/// Like [`run`] but writing to an arbitrary sink — the testable entry point.
pub fn run_with<I, W>(argv: I, out: &mut W) -> i32
where
    I: IntoIterator<Item = String>,
    W: std::io::Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return 1;
        }
        Err(e) => {
            // --help / --version land here.
            let _ = write!(out, "{e}");
            return 0;
        }
    };

    let config = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(message) => {
            eprintln!("error: {message}");
            return 1;
        }
    };

    let mut text = String::new();
    let result = dispatch(&cli, &config, &mut text);
    let _ = out.write_all(text.as_bytes());
    match result {
        Ok(()) => 0,
        Err(Usage(message)) => {
            eprintln!("error: {message}");
            1
        }
        Err(Runtime(message)) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<LoadedConfig, String> {
    let Some(path) = path else {
        return Ok(LoadedConfig { values: ConfigFile::default(), base_dir: PathBuf::from(".") });
    };
    let text = fs::read_to_string(path)
        .map_err(|e| format!("config file {}: {e}", path.display()))?;
    let values: ConfigFile =
        toml::from_str(&text).map_err(|e| format!("config file {}: {e}", path.display()))?;
    let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    Ok(LoadedConfig { values, base_dir })
}

fn dispatch(cli: &Cli, config: &LoadedConfig, out: &mut String) -> Result<(), CmdError> {
    let seed = cli.seed.or(config.values.seed).unwrap_or(0);
    match &cli.command {
        Command::Generate(args) => cmd_generate(args, seed, cli.quiet, out),
        Command::Solve(args) => cmd_solve(args, config, seed, out),
        Command::Tune(args) => cmd_tune(args, config, seed, cli.quiet, out),
        Command::Evolve(args) => cmd_evolve(args, cli, config, out),
        Command::Bench(args) => cmd_bench(args, cli, config, seed, out),
        Command::Report(args) => cmd_report(args, out),
    }
}

fn cmd_generate(
    args: &GenerateArgs,
    seed: u64,
    quiet: bool,
    out: &mut String,
) -> Result<(), CmdError> {
    if args.list_presets {
        for name in PRESET_NAMES {
            writeln!(out, "{name}").unwrap();
        }
        return Ok(());
    }
    let spec = generator_spec(args)?;
    let out_dir = args.out.as_ref().expect("clap requires --out");
    fs::create_dir_all(out_dir)?;
    let family = spec.family_name();
    let mut files = Vec::with_capacity(args.count);
    for i in 0..args.count {
        let instance_seed = seed + i as u64;
        let instance = spec
            .generate(instance_seed)
            .map_err(|e| Runtime(format!("generator: {e}")))?;
        let file = format!("{family}_{i:03}.mip");
        let path = out_dir.join(&file);
        write_instance(&path, &instance)?;
        let checksum = checksum_hex(&fs::read(&path)?);
        files.push(ManifestEntry { file, seed: instance_seed, checksum });
    }
    let manifest = Manifest {
        family: family.to_string(),
        spec,
        base_seed: seed,
        count: args.count,
        files,
    };
    crate::io::write_manifest(&out_dir.join("manifest.json"), &manifest)?;
    if !quiet {
        writeln!(
            out,
            "wrote {} {family} instance(s) and manifest.json to {}",
            args.count,
            out_dir.display()
        )
        .unwrap();
    }
    Ok(())
}

fn generator_spec(args: &GenerateArgs) -> Result<FamilySpec, CmdError> {
    match (&args.preset, &args.family) {
        (Some(_), Some(_)) => Err(Usage("--preset and --family are mutually exclusive".into())),
        (Some(name), None) => preset(name)
            .ok_or_else(|| Usage(format!("unknown preset `{name}` (try --list-presets)"))),
        (None, Some(family)) => {
            let need = |opt: Option<usize>, flag: &str| {
                opt.ok_or_else(|| Usage(format!("--family {family} requires --{flag}")))
            };
            Ok(match family.as_str() {
                "setcover" => FamilySpec::SetCover {
                    rows: need(args.rows, "rows")?,
                    cols: need(args.cols, "cols")?,
                    density: args
                        .density
                        .ok_or_else(|| Usage("--family setcover requires --density".into()))?,
                },
                "cauctions" => FamilySpec::CombAuction {
                    items: need(args.items, "items")?,
                    bids: need(args.bids, "bids")?,
                },
                "facilities" => FamilySpec::FacilityLocation {
                    facilities: need(args.facilities, "facilities")?,
                    customers: need(args.customers, "customers")?,
                },
                "indset" => FamilySpec::IndependentSet {
                    nodes: need(args.nodes, "nodes")?,
                    affinity: need(args.affinity, "affinity")?,
                },
                other => {
                    return Err(Usage(format!(
                        "unknown family `{other}` (setcover, cauctions, facilities, indset)"
                    )))
                }
            })
        }
        (None, None) => Err(Usage("generate needs --preset or --family".into())),
    }
}

fn cmd_solve(
    args: &SolveArgs,
    config: &LoadedConfig,
    seed: u64,
    out: &mut String,
) -> Result<(), CmdError> {
    let instance = read_instance(&args.instance)
        .map_err(|e| Runtime(format!("{}: {e}", args.instance.display())))?;
    let policy = parse_policy(&args.policy, seed)?;
    let bnb = BnbConfig {
        node_limit: args.node_limit.or(config.values.node_limit).unwrap_or(1_000_000),
        time_limit: args.time_limit.or(config.values.time_limit).unwrap_or(3600.0),
        rng_seed: seed,
        ..BnbConfig::default()
    };
    let stats = run_bnb(&instance, &policy, &bnb).map_err(|e| Runtime(format!("solve: {e}")))?;
    writeln!(out, "status     {}", stats.status.as_str()).unwrap();
    writeln!(out, "nodes      {}", stats.nodes).unwrap();
    match stats.incumbent_objective {
        Some(obj) => writeln!(out, "objective  {obj}").unwrap(),
        None => writeln!(out, "objective  none").unwrap(),
    }
    writeln!(out, "bound      {}", stats.best_bound).unwrap();
    writeln!(out, "gap        {}", stats.gap).unwrap();
    writeln!(out, "time_s     {:.3}", stats.wall_time).unwrap();
    Ok(())
}

fn cmd_tune(
    args: &TuneArgs,
    config: &LoadedConfig,
    seed: u64,
    quiet: bool,
    out: &mut String,
) -> Result<(), CmdError> {
    let program = load_program(&args.program)?;
    let instances = load_instances(&args.instances)?;
    let metric = parse_metric(
        args.metric.as_deref().or(config.values.metric.as_deref()),
        args.gap_time_limit.or(config.values.gap_time_limit),
    )?;
    let budget = OptBudget {
        max_iterations: args.budget.or(config.values.tune_iterations).unwrap_or(50),
        limits: SolveLimits {
            node_limit: args.node_limit.or(config.values.node_limit).unwrap_or(1_000_000),
            time_limit: args.time_limit.or(config.values.time_limit).unwrap_or(3600.0),
        },
        rng_seed: seed,
    };
    let suite: Vec<MilpInstance> = instances.into_iter().map(|(_, inst)| inst).collect();
    let result = optimize_params(
        &program,
        &program.initial_params,
        &program.bounds,
        &suite,
        metric,
        &budget,
    );
    if let Some(path) = &args.trial_log {
        let file = fs::File::create(path)?;
        write_trial_log_csv(file, &result.trials)
            .map_err(|e| Runtime(format!("trial log: {e}")))?;
        if !quiet {
            writeln!(out, "trial log: {}", path.display()).unwrap();
        }
    }
    if result.failed {
        return Err(Runtime("every trial failed to evaluate".into()));
    }
    writeln!(out, "trials     {}", result.trials.len()).unwrap();
    writeln!(
        out,
        "theta*     [{}]",
        result.theta.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
    )
    .unwrap();
    writeln!(out, "cost       {}", result.cost).unwrap();
    if let Some(path) = &args.out {
        let mut tuned = program;
        tuned.initial_params = result.theta.clone();
        fs::write(path, tuned.canonical_text())?;
        if !quiet {
            writeln!(out, "tuned program: {}", path.display()).unwrap();
        }
    }
    Ok(())
}

fn cmd_evolve(
    _args: &EvolveArgs,
    cli: &Cli,
    config: &LoadedConfig,
    out: &mut String,
) -> Result<(), CmdError> {
    if cli.config.is_none() {
        return Err(Usage("evolve requires --config <file.toml>".into()));
    }
    let v = &config.values;
    let require_path = |opt: &Option<PathBuf>, key: &str| -> Result<PathBuf, CmdError> {
        opt.as_ref()
            .map(|p| config.resolve(p))
            .ok_or_else(|| Usage(format!("config is missing `{key}`")))
    };
    let instances_dir = require_path(&v.instances_dir, "instances_dir")?;
    let instances = load_instances(&instances_dir)?;
    let subset_indices = v
        .subset
        .clone()
        .ok_or_else(|| Usage("config is missing `subset` (instance indices)".into()))?;

    let mut evolution = EvolutionConfig::new(
        require_path(&v.db, "db")?,
        require_path(&v.events, "events")?,
        require_path(&v.history, "history")?,
    );
    evolution.seed = cli.seed.or(v.seed).unwrap_or(0);
    if let Some(t) = v.iterations {
        evolution.iterations = t;
    }
    if let Some(c) = v.island_count {
        evolution.island_count = c;
    }
    if let Some(k) = v.inspirations_k {
        evolution.inspirations_k = k;
    }
    if let Some(p) = v.exploration_prob {
        evolution.exploration_prob = p;
    }
    if let Some(p) = v.exploitation_prob {
        evolution.exploitation_prob = p;
    }
    evolution.metric = parse_metric(v.metric.as_deref(), v.gap_time_limit)?;
    evolution.tune_budget = OptBudget {
        max_iterations: v.tune_iterations.unwrap_or(50),
        limits: SolveLimits {
            node_limit: v.node_limit.unwrap_or(1_000_000),
            time_limit: v.time_limit.unwrap_or(3600.0),
        },
        rng_seed: 0, // overridden per iteration by the loop
    };
    match v.llm_mode.as_deref().unwrap_or("live") {
        "scripted" => {
            let fixture = v
                .llm_fixture
                .as_ref()
                .map(|p| config.resolve(p))
                .ok_or_else(|| Usage("llm_mode = \"scripted\" needs `llm_fixture`".into()))?;
            evolution.llm.variant = LlmVariant::Scripted(fixture);
        }
        "live" => {
            evolution.llm.variant = LlmVariant::Live;
            evolution.llm.endpoint = v
                .llm_endpoint
                .clone()
                .ok_or_else(|| Usage("llm_mode = \"live\" needs `llm_endpoint`".into()))?;
            evolution.llm.model = v
                .llm_model
                .clone()
                .ok_or_else(|| Usage("llm_mode = \"live\" needs `llm_model`".into()))?;
        }
        other => return Err(Usage(format!("unknown llm_mode `{other}`"))),
    }
    if let Some(name) = &v.llm_api_key_env {
        evolution.llm.api_key_env = name.clone();
    }
    if let Some(t) = v.llm_temperature {
        evolution.llm.temperature = t;
    }
    if let Some(t) = v.llm_top_p {
        evolution.llm.top_p = t;
    }
    if let Some(t) = v.llm_max_tokens {
        evolution.llm.max_tokens = t;
    }
    if let Some(t) = v.llm_timeout_s {
        evolution.llm.timeout_s = t;
    }
    if let Some(t) = v.llm_retries {
        evolution.llm.retries = t;
    }

    let suite: Vec<MilpInstance> = instances.into_iter().map(|(_, inst)| inst).collect();
    let best = evolve_loop(&evolution, &suite, &subset_indices)
        .map_err(|e| Runtime(e.to_string()))?;
    writeln!(out, "best record id={} iteration={} cost={}", best.id, best.iteration, best.cost)
        .unwrap();
    writeln!(out, "{}", best.program.canonical_text().trim_end()).unwrap();
    Ok(())
}

fn cmd_bench(
    args: &BenchArgs,
    cli: &Cli,
    config: &LoadedConfig,
    seed: u64,
    out: &mut String,
) -> Result<(), CmdError> {
    let instances = load_instances(&args.instances)?;
    let mut policies = Vec::new();
    for name in args.policies.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        policies.push((name.to_string(), parse_policy(name, seed)?));
    }
    if policies.is_empty() {
        return Err(Usage("--policies needs at least one policy".into()));
    }
    let bench = BenchConfig {
        node_limit: args.node_limit.or(config.values.node_limit).unwrap_or(1_000_000),
        time_limit: args.time_limit.or(config.values.time_limit).unwrap_or(3600.0),
        rng_seed: seed,
        workers: cli.workers.or(config.values.workers).unwrap_or(0),
    };
    let report = run_benchmark(&policies, &instances, &bench);
    if let Some(path) = &args.out {
        write_cells_csv_file(path, &report.cells)
            .map_err(|e| Runtime(format!("report csv: {e}")))?;
    }
    write!(out, "{}", format_summary_table(&report.summaries)).unwrap();
    Ok(())
}

fn cmd_report(args: &ReportArgs, out: &mut String) -> Result<(), CmdError> {
    let mut did_something = false;
    if let Some(path) = &args.bench {
        let cells =
            read_cells_csv_file(path).map_err(|e| Runtime(format!("{}: {e}", path.display())))?;
        write!(out, "{}", format_summary_table(&summarize(&cells))).unwrap();
        did_something = true;
    }
    if let Some(path) = &args.db {
        let db = IslandDatabase::open(path, 4).map_err(|e| Runtime(e.to_string()))?;
        writeln!(out, "{:<4} {:>9} {:>6} {:>12} {:>12}  parent", "id", "iteration", "island", "cost", "subset_cost")
            .unwrap();
        for r in db.records() {
            let parent = r.parent.map_or("-".to_string(), |p| p.to_string());
            writeln!(
                out,
                "{:<4} {:>9} {:>6} {:>12.6} {:>12.6}  {parent}",
                r.id, r.iteration, r.island, r.cost, r.subset_cost
            )
            .unwrap();
        }
        if let Some(best) = db.best() {
            writeln!(out, "\nbest record id={} cost={}", best.id, best.cost).unwrap();
            writeln!(out, "{}", best.program.canonical_text().trim_end()).unwrap();
        }
        did_something = true;
    }
    if let Some(path) = &args.history {
        let history =
            HistoryLog::open(path).map_err(|e| Runtime(format!("{}: {e}", path.display())))?;
        let rows = history.rows();
        writeln!(out, "iterations {}", rows.len()).unwrap();
        if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
            writeln!(out, "best cost  {} -> {}", first.best_cost, last.best_cost).unwrap();
        }
        let stored: u64 = rows.iter().map(|r| r.event_counts[4]).sum();
        writeln!(out, "evaluated  {stored}").unwrap();
        did_something = true;
    }
    if let Some(path) = &args.trial_log {
        let text = fs::read_to_string(path)?;
        let mut best: Option<(u64, f64)> = None;
        let mut trials = 0u64;
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let mut fields = line.split(',');
            let trial: u64 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| Runtime(format!("bad trial row: {line}")))?;
            trials += 1;
            // cost is the column right after the theta block; count from the
            // header instead of guessing.
            let header = text.lines().next().unwrap_or("");
            let cost_idx = header
                .split(',')
                .position(|h| h == "cost")
                .ok_or_else(|| Runtime("trial log has no cost column".into()))?;
            let cost: f64 = line
                .split(',')
                .nth(cost_idx)
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| Runtime(format!("bad trial row: {line}")))?;
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((trial, cost));
            }
        }
        writeln!(out, "trials     {trials}").unwrap();
        if let Some((trial, cost)) = best {
            writeln!(out, "best trial {trial} cost {cost}").unwrap();
        }
        did_something = true;
    }
    if args.features {
        write!(out, "{}", feature_docs_table()).unwrap();
        did_something = true;
    }
    if !did_something {
        return Err(Usage(
            "report needs at least one of --bench, --db, --history, --trial-log, --features"
                .into(),
        ));
    }
    Ok(())
}

/// Policy names shared by `solve` and `bench`.
fn parse_policy(name: &str, seed: u64) -> Result<BranchingPolicy, CmdError> {
    Ok(match name {
        "random" => BranchingPolicy::Random { seed },
        "most_fractional" => BranchingPolicy::MostFractional,
        "pseudocost" => BranchingPolicy::PseudocostProduct,
        "strong_branching" | "full_strong_branching" => BranchingPolicy::strong_branching(),
        "reliability" => BranchingPolicy::reliability(),
        p if p.starts_with("program:") => {
            let path = PathBuf::from(&p["program:".len()..]);
            BranchingPolicy::program(load_program(&path)?)
        }
        other => {
            return Err(Usage(format!(
                "unknown policy `{other}` (random, most_fractional, pseudocost, \
                 strong_branching, reliability, program:<file.spl>)"
            )))
        }
    })
}

fn load_program(path: &Path) -> Result<ScoreProgram, CmdError> {
    let text =
        fs::read_to_string(path).map_err(|e| Runtime(format!("{}: {e}", path.display())))?;
    let (program, warnings) = ScoreProgram::parse(&text)
        .map_err(|e| Runtime(format!("{}: {e}", path.display())))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(program)
}

/// A single .mip file, or every .mip file in a directory sorted by name.
fn load_instances(path: &Path) -> Result<Vec<(String, MilpInstance)>, CmdError> {
    let stem = |p: &Path| {
        p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
    };
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "mip"))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Runtime(format!("no .mip files in {}", path.display())));
        }
        files
            .into_iter()
            .map(|p| {
                let instance = read_instance(&p)
                    .map_err(|e| Runtime(format!("{}: {e}", p.display())))?;
                Ok((stem(&p), instance))
            })
            .collect()
    } else {
        let instance =
            read_instance(path).map_err(|e| Runtime(format!("{}: {e}", path.display())))?;
        Ok(vec![(stem(path), instance)])
    }
}

fn parse_metric(name: Option<&str>, gap_time_limit: Option<f64>) -> Result<CostMetric, CmdError> {
    let measure = match name.unwrap_or("nodes") {
        "nodes" => CostMeasure::GeomeanNodes,
        "time" => CostMeasure::GeomeanTime,
        "gap" => CostMeasure::GeomeanGap {
            time_limit: gap_time_limit
                .ok_or_else(|| Usage("metric `gap` needs --gap-time-limit".into()))?,
        },
        other => return Err(Usage(format!("unknown metric `{other}` (nodes, gap, time)"))),
    };
    Ok(CostMetric { measure, shift: 1.0 })
}
