//! Parallel benchmark execution over (policy, instance) cells plus CSV
//! report I/O.
//!
//! Each cell is one single-threaded branch-and-bound solve; cells fan out
//! over a worker pool and aggregate in input order, so node counts (and the
//! whole CSV apart from timing columns) are reproducible run to run. A cell
//! that panics or fails numerically is recorded with status `error` and never
//! disturbs its neighbors.

use crate::bnb::{run_bnb, BnbConfig};
use crate::metrics::{summarize, BenchCell, CellStatus, PolicySummary};
use crate::milp::MilpInstance;
use crate::policy::BranchingPolicy;
use rayon::prelude::*;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;
use thiserror::Error;

/// Limits applied to every cell of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub node_limit: u64,
    /// Seconds of wall clock per solve.
    pub time_limit: f64,
    /// Seed forwarded to stochastic policies.
    pub rng_seed: u64,
    /// Worker threads; 0 uses the process-default pool.
    pub workers: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { node_limit: 1_000_000, time_limit: 3600.0, rng_seed: 0, workers: 0 }
    }
}

/// A finished benchmark: raw cells in input order plus per-policy summaries
/// (always recomputable from the cells — see [`crate::metrics::summarize`]).
#[derive(Debug, Clone)]
pub struct RunReport {
    pub cells: Vec<BenchCell>,
    pub summaries: Vec<PolicySummary>,
}

/// Runs every policy on every instance. Cells are ordered instance-major
/// (all policies on instance 0, then instance 1, …) regardless of completion
/// order or worker count.
pub fn run_benchmark(
    policies: &[(String, BranchingPolicy)],
    instances: &[(String, MilpInstance)],
    config: &BenchConfig,
) -> RunReport {
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..policies.len()).map(move |p| (i, p)))
        .collect();
    let solve = |&(i, p): &(usize, usize)| -> BenchCell {
        let (instance_name, inst) = &instances[i];
        let (policy_name, policy) = &policies[p];
        run_cell(policy_name, policy, instance_name, inst, config)
    };
    let cells: Vec<BenchCell> = if config.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .expect("worker pool");
        pool.install(|| jobs.par_iter().map(solve).collect())
    } else {
        jobs.par_iter().map(solve).collect()
    };
    let summaries = summarize(&cells);
    RunReport { cells, summaries }
}

/// One isolated solve: panics and solver errors become `error` cells.
fn run_cell(
    policy_name: &str,
    policy: &BranchingPolicy,
    instance_name: &str,
    inst: &MilpInstance,
    config: &BenchConfig,
) -> BenchCell {
    let bnb = BnbConfig {
        node_limit: config.node_limit,
        time_limit: config.time_limit,
        rng_seed: config.rng_seed,
        ..BnbConfig::default()
    };
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| run_bnb(inst, policy, &bnb)));
    match outcome {
        Ok(Ok(stats)) => BenchCell {
            policy: policy_name.to_string(),
            instance: instance_name.to_string(),
            status: stats.status.into(),
            nodes: stats.nodes,
            time_s: stats.wall_time,
            gap: stats.gap,
        },
        Ok(Err(_)) | Err(_) => BenchCell {
            policy: policy_name.to_string(),
            instance: instance_name.to_string(),
            status: CellStatus::Error,
            nodes: 0,
            time_s: started.elapsed().as_secs_f64(),
            gap: f64::INFINITY,
        },
    }
}

/// Column schema of the benchmark cell CSV.
pub const BENCH_CSV_HEADER: [&str; 6] = ["policy", "instance", "status", "nodes", "time_s", "gap"];

#[derive(Debug, Error)]
pub enum ReportIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("record {record}: {message}")]
    Field { record: usize, message: String },
}

/// Writes cells as CSV. Floats use shortest-round-trip formatting, so a file
/// read back with [`read_cells_csv`] reproduces the cells bit-exactly and
/// aggregates recomputed from the file equal the in-memory ones.
pub fn write_cells_csv<W: std::io::Write>(out: W, cells: &[BenchCell]) -> Result<(), ReportIoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_CSV_HEADER)?;
    for c in cells {
        w.write_record([
            c.policy.as_str(),
            c.instance.as_str(),
            c.status.as_str(),
            &c.nodes.to_string(),
            &c.time_s.to_string(),
            &c.gap.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cells_csv_file(path: &Path, cells: &[BenchCell]) -> Result<(), ReportIoError> {
    write_cells_csv(std::fs::File::create(path)?, cells)
}

pub fn read_cells_csv<R: std::io::Read>(input: R) -> Result<Vec<BenchCell>, ReportIoError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let field = |record: usize, message: String| ReportIoError::Field { record, message };
    {
        let got = r.headers()?;
        if got != BENCH_CSV_HEADER.as_slice() {
            return Err(field(0, format!("unexpected header {got:?}")));
        }
    }
    let mut cells = Vec::new();
    for (idx, rec) in r.records().enumerate() {
        let rec = rec?;
        let n = idx + 1;
        if rec.len() != 6 {
            return Err(field(n, format!("expected 6 fields, found {}", rec.len())));
        }
        let status = CellStatus::parse(&rec[2])
            .ok_or_else(|| field(n, format!("unknown status {:?}", &rec[2])))?;
        let nodes: u64 =
            rec[3].parse().map_err(|e| field(n, format!("nodes: {e}")))?;
        let time_s: f64 =
            rec[4].parse().map_err(|e| field(n, format!("time_s: {e}")))?;
        let gap: f64 = rec[5].parse().map_err(|e| field(n, format!("gap: {e}")))?;
        cells.push(BenchCell {
            policy: rec[0].to_string(),
            instance: rec[1].to_string(),
            status,
            nodes,
            time_s,
            gap,
        });
    }
    Ok(cells)
}

pub fn read_cells_csv_file(path: &Path) -> Result<Vec<BenchCell>, ReportIoError> {
    read_cells_csv(std::fs::File::open(path)?)
}

/// Plain-text summary table (one row per policy), shown by the CLI after a
/// run and by the report command.
pub fn format_summary_table(summaries: &[PolicySummary]) -> String {
    let mut out = String::from(
        "policy                 solved  wins  geomean_nodes  geomean_time_s\n",
    );
    for s in summaries {
        out.push_str(&format!(
            "{:<22} {:>3}/{:<3} {:>5}  {:>13.2}  {:>14.4}\n",
            s.policy, s.solved, s.total, s.wins, s.geomean_nodes, s.geomean_time_s
        ));
    }
    out
}
