//! Benchmark several branching policies across a small instance suite and
//! print the per-policy summary table.
//!
//! ```text
//! cargo run --example benchmark_policies
//! ```

use branchlab::bench::{format_summary_table, run_benchmark, write_cells_csv_file, BenchConfig};
use branchlab::generators::gen_facility_location;
use branchlab::milp::MilpInstance;
use branchlab::policy::BranchingPolicy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut instances: Vec<(String, MilpInstance)> = Vec::new();
    for seed in 1..=4u64 {
        instances.push((format!("facilities_{seed:03}"), gen_facility_location(12, 18, seed)?));
    }

    let policies = vec![
        ("random".to_string(), BranchingPolicy::Random { seed: 0 }),
        ("most_fractional".to_string(), BranchingPolicy::MostFractional),
        ("reliability".to_string(), BranchingPolicy::reliability()),
    ];

    let config = BenchConfig { node_limit: 50_000, time_limit: 60.0, ..BenchConfig::default() };
    let report = run_benchmark(&policies, &instances, &config);

    // Raw cells are CSV-serializable for later re-aggregation with `report`.
    let csv_path = std::env::temp_dir().join("branchlab-report.csv");
    write_cells_csv_file(&csv_path, &report.cells)?;
    println!("cell-level CSV: {}\n", csv_path.display());

    // nodes/time are shifted geometric means over finished instances; wins
    // count (time, nodes)-lexicographic victories per instance.
    print!("{}", format_summary_table(&report.summaries));
    Ok(())
}
