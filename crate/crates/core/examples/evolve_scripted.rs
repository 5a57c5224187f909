//! The full evolution loop driven by scripted LLM responses: database,
//! event log, history CSV, crash-safe resume — no network involved.
//!
//! ```text
//! cargo run --example evolve_scripted
//! ```

use branchlab::evolve::{EvolutionConfig, HistoryLog, IslandDatabase, LlmVariant};
use branchlab::generators::gen_facility_location;
use branchlab::milp::MilpInstance;
use branchlab::tune::{OptBudget, SolveLimits};
use std::fs;

// What a model reply looks like: prose plus a fenced program. The loop takes
// the last complete ```-block and parses it as spl/1.
const RESPONSES: [&str; 3] = [
    "Tilting fractionality by the objective coefficient:\n\
     ```spl\nspl/1\nused_features: [0, 9]\nparams: [0.5]\nbounds: [[0, 1]]\nscore:\n\
     return feature(9) + param(0) * feature(0)\n```",
    "This one is malformed on purpose — the loop must log a reject and move on.",
    "Pure pseudocost-style signal:\n\
     ```spl\nspl/1\nused_features: [43]\nparams: [1]\nbounds: [[0, 2]]\nscore:\n\
     return param(0) * feature(43)\n```",
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let fixture = dir.path().join("responses.txt");
    fs::write(&fixture, RESPONSES.join("\n---RESPONSE---\n"))?;

    // Tiny suite: the single-constraint knapsack keeps the 125% fast filter
    // cheap (subset index 0); the facility-location instances actually
    // separate programs on node count.
    let knapsack = MilpInstance::from_dense(
        vec![-9.0, -7.0, -5.0, -4.0, -3.0],
        &[vec![5.0, 4.0, 3.0, 2.0, 1.0]],
        vec![8.0],
        vec![0.0; 5],
        vec![1.0; 5],
        vec![true; 5],
    )?;
    let suite = vec![
        knapsack,
        gen_facility_location(12, 18, 3)?,
        gen_facility_location(12, 18, 4)?,
    ];

    let mut config = EvolutionConfig::new(
        dir.path().join("db.jsonl"),
        dir.path().join("events.jsonl"),
        dir.path().join("history.csv"),
    );
    config.iterations = 3;
    config.seed = 7;
    config.tune_budget = OptBudget {
        max_iterations: 4,
        limits: SolveLimits { node_limit: 10_000, time_limit: 30.0 },
        rng_seed: 0,
    };
    config.llm.variant = LlmVariant::Scripted(fixture);

    let best = branchlab::evolve::evolve_loop(&config, &suite, &[0])?;
    println!("best record: id={} iteration={} cost={:.3}", best.id, best.iteration, best.cost);
    println!("{}", best.program.canonical_text());

    let db = IslandDatabase::open(&config.db_path, config.island_count)?;
    let islands: Vec<u32> = db.occupied_islands().collect();
    println!("database: {} records across islands {islands:?}", db.len());
    for r in db.records() {
        println!(
            "  id={} iteration={} island={} cost={:.3} features={:?}",
            r.id, r.iteration, r.island, r.cost, r.program.used_features
        );
    }

    let history = HistoryLog::open(&config.history_path)?;
    println!("\niteration  best_cost  events (generated/parse_reject/filter_reject/tuned/evaluated/llm_error)");
    for row in history.rows() {
        println!(
            "{:>9}  {:>9.3}  {:?}",
            row.iteration, row.best_cost, row.event_counts
        );
    }

    // Artifacts are append-only and per-iteration seeded: re-running the
    // finished loop changes nothing, and a killed run resumes exactly.
    let db_bytes = fs::read(&config.db_path)?;
    branchlab::evolve::evolve_loop(&config, &suite, &[0])?;
    assert_eq!(db_bytes, fs::read(&config.db_path)?);
    println!("\nre-running the finished loop left the database byte-identical");
    Ok(())
}
