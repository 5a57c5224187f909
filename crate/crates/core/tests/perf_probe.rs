//! Manual probe: `cargo test --test perf_probe -- --ignored --nocapture`
//! Measures desk-scale setcover solves under the same build profile the
//! acceptance suite uses.

use branchlab::bnb::{run_bnb, BnbConfig};
use branchlab::generators::gen_set_cover;
use branchlab::policy::BranchingPolicy;
use branchlab::simplex::solve_lp_relaxation;
use std::time::Instant;

#[test]
#[ignore]
fn probe_suite_geomeans() {
    let policies = [
        ("random", BranchingPolicy::Random { seed: 0 }),
        ("most_fractional", BranchingPolicy::MostFractional),
        ("strong_branching", BranchingPolicy::strong_branching()),
    ];
    let mut log_sums = [0.0f64; 3];
    let suite_t0 = Instant::now();
    for seed in 1..=20u64 {
        let inst = gen_set_cover(150, 300, 0.05, seed).unwrap();
        let mut line = format!("seed {seed:2}:");
        for (k, (name, policy)) in policies.iter().enumerate() {
            let config = BnbConfig {
                node_limit: 50_000,
                time_limit: 300.0,
                ..BnbConfig::default()
            };
            let t0 = Instant::now();
            let stats = run_bnb(&inst, policy, &config).unwrap();
            assert!(
                matches!(stats.status, branchlab::bnb::BnbStatus::Optimal),
                "{name} seed {seed}: {:?}",
                stats.status
            );
            log_sums[k] += (stats.nodes as f64).ln();
            line.push_str(&format!(
                "  {name} {:4} nodes {:6.2}s",
                stats.nodes,
                t0.elapsed().as_secs_f64()
            ));
        }
        println!("{line}");
    }
    println!("suite wall time: {:.1}s", suite_t0.elapsed().as_secs_f64());
    for (k, (name, _)) in policies.iter().enumerate() {
        println!("geomean {name}: {:.2}", (log_sums[k] / 20.0).exp());
    }
}

#[test]
#[ignore]
fn probe_desk_setcover() {
    let inst = gen_set_cover(150, 300, 0.05, 1).unwrap();
    println!("instance: {} rows x {} vars, {} nnz", inst.n_rows(), inst.n_vars(), inst.rows.nnz());

    let t0 = Instant::now();
    let lp = solve_lp_relaxation(&inst, &inst.lower, &inst.upper).unwrap();
    println!(
        "root LP: {:?} obj {:.4} in {} iters, {:.3}s",
        lp.status,
        lp.objective,
        lp.iterations,
        t0.elapsed().as_secs_f64()
    );

    for (name, policy) in [
        ("random", BranchingPolicy::Random { seed: 0 }),
        ("most_fractional", BranchingPolicy::MostFractional),
        ("strong_branching", BranchingPolicy::strong_branching()),
    ] {
        let config = BnbConfig {
            node_limit: 20_000,
            time_limit: 120.0,
            ..BnbConfig::default()
        };
        let t0 = Instant::now();
        let stats = run_bnb(&inst, &policy, &config).unwrap();
        println!(
            "{name}: status {:?} nodes {} incumbent {:?} bound {:.4} gap {:.4} in {:.2}s",
            stats.status,
            stats.nodes,
            stats.incumbent_objective,
            stats.best_bound,
            stats.gap,
            t0.elapsed().as_secs_f64()
        );
    }
}
