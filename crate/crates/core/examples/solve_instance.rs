//! Generate one facility-location instance and solve it with three
//! branching policies.
//!
//! ```text
//! cargo run --example solve_instance
//! ```

use branchlab::bnb::{run_bnb, BnbConfig};
use branchlab::generators::gen_facility_location;
use branchlab::policy::BranchingPolicy;

fn main() {
    // 12 candidate sites, 18 customers — around a hundred nodes.
    let instance = gen_facility_location(12, 18, 3).expect("valid generator sizes");
    println!(
        "facility location: {} variables, {} rows",
        instance.n_vars(),
        instance.n_rows()
    );

    let config = BnbConfig { node_limit: 100_000, time_limit: 60.0, ..BnbConfig::default() };
    for policy in [
        BranchingPolicy::Random { seed: 0 },
        BranchingPolicy::MostFractional,
        BranchingPolicy::reliability(),
    ] {
        let stats = run_bnb(&instance, &policy, &config).expect("solve succeeds");
        println!(
            "{:<16} status={:<10} nodes={:<6} objective={:<8} gap={}",
            policy.name(),
            stats.status.as_str(),
            stats.nodes,
            stats
                .incumbent_objective
                .map_or_else(|| "none".to_string(), |v| format!("{v}")),
            stats.gap
        );
    }
}
