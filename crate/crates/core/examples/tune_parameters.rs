//! The derivative-free tuner on an analytic bowl, then on a real score
//! program over two tiny instances.
//!
//! ```text
//! cargo run --example tune_parameters
//! ```

use branchlab::dsl::ScoreProgram;
use branchlab::generators::gen_set_cover;
use branchlab::tune::{minimize, optimize_params, OptBudget, SolveLimits};

fn main() {
    // 2-D quadratic with the optimum inside the box: the tuner should land
    // near (0.3, -0.2) within 50 evaluations.
    let budget = OptBudget { max_iterations: 50, ..OptBudget::default() };
    let result = minimize(
        |t| (t[0] - 0.3).powi(2) + (t[1] + 0.2).powi(2),
        &[0.9, 0.9],
        &[(-1.0, 1.0), (-1.0, 1.0)],
        &budget,
    );
    println!(
        "analytic bowl: {} trials, theta* = [{:.4}, {:.4}], cost {:.6}",
        result.trials.len(),
        result.theta[0],
        result.theta[1],
        result.cost
    );

    // Incumbent cost is monotone over trials — print the improvement path.
    let mut best = f64::INFINITY;
    for (i, trial) in result.trials.iter().enumerate() {
        if trial.cost < best {
            best = trial.cost;
            println!("  trial {:>2}: cost {:.6}", i + 1, best);
        }
    }

    // Same machinery on a real program: cost is the shifted geometric mean
    // of branch-and-bound node counts across the suite.
    let program_text = "\
spl/1
used_features: [9, 23]
params: [0.5]
bounds: [[0, 1]]
score:
let frac = 4 * feature(9) * (1 - feature(9))
return param(0) * frac + (1 - param(0)) * feature(23)
";
    let (program, _) = ScoreProgram::parse(program_text).expect("program parses");
    let suite = vec![
        gen_set_cover(10, 20, 0.25, 3).expect("valid sizes"),
        gen_set_cover(10, 20, 0.25, 4).expect("valid sizes"),
    ];
    let budget = OptBudget {
        max_iterations: 12,
        limits: SolveLimits { node_limit: 10_000, time_limit: 30.0 },
        rng_seed: 0,
    };
    let tuned = optimize_params(
        &program,
        &program.initial_params,
        &program.bounds,
        &suite,
        branchlab::tune::CostMetric::default(),
        &budget,
    );
    println!(
        "\nreal program: {} trials, theta* = [{:.4}], geomean nodes {:.3}",
        tuned.trials.len(),
        tuned.theta[0],
        tuned.cost
    );
}
