//! Parse an `spl/1` score program, round-trip it through the canonical
//! serializer, and evaluate it on real root-node features.
//!
//! ```text
//! cargo run --example score_programs
//! ```

use branchlab::bnb::{candidate_set, SearchState};
use branchlab::dsl::{evaluate, ScoreProgram, GRAMMAR_DOC};
use branchlab::features::{extract_features, normalize_per_node, NodeContext, StaticFeatureCache};
use branchlab::generators::gen_facility_location;
use branchlab::simplex::solve_lp_relaxation;

// A hybrid rule: prefer fractional variables, tilt by objective coefficient.
const PROGRAM: &str = "\
spl/1
used_features: [9, 23]
params: [0.7]
bounds: [[0, 1]]
score:
let frac = 4 * feature(9) * (1 - feature(9))
return param(0) * frac + (1 - param(0)) * feature(23)
";

fn main() {
    let (program, warnings) = ScoreProgram::parse(PROGRAM).expect("program parses");
    assert!(warnings.is_empty());
    println!("features used: {:?}", program.used_features);
    println!("parameters:    {:?} within {:?}", program.initial_params, program.bounds);

    // Canonical text is a fixed point: parse(canonical) == program.
    let canonical = program.canonical_text();
    let (reparsed, _) = ScoreProgram::parse(&canonical).expect("canonical text parses");
    assert_eq!(reparsed, program);
    println!("\ncanonical form:\n{canonical}");

    // Score the fractional candidates at the root of a real instance.
    let instance = gen_facility_location(10, 15, 1).expect("valid generator sizes");
    let lower = instance.lower.clone();
    let upper = instance.upper.clone();
    let lp = solve_lp_relaxation(&instance, &lower, &upper).expect("feasible root LP");
    let mut state = SearchState::new(instance.n_vars());
    state.note_node_lp(&lp);
    let candidates = candidate_set(&lp, &instance, 1e-6);
    let cache = StaticFeatureCache::new(&instance);
    let ctx = NodeContext::new(&instance, &lower, &upper, &lp, &state);
    let features = normalize_per_node(extract_features(&ctx, &cache, &candidates));

    let scores = evaluate(&program, &program.initial_params, &features).expect("evaluates");
    println!("candidate scores (branch on the max):");
    let mut best = 0;
    for (r, score) in scores.iter().enumerate() {
        println!("  x{:<3} -> {score:.4}", features.candidate_indices[r]);
        if *score > scores[best] {
            best = r;
        }
    }
    println!("branching variable: x{}", features.candidate_indices[best]);

    // Malformed programs fail with a named reason, not a panic.
    let bad = PROGRAM.replace("bounds: [[0, 1]]", "bounds: [[0, 1], [0, 1]]");
    let err = ScoreProgram::parse(&bad).unwrap_err();
    println!("\nrejected variant: {err}");

    println!("\nfull language reference available as GRAMMAR_DOC ({} lines)", GRAMMAR_DOC.lines().count());
}
