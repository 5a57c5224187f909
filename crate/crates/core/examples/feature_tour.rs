//! Extract the 91 branching-candidate features at the root node of a small
//! instance, normalize them, and print a readable slice of the matrix.
//!
//! ```text
//! cargo run --example feature_tour
//! ```

use branchlab::bnb::{candidate_set, SearchState};
use branchlab::features::{
    extract_features, feature_docs, normalize_per_node, NodeContext, StaticFeatureCache,
    NUM_FEATURES,
};
use branchlab::generators::gen_facility_location;
use branchlab::simplex::solve_lp_relaxation;

fn main() {
    let instance = gen_facility_location(10, 15, 1).expect("valid generator sizes");

    // Root node: instance bounds, freshly solved LP relaxation.
    let lower = instance.lower.clone();
    let upper = instance.upper.clone();
    let lp = solve_lp_relaxation(&instance, &lower, &upper).expect("feasible root LP");
    let mut state = SearchState::new(instance.n_vars());
    state.note_node_lp(&lp);

    let candidates = candidate_set(&lp, &instance, 1e-6);
    println!(
        "root LP objective {:.4}, {} fractional candidates out of {} variables\n",
        lp.objective,
        candidates.len(),
        instance.n_vars()
    );

    let cache = StaticFeatureCache::new(&instance);
    let ctx = NodeContext::new(&instance, &lower, &upper, &lp, &state);
    let raw = extract_features(&ctx, &cache, &candidates);
    let norm = normalize_per_node(raw.clone());

    // A few telling columns; the full catalogue is feature_docs_table().
    let show = [0usize, 9, 23, 37, 58, 90];
    let docs = feature_docs();
    print!("{:>9} ", "candidate");
    for &c in &show {
        print!("{:>12}", format!("f{c}"));
    }
    println!("\n{}", "-".repeat(9 + 1 + 12 * show.len()));
    for r in 0..norm.n_rows().min(5) {
        print!("{:>9} ", format!("x{}", norm.candidate_indices[r]));
        for &c in &show {
            print!("{:>12.4}", norm.get(r, c));
        }
        println!();
    }
    println!();
    for &c in &show {
        println!("f{c:<3} {}", docs[c].name);
    }

    // Contract highlights: every entry is finite and normalized into [0,1].
    let all_unit = (0..norm.n_rows())
        .all(|r| norm.row(r).iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)));
    println!(
        "\nmatrix is {} x {NUM_FEATURES}, all entries finite in [0,1]: {all_unit}",
        norm.n_rows()
    );
}
