//! Prompt construction for the policy-evolution loop.
//!
//! The system text fixes the task framing, the score-program language, and
//! the feature documentation; the user text carries the current program, its
//! metrics, and the sampled inspirations. Both are byte-deterministic
//! functions of their inputs so prompts can be golden-file tested.

use super::db::ProgramRecord;
use std::fmt::Write as _;

/// System + user message pair for one chat completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub system: String,
    pub user: String,
}

/// Builds the full prompt for one evolution step. `feature_docs` is the
/// 91-row feature table and `dsl_grammar` the language reference; both are
/// embedded verbatim in the system text.
pub fn build_prompt(
    parent: &ProgramRecord,
    inspirations: &[&ProgramRecord],
    feature_docs: &str,
    dsl_grammar: &str,
) -> PromptBundle {
    let mut system = String::new();
    system.push_str(
        "You are an expert in machine learning for combinatorial optimization. \
         Design a score program that scores a candidate variable for branching \
         in a branch and bound algorithm.\n\n\
         The program is written in the spl/1 score-program language defined \
         below. For each candidate variable it receives the 91 features of \
         that variable through `feature(i)` and tunable scalars through \
         `param(i)`; it must compute a single numeric score, and the candidate \
         with the maximum score is branched on. Use at most 10 features in \
         total.\n\n\
         Your program must start with these header lines:\n\
         1. `used_features: [...]` — the feature indices your score actually \
         reads; exclude every unused index.\n\
         2. `params: [...]` — the initial values of your tunable parameters.\n\
         3. `bounds: [[lo, hi], ...]` — one [lo, hi] pair per parameter, e.g. \
         `bounds: [[0, 1], [-1, 3]]`. The list must be written out in full; \
         shorthand such as `[0, 1] * 10` is not allowed.\n\n",
    );
    system.push_str("Language reference:\n\n");
    system.push_str(dsl_grammar);
    if !dsl_grammar.ends_with('\n') {
        system.push('\n');
    }
    system.push_str("\nInput features (all normalized to [0,1]):\n\n");
    system.push_str(feature_docs);
    if !feature_docs.ends_with('\n') {
        system.push('\n');
    }

    let mut user = String::new();
    user.push_str("# Current Program Information\n");
    writeln!(user, "- Current performance metrics: {}", metrics_line(parent)).unwrap();
    user.push_str("```spl\n");
    user.push_str(&parent.program.canonical_text());
    if !parent.program.canonical_text().ends_with('\n') {
        user.push('\n');
    }
    user.push_str("```\n\n");
    user.push_str("# Inspiration Programs\n");
    user.push_str(
        "These programs represent diverse approaches and creative solutions \
         that may inspire new ideas:\n",
    );
    if inspirations.is_empty() {
        user.push_str("(none)\n");
    } else {
        for (i, r) in inspirations.iter().enumerate() {
            writeln!(user, "\nInspiration {} — {}", i + 1, metrics_line(r)).unwrap();
            user.push_str("```spl\n");
            user.push_str(&r.program.canonical_text());
            if !r.program.canonical_text().ends_with('\n') {
                user.push('\n');
            }
            user.push_str("```\n");
        }
    }
    user.push_str(
        "\n# Task\n\
         Rewrite the score program to improve its performance on the \
         specified metrics. Provide the complete new program code. Make sure \
         your rewritten program keeps the same inputs and outputs as the \
         original program, but with improved internal implementation. \
         Remember the three required header lines (`used_features:`, \
         `params:`, `bounds:`) described in the system instructions.\n\n\
         ```spl\n\
         # Your rewritten score program here\n\
         ```\n",
    );
    PromptBundle { system, user }
}

/// One-line cost summary for a record, e.g. `cost=3.21 (subset cost 3.05)`.
fn metrics_line(record: &ProgramRecord) -> String {
    format!("cost={} (subset cost {})", record.cost, record.subset_cost)
}
