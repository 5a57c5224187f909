//! Desk-scale laboratory for MILP branching policies.
//!
//! `branchlab` bundles everything needed to *study* branching rules on small
//! mixed-integer linear programs, end to end:
//!
//! * [`milp`] / [`simplex`] — instance model and a two-phase primal simplex
//!   for the LP relaxations (dense tableau, bounded variables, Bland's rule).
//! * [`bnb`] — a deterministic branch-and-bound engine that delegates every
//!   branching decision to a pluggable [`policy::Policy`].
//! * [`features`] — the 91-dimensional per-candidate feature vectors policies
//!   see, plus per-node min–max normalization.
//! * [`dsl`] — a tiny, pure score-program language (`spl/1`): parse, validate,
//!   evaluate, and canonically serialize branching score functions.
//! * [`tune`] — a derivative-free parameter tuner and the 125 % fast filter
//!   used to discard clearly-bad programs cheaply.
//! * [`evolve`] — an island-database evolution loop that asks an LLM (live
//!   HTTP or scripted fixtures) for new score programs, filters, tunes, and
//!   archives them.
//! * [`generators`] / [`io`] — four seeded instance families (set cover,
//!   combinatorial auctions, capacitated facility location, maximum
//!   independent set) and a versioned text format for instances.
//! * [`metrics`] / [`bench`] — shifted geometric means, gap/win statistics,
//!   and a policy-comparison benchmark harness.
//!
//! # Start with the examples
//!
//! The `examples/` directory is the primary tour; each file is runnable and
//! self-contained:
//!
//! ```text
//! cargo run --example solve_instance     # generate + solve one MILP, print stats
//! cargo run --example generate_families  # all four instance families on disk
//! cargo run --example feature_tour       # extract and inspect the 91 features
//! cargo run --example score_programs     # parse/evaluate/serialize DSL programs
//! cargo run --example tune_parameters    # derivative-free tuning on an analytic bowl
//! cargo run --example evolve_scripted    # full evolution loop from scripted LLM fixtures
//! cargo run --example benchmark_policies # compare builtin policies on a small suite
//! ```
//!
//! The same functionality is scriptable through the thin `branchlab` binary
//! (`generate`, `solve`, `tune`, `evolve`, `bench`, `report`); see the README.
//!
//! # Determinism
//!
//! Every stochastic component (generators, tuner, evolution loop, the
//! `random` policy) takes an explicit `u64` seed, and equal seeds reproduce
//! runs bit-for-bit — including the JSONL evolution database.

pub mod bench;
pub mod bnb;
pub mod cli;
pub mod dsl;
pub mod evolve;
pub mod features;
pub mod generators;
pub mod io;
pub mod metrics;
pub mod milp;
pub mod policy;
pub mod rng;
pub mod simplex;
pub mod tune;
