//! Branching-variable selection: builtin rules, full strong branching, and
//! generated score programs, all scored through one interface.
//!
//! Every policy maps the candidate list to one score per candidate; the
//! highest score wins, ties to the lowest candidate index. Strong-branching
//! probes feed their child objectives back into the shared [`SearchState`],
//! so pseudocosts warm up even while probing.

use crate::bnb::{update_search_state, BranchDir, ChildOutcome, SearchState};
use crate::dsl::{evaluate, EvalError, ScoreProgram};
use crate::features::{extract_features, normalize_per_node, NodeContext, StaticFeatureCache};
use crate::milp::MilpInstance;
use crate::rng::counter_uniform;
use crate::simplex::{solve_capped, CappedSolve, LpResult, LpStatus};
use thiserror::Error;

/// Additive smoothing for product-style scores.
pub const SCORE_EPS: f64 = 1e-8;

/// Objective gain credited to a probe that proves a child infeasible.
pub const INFEASIBLE_CHILD_GAIN: f64 = 1e10;

/// Default simplex-iteration budget for a single strong-branching probe.
pub const DEFAULT_PROBE_ITERATION_CAP: u64 = 1000;

/// Branching decisions scored with full strong branching before the
/// reliability rule falls back to pseudocosts.
pub const DEFAULT_RELIABILITY_WARMUP: u64 = 8;

#[derive(Debug, Clone)]
pub enum BranchingPolicy {
    /// Deterministic counter-based pseudo-random scores keyed on
    /// `(seed xor solve seed, node id, variable)`.
    Random { seed: u64 },
    /// Score `min(frac, 1 - frac)`: prefers variables nearest 0.5.
    MostFractional,
    /// `(pc_up * (1-frac) + eps) * (pc_down * frac + eps)`.
    PseudocostProduct,
    /// Solves both child LPs for every candidate and scores
    /// `(gain_down + eps) * (gain_up + eps)`.
    FullStrongBranching { probe_iteration_cap: u64 },
    /// Full strong branching for the first `warmup` decisions of a solve,
    /// pseudocost product afterwards.
    Reliability { warmup: u64, probe_iteration_cap: u64 },
    /// A generated score program evaluated on normalized candidate features.
    Program { program: ScoreProgram, theta: Vec<f64> },
}

impl BranchingPolicy {
    pub fn strong_branching() -> Self {
        BranchingPolicy::FullStrongBranching {
            probe_iteration_cap: DEFAULT_PROBE_ITERATION_CAP,
        }
    }

    pub fn reliability() -> Self {
        BranchingPolicy::Reliability {
            warmup: DEFAULT_RELIABILITY_WARMUP,
            probe_iteration_cap: DEFAULT_PROBE_ITERATION_CAP,
        }
    }

    /// A program policy starting at the program's own initial parameters.
    pub fn program(program: ScoreProgram) -> Self {
        let theta = program.initial_params.clone();
        BranchingPolicy::Program { program, theta }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BranchingPolicy::Random { .. } => "random",
            BranchingPolicy::MostFractional => "most_fractional",
            BranchingPolicy::PseudocostProduct => "pseudocost_product",
            BranchingPolicy::FullStrongBranching { .. } => "full_strong_branching",
            BranchingPolicy::Reliability { .. } => "reliability",
            BranchingPolicy::Program { .. } => "program",
        }
    }

    /// Whether scoring needs the static feature cache (program policies only;
    /// builtins read the LP solution and search state directly).
    pub fn needs_features(&self) -> bool {
        matches!(self, BranchingPolicy::Program { .. })
    }
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("score program evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("program policies need the static feature cache in the branch context")]
    MissingCache,
}

/// Everything a policy may inspect (and, for probes, mutate) at one node.
pub struct BranchContext<'a> {
    pub instance: &'a MilpInstance,
    /// Local bounds at this node.
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    pub lp: &'a LpResult,
    pub state: &'a mut SearchState,
    pub node_id: u64,
    /// Solve-level seed (mixed into the `random` policy).
    pub rng_seed: u64,
    /// Present whenever the policy's `needs_features()` is true.
    pub static_cache: Option<&'a StaticFeatureCache>,
}

/// One score per candidate, higher is better.
pub fn score_candidates(
    policy: &BranchingPolicy,
    ctx: &mut BranchContext,
    candidates: &[usize],
) -> Result<Vec<f64>, PolicyError> {
    assert!(!candidates.is_empty(), "scoring needs at least one candidate");
    let frac = |i: usize| {
        let x = ctx.lp.x[i];
        x - x.floor()
    };
    match policy {
        BranchingPolicy::Random { seed } => {
            let key = seed ^ ctx.rng_seed;
            Ok(candidates
                .iter()
                .map(|&i| counter_uniform(key, ctx.node_id, i as u64))
                .collect())
        }
        BranchingPolicy::MostFractional => {
            Ok(candidates.iter().map(|&i| frac(i).min(1.0 - frac(i))).collect())
        }
        BranchingPolicy::PseudocostProduct => Ok(candidates
            .iter()
            .map(|&i| pseudocost_product_score(ctx.state, i, frac(i)))
            .collect()),
        BranchingPolicy::FullStrongBranching { probe_iteration_cap } => {
            Ok(strong_branching_scores(ctx, candidates, *probe_iteration_cap))
        }
        BranchingPolicy::Reliability { warmup, probe_iteration_cap } => {
            if ctx.state.decisions < *warmup {
                Ok(strong_branching_scores(ctx, candidates, *probe_iteration_cap))
            } else {
                Ok(candidates
                    .iter()
                    .map(|&i| pseudocost_product_score(ctx.state, i, frac(i)))
                    .collect())
            }
        }
        BranchingPolicy::Program { program, theta } => {
            let cache = ctx.static_cache.ok_or(PolicyError::MissingCache)?;
            let node = NodeContext::new(ctx.instance, ctx.lower, ctx.upper, ctx.lp, ctx.state);
            let matrix = normalize_per_node(extract_features(&node, cache, candidates));
            Ok(evaluate(program, theta, &matrix)?)
        }
    }
}

fn pseudocost_product_score(state: &SearchState, var: usize, frac: f64) -> f64 {
    let up = state.pseudocost_up(var) * (1.0 - frac) + SCORE_EPS;
    let down = state.pseudocost_down(var) * frac + SCORE_EPS;
    up * down
}

/// Probes both children of every candidate with capped LP solves.
///
/// Per-direction gain: `max(child_obj - parent_obj, 0)` for a solved or
/// feasibly-capped probe, [`INFEASIBLE_CHILD_GAIN`] for a proven-infeasible
/// child, and 0 (no information) when the cap struck during phase 1.
/// Solved and infeasible probes update pseudocost/cutoff statistics exactly
/// like real child solves. A numeric failure makes the candidate score −∞.
fn strong_branching_scores(
    ctx: &mut BranchContext,
    candidates: &[usize],
    probe_cap: u64,
) -> Vec<f64> {
    let parent_obj = ctx.lp.objective;
    let mut lo = ctx.lower.to_vec();
    let mut hi = ctx.upper.to_vec();
    let mut scores = Vec::with_capacity(candidates.len());
    for &i in candidates {
        let x = ctx.lp.x[i];
        let frac = x - x.floor();
        let mut gains = [0.0_f64; 2];
        let mut failed = false;
        for (slot, dir) in [(0, BranchDir::Down), (1, BranchDir::Up)] {
            match dir {
                BranchDir::Down => hi[i] = x.floor(),
                BranchDir::Up => lo[i] = x.ceil(),
            }
            let probe = solve_capped(ctx.instance, &lo, &hi, probe_cap);
            match dir {
                BranchDir::Down => hi[i] = ctx.upper[i],
                BranchDir::Up => lo[i] = ctx.lower[i],
            }
            match probe {
                Ok(CappedSolve::Done(res)) => match res.status {
                    LpStatus::Optimal => {
                        gains[slot] = (res.objective - parent_obj).max(0.0);
                        update_search_state(
                            ctx.state,
                            i,
                            dir,
                            ChildOutcome::Feasible { objective: res.objective, pruned: false },
                            parent_obj,
                            frac,
                        );
                    }
                    LpStatus::Infeasible => {
                        gains[slot] = INFEASIBLE_CHILD_GAIN;
                        update_search_state(
                            ctx.state,
                            i,
                            dir,
                            ChildOutcome::Infeasible,
                            parent_obj,
                            frac,
                        );
                    }
                    LpStatus::Unbounded => failed = true,
                },
                Ok(CappedSolve::CapHit { objective, feasible: true, .. }) => {
                    // Phase-2 estimate: usable as a lower bound on the child.
                    gains[slot] = (objective - parent_obj).max(0.0);
                    update_search_state(
                        ctx.state,
                        i,
                        dir,
                        ChildOutcome::Feasible { objective, pruned: false },
                        parent_obj,
                        frac,
                    );
                }
                Ok(CappedSolve::CapHit { feasible: false, .. }) => {
                    // Cap struck before feasibility: no information.
                    gains[slot] = 0.0;
                }
                Err(_) => failed = true,
            }
        }
        scores.push(if failed {
            f64::NEG_INFINITY
        } else {
            (gains[0] + SCORE_EPS) * (gains[1] + SCORE_EPS)
        });
    }
    scores
}

/// Argmax over candidate scores; ties resolve to the lowest candidate index.
pub fn select_branch_variable(scores: &[f64], candidates: &[usize]) -> usize {
    assert_eq!(scores.len(), candidates.len(), "one score per candidate");
    assert!(!candidates.is_empty(), "selection needs at least one candidate");
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = k;
        }
    }
    candidates[best]
}

/// Scores candidates under `policy` and picks the branching variable.
pub fn choose_branch_variable(
    policy: &BranchingPolicy,
    ctx: &mut BranchContext,
    candidates: &[usize],
) -> Result<usize, PolicyError> {
    let scores = score_candidates(policy, ctx, candidates)?;
    Ok(select_branch_variable(&scores, candidates))
}
