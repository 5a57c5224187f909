//! Branch-and-bound over LP relaxations with pluggable branching policies.
//!
//! The engine is deliberately bare: no cuts, no presolve, no primal
//! heuristics. Node relaxations are solved by [`crate::simplex`], variable
//! selection is delegated to a [`crate::policy::BranchingPolicy`], and
//! everything a policy may want to remember between nodes (pseudocosts,
//! cutoff counters, variable ages, incumbents) lives in [`SearchState`].
//!
//! Given (instance, policy, config, seed) the node count and incumbent are
//! fully deterministic; wall-clock only enters through the time limit.

use crate::milp::MilpInstance;
use crate::policy::{self, BranchingPolicy, PolicyError};
use crate::simplex::{solve_lp_relaxation, LpError, LpResult, LpStatus};
use std::collections::BinaryHeap;
use std::time::Instant;
use thiserror::Error;

/// Absolute tolerance for pruning a node against the incumbent.
pub const PRUNE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSelection {
    /// Pop the open node with the smallest LP bound; ties go to the lower
    /// (older) node id.
    BestBound,
    /// Dive: children are explored before siblings, up-branch first.
    DepthFirst,
}

#[derive(Debug, Clone)]
pub struct BnbConfig {
    pub node_limit: u64,
    /// Seconds of wall clock for the whole solve.
    pub time_limit: f64,
    pub integrality_tolerance: f64,
    pub node_selection: NodeSelection,
    /// Seed handed to stochastic policies (the `random` builtin).
    pub rng_seed: u64,
}

impl Default for BnbConfig {
    fn default() -> Self {
        Self {
            node_limit: 1_000_000,
            time_limit: 3600.0,
            integrality_tolerance: 1e-6,
            node_selection: NodeSelection::BestBound,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnbStatus {
    Optimal,
    NodeLimit,
    TimeLimit,
    Infeasible,
}

impl BnbStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BnbStatus::Optimal => "optimal",
            BnbStatus::NodeLimit => "node_limit",
            BnbStatus::TimeLimit => "time_limit",
            BnbStatus::Infeasible => "infeasible",
        }
    }
}

/// Summary of one solve.
#[derive(Debug, Clone)]
pub struct BnbStats {
    /// LP relaxations solved (pruned-without-solve nodes do not count).
    pub nodes: u64,
    pub wall_time: f64,
    pub incumbent_objective: Option<f64>,
    /// Global lower bound at termination; equals the incumbent on `Optimal`.
    pub best_bound: f64,
    /// `|incumbent − best_bound| / max(|incumbent|, 1e-10)`, exactly 0 on
    /// `Optimal`; `+inf` when no incumbent exists.
    pub gap: f64,
    pub status: BnbStatus,
}

/// Extra per-solve observations used by tests and reports; skipped entirely
/// by [`run_bnb`].
#[derive(Debug, Clone, Default)]
pub struct SolveTrace {
    /// Global bound after each processed node.
    pub bound_history: Vec<f64>,
    /// `(node counter, objective)` at each incumbent improvement.
    pub incumbent_history: Vec<(u64, f64)>,
    /// Best integral solution found.
    pub incumbent: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchDir {
    Down,
    Up,
}

/// Dynamic search statistics shared between the engine and policies.
///
/// Pseudocost accumulators hold per-unit objective gains; cutoff counters
/// count children that were infeasible or pruned. `last_basic` stamps (in
/// cumulative LP iterations) when a variable was last basic in a node
/// relaxation — ages start at 0 for every variable after the first solve.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub pc_up_sum: Vec<f64>,
    pub pc_up_count: Vec<u64>,
    pub pc_down_sum: Vec<f64>,
    pub pc_down_count: Vec<u64>,
    pub cutoff_up: Vec<u64>,
    pub cutoff_down: Vec<u64>,
    pub last_basic: Vec<u64>,
    /// Cumulative simplex iterations over node relaxations (probe LPs are
    /// not counted — ages reflect the node sequence).
    pub total_lp_iterations: u64,
    pub incumbent: Option<Vec<f64>>,
    /// Branching decisions made so far (drives warm-up style policies).
    pub decisions: u64,
    sol_sum: Vec<f64>,
    sol_count: u64,
    ages_initialized: bool,
}

impl SearchState {
    pub fn new(n_vars: usize) -> Self {
        Self {
            pc_up_sum: vec![0.0; n_vars],
            pc_up_count: vec![0; n_vars],
            pc_down_sum: vec![0.0; n_vars],
            pc_down_count: vec![0; n_vars],
            cutoff_up: vec![0; n_vars],
            cutoff_down: vec![0; n_vars],
            last_basic: vec![0; n_vars],
            total_lp_iterations: 0,
            incumbent: None,
            decisions: 0,
            sol_sum: vec![0.0; n_vars],
            sol_count: 0,
            ages_initialized: false,
        }
    }

    /// Mean per-unit gain for branching up on `var` (0 while unobserved).
    pub fn pseudocost_up(&self, var: usize) -> f64 {
        if self.pc_up_count[var] == 0 { 0.0 } else { self.pc_up_sum[var] / self.pc_up_count[var] as f64 }
    }

    /// Mean per-unit gain for branching down on `var` (0 while unobserved).
    pub fn pseudocost_down(&self, var: usize) -> f64 {
        if self.pc_down_count[var] == 0 { 0.0 } else { self.pc_down_sum[var] / self.pc_down_count[var] as f64 }
    }

    /// Average value of `var` over all improving solutions found (0 if none).
    pub fn historical_average(&self, var: usize) -> f64 {
        if self.sol_count == 0 { 0.0 } else { self.sol_sum[var] / self.sol_count as f64 }
    }

    /// Incumbent value of `var`, 0 when no incumbent exists.
    pub fn incumbent_value(&self, var: usize) -> f64 {
        self.incumbent.as_ref().map_or(0.0, |x| x[var])
    }

    /// Iterations-since-basic scaled to [0,1].
    pub fn scaled_age(&self, var: usize) -> f64 {
        if self.total_lp_iterations == 0 {
            0.0
        } else {
            (self.total_lp_iterations - self.last_basic[var].min(self.total_lp_iterations)) as f64
                / self.total_lp_iterations as f64
        }
    }

    /// Folds a solved node relaxation into iteration and age bookkeeping.
    pub fn note_node_lp(&mut self, lp: &LpResult) {
        self.total_lp_iterations += lp.iterations;
        if !self.ages_initialized {
            // First relaxation of the solve: everything starts at age 0.
            self.last_basic.fill(self.total_lp_iterations);
            self.ages_initialized = true;
        }
        if lp.status == LpStatus::Optimal {
            for (var, status) in lp.basis.iter().enumerate() {
                if *status == crate::simplex::BasisStatus::Basic {
                    self.last_basic[var] = self.total_lp_iterations;
                }
            }
        }
    }

    /// Records an improving integral solution.
    pub fn note_solution(&mut self, x: &[f64]) {
        for (s, &v) in self.sol_sum.iter_mut().zip(x) {
            *s += v;
        }
        self.sol_count += 1;
        self.incumbent = Some(x.to_vec());
    }
}

/// What happened to a branched child, from the state-update point of view.
#[derive(Debug, Clone, Copy)]
pub enum ChildOutcome {
    /// The child LP solved (possibly to an early probe estimate);
    /// `pruned` marks a feasible child discarded against the incumbent.
    Feasible { objective: f64, pruned: bool },
    Infeasible,
    /// Pruned against the incumbent before its LP was ever solved.
    PrunedWithoutSolve,
}

/// Applies the branching-statistics update rule after a child is resolved.
///
/// A feasible child contributes `(child_obj − parent_obj) / step` to the
/// pseudocost accumulator of `(var, direction)`, with `step = fractionality`
/// going down and `1 − fractionality` going up; a child that was infeasible
/// or pruned increments the cutoff counter for that direction (a feasible but
/// pruned child does both).
pub fn update_search_state(
    state: &mut SearchState,
    var: usize,
    direction: BranchDir,
    outcome: ChildOutcome,
    parent_obj: f64,
    fractionality: f64,
) {
    let cutoff = match outcome {
        ChildOutcome::Feasible { objective, pruned } => {
            let step = match direction {
                BranchDir::Down => fractionality,
                BranchDir::Up => 1.0 - fractionality,
            };
            if step > 1e-12 {
                let gain = (objective - parent_obj) / step;
                match direction {
                    BranchDir::Down => {
                        state.pc_down_sum[var] += gain;
                        state.pc_down_count[var] += 1;
                    }
                    BranchDir::Up => {
                        state.pc_up_sum[var] += gain;
                        state.pc_up_count[var] += 1;
                    }
                }
            }
            pruned
        }
        ChildOutcome::Infeasible | ChildOutcome::PrunedWithoutSolve => true,
    };
    if cutoff {
        match direction {
            BranchDir::Down => state.cutoff_down[var] += 1,
            BranchDir::Up => state.cutoff_up[var] += 1,
        }
    }
}

/// Integer variables fractional beyond `tol`, ascending.
pub fn candidate_set(lp: &LpResult, instance: &MilpInstance, tol: f64) -> Vec<usize> {
    assert_eq!(lp.status, LpStatus::Optimal, "candidate_set needs an optimal LP");
    (0..instance.n_vars())
        .filter(|&i| {
            if !instance.is_integer[i] {
                return false;
            }
            let frac = lp.x[i] - lp.x[i].floor();
            frac.min(1.0 - frac) > tol
        })
        .collect()
}

/// Splits `var`'s domain at a fractional value: the down child caps it at
/// `floor(x_value)`, the up child raises its floor to `ceil(x_value)`.
pub fn branch(
    parent_lower: &[f64],
    parent_upper: &[f64],
    var: usize,
    x_value: f64,
) -> ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    let frac = x_value - x_value.floor();
    assert!(
        frac.min(1.0 - frac) > 0.0,
        "branch() on integral value {x_value} for variable {var}"
    );
    let mut down_upper = parent_upper.to_vec();
    down_upper[var] = x_value.floor();
    let mut up_lower = parent_lower.to_vec();
    up_lower[var] = x_value.ceil();
    ((parent_lower.to_vec(), down_upper), (up_lower, parent_upper.to_vec()))
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("LP relaxation failed: {0}")]
    Lp(#[from] LpError),
    #[error("LP relaxation unbounded at node {node}; the MILP is unbounded or malformed")]
    UnboundedRelaxation { node: u64 },
    #[error("branching policy failed: {0}")]
    Policy(#[from] PolicyError),
}

/// One pending node: the single bound change relative to its parent.
struct ArenaNode {
    parent: u32,
    var: u32,
    /// true: the change sets `upper[var] = value` (down branch);
    /// false: it sets `lower[var] = value` (up branch).
    caps_upper: bool,
    value: f64,
}

const NO_PARENT: u32 = u32::MAX;

struct OpenEntry {
    bound: f64,
    id: u32,
    depth: u32,
    branch: Option<(u32, BranchDir, f64, f64)>, // (var, dir, fractionality, parent_obj)
}

/// Heap item ordered ONLY by `(bound, id)`, smallest first.
struct HeapItem(Box<OpenEntry>);

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap is a max-heap; invert so the smallest (bound, id) pops.
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

enum OpenList {
    Heap(BinaryHeap<HeapItem>),
    Stack(Vec<OpenEntry>),
}

impl OpenList {
    fn new(selection: NodeSelection) -> Self {
        match selection {
            NodeSelection::BestBound => OpenList::Heap(BinaryHeap::new()),
            NodeSelection::DepthFirst => OpenList::Stack(Vec::new()),
        }
    }

    fn push(&mut self, entry: OpenEntry) {
        match self {
            OpenList::Heap(h) => h.push(HeapItem(Box::new(entry))),
            OpenList::Stack(s) => s.push(entry),
        }
    }

    fn pop(&mut self) -> Option<OpenEntry> {
        match self {
            OpenList::Heap(h) => h.pop().map(|item| *item.0),
            OpenList::Stack(s) => s.pop(),
        }
    }

    fn min_bound(&self) -> Option<f64> {
        match self {
            OpenList::Heap(h) => h.peek().map(|item| item.0.bound),
            OpenList::Stack(s) => s.iter().map(|e| e.bound).min_by(f64::total_cmp),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            OpenList::Heap(h) => h.is_empty(),
            OpenList::Stack(s) => s.is_empty(),
        }
    }
}

/// Solves `instance` to proven optimality (or a limit) and reports statistics.
pub fn run_bnb(
    instance: &MilpInstance,
    branching: &BranchingPolicy,
    config: &BnbConfig,
) -> Result<BnbStats, SolveError> {
    run_inner(instance, branching, config, None).map(|(stats, _)| stats)
}

/// [`run_bnb`] plus a [`SolveTrace`] for bound/incumbent auditing.
pub fn run_bnb_traced(
    instance: &MilpInstance,
    branching: &BranchingPolicy,
    config: &BnbConfig,
) -> Result<(BnbStats, SolveTrace), SolveError> {
    let mut trace = SolveTrace::default();
    let (stats, _) = {
        let r = run_inner(instance, branching, config, Some(&mut trace))?;
        (r.0, r.1)
    };
    Ok((stats, trace))
}

fn run_inner(
    instance: &MilpInstance,
    branching: &BranchingPolicy,
    config: &BnbConfig,
    mut trace: Option<&mut SolveTrace>,
) -> Result<(BnbStats, ()), SolveError> {
    assert!(config.node_limit >= 1, "node_limit must be at least 1");
    assert!(config.time_limit > 0.0, "time_limit must be positive");
    let n = instance.n_vars();
    let start = Instant::now();

    let static_cache = branching
        .needs_features()
        .then(|| crate::features::StaticFeatureCache::new(instance));

    let mut state = SearchState::new(n);
    let mut arena: Vec<ArenaNode> =
        vec![ArenaNode { parent: NO_PARENT, var: 0, caps_upper: false, value: 0.0 }];
    let mut open = OpenList::new(config.node_selection);
    open.push(OpenEntry { bound: f64::NEG_INFINITY, id: 0, depth: 0, branch: None });

    let mut incumbent_obj: Option<f64> = None;
    let mut incumbent_x: Option<Vec<f64>> = None;
    let mut nodes: u64 = 0;

    let mut lower = instance.lower.clone();
    let mut upper = instance.upper.clone();
    let mut chain: Vec<u32> = Vec::new();

    let status = loop {
        if open.is_empty() {
            break if incumbent_obj.is_some() { BnbStatus::Optimal } else { BnbStatus::Infeasible };
        }
        if nodes >= config.node_limit {
            break BnbStatus::NodeLimit;
        }
        if start.elapsed().as_secs_f64() > config.time_limit {
            break BnbStatus::TimeLimit;
        }
        let entry = open.pop().expect("open list checked nonempty");

        // Lazy prune: the bound stored at push time may have been beaten by a
        // newer incumbent.
        if let Some(inc) = incumbent_obj {
            if entry.bound >= inc - PRUNE_TOL {
                if let Some((var, dir, frac, parent_obj)) = entry.branch {
                    update_search_state(
                        &mut state,
                        var as usize,
                        dir,
                        ChildOutcome::PrunedWithoutSolve,
                        parent_obj,
                        frac,
                    );
                }
                continue;
            }
        }

        // Rebuild this node's box from its ancestor chain (root → leaf so
        // deeper changes win).
        lower.copy_from_slice(&instance.lower);
        upper.copy_from_slice(&instance.upper);
        chain.clear();
        let mut cursor = entry.id;
        while cursor != 0 {
            chain.push(cursor);
            cursor = arena[cursor as usize].parent;
        }
        for &nid in chain.iter().rev() {
            let node = &arena[nid as usize];
            if node.caps_upper {
                upper[node.var as usize] = node.value;
            } else {
                lower[node.var as usize] = node.value;
            }
        }

        let lp = solve_lp_relaxation(instance, &lower, &upper)?;
        nodes += 1;
        state.note_node_lp(&lp);

        match lp.status {
            LpStatus::Unbounded => {
                return Err(SolveError::UnboundedRelaxation { node: entry.id as u64 })
            }
            LpStatus::Infeasible => {
                if let Some((var, dir, frac, parent_obj)) = entry.branch {
                    update_search_state(
                        &mut state,
                        var as usize,
                        dir,
                        ChildOutcome::Infeasible,
                        parent_obj,
                        frac,
                    );
                }
                record_bound(&mut trace, &open, incumbent_obj);
                continue;
            }
            LpStatus::Optimal => {}
        }

        let pruned_after_solve =
            incumbent_obj.is_some_and(|inc| lp.objective >= inc - PRUNE_TOL);
        if let Some((var, dir, frac, parent_obj)) = entry.branch {
            update_search_state(
                &mut state,
                var as usize,
                dir,
                ChildOutcome::Feasible { objective: lp.objective, pruned: pruned_after_solve },
                parent_obj,
                frac,
            );
        }
        if pruned_after_solve {
            record_bound(&mut trace, &open, incumbent_obj);
            continue;
        }

        let candidates = candidate_set(&lp, instance, config.integrality_tolerance);
        if candidates.is_empty() {
            // Integral relaxation: snap integer components and take the exact
            // objective of the snapped point as the incumbent value.
            let mut x = lp.x.clone();
            for (j, v) in x.iter_mut().enumerate() {
                if instance.is_integer[j] {
                    *v = v.round();
                }
            }
            let obj = instance.objective_value(&x);
            if incumbent_obj.is_none_or(|inc| obj < inc - PRUNE_TOL) {
                incumbent_obj = Some(obj);
                incumbent_x = Some(x.clone());
                state.note_solution(&x);
                if let Some(t) = trace.as_deref_mut() {
                    t.incumbent_history.push((nodes, obj));
                }
            }
            record_bound(&mut trace, &open, incumbent_obj);
            continue;
        }

        let mut ctx = policy::BranchContext {
            instance,
            lower: &lower,
            upper: &upper,
            lp: &lp,
            state: &mut state,
            node_id: entry.id as u64,
            rng_seed: config.rng_seed,
            static_cache: static_cache.as_ref(),
        };
        let var = policy::choose_branch_variable(branching, &mut ctx, &candidates)?;
        state.decisions += 1;

        let x_value = lp.x[var];
        let frac = x_value - x_value.floor();
        let depth = entry.depth + 1;

        // Down child (x_var <= floor), then up child (x_var >= ceil). The
        // DFS stack pops in reverse push order, so pushing down first dives
        // on the up side.
        let down_id = arena.len() as u32;
        arena.push(ArenaNode {
            parent: entry.id,
            var: var as u32,
            caps_upper: true,
            value: x_value.floor(),
        });
        open.push(OpenEntry {
            bound: lp.objective,
            id: down_id,
            depth,
            branch: Some((var as u32, BranchDir::Down, frac, lp.objective)),
        });
        let up_id = arena.len() as u32;
        arena.push(ArenaNode {
            parent: entry.id,
            var: var as u32,
            caps_upper: false,
            value: x_value.ceil(),
        });
        open.push(OpenEntry {
            bound: lp.objective,
            id: up_id,
            depth,
            branch: Some((var as u32, BranchDir::Up, frac, lp.objective)),
        });
        record_bound(&mut trace, &open, incumbent_obj);
    };

    let wall_time = start.elapsed().as_secs_f64();
    let best_bound = match status {
        BnbStatus::Optimal => incumbent_obj.expect("optimal implies incumbent"),
        BnbStatus::Infeasible => f64::INFINITY,
        _ => {
            let open_min = open.min_bound().unwrap_or(f64::INFINITY);
            match incumbent_obj {
                Some(inc) => open_min.min(inc),
                None => open_min,
            }
        }
    };
    let gap = match (status, incumbent_obj) {
        (BnbStatus::Optimal, _) => 0.0,
        (_, Some(inc)) => (inc - best_bound).abs() / inc.abs().max(1e-10),
        (_, None) => f64::INFINITY,
    };

    if let Some(t) = trace.as_deref_mut() {
        t.incumbent = incumbent_x;
    }

    Ok((
        BnbStats { nodes, wall_time, incumbent_objective: incumbent_obj, best_bound, gap, status },
        (),
    ))
}

fn record_bound(trace: &mut Option<&mut SolveTrace>, open: &OpenList, incumbent: Option<f64>) {
    if let Some(t) = trace.as_deref_mut() {
        let open_min = open.min_bound();
        let bound = match (open_min, incumbent) {
            (Some(b), Some(inc)) => b.min(inc),
            (Some(b), None) => b,
            (None, Some(inc)) => inc,
            (None, None) => f64::INFINITY,
        };
        t.bound_history.push(bound);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::MilpInstance;
    use crate::policy::BranchingPolicy;

    fn knapsack() -> MilpInstance {
        // max 5x0 + 4x1 + 3x2  s.t.  2x0 + 3x1 + x2 <= 4, binary
        // → stored as min of the negation; optimum picks x0, x2: value 8.
        MilpInstance::from_dense(
            vec![-5.0, -4.0, -3.0],
            &[vec![2.0, 3.0, 1.0]],
            vec![4.0],
            vec![0.0; 3],
            vec![1.0; 3],
            vec![true; 3],
        )
        .unwrap()
    }

    #[test]
    fn candidate_set_filters_by_mask_and_tolerance() {
        let inst = MilpInstance::from_dense(
            vec![0.0; 3],
            &[vec![1.0, 1.0, 1.0]],
            vec![10.0],
            vec![0.0; 3],
            vec![5.0; 3],
            vec![true, false, true],
        )
        .unwrap();
        let mut lp = crate::simplex::solve_lp_relaxation(&inst, &inst.lower.clone(), &inst.upper.clone()).unwrap();
        lp.x = vec![0.3, 0.5, 0.7];
        assert_eq!(candidate_set(&lp, &inst, 1e-6), vec![0, 2], "mask respected");
        lp.x = vec![2.0, 1.5, 0.0];
        assert_eq!(candidate_set(&lp, &inst, 1e-6), Vec::<usize>::new());
        lp.x = vec![0.999_999_9, 0.0, 0.0];
        assert_eq!(candidate_set(&lp, &inst, 1e-6), Vec::<usize>::new(), "within tolerance");
    }

    #[test]
    fn branch_splits_at_floor_and_ceil() {
        let lo = vec![0.0, -5.0];
        let hi = vec![10.0, 5.0];
        let ((dl, du), (ul, uu)) = branch(&lo, &hi, 0, 2.3);
        assert_eq!(du[0], 2.0);
        assert_eq!(ul[0], 3.0);
        assert_eq!((dl[1], uu[1]), (-5.0, 5.0), "other bounds inherited");
        let ((_, du), (ul, _)) = branch(&lo, &hi, 1, -1.5);
        assert_eq!(du[1], -2.0);
        assert_eq!(ul[1], -1.0);
        let ((_, du), (ul, _)) = branch(&lo, &hi, 0, 0.5);
        assert_eq!((du[0], ul[0]), (0.0, 1.0), "binary fixing");
    }

    #[test]
    #[should_panic(expected = "integral value")]
    fn branch_rejects_integral_values() {
        branch(&[0.0], &[5.0], 0, 2.0);
    }

    #[test]
    fn pseudocost_update_arithmetic() {
        let mut state = SearchState::new(2);
        update_search_state(
            &mut state,
            0,
            BranchDir::Down,
            ChildOutcome::Feasible { objective: 12.0, pruned: false },
            10.0,
            0.4,
        );
        assert!((state.pseudocost_down(0) - 5.0).abs() < 1e-12);
        assert_eq!(state.pc_down_count[0], 1);
        assert_eq!(state.cutoff_down[0], 0);

        update_search_state(&mut state, 0, BranchDir::Up, ChildOutcome::Infeasible, 10.0, 0.4);
        assert_eq!(state.cutoff_up[0], 1);
        assert_eq!(state.pc_up_count[0], 0, "pseudocost untouched on infeasible child");

        // Two gains 5.0 and 3.0 → mean 4.0.
        update_search_state(
            &mut state,
            0,
            BranchDir::Down,
            ChildOutcome::Feasible { objective: 11.2, pruned: true },
            10.0,
            0.4,
        );
        assert!((state.pseudocost_down(0) - 4.0).abs() < 1e-12);
        assert_eq!(state.cutoff_down[0], 1, "feasible-but-pruned child also counts a cutoff");
    }

    #[test]
    fn solves_tiny_symmetric_binary() {
        let inst = MilpInstance::from_dense(
            vec![-1.0, -1.0],
            &[vec![1.0, 1.0]],
            vec![1.0],
            vec![0.0; 2],
            vec![1.0; 2],
            vec![true; 2],
        )
        .unwrap();
        let stats =
            run_bnb(&inst, &BranchingPolicy::MostFractional, &BnbConfig::default()).unwrap();
        assert_eq!(stats.status, BnbStatus::Optimal);
        assert_eq!(stats.incumbent_objective, Some(-1.0));
        assert_eq!(stats.gap, 0.0);
        assert!(stats.nodes >= 1);
    }

    #[test]
    fn solves_knapsack_with_every_builtin() {
        for policy in [
            BranchingPolicy::MostFractional,
            BranchingPolicy::PseudocostProduct,
            BranchingPolicy::Random { seed: 7 },
            BranchingPolicy::strong_branching(),
            BranchingPolicy::reliability(),
        ] {
            let stats = run_bnb(&knapsack(), &policy, &BnbConfig::default()).unwrap();
            assert_eq!(stats.status, BnbStatus::Optimal, "policy {}", policy.name());
            let obj = stats.incumbent_objective.unwrap();
            assert!((obj - -8.0).abs() < 1e-6, "policy {} got {obj}", policy.name());
        }
    }

    #[test]
    fn node_counts_are_deterministic_across_runs() {
        let inst = knapsack();
        let cfg = BnbConfig { rng_seed: 42, ..BnbConfig::default() };
        let policy = BranchingPolicy::Random { seed: 42 };
        let first = run_bnb(&inst, &policy, &cfg).unwrap();
        for _ in 0..4 {
            let again = run_bnb(&inst, &policy, &cfg).unwrap();
            assert_eq!(again.nodes, first.nodes);
            assert_eq!(again.incumbent_objective, first.incumbent_objective);
        }
    }

    #[test]
    fn best_bound_trace_is_monotone_and_sandwiched() {
        let inst = knapsack();
        let (stats, trace) =
            run_bnb_traced(&inst, &BranchingPolicy::MostFractional, &BnbConfig::default())
                .unwrap();
        assert_eq!(stats.status, BnbStatus::Optimal);
        for w in trace.bound_history.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "bound went backwards: {:?}", w);
        }
        if let Some(&last) = trace.bound_history.last() {
            assert!((last - stats.incumbent_objective.unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_instance_reports_infeasible() {
        // x0 + x1 >= 3 with binaries can't hold: stored negated.
        let inst = MilpInstance::from_dense(
            vec![1.0, 1.0],
            &[vec![-1.0, -1.0]],
            vec![-3.0],
            vec![0.0; 2],
            vec![1.0; 2],
            vec![true; 2],
        )
        .unwrap();
        let stats =
            run_bnb(&inst, &BranchingPolicy::MostFractional, &BnbConfig::default()).unwrap();
        assert_eq!(stats.status, BnbStatus::Infeasible);
        assert_eq!(stats.incumbent_objective, None);
    }

    #[test]
    fn node_limit_stops_early_with_valid_bound() {
        let inst = knapsack();
        let cfg = BnbConfig { node_limit: 1, ..BnbConfig::default() };
        let stats = run_bnb(&inst, &BranchingPolicy::MostFractional, &cfg).unwrap();
        assert_eq!(stats.status, BnbStatus::NodeLimit);
        assert_eq!(stats.nodes, 1);
        // Root LP bound: fractional knapsack value 26/3 → bound -26/3.
        assert!(stats.best_bound <= -8.0 + 1e-9);
    }

    #[test]
    fn depth_first_matches_best_bound_optimum() {
        let inst = knapsack();
        let dfs = BnbConfig { node_selection: NodeSelection::DepthFirst, ..BnbConfig::default() };
        let a = run_bnb(&inst, &BranchingPolicy::MostFractional, &BnbConfig::default()).unwrap();
        let b = run_bnb(&inst, &BranchingPolicy::MostFractional, &dfs).unwrap();
        assert_eq!(a.incumbent_objective, b.incumbent_objective);
    }

    #[test]
    fn child_bounds_dominate_parents() {
        // Solve traced and reconstruct the dominance property from history:
        // every later bound is within tolerance above any earlier one, which
        // only holds when children never undercut parents.
        let inst = MilpInstance::from_dense(
            vec![-3.0, -5.0, -4.0, -1.0],
            &[vec![2.0, 3.0, 1.0, 4.0], vec![1.0, 2.0, 3.0, 1.0]],
            vec![5.0, 4.0],
            vec![0.0; 4],
            vec![1.0; 4],
            vec![true; 4],
        )
        .unwrap();
        let (stats, trace) =
            run_bnb_traced(&inst, &BranchingPolicy::MostFractional, &BnbConfig::default())
                .unwrap();
        assert_eq!(stats.status, BnbStatus::Optimal);
        for w in trace.bound_history.windows(2) {
            assert!(w[1] >= w[0] - 1e-7);
        }
    }
}
