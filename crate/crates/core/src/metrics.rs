//! Benchmark metrics: shifted geometric means, per-instance win counts, and
//! per-policy summaries.
//!
//! Everything here is a pure function of raw result cells, so every aggregate
//! in a report can be recomputed from the cell rows of the same file — that
//! recomputability is an invariant the test suite checks, not just a style
//! preference.

use crate::bnb::BnbStatus;
use std::collections::{BTreeMap, BTreeSet};

/// Shifted geometric mean `exp(mean(ln(v + shift))) − shift`.
///
/// The classic benchmarking aggregate: with `shift = 1` it tolerates zeros
/// and damps the influence of near-zero outliers while staying multiplicative
/// for large values.
///
/// # Panics
/// On an empty slice, a negative value, a non-finite value, or a negative
/// shift — all contract violations by the caller.
pub fn shifted_geomean(values: &[f64], shift: f64) -> f64 {
    assert!(!values.is_empty(), "shifted_geomean of an empty slice");
    assert!(shift >= 0.0, "negative shift {shift}");
    let mut sum = 0.0;
    for &v in values {
        assert!(v.is_finite() && v >= 0.0, "shifted_geomean of invalid value {v}");
        sum += (v + shift).ln();
    }
    (sum / values.len() as f64).exp() - shift
}

/// Terminal state of one (policy, instance) benchmark cell.
///
/// Extends [`BnbStatus`] with `Error`: a solve that panicked or failed
/// numerically is recorded and isolated rather than aborting the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Optimal,
    NodeLimit,
    TimeLimit,
    Infeasible,
    Error,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Optimal => "optimal",
            CellStatus::NodeLimit => "node_limit",
            CellStatus::TimeLimit => "time_limit",
            CellStatus::Infeasible => "infeasible",
            CellStatus::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "optimal" => CellStatus::Optimal,
            "node_limit" => CellStatus::NodeLimit,
            "time_limit" => CellStatus::TimeLimit,
            "infeasible" => CellStatus::Infeasible,
            "error" => CellStatus::Error,
            _ => return None,
        })
    }

    /// A cell "finished" when the solver reached a proven terminal answer
    /// (optimality or infeasibility) rather than a limit or failure.
    pub fn finished(self) -> bool {
        matches!(self, CellStatus::Optimal | CellStatus::Infeasible)
    }
}

impl From<BnbStatus> for CellStatus {
    fn from(s: BnbStatus) -> Self {
        match s {
            BnbStatus::Optimal => CellStatus::Optimal,
            BnbStatus::NodeLimit => CellStatus::NodeLimit,
            BnbStatus::TimeLimit => CellStatus::TimeLimit,
            BnbStatus::Infeasible => CellStatus::Infeasible,
        }
    }
}

/// One (policy, instance) result row of a benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchCell {
    pub policy: String,
    pub instance: String,
    pub status: CellStatus,
    pub nodes: u64,
    pub time_s: f64,
    pub gap: f64,
}

/// Per-policy aggregate over a benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySummary {
    pub policy: String,
    /// Cells that finished (proved optimality or infeasibility).
    pub solved: u64,
    /// Total cells for this policy.
    pub total: u64,
    /// Instances where this policy beat every finishing rival (ties credit
    /// all tied policies).
    pub wins: u64,
    /// 1-shifted geometric mean of node counts over all cells.
    pub geomean_nodes: f64,
    /// 1-shifted geometric mean of solve times over all cells.
    pub geomean_time_s: f64,
}

/// Per-instance win counting.
///
/// A policy wins an instance when it finished and no finishing rival has a
/// strictly smaller `(time, nodes)` key: time decides, node count breaks
/// exact time ties (node counts are the deterministic metric when wall-clock
/// resolution can't separate runs), and policies tied on both are all
/// credited. Unfinished policies never win.
///
/// # Panics
/// When the cells cover fewer than two distinct policies — win counting is
/// meaningless without competition.
pub fn compute_wins(cells: &[BenchCell]) -> BTreeMap<String, u64> {
    let policies: BTreeSet<&str> = cells.iter().map(|c| c.policy.as_str()).collect();
    assert!(policies.len() >= 2, "win counting needs at least two policies");

    let mut wins: BTreeMap<String, u64> =
        policies.iter().map(|p| (p.to_string(), 0)).collect();
    let mut by_instance: BTreeMap<&str, Vec<&BenchCell>> = BTreeMap::new();
    for c in cells {
        by_instance.entry(c.instance.as_str()).or_default().push(c);
    }
    for group in by_instance.values() {
        let best = group
            .iter()
            .filter(|c| c.status.finished())
            .map(|c| (c.time_s, c.nodes))
            .min_by(|a, b| a.partial_cmp(b).expect("finite times"));
        let Some(best) = best else { continue };
        for c in group {
            if c.status.finished() && (c.time_s, c.nodes) == best {
                *wins.get_mut(&c.policy).expect("policy present") += 1;
            }
        }
    }
    wins
}

/// Aggregates cells into per-policy summaries, ordered by each policy's first
/// appearance in `cells`. Win counts are all zero when only one policy is
/// present (no competition).
pub fn summarize(cells: &[BenchCell]) -> Vec<PolicySummary> {
    let mut order: Vec<&str> = Vec::new();
    for c in cells {
        if !order.contains(&c.policy.as_str()) {
            order.push(&c.policy);
        }
    }
    let wins = if order.len() >= 2 {
        compute_wins(cells)
    } else {
        BTreeMap::new()
    };
    order
        .iter()
        .map(|&p| {
            let mine: Vec<&BenchCell> = cells.iter().filter(|c| c.policy == p).collect();
            let nodes: Vec<f64> = mine.iter().map(|c| c.nodes as f64).collect();
            let times: Vec<f64> = mine.iter().map(|c| c.time_s).collect();
            PolicySummary {
                policy: p.to_string(),
                solved: mine.iter().filter(|c| c.status.finished()).count() as u64,
                total: mine.len() as u64,
                wins: wins.get(p).copied().unwrap_or(0),
                geomean_nodes: shifted_geomean(&nodes, 1.0),
                geomean_time_s: shifted_geomean(&times, 1.0),
            }
        })
        .collect()
}
