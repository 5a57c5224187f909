//! Instance generators for the four benchmark families: set covering,
//! combinatorial auctions, capacitated facility location, and maximum
//! independent set.
//!
//! Each generator is pure given its parameters and seed, emits the
//! canonical minimization/≤ form, and guarantees a feasible bounded root
//! LP. Published "easy" sizes and ~3× smaller desk-scale presets are
//! exposed as named configurations.

use crate::milp::{InstanceError, MilpInstance};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("generated instance failed validation: {0}")]
    Instance(#[from] InstanceError),
}

/// Family plus size parameters. Serializes with a `family` tag so specs can
/// live in config files and manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    SetCover { rows: usize, cols: usize, density: f64 },
    CombAuction { items: usize, bids: usize },
    FacilityLocation { facilities: usize, customers: usize },
    IndependentSet { nodes: usize, affinity: usize },
}

impl FamilySpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            FamilySpec::SetCover { .. } => "setcover",
            FamilySpec::CombAuction { .. } => "cauctions",
            FamilySpec::FacilityLocation { .. } => "facilities",
            FamilySpec::IndependentSet { .. } => "indset",
        }
    }

    pub fn generate(&self, seed: u64) -> Result<MilpInstance, GeneratorError> {
        match *self {
            FamilySpec::SetCover { rows, cols, density } => {
                gen_set_cover(rows, cols, density, seed)
            }
            FamilySpec::CombAuction { items, bids } => gen_comb_auction(items, bids, seed),
            FamilySpec::FacilityLocation { facilities, customers } => {
                gen_facility_location(facilities, customers, seed)
            }
            FamilySpec::IndependentSet { nodes, affinity } => {
                gen_independent_set(nodes, affinity, seed)
            }
        }
    }
}

/// Named size presets: `<family>-easy` mirrors the published benchmark
/// sizes; `<family>-desk` shrinks them ~3× so full suites run in minutes
/// on one core.
pub fn preset(name: &str) -> Option<FamilySpec> {
    Some(match name {
        "setcover-easy" => FamilySpec::SetCover { rows: 500, cols: 1000, density: 0.05 },
        "setcover-desk" => FamilySpec::SetCover { rows: 150, cols: 300, density: 0.05 },
        "cauctions-easy" => FamilySpec::CombAuction { items: 100, bids: 500 },
        "cauctions-desk" => FamilySpec::CombAuction { items: 35, bids: 175 },
        "facilities-easy" => FamilySpec::FacilityLocation { facilities: 100, customers: 100 },
        "facilities-desk" => FamilySpec::FacilityLocation { facilities: 20, customers: 20 },
        "indset-easy" => FamilySpec::IndependentSet { nodes: 750, affinity: 4 },
        "indset-desk" => FamilySpec::IndependentSet { nodes: 250, affinity: 4 },
        _ => return None,
    })
}

pub const PRESET_NAMES: [&str; 8] = [
    "setcover-easy",
    "setcover-desk",
    "cauctions-easy",
    "cauctions-desk",
    "facilities-easy",
    "facilities-desk",
    "indset-easy",
    "indset-desk",
];

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Set covering (Balas-style): minimize total cost of selected columns so
/// that every row is covered. Each row draws `round(density·cols)` distinct
/// columns (at least 2); columns left uncovered are patched into random
/// rows. Costs are integers uniform in [1, 100]. Cover rows Σ x_j ≥ 1 are
/// stored negated as Σ −x_j ≤ −1.
pub fn gen_set_cover(
    rows: usize,
    cols: usize,
    density: f64,
    seed: u64,
) -> Result<MilpInstance, GeneratorError> {
    if rows == 0 || cols == 0 {
        return Err(GeneratorError::InvalidSpec("rows and cols must be positive".into()));
    }
    if !(0.0..1.0).contains(&density) || density * (cols as f64) < 2.0 {
        return Err(GeneratorError::InvalidSpec(format!(
            "density {density} with {cols} columns leaves rows with fewer than 2 entries"
        )));
    }
    let mut r = rng_for(seed);
    let per_row = ((density * cols as f64).round() as usize).max(2);
    let mut row_cols: Vec<Vec<usize>> = Vec::with_capacity(rows);
    let mut covered = vec![false; cols];
    for _ in 0..rows {
        let picked = sample_distinct(&mut r, cols, per_row);
        for &c in &picked {
            covered[c] = true;
        }
        row_cols.push(picked);
    }
    for c in 0..cols {
        if !covered[c] {
            let j = r.gen_range(0..rows);
            if !row_cols[j].contains(&c) {
                row_cols[j].push(c);
            }
        }
    }
    let costs: Vec<f64> = (0..cols).map(|_| r.gen_range(1..=100) as f64).collect();
    let dense: Vec<Vec<f64>> = row_cols
        .iter()
        .map(|cs| {
            let mut a = vec![0.0; cols];
            for &c in cs {
                a[c] = -1.0;
            }
            a
        })
        .collect();
    let rhs = vec![-1.0; rows];
    Ok(MilpInstance::from_dense(
        costs,
        &dense,
        rhs,
        vec![0.0; cols],
        vec![1.0; cols],
        vec![true; cols],
    )?)
}

/// Combinatorial auction winner determination: maximize accepted bid prices
/// (stored as minimizing the negation) subject to each item selling at most
/// once. Bundle sizes are geometric with mean 3 (capped at the item count);
/// the first `items` bids each pin one distinct item so no item row is
/// vacuous; prices are the bundle's summed item values with ±20% noise.
pub fn gen_comb_auction(
    items: usize,
    bids: usize,
    seed: u64,
) -> Result<MilpInstance, GeneratorError> {
    if items == 0 {
        return Err(GeneratorError::InvalidSpec("items must be positive".into()));
    }
    if bids < items {
        return Err(GeneratorError::InvalidSpec(format!(
            "need at least as many bids as items (items={items}, bids={bids})"
        )));
    }
    let mut r = rng_for(seed);
    let values: Vec<f64> = (0..items).map(|_| r.gen_range(1..=100) as f64).collect();
    let mut bundles: Vec<Vec<usize>> = Vec::with_capacity(bids);
    for b in 0..bids {
        // Geometric(1/3) size, so bundles average 3 items.
        let mut size = 1;
        while size < items && r.gen_bool(2.0 / 3.0) {
            size += 1;
        }
        let mut bundle = sample_distinct(&mut r, items, size);
        if b < items && !bundle.contains(&b) {
            bundle[0] = b;
        }
        bundle.sort_unstable();
        bundle.dedup();
        bundles.push(bundle);
    }
    let prices: Vec<f64> = bundles
        .iter()
        .map(|bundle| {
            let value: f64 = bundle.iter().map(|&i| values[i]).sum();
            (value * (1.0 + r.gen_range(-0.2..0.2))).max(1.0)
        })
        .collect();
    let mut dense = vec![vec![0.0; bids]; items];
    for (b, bundle) in bundles.iter().enumerate() {
        for &i in bundle {
            dense[i][b] = 1.0;
        }
    }
    let c: Vec<f64> = prices.iter().map(|p| -p).collect();
    Ok(MilpInstance::from_dense(
        c,
        &dense,
        vec![1.0; items],
        vec![0.0; bids],
        vec![1.0; bids],
        vec![true; bids],
    )?)
}

/// Capacitated facility location: binary open decisions y_i followed by
/// continuous assignment fractions x_ij (variable index facilities + i·customers + j).
/// Placements are uniform on the unit square; demands are integers in
/// [5, 35], raw capacities in [10, 160] rescaled so total capacity is twice
/// total demand; fixed costs follow the classic √capacity form; transport
/// cost is 10 · demand · Euclidean distance. Each customer's Σ_i x_ij = 1
/// is stored as a ≤ pair; capacity links are Σ_j d_j x_ij − u_i y_i ≤ 0.
pub fn gen_facility_location(
    facilities: usize,
    customers: usize,
    seed: u64,
) -> Result<MilpInstance, GeneratorError> {
    if facilities == 0 || customers == 0 {
        return Err(GeneratorError::InvalidSpec(
            "facilities and customers must be positive".into(),
        ));
    }
    let mut r = rng_for(seed);
    let fac_pos: Vec<(f64, f64)> =
        (0..facilities).map(|_| (r.gen::<f64>(), r.gen::<f64>())).collect();
    let cust_pos: Vec<(f64, f64)> =
        (0..customers).map(|_| (r.gen::<f64>(), r.gen::<f64>())).collect();
    let demand: Vec<f64> = (0..customers).map(|_| r.gen_range(5..=35) as f64).collect();
    let raw_cap: Vec<f64> = (0..facilities).map(|_| r.gen_range(10..=160) as f64).collect();
    let total_demand: f64 = demand.iter().sum();
    let total_raw: f64 = raw_cap.iter().sum();
    // Rescale so aggregate capacity is 2× aggregate demand (ceil keeps the
    // inequality strict after integer rounding).
    let capacity: Vec<f64> =
        raw_cap.iter().map(|&u| (u * 2.0 * total_demand / total_raw).ceil()).collect();
    let fixed: Vec<f64> = capacity
        .iter()
        .map(|&u| r.gen_range(100..=110) as f64 * u.sqrt() + r.gen_range(0..=90) as f64)
        .collect();

    let n = facilities + facilities * customers;
    let xvar = |i: usize, j: usize| facilities + i * customers + j;
    let mut objective = vec![0.0; n];
    for i in 0..facilities {
        objective[i] = fixed[i];
        for j in 0..customers {
            let (fx, fy) = fac_pos[i];
            let (cx, cy) = cust_pos[j];
            let dist = ((fx - cx).powi(2) + (fy - cy).powi(2)).sqrt();
            objective[xvar(i, j)] = 10.0 * demand[j] * dist;
        }
    }

    let mut dense: Vec<Vec<f64>> = Vec::with_capacity(2 * customers + facilities);
    let mut rhs: Vec<f64> = Vec::with_capacity(2 * customers + facilities);
    for j in 0..customers {
        let mut le = vec![0.0; n];
        for i in 0..facilities {
            le[xvar(i, j)] = 1.0;
        }
        let ge: Vec<f64> = le.iter().map(|&v| -v).collect();
        dense.push(le);
        rhs.push(1.0);
        dense.push(ge);
        rhs.push(-1.0);
    }
    for i in 0..facilities {
        let mut row = vec![0.0; n];
        row[i] = -capacity[i];
        for j in 0..customers {
            row[xvar(i, j)] = demand[j];
        }
        dense.push(row);
        rhs.push(0.0);
    }

    let mut is_integer = vec![false; n];
    for flag in is_integer.iter_mut().take(facilities) {
        *flag = true;
    }
    Ok(MilpInstance::from_dense(
        objective,
        &dense,
        rhs,
        vec![0.0; n],
        vec![1.0; n],
        is_integer,
    )?)
}

/// Maximum independent set on a Barabási–Albert graph: maximize the number
/// of selected nodes (stored negated) subject to one-per-clique rows from a
/// greedy edge clique cover. The cover guarantees every edge lies in some
/// row; cliques of size ≥ 3 strengthen the formulation over plain edge
/// constraints.
pub fn gen_independent_set(
    nodes: usize,
    affinity: usize,
    seed: u64,
) -> Result<MilpInstance, GeneratorError> {
    if affinity == 0 || nodes <= affinity {
        return Err(GeneratorError::InvalidSpec(format!(
            "need nodes > affinity >= 1 (nodes={nodes}, affinity={affinity})"
        )));
    }
    let edges = barabasi_albert_edges(nodes, affinity, seed);
    independent_set_from_edges(nodes, &edges)
}

/// Barabási–Albert preferential attachment: a complete seed graph on
/// `affinity + 1` nodes, then each new node attaches to `affinity` distinct
/// existing nodes sampled proportional to degree.
pub fn barabasi_albert_edges(nodes: usize, affinity: usize, seed: u64) -> Vec<(usize, usize)> {
    assert!(affinity >= 1 && nodes > affinity);
    let mut r = rng_for(seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // Urn with one entry per edge endpoint: sampling an index uniformly is
    // sampling a node proportional to its degree.
    let mut urn: Vec<usize> = Vec::new();
    let m0 = affinity + 1;
    for u in 0..m0 {
        for v in (u + 1)..m0 {
            edges.push((u, v));
            urn.push(u);
            urn.push(v);
        }
    }
    for v in m0..nodes {
        let mut targets: Vec<usize> = Vec::with_capacity(affinity);
        while targets.len() < affinity {
            let t = urn[r.gen_range(0..urn.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t.min(v), t.max(v)));
            urn.push(t);
            urn.push(v);
        }
    }
    edges
}

/// Builds the clique-strengthened independent-set MILP from an explicit
/// edge list (nodes are 0-based, self-loops rejected).
pub fn independent_set_from_edges(
    nodes: usize,
    edges: &[(usize, usize)],
) -> Result<MilpInstance, GeneratorError> {
    if nodes == 0 {
        return Err(GeneratorError::InvalidSpec("need at least one node".into()));
    }
    for &(u, v) in edges {
        if u == v || u >= nodes || v >= nodes {
            return Err(GeneratorError::InvalidSpec(format!("bad edge ({u}, {v})")));
        }
    }
    let cliques = greedy_clique_cover(nodes, edges);
    let mut dense: Vec<Vec<f64>> = Vec::with_capacity(cliques.len());
    for clique in &cliques {
        let mut row = vec![0.0; nodes];
        for &v in clique {
            row[v] = 1.0;
        }
        dense.push(row);
    }
    let rhs = vec![1.0; dense.len()];
    Ok(MilpInstance::from_dense(
        vec![-1.0; nodes],
        &dense,
        rhs,
        vec![0.0; nodes],
        vec![1.0; nodes],
        vec![true; nodes],
    )?)
}

/// Greedy edge clique cover: repeatedly take the lowest uncovered edge,
/// grow it into a maximal clique by adding the lowest-index vertex adjacent
/// to every member, and mark all edges inside the clique covered. Every
/// edge ends up inside exactly the first clique that absorbs it.
fn greedy_clique_cover(nodes: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![vec![false; nodes]; nodes];
    let mut sorted: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    sorted.sort_unstable();
    sorted.dedup();
    for &(u, v) in &sorted {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let mut covered = vec![false; sorted.len()];
    let edge_id: std::collections::HashMap<(usize, usize), usize> =
        sorted.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let mut cliques = Vec::new();
    for (k, &(u, v)) in sorted.iter().enumerate() {
        if covered[k] {
            continue;
        }
        let mut clique = vec![u, v];
        for w in 0..nodes {
            if clique.contains(&w) {
                continue;
            }
            if clique.iter().all(|&q| adj[q][w]) {
                clique.push(w);
            }
        }
        clique.sort_unstable();
        for a in 0..clique.len() {
            for b in (a + 1)..clique.len() {
                if let Some(&id) = edge_id.get(&(clique[a], clique[b])) {
                    covered[id] = true;
                }
            }
        }
        cliques.push(clique);
    }
    cliques
}

/// `k` distinct indices from `0..n`, ascending.
fn sample_distinct(r: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let k = k.min(n);
    // Partial Fisher-Yates over an index pool keeps this O(n) per call.
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = r.gen_range(i..n);
        pool.swap(i, j);
    }
    let mut picked: Vec<usize> = pool[..k].to_vec();
    picked.sort_unstable();
    picked
}
