//! Branching-candidate descriptions: 91 numeric features per fractional
//! variable, split into cached static values (instance structure) and
//! per-node dynamics (LP solution, basis, pseudocosts, active rows).
//!
//! The per-index layout is pinned — score programs address features by index,
//! so reordering anything here breaks every stored program. See
//! [`feature_docs`] for the authoritative index → name → formula table.

use crate::bnb::SearchState;
use crate::milp::MilpInstance;
use crate::simplex::{BasisStatus, LpResult, LpStatus, FEAS_TOL};

/// Width of a feature row.
pub const NUM_FEATURES: usize = 91;

/// Smoothing constant for every guarded division in this module.
pub const EPS: f64 = 1e-8;

/// Feature columns whose spread is below this are zeroed instead of scaled.
pub const NORMALIZE_RANGE_TOL: f64 = 1e-12;

/// Instance-level quantities that never change between nodes.
#[derive(Debug, Clone)]
pub struct StaticFeatureCache {
    /// Column-major copy of the constraint matrix: for each variable, the
    /// rows it appears in and the coefficients there.
    pub col_rows: Vec<Vec<(u32, f64)>>,
    /// ℓ2 norm of each constraint column.
    pub col_norm: Vec<f64>,
    /// Nonzeros per row.
    pub row_nnz: Vec<u32>,
    /// Σ_k |a_jk| per row.
    pub row_abs_sum: Vec<f64>,
    /// Σ_k max(a_jk, 0) per row.
    pub row_pos_sum: Vec<f64>,
    /// Σ_k max(−a_jk, 0) per row.
    pub row_neg_sum: Vec<f64>,
    pub is_binary: Vec<bool>,
    /// Static feature block per variable: indices 19–36 and 55–66.
    static_block: Vec<[f64; 30]>,
    /// (mean, std, min, max) of row degrees per variable, reused as the
    /// denominators of the dynamic-degree ratios.
    degree_stats: Vec<[f64; 4]>,
}

/// count / sum / mean / population-std / min / max of a value stream;
/// an empty stream yields all zeros.
#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    count: f64,
    sum: f64,
    mean: f64,
    std: f64,
    min: f64,
    max: f64,
}

fn stats(values: impl Iterator<Item = f64> + Clone) -> Stats {
    let mut count = 0u64;
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values.clone() {
        count += 1;
        sum += v;
        min = min.min(v);
        max = max.max(v);
    }
    if count == 0 {
        return Stats::default();
    }
    let mean = sum / count as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
    Stats { count: count as f64, sum, mean, std: var.sqrt(), min, max }
}

impl StaticFeatureCache {
    pub fn new(instance: &MilpInstance) -> Self {
        let n = instance.n_vars();
        let m = instance.n_rows();
        let mut col_rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        let mut row_nnz = vec![0u32; m];
        let mut row_abs_sum = vec![0.0; m];
        let mut row_pos_sum = vec![0.0; m];
        let mut row_neg_sum = vec![0.0; m];
        for j in 0..m {
            let (cols, vals) = instance.rows.row(j);
            row_nnz[j] = cols.len() as u32;
            for (&c, &a) in cols.iter().zip(vals) {
                col_rows[c as usize].push((j as u32, a));
                row_abs_sum[j] += a.abs();
                row_pos_sum[j] += a.max(0.0);
                row_neg_sum[j] += (-a).max(0.0);
            }
        }

        let col_norm: Vec<f64> = col_rows
            .iter()
            .map(|rows| rows.iter().map(|&(_, a)| a * a).sum::<f64>().sqrt())
            .collect();
        let is_binary: Vec<bool> = (0..n)
            .map(|i| instance.is_integer[i] && instance.lower[i] == 0.0 && instance.upper[i] == 1.0)
            .collect();

        let mut static_block = Vec::with_capacity(n);
        let mut degree_stats = Vec::with_capacity(n);
        for i in 0..n {
            let rows = &col_rows[i];
            let c = instance.objective[i];
            let deg = stats(rows.iter().map(|&(j, _)| row_nnz[j as usize] as f64));
            let pos = stats(rows.iter().map(|&(_, a)| a).filter(|&a| a > 0.0));
            let neg = stats(rows.iter().map(|&(_, a)| a).filter(|&a| a < 0.0));

            // Row-side ratios, split by rhs sign and by coefficient sign.
            let rhs_ratio = |keep: fn(f64) -> bool| {
                minmax(rows.iter().filter_map(|&(j, a)| {
                    let b = instance.rhs[j as usize];
                    keep(b).then(|| a / (b.abs() + EPS))
                }))
            };
            let (rhs_pos_min, rhs_pos_max) = rhs_ratio(|b| b > 0.0);
            let (rhs_neg_min, rhs_neg_max) = rhs_ratio(|b| b < 0.0);

            let one_to_all = |coef_pos: bool, denom: &[f64]| {
                minmax(rows.iter().filter_map(|&(j, a)| {
                    if (a > 0.0) == coef_pos && a != 0.0 {
                        Some(a.abs() / (denom[j as usize] + EPS))
                    } else {
                        None
                    }
                }))
            };
            let (pp_min, pp_max) = one_to_all(true, &row_pos_sum);
            let (pn_min, pn_max) = one_to_all(true, &row_neg_sum);
            let (np_min, np_max) = one_to_all(false, &row_pos_sum);
            let (nn_min, nn_max) = one_to_all(false, &row_neg_sum);

            static_block.push([
                c,                 // 19
                c.max(0.0),        // 20
                (-c).max(0.0),     // 21
                rows.len() as f64, // 22
                deg.mean,          // 23
                deg.std,           // 24
                deg.min,           // 25
                deg.max,           // 26
                pos.count,         // 27
                pos.mean,          // 28
                pos.std,           // 29
                pos.min,           // 30
                pos.max,           // 31
                neg.count,         // 32
                neg.mean,          // 33
                neg.std,           // 34
                neg.min,           // 35
                neg.max,           // 36
                rhs_pos_min,       // 55
                rhs_pos_max,       // 56
                rhs_neg_min,       // 57
                rhs_neg_max,       // 58
                pp_min,            // 59
                pp_max,            // 60
                pn_min,            // 61
                pn_max,            // 62
                np_min,            // 63
                np_max,            // 64
                nn_min,            // 65
                nn_max,            // 66
            ]);
            degree_stats.push([deg.mean, deg.std, deg.min, deg.max]);
        }

        Self {
            col_rows,
            col_norm,
            row_nnz,
            row_abs_sum,
            row_pos_sum,
            row_neg_sum,
            is_binary,
            static_block,
            degree_stats,
        }
    }
}

fn minmax(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut any = false;
    for v in values {
        any = true;
        min = min.min(v);
        max = max.max(v);
    }
    if any { (min, max) } else { (0.0, 0.0) }
}

/// Everything about the node the feature extractor can see.
pub struct NodeContext<'a> {
    pub instance: &'a MilpInstance,
    /// Local (node) bounds, already including all branching changes.
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    pub lp: &'a LpResult,
    pub state: &'a SearchState,
    /// Rows binding at the node LP optimum (slack ≤ 1e-7).
    pub active_rows: Vec<bool>,
}

impl<'a> NodeContext<'a> {
    pub fn new(
        instance: &'a MilpInstance,
        lower: &'a [f64],
        upper: &'a [f64],
        lp: &'a LpResult,
        state: &'a SearchState,
    ) -> Self {
        assert_eq!(lp.status, LpStatus::Optimal, "feature extraction needs an optimal LP");
        let activity = instance.row_activity(&lp.x);
        let active_rows = activity
            .iter()
            .zip(&instance.rhs)
            .map(|(&ax, &b)| b - ax <= FEAS_TOL)
            .collect();
        Self { instance, lower, upper, lp, state, active_rows }
    }
}

/// Row-major `candidates × NUM_FEATURES` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub values: Vec<f64>,
    pub candidate_indices: Vec<usize>,
    pub normalized: bool,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.candidate_indices.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * NUM_FEATURES..(r + 1) * NUM_FEATURES]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * NUM_FEATURES + c]
    }
}

/// Computes the raw (unnormalized) feature matrix for `candidates`.
pub fn extract_features(
    ctx: &NodeContext,
    cache: &StaticFeatureCache,
    candidates: &[usize],
) -> FeatureMatrix {
    assert!(!candidates.is_empty(), "feature extraction needs at least one candidate");
    let inst = ctx.instance;
    let lp = ctx.lp;
    let state = ctx.state;

    // Per-row |a_j·| mass restricted to candidate columns, for the
    // candidate-normalized weighting scheme.
    let mut row_cand_abs = vec![0.0; inst.n_rows()];
    for &i in candidates {
        for &(j, a) in &cache.col_rows[i] {
            row_cand_abs[j as usize] += a.abs();
        }
    }

    let mut values = Vec::with_capacity(candidates.len() * NUM_FEATURES);
    for &i in candidates {
        let mut f = [0.0f64; NUM_FEATURES];
        let c = inst.objective[i];
        let x = lp.x[i];
        let frac = x - x.floor();
        let rows = &cache.col_rows[i];

        f[0] = c;
        if cache.is_binary[i] {
            f[1] = 1.0;
        } else if inst.is_integer[i] {
            f[2] = 1.0;
        } else {
            f[4] = 1.0;
        }
        // f[3] (implicit integer) is reserved and always 0.
        f[5] = if ctx.lower[i].is_finite() { 1.0 } else { 0.0 };
        f[6] = if ctx.upper[i].is_finite() { 1.0 } else { 0.0 };
        f[7] = lp.reduced_costs[i] / (EPS + cache.col_norm[i]);
        f[8] = x;
        f[9] = frac;
        f[10] = if (x - ctx.lower[i]).abs() < FEAS_TOL { 1.0 } else { 0.0 };
        f[11] = if (x - ctx.upper[i]).abs() < FEAS_TOL { 1.0 } else { 0.0 };
        f[12] = state.scaled_age(i);
        f[13] = state.incumbent_value(i);
        f[14] = state.historical_average(i);
        match lp.basis[i] {
            BasisStatus::Lower => f[15] = 1.0,
            BasisStatus::Basic => f[16] = 1.0,
            BasisStatus::Upper => f[17] = 1.0,
            BasisStatus::Zero => f[18] = 1.0,
        }
        f[19..37].copy_from_slice(&cache.static_block[i][..18]);
        f[37] = frac;
        f[38] = 1.0 - frac;

        let pc_up = state.pseudocost_up(i);
        let pc_down = state.pseudocost_down(i);
        f[39] = pc_up;
        f[40] = pc_down;
        f[41] = pc_up / (pc_down + EPS);
        f[42] = pc_up + pc_down;
        f[43] = pc_up * pc_down;
        f[44] = state.cutoff_up[i] as f64;
        f[45] = state.cutoff_down[i] as f64;
        let attempts_up = state.cutoff_up[i] + state.pc_up_count[i];
        let attempts_down = state.cutoff_down[i] + state.pc_down_count[i];
        f[46] = state.cutoff_up[i] as f64 / (attempts_up as f64 + EPS);
        f[47] = state.cutoff_down[i] as f64 / (attempts_down as f64 + EPS);

        let active = |&&(j, _): &&(u32, f64)| ctx.active_rows[j as usize];
        let dyn_deg =
            stats(rows.iter().filter(active).map(|&(j, _)| cache.row_nnz[j as usize] as f64));
        f[48] = dyn_deg.mean;
        f[49] = dyn_deg.std;
        f[50] = dyn_deg.min;
        f[51] = dyn_deg.max;
        let [s_mean, _, s_min, s_max] = cache.degree_stats[i];
        f[52] = dyn_deg.mean / (s_mean + EPS);
        f[53] = dyn_deg.min / (s_min + EPS);
        f[54] = dyn_deg.max / (s_max + EPS);

        f[55..67].copy_from_slice(&cache.static_block[i][18..]);

        let weighted = |w: &dyn Fn(usize) -> f64| {
            stats(rows.iter().filter(active).map(|&(j, _)| w(j as usize)))
        };
        let unit = weighted(&|_| 1.0);
        let inv_row = weighted(&|j| 1.0 / (cache.row_abs_sum[j] + EPS));
        let inv_cand = weighted(&|j| 1.0 / (row_cand_abs[j] + EPS));
        let dual = weighted(&|j| lp.duals[j].abs());
        for (base, st) in [(67, unit), (73, inv_row), (79, inv_cand), (85, dual)] {
            f[base] = st.count;
            f[base + 1] = st.sum;
            f[base + 2] = st.mean;
            f[base + 3] = st.std;
            f[base + 4] = st.min;
            f[base + 5] = st.max;
        }

        values.extend_from_slice(&f);
    }

    FeatureMatrix { values, candidate_indices: candidates.to_vec(), normalized: false }
}

/// Min–max scales every column to [0,1] across the node's candidates;
/// columns with spread ≤ 1e-12 collapse to 0.
pub fn normalize_per_node(mut m: FeatureMatrix) -> FeatureMatrix {
    assert!(!m.normalized, "feature matrix is already normalized");
    let rows = m.n_rows();
    assert!(rows >= 1, "cannot normalize an empty feature matrix");
    for c in 0..NUM_FEATURES {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..rows {
            let v = m.values[r * NUM_FEATURES + c];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let range = hi - lo;
        for r in 0..rows {
            let v = &mut m.values[r * NUM_FEATURES + c];
            *v = if range > NORMALIZE_RANGE_TOL { (*v - lo) / range } else { 0.0 };
        }
    }
    m.normalized = true;
    m
}

/// One entry of the feature reference table.
#[derive(Debug, Clone, Copy)]
pub struct FeatureDoc {
    pub index: usize,
    pub name: &'static str,
    pub formula: &'static str,
}

macro_rules! docs {
    ($(($idx:expr, $name:expr, $formula:expr)),* $(,)?) => {
        &[ $(FeatureDoc { index: $idx, name: $name, formula: $formula }),* ]
    };
}

/// The authoritative index → name → formula table (91 entries). `eps` is
/// 1e-8 throughout; "active" means the row binds at the node LP optimum.
pub fn feature_docs() -> &'static [FeatureDoc] {
    docs![
        (0, "obj_coef", "objective coefficient c_i"),
        (1, "is_binary", "1 if integer with original bounds [0,1]"),
        (2, "is_general_integer", "1 if integer and not binary"),
        (3, "is_implicit_integer", "reserved, always 0"),
        (4, "is_continuous", "1 if not integer"),
        (5, "has_lower_bound", "1 if local lower bound is finite"),
        (6, "has_upper_bound", "1 if local upper bound is finite"),
        (7, "normalized_reduced_cost", "reduced_cost_i / (eps + ||A_col_i||_2)"),
        (8, "lp_value", "x*_i at the node LP optimum"),
        (9, "fractionality", "x*_i - floor(x*_i)"),
        (10, "at_lower_bound", "1 if |x*_i - lower_i| < 1e-7 (local bounds)"),
        (11, "at_upper_bound", "1 if |x*_i - upper_i| < 1e-7 (local bounds)"),
        (12, "scaled_age", "(total_lp_iters - last_basic_i) / total_lp_iters"),
        (13, "incumbent_value", "value of x_i in the incumbent (0 if none)"),
        (14, "historical_mean_value", "mean of x_i over improving solutions (0 if none)"),
        (15, "basis_at_lower", "1 if nonbasic at lower bound"),
        (16, "basis_basic", "1 if basic"),
        (17, "basis_at_upper", "1 if nonbasic at upper bound"),
        (18, "basis_free_zero", "1 if nonbasic free at zero"),
        (19, "cost_raw", "c_i"),
        (20, "cost_pos", "max(c_i, 0)"),
        (21, "cost_neg", "max(-c_i, 0)"),
        (22, "row_count", "number of rows containing x_i"),
        (23, "degree_mean", "mean of row nnz over rows containing x_i"),
        (24, "degree_std", "population std of row nnz over rows containing x_i"),
        (25, "degree_min", "min row nnz over rows containing x_i"),
        (26, "degree_max", "max row nnz over rows containing x_i"),
        (27, "pos_coef_count", "count of a_ji > 0"),
        (28, "pos_coef_mean", "mean of positive a_ji"),
        (29, "pos_coef_std", "population std of positive a_ji"),
        (30, "pos_coef_min", "min of positive a_ji"),
        (31, "pos_coef_max", "max of positive a_ji"),
        (32, "neg_coef_count", "count of a_ji < 0"),
        (33, "neg_coef_mean", "mean of negative a_ji (raw values)"),
        (34, "neg_coef_std", "population std of negative a_ji"),
        (35, "neg_coef_min", "min of negative a_ji"),
        (36, "neg_coef_max", "max of negative a_ji"),
        (37, "frac", "x*_i - floor(x*_i)"),
        (38, "one_minus_frac", "1 - frac"),
        (39, "pseudocost_up", "mean per-unit objective gain over up branches"),
        (40, "pseudocost_down", "mean per-unit objective gain over down branches"),
        (41, "pseudocost_ratio", "pseudocost_up / (pseudocost_down + eps)"),
        (42, "pseudocost_sum", "pseudocost_up + pseudocost_down"),
        (43, "pseudocost_product", "pseudocost_up * pseudocost_down"),
        (44, "cutoff_up_count", "up children infeasible or pruned"),
        (45, "cutoff_down_count", "down children infeasible or pruned"),
        (46, "cutoff_up_rate", "cutoff_up / (cutoff_up + pc_up_count + eps)"),
        (47, "cutoff_down_rate", "cutoff_down / (cutoff_down + pc_down_count + eps)"),
        (48, "active_degree_mean", "mean row nnz over active rows containing x_i"),
        (49, "active_degree_std", "population std over active rows containing x_i"),
        (50, "active_degree_min", "min row nnz over active rows containing x_i"),
        (51, "active_degree_max", "max row nnz over active rows containing x_i"),
        (52, "active_degree_mean_ratio", "active_degree_mean / (degree_mean + eps)"),
        (53, "active_degree_min_ratio", "active_degree_min / (degree_min + eps)"),
        (54, "active_degree_max_ratio", "active_degree_max / (degree_max + eps)"),
        (55, "pos_rhs_ratio_min", "min over rows with b_j > 0 of a_ji / (|b_j| + eps)"),
        (56, "pos_rhs_ratio_max", "max over rows with b_j > 0 of a_ji / (|b_j| + eps)"),
        (57, "neg_rhs_ratio_min", "min over rows with b_j < 0 of a_ji / (|b_j| + eps)"),
        (58, "neg_rhs_ratio_max", "max over rows with b_j < 0 of a_ji / (|b_j| + eps)"),
        (59, "pos_coef_pos_sum_min", "min over a_ji > 0 of a_ji / (P_j + eps), P_j = sum max(a_jk,0)"),
        (60, "pos_coef_pos_sum_max", "max over a_ji > 0 of a_ji / (P_j + eps)"),
        (61, "pos_coef_neg_sum_min", "min over a_ji > 0 of a_ji / (N_j + eps), N_j = sum max(-a_jk,0)"),
        (62, "pos_coef_neg_sum_max", "max over a_ji > 0 of a_ji / (N_j + eps)"),
        (63, "neg_coef_pos_sum_min", "min over a_ji < 0 of |a_ji| / (P_j + eps)"),
        (64, "neg_coef_pos_sum_max", "max over a_ji < 0 of |a_ji| / (P_j + eps)"),
        (65, "neg_coef_neg_sum_min", "min over a_ji < 0 of |a_ji| / (N_j + eps)"),
        (66, "neg_coef_neg_sum_max", "max over a_ji < 0 of |a_ji| / (N_j + eps)"),
        (67, "active_unit_count", "count of active rows containing x_i (weight 1)"),
        (68, "active_unit_sum", "sum of unit weights over active rows"),
        (69, "active_unit_mean", "mean of unit weights over active rows"),
        (70, "active_unit_std", "population std of unit weights over active rows"),
        (71, "active_unit_min", "min of unit weights over active rows"),
        (72, "active_unit_max", "max of unit weights over active rows"),
        (73, "active_inv_row_count", "count with weight w_j = 1/(sum_k |a_jk| + eps)"),
        (74, "active_inv_row_sum", "sum of w_j = 1/(sum_k |a_jk| + eps) over active rows"),
        (75, "active_inv_row_mean", "mean of w_j over active rows"),
        (76, "active_inv_row_std", "population std of w_j over active rows"),
        (77, "active_inv_row_min", "min of w_j over active rows"),
        (78, "active_inv_row_max", "max of w_j over active rows"),
        (79, "active_inv_cand_count", "count with w_j = 1/(sum over candidates |a_jk| + eps)"),
        (80, "active_inv_cand_sum", "sum of candidate-normalized weights over active rows"),
        (81, "active_inv_cand_mean", "mean of candidate-normalized weights"),
        (82, "active_inv_cand_std", "population std of candidate-normalized weights"),
        (83, "active_inv_cand_min", "min of candidate-normalized weights"),
        (84, "active_inv_cand_max", "max of candidate-normalized weights"),
        (85, "active_dual_count", "count with weight |y_j| (dual value of the row)"),
        (86, "active_dual_sum", "sum of |y_j| over active rows"),
        (87, "active_dual_mean", "mean of |y_j| over active rows"),
        (88, "active_dual_std", "population std of |y_j| over active rows"),
        (89, "active_dual_min", "min of |y_j| over active rows"),
        (90, "active_dual_max", "max of |y_j| over active rows"),
    ]
}

/// Plain-text rendering of [`feature_docs`] (used by reports and prompts).
pub fn feature_docs_table() -> String {
    let mut out = String::from("index  name                      formula\n");
    for d in feature_docs() {
        out.push_str(&format!("{:<5}  {:<24}  {}\n", d.index, d.name, d.formula));
    }
    out
}
