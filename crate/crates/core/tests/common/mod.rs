//! Shared test support: independent reference implementations used to audit
//! the solver, plus deterministic random-instance builders.
//!
//! The LP oracle here is deliberately a different algorithm family from the
//! library's solver: a classical full-tableau simplex on the standard
//! equality form, with every bound written as an explicit row and free
//! variables split as x = x⁺ − x⁻. Slow and memory-hungry, but short enough
//! to audit by eye — which is the point.

#![allow(dead_code)]

use branchlab::milp::MilpInstance;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub status: OracleStatus,
    pub x: Vec<f64>,
    pub objective: f64,
}

const TOL: f64 = 1e-9;

/// Textbook simplex for `min c·x, rows·x ≤ b, lower ≤ x ≤ upper`.
///
/// Standard form: x = x⁺ − x⁻ (both ≥ 0), one slack per inequality, bounds
/// materialized as extra inequality rows, artificial variables for rows with
/// negative right-hand side, two phases, Bland's rule throughout.
pub fn naive_solve_lp(
    c: &[f64],
    rows: &[Vec<f64>],
    b: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> OracleResult {
    let n = c.len();
    let mut ineq: Vec<(Vec<f64>, f64)> = Vec::new();
    for (a, &beta) in rows.iter().zip(b) {
        ineq.push((a.clone(), beta));
    }
    for i in 0..n {
        if upper[i].is_finite() {
            let mut a = vec![0.0; n];
            a[i] = 1.0;
            ineq.push((a, upper[i]));
        }
        if lower[i].is_finite() {
            let mut a = vec![0.0; n];
            a[i] = -1.0;
            ineq.push((a, -lower[i]));
        }
    }
    let m = ineq.len();
    let n_real = 2 * n + m; // x⁺, x⁻, slacks
    let mut needs_art: Vec<bool> = Vec::with_capacity(m);
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs: Vec<f64> = Vec::with_capacity(m);
    for (j, (a, beta)) in ineq.iter().enumerate() {
        let neg = *beta < 0.0;
        let sign = if neg { -1.0 } else { 1.0 };
        let mut row = vec![0.0; n_real];
        for i in 0..n {
            row[i] = sign * a[i];
            row[n + i] = -sign * a[i];
        }
        row[2 * n + j] = sign;
        t.push(row);
        rhs.push(sign * *beta);
        needs_art.push(neg);
    }
    let n_art = needs_art.iter().filter(|&&x| x).count();
    let n_total = n_real + n_art;
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut next_art = n_real;
    for j in 0..m {
        for row in t.iter_mut() {
            row.resize(n_total, 0.0);
        }
        if needs_art[j] {
            t[j][next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(2 * n + j);
        }
    }

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        let mut costs = vec![0.0; n_total];
        for k in n_real..n_total {
            costs[k] = 1.0;
        }
        run_phase(&mut t, &mut rhs, &mut basis, &costs, n_total);
        let obj: f64 = basis.iter().zip(&rhs).map(|(&k, &v)| costs[k] * v).sum();
        if obj > 1e-7 {
            return OracleResult {
                status: OracleStatus::Infeasible,
                x: vec![],
                objective: f64::INFINITY,
            };
        }
        // Kick any degenerate artificial out of the basis, or drop its row
        // as redundant.
        let mut j = 0;
        while j < t.len() {
            if basis[j] >= n_real {
                if let Some(k) = (0..n_real).find(|&k| t[j][k].abs() > TOL) {
                    pivot(&mut t, &mut rhs, &mut basis, j, k);
                } else {
                    t.remove(j);
                    rhs.remove(j);
                    basis.remove(j);
                    continue;
                }
            }
            j += 1;
        }
    }

    // Phase 2 over the real columns only.
    let mut costs = vec![0.0; n_total];
    for i in 0..n {
        costs[i] = c[i];
        costs[n + i] = -c[i];
    }
    let unbounded = !run_phase(&mut t, &mut rhs, &mut basis, &costs, n_real);
    if unbounded {
        return OracleResult {
            status: OracleStatus::Unbounded,
            x: vec![],
            objective: f64::NEG_INFINITY,
        };
    }

    let mut z = vec![0.0; n_total];
    for (j, &k) in basis.iter().enumerate() {
        z[k] = rhs[j];
    }
    let x: Vec<f64> = (0..n).map(|i| z[i] - z[n + i]).collect();
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    OracleResult { status: OracleStatus::Optimal, x, objective }
}

/// Bland-rule simplex iterations until optimal (true) or unbounded (false).
/// Columns at `col_limit` and beyond may not enter.
fn run_phase(
    t: &mut Vec<Vec<f64>>,
    rhs: &mut Vec<f64>,
    basis: &mut Vec<usize>,
    costs: &[f64],
    col_limit: usize,
) -> bool {
    for _ in 0..100_000 {
        // Reduced costs from scratch each iteration: d_k = c_k − c_B·T_k.
        let entering = (0..col_limit).find(|&k| {
            let d: f64 = costs[k]
                - basis.iter().enumerate().map(|(j, &bk)| costs[bk] * t[j][k]).sum::<f64>();
            d < -TOL
        });
        let Some(k) = entering else { return true };
        let mut leave: Option<(usize, f64)> = None;
        for j in 0..t.len() {
            if t[j][k] > TOL {
                let ratio = rhs[j] / t[j][k];
                match leave {
                    None => leave = Some((j, ratio)),
                    Some((lj, lr)) => {
                        if ratio < lr - TOL || (ratio < lr + TOL && basis[j] < basis[lj]) {
                            leave = Some((j, ratio));
                        }
                    }
                }
            }
        }
        let Some((j, _)) = leave else { return false };
        pivot(t, rhs, basis, j, k);
    }
    panic!("oracle simplex exceeded its iteration budget");
}

fn pivot(t: &mut [Vec<f64>], rhs: &mut [f64], basis: &mut [usize], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    rhs[row] /= p;
    for j in 0..t.len() {
        if j == row {
            continue;
        }
        let f = t[j][col];
        if f == 0.0 {
            continue;
        }
        for k in 0..t[j].len() {
            let delta = f * t[row][k];
            t[j][k] -= delta;
        }
        rhs[j] -= f * rhs[row];
    }
    basis[row] = col;
}

/// Exhaustive optimum of a pure-binary instance: every assignment is checked
/// against every row. Returns `None` when no assignment is feasible.
pub fn enumerate_binary_optimum(inst: &MilpInstance) -> Option<(f64, Vec<f64>)> {
    let n = inst.n_vars();
    assert!(n <= 20, "enumeration is exponential; keep tests tiny");
    assert!(
        (0..n).all(|i| inst.is_integer[i] && inst.lower[i] == 0.0 && inst.upper[i] == 1.0),
        "enumeration oracle expects pure binary instances"
    );
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u64..(1 << n) {
        let x: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
        let activity = inst.row_activity(&x);
        if activity.iter().zip(&inst.rhs).any(|(&ax, &b)| ax > b + 1e-9) {
            continue;
        }
        let obj = inst.objective_value(&x);
        if best.as_ref().is_none_or(|(bo, _)| obj < *bo) {
            best = Some((obj, x));
        }
    }
    best
}

/// Deterministic RNG for test-instance construction.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random pure-binary MILP with small integer data: up to `max_vars` columns
/// and `max_rows` rows. Roughly a quarter come out infeasible.
pub fn random_binary_milp(r: &mut ChaCha8Rng, max_vars: usize, max_rows: usize) -> MilpInstance {
    let n = r.gen_range(2..=max_vars);
    let m = r.gen_range(1..=max_rows);
    let c: Vec<f64> = (0..n).map(|_| r.gen_range(-10..=10) as f64).collect();
    let mut rows = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        let mut a: Vec<f64> = (0..n).map(|_| r.gen_range(-6..=6) as f64).collect();
        if a.iter().all(|&v| v == 0.0) {
            a[r.gen_range(0..n)] = 1.0;
        }
        // Right-hand sides biased positive so many instances are feasible,
        // with enough negative ones to exercise infeasibility handling.
        b.push(r.gen_range(-4..=10) as f64);
        rows.push(a);
    }
    MilpInstance::from_dense(c, &rows, b, vec![0.0; n], vec![1.0; n], vec![true; n]).unwrap()
}

/// Random bounded LP (no integrality) with occasional infinite upper bounds
/// and negative lower bounds.
pub fn random_lp(r: &mut ChaCha8Rng) -> MilpInstance {
    let n = r.gen_range(1..=6);
    let m = r.gen_range(1..=6);
    let c: Vec<f64> = (0..n).map(|_| r.gen_range(-5..=5) as f64).collect();
    let mut rows = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        let mut a: Vec<f64> = (0..n).map(|_| r.gen_range(-5..=5) as f64).collect();
        if a.iter().all(|&v| v == 0.0) {
            a[r.gen_range(0..n)] = 1.0;
        }
        b.push(r.gen_range(-3..=8) as f64);
        rows.push(a);
    }
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for _ in 0..n {
        let lo = r.gen_range(-3..=0) as f64;
        let hi = if r.gen_bool(0.15) {
            f64::INFINITY
        } else {
            lo + r.gen_range(1..=6) as f64
        };
        lower.push(lo);
        upper.push(hi);
    }
    MilpInstance::from_dense(c, &rows, b, lower, upper, vec![false; n]).unwrap()
}

/// Dense copy of an instance's rows for oracle consumption.
pub fn dense_rows(inst: &MilpInstance) -> Vec<Vec<f64>> {
    (0..inst.n_rows())
        .map(|j| {
            let (cols, vals) = inst.rows.row(j);
            let mut row = vec![0.0; inst.n_vars()];
            for (&cidx, &v) in cols.iter().zip(vals) {
                row[cidx as usize] = v;
            }
            row
        })
        .collect()
}
