//! Two-phase primal simplex over a dense tableau.
//!
//! Bounded-variable variant: structural variables and slacks may be nonbasic
//! at their lower bound, at their upper bound, or (for free variables) at
//! zero. Phase 1 introduces one artificial variable per violated row and
//! minimizes the total artificial mass; phase 2 minimizes the real objective.
//! Pricing is Dantzig's rule (largest reduced-cost violation, lowest index on
//! ties) while pivots make progress, falling back to Bland's rule (lowest
//! eligible index) during degenerate runs — Bland's rule is the anti-cycling
//! device, applied exactly where cycling is possible. Both rules are
//! deterministic, so the whole pivot path is a pure function of the input.
//!
//! There is no warm starting and no factorization reuse across calls: every
//! call builds its tableau from scratch. That is adequate at desk scale (up
//! to roughly 2000×2000) and keeps the solve path a pure function of its
//! inputs.
//!
//! Long pivot runs accumulate floating-point drift in the eliminated
//! tableau, so the solver periodically refactorizes: it recomputes
//! `B⁻¹[A | I | Σ]`, the basic values, and the reduced costs exactly from
//! the current basis. Optimality and unboundedness are only ever declared
//! on a freshly refactorized tableau.

use crate::milp::MilpInstance;
use thiserror::Error;

/// Primal feasibility tolerance (bounds and row residuals).
pub const FEAS_TOL: f64 = 1e-7;
/// Reduced-cost optimality tolerance.
const OPT_TOL: f64 = 1e-9;
/// Minimum acceptable pivot magnitude; entries at or below this never block
/// the ratio test or serve as pivots.
const PIVOT_TOL: f64 = 1e-11;

/// Pivots smaller than this are only trusted on a freshly refactorized
/// tableau; on drifted numbers they may be exact zeros in disguise.
const SMALL_PIVOT: f64 = 1e-7;

/// Consecutive zero-step pivots before pricing falls back from Dantzig to
/// Bland's rule, which guarantees escape from a degenerate vertex.
const DEGEN_SWITCH: u64 = 32;
/// Pivot count between drift-clearing refactorizations.
const REFRESH_INTERVAL: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Nonbasic/basic classification of a structural variable at the LP optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisStatus {
    /// Nonbasic at its lower bound.
    Lower,
    /// In the basis.
    Basic,
    /// Nonbasic at its upper bound.
    Upper,
    /// Free variable nonbasic at zero.
    Zero,
}

/// Outcome of one LP-relaxation solve.
#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    /// Structural variable values (meaningful when `status == Optimal`).
    pub x: Vec<f64>,
    /// `c'x` at the returned point; `+inf` for infeasible, `-inf` for unbounded.
    pub objective: f64,
    /// Row duals `y = c_B' B⁻¹` (for this ≤-form minimization, `y_i ≤ 0` on
    /// binding rows at optimality; inactive rows have `y_i = 0`).
    pub duals: Vec<f64>,
    /// Reduced costs of the structural variables; exactly 0 for basic ones.
    pub reduced_costs: Vec<f64>,
    pub basis: Vec<BasisStatus>,
    /// Simplex iterations used (pivots plus bound flips, both phases).
    pub iterations: u64,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("numerical breakdown: {detail}")]
    NumericalBreakdown { detail: String },
    #[error("simplex iteration safety cap exceeded after {iterations} iterations")]
    IterationLimit { iterations: u64 },
}

/// Solves the LP relaxation of `instance` under node-local bounds.
///
/// `lower`/`upper` replace the instance's bound vectors (branch-and-bound
/// tightens them per node); integrality is ignored. An inverted box
/// (`lower[j] > upper[j]`) is reported as `Infeasible`, not an error.
pub fn solve_lp_relaxation(
    instance: &MilpInstance,
    lower: &[f64],
    upper: &[f64],
) -> Result<LpResult, LpError> {
    match solve_capped(instance, lower, upper, u64::MAX)? {
        CappedSolve::Done(res) => Ok(res),
        CappedSolve::CapHit { iterations, .. } => Err(LpError::IterationLimit { iterations }),
    }
}

/// A solve that may stop early at an iteration cap (used by strong-branching
/// probes, which only need a bound estimate).
#[derive(Debug)]
pub enum CappedSolve {
    Done(LpResult),
    /// The cap fired before optimality. `objective` is `c'x` at the current
    /// point — an upper estimate of the true minimum when `feasible` is true
    /// (phase 2 descends monotonically), and meaningless while still in
    /// phase 1 (`feasible == false`).
    CapHit { objective: f64, feasible: bool, iterations: u64 },
}

/// Like [`solve_lp_relaxation`] but stops after `iteration_cap` simplex
/// iterations. Even `u64::MAX` is internally limited by a generous safety cap
/// that converts a runaway solve into an error rather than a wrong answer.
pub fn solve_capped(
    instance: &MilpInstance,
    lower: &[f64],
    upper: &[f64],
    iteration_cap: u64,
) -> Result<CappedSolve, LpError> {
    let n = instance.n_vars();
    let m = instance.n_rows();
    debug_assert_eq!(lower.len(), n);
    debug_assert_eq!(upper.len(), n);

    // Inverted boxes come from branching on already-fixed variables; they are
    // a legitimate "this subproblem is empty" signal.
    if lower.iter().zip(upper).any(|(&l, &u)| l > u) {
        return Ok(CappedSolve::Done(infeasible_result(n, m)));
    }

    let safety = 200 * (n as u64 + m as u64) + 10_000;
    let cap = iteration_cap.min(safety);
    let mut tab = Tableau::build(instance, lower, upper);

    // Phase 1: drive artificial mass to zero (skipped when the crash point is
    // already feasible).
    if tab.n_art > 0 {
        match tab.pivot_loop(cap, safety, Phase::One)? {
            LoopExit::Optimal => {
                if tab.infeasibility() > FEAS_TOL {
                    return Ok(CappedSolve::Done(infeasible_result(n, m)));
                }
            }
            LoopExit::CapHit => {
                return Ok(CappedSolve::CapHit {
                    objective: tab.structural_objective(),
                    feasible: false,
                    iterations: tab.iterations,
                });
            }
            LoopExit::Unbounded => {
                // Phase 1 minimizes a sum of nonnegative variables; an
                // unbounded ray can only be numerical noise.
                return Err(LpError::NumericalBreakdown {
                    detail: "unbounded ray in phase 1".into(),
                });
            }
        }
        tab.lock_artificials();
    }

    tab.load_phase2_costs();
    match tab.pivot_loop(cap, safety, Phase::Two)? {
        LoopExit::Optimal => tab.extract(instance).map(CappedSolve::Done),
        LoopExit::CapHit => Ok(CappedSolve::CapHit {
            objective: tab.structural_objective(),
            feasible: true,
            iterations: tab.iterations,
        }),
        LoopExit::Unbounded => Ok(CappedSolve::Done(LpResult {
            status: LpStatus::Unbounded,
            x: vec![0.0; n],
            objective: f64::NEG_INFINITY,
            duals: vec![0.0; m],
            reduced_costs: vec![0.0; n],
            basis: vec![BasisStatus::Lower; n],
            iterations: tab.iterations,
        })),
    }
}

fn infeasible_result(n: usize, m: usize) -> LpResult {
    LpResult {
        status: LpStatus::Infeasible,
        x: vec![0.0; n],
        objective: f64::INFINITY,
        duals: vec![0.0; m],
        reduced_costs: vec![0.0; n],
        basis: vec![BasisStatus::Lower; n],
        iterations: 0,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColState {
    AtLower,
    AtUpper,
    FreeZero,
    Basic,
}

enum LoopExit {
    Optimal,
    Unbounded,
    CapHit,
}

/// Dense simplex tableau with columns ordered structurals, slacks,
/// artificials.
struct Tableau<'a> {
    inst: &'a MilpInstance,
    nst: usize,
    m: usize,
    ncols: usize,
    n_art: usize,
    /// Row-major `m × ncols` tableau `B⁻¹ [A | I | Σ]`.
    t: Vec<f64>,
    /// Pristine row-major copy of `[A | I | Σ]` (artificial columns are
    /// `−e_row`), used by refactorization.
    orig: Vec<f64>,
    /// Reduced-cost row for the current phase.
    d: Vec<f64>,
    /// Per-column bounds (structurals: node-local; slacks `[0, ∞)`;
    /// artificials `[0, ∞)`, locked to `[0, 0]` after phase 1).
    lo: Vec<f64>,
    hi: Vec<f64>,
    state: Vec<ColState>,
    /// Basic column of each row.
    basis: Vec<u32>,
    /// Values of the basic variables, row-aligned.
    xb: Vec<f64>,
    iterations: u64,
    /// Iteration count at the last refactorization (or build).
    last_refresh: u64,
    /// Diagnostic split of `iterations`: bound flips and zero-step pivots.
    flips: u64,
    degen_pivots: u64,
    /// Length of the current run of consecutive zero-step pivots; at
    /// `DEGEN_SWITCH` pricing falls back to Bland's rule until progress.
    degen_run: u64,
}

impl<'a> Tableau<'a> {
    fn build(inst: &'a MilpInstance, lower: &[f64], upper: &[f64]) -> Self {
        let nst = inst.n_vars();
        let m = inst.n_rows();

        // Crash heuristic: start each bounded structural at whichever bound
        // minimizes its total row-activity contribution. For pure covering
        // rows (all-negative coefficients) this starts at the upper bound and
        // usually makes the whole crash point feasible, skipping phase 1.
        let mut col_sum = vec![0.0f64; nst];
        for i in 0..m {
            let (cols, vals) = inst.rows.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                col_sum[c as usize] += v;
            }
        }
        let mut state = Vec::with_capacity(nst);
        let mut val = Vec::with_capacity(nst);
        for j in 0..nst {
            let (l, u) = (lower[j], upper[j]);
            let s = if l.is_finite() && u.is_finite() {
                if col_sum[j] < 0.0 { ColState::AtUpper } else { ColState::AtLower }
            } else if l.is_finite() {
                ColState::AtLower
            } else if u.is_finite() {
                ColState::AtUpper
            } else {
                ColState::FreeZero
            };
            val.push(match s {
                ColState::AtLower => l,
                ColState::AtUpper => u,
                _ => 0.0,
            });
            state.push(s);
        }

        // Row activities at the crash point decide which rows need an
        // artificial (negative initial slack).
        let activity = inst.row_activity(&val);
        let violated: Vec<usize> = (0..m).filter(|&i| inst.rhs[i] - activity[i] < 0.0).collect();
        let n_art = violated.len();
        let ncols = nst + m + n_art;

        let mut t = vec![0.0f64; m * ncols];
        let mut orig = vec![0.0f64; m * ncols];
        let mut basis = Vec::with_capacity(m);
        let mut xb = Vec::with_capacity(m);
        let mut art_of_row = vec![usize::MAX; m];
        for (k, &i) in violated.iter().enumerate() {
            art_of_row[i] = nst + m + k;
        }
        for i in 0..m {
            let slack = inst.rhs[i] - activity[i];
            let row = &mut t[i * ncols..(i + 1) * ncols];
            let orow = &mut orig[i * ncols..(i + 1) * ncols];
            let (cols, vals) = inst.rows.row(i);
            // Row i of B⁻¹[A | I | Σ]: the slack is basic on satisfied rows;
            // on violated rows the artificial (coefficient −1 in Σ) is basic,
            // which flips the row's sign so the basic column reads +1.
            let sign = if art_of_row[i] == usize::MAX { 1.0 } else { -1.0 };
            for (&c, &v) in cols.iter().zip(vals) {
                row[c as usize] = sign * v;
                orow[c as usize] = v;
            }
            row[nst + i] = sign;
            orow[nst + i] = 1.0;
            if art_of_row[i] == usize::MAX {
                basis.push((nst + i) as u32);
                xb.push(slack);
            } else {
                row[art_of_row[i]] = 1.0;
                orow[art_of_row[i]] = -1.0;
                basis.push(art_of_row[i] as u32);
                xb.push(-slack);
            }
        }

        let mut lo = Vec::with_capacity(ncols);
        let mut hi = Vec::with_capacity(ncols);
        lo.extend_from_slice(lower);
        hi.extend_from_slice(upper);
        lo.extend(std::iter::repeat(0.0).take(m + n_art));
        hi.extend(std::iter::repeat(f64::INFINITY).take(m + n_art));

        state.extend(std::iter::repeat(ColState::AtLower).take(m + n_art));
        for i in 0..m {
            state[basis[i] as usize] = ColState::Basic;
        }

        // Phase-1 reduced costs: cost 1 on artificials, eliminated over the
        // artificial-basic rows. (If there are none, this row is rebuilt by
        // `load_phase2_costs` before any pivoting.)
        let mut d = vec![0.0f64; ncols];
        for a in nst + m..ncols {
            d[a] = 1.0;
        }
        for i in 0..m {
            if basis[i] as usize >= nst + m {
                let row = &t[i * ncols..(i + 1) * ncols];
                for (dj, rj) in d.iter_mut().zip(row) {
                    *dj -= rj;
                }
            }
        }

        Self {
            inst,
            nst,
            m,
            ncols,
            n_art,
            t,
            orig,
            d,
            lo,
            hi,
            state,
            basis,
            xb,
            iterations: 0,
            last_refresh: 0,
            flips: 0,
            degen_pivots: 0,
            degen_run: 0,
        }
    }

    /// Pivots applied since the tableau was last exact.
    fn dirty(&self) -> bool {
        self.iterations > self.last_refresh
    }

    /// Refactorization: rebuilds `t = B⁻¹[A | I | Σ]`, the basic values
    /// `xb = B⁻¹(b − N·x_N)`, and the phase's reduced costs exactly from the
    /// current basis via Gauss–Jordan with partial pivoting. Clears all
    /// accumulated elimination drift.
    fn refresh(&mut self, phase: Phase) -> Result<(), LpError> {
        let m = self.m;
        let nc = self.ncols;
        if m == 0 {
            self.last_refresh = self.iterations;
            return Ok(());
        }
        // Augmented system [B | A_full | rhs_adj]; reducing B to the identity
        // leaves [I | B⁻¹A_full | new xb] with row k aligned to basis[k].
        let w = m + nc + 1;
        let mut aug = vec![0.0f64; m * w];
        for i in 0..m {
            let orow = &self.orig[i * nc..(i + 1) * nc];
            let arow = &mut aug[i * w..(i + 1) * w];
            for k in 0..m {
                arow[k] = orow[self.basis[k] as usize];
            }
            arow[m..m + nc].copy_from_slice(orow);
            let mut r = self.inst.rhs[i];
            for (j, &coef) in orow.iter().enumerate() {
                if coef != 0.0 && self.state[j] != ColState::Basic {
                    let xv = self.nonbasic_value(j);
                    if xv != 0.0 {
                        r -= coef * xv;
                    }
                }
            }
            arow[w - 1] = r;
        }
        for k in 0..m {
            let (mut piv_row, mut piv_abs) = (k, aug[k * w + k].abs());
            for i in (k + 1)..m {
                let v = aug[i * w + k].abs();
                if v > piv_abs {
                    piv_row = i;
                    piv_abs = v;
                }
            }
            if piv_abs < 1e-12 {
                return Err(LpError::NumericalBreakdown {
                    detail: "singular basis at refactorization".into(),
                });
            }
            if piv_row != k {
                for j in 0..w {
                    aug.swap(k * w + j, piv_row * w + j);
                }
            }
            let inv = 1.0 / aug[k * w + k];
            for j in 0..w {
                aug[k * w + j] *= inv;
            }
            aug[k * w + k] = 1.0;
            for i in 0..m {
                if i == k {
                    continue;
                }
                let f = aug[i * w + k];
                if f != 0.0 {
                    let (kk, ii) = (k * w, i * w);
                    for j in 0..w {
                        aug[ii + j] -= f * aug[kk + j];
                    }
                    aug[ii + k] = 0.0;
                }
            }
        }
        for i in 0..m {
            let arow = &aug[i * w..(i + 1) * w];
            self.t[i * nc..(i + 1) * nc].copy_from_slice(&arow[m..m + nc]);
            self.xb[i] = arow[w - 1];
        }
        // Basic columns are unit vectors by definition; write them exactly.
        for k in 0..m {
            let b = self.basis[k] as usize;
            for i in 0..m {
                self.t[i * nc + b] = if i == k { 1.0 } else { 0.0 };
            }
        }
        match phase {
            Phase::One => {
                let d = &mut self.d;
                d.iter_mut().for_each(|v| *v = 0.0);
                for a in self.nst + m..nc {
                    d[a] = 1.0;
                }
                for i in 0..m {
                    if (self.basis[i] as usize) >= self.nst + m {
                        let row = &self.t[i * nc..(i + 1) * nc];
                        for (dj, rj) in d.iter_mut().zip(row) {
                            *dj -= rj;
                        }
                    }
                }
                for i in 0..m {
                    d[self.basis[i] as usize] = 0.0;
                }
            }
            Phase::Two => self.load_phase2_costs(),
        }
        self.last_refresh = self.iterations;
        Ok(())
    }

    /// Total artificial mass (the phase-1 objective).
    fn infeasibility(&self) -> f64 {
        (0..self.m)
            .filter(|&i| (self.basis[i] as usize) >= self.nst + self.m)
            .map(|i| self.xb[i].max(0.0))
            .sum()
    }

    /// After phase 1, artificials are fixed to zero; the ratio test then
    /// forces any still-basic artificial out on first contact.
    fn lock_artificials(&mut self) {
        for a in self.nst + self.m..self.ncols {
            self.hi[a] = 0.0;
        }
    }

    fn load_phase2_costs(&mut self) {
        let d = &mut self.d;
        d.iter_mut().for_each(|v| *v = 0.0);
        d[..self.nst].copy_from_slice(&self.inst.objective);
        for i in 0..self.m {
            let b = self.basis[i] as usize;
            let cb = if b < self.nst { self.inst.objective[b] } else { 0.0 };
            if cb != 0.0 {
                let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
                for (dj, rj) in d.iter_mut().zip(row) {
                    *dj -= cb * rj;
                }
            }
        }
        for i in 0..self.m {
            d[self.basis[i] as usize] = 0.0;
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            ColState::AtLower => self.lo[j],
            ColState::AtUpper => self.hi[j],
            _ => 0.0,
        }
    }

    /// `c'x` at the current (possibly non-optimal) point.
    fn structural_objective(&self) -> f64 {
        let mut x = vec![0.0f64; self.nst];
        for j in 0..self.nst {
            if self.state[j] != ColState::Basic {
                x[j] = self.nonbasic_value(j);
            }
        }
        for i in 0..self.m {
            let b = self.basis[i] as usize;
            if b < self.nst {
                x[b] = self.xb[i];
            }
        }
        self.inst.objective_value(&x)
    }

    /// Runs the pivot loop until optimality, unboundedness, or the cap.
    /// Pricing is Dantzig's rule with a Bland fallback during degenerate runs
    /// (see `DEGEN_SWITCH`), so the loop cannot cycle.
    fn pivot_loop(&mut self, cap: u64, safety: u64, phase: Phase) -> Result<LoopExit, LpError> {
        // In phase 2 artificial columns are fixed ([0,0]) and skipped by the
        // range check; scanning can stop before them entirely.
        let scan_end = match phase {
            Phase::One => self.ncols,
            Phase::Two => self.nst + self.m,
        };
        self.degen_run = 0;
        'iterate: loop {
            if self.iterations >= safety {
                return Err(LpError::IterationLimit { iterations: self.iterations });
            }
            if self.iterations >= cap {
                return Ok(LoopExit::CapHit);
            }
            if self.iterations - self.last_refresh >= REFRESH_INTERVAL {
                self.refresh(phase)?;
            }

            // Pricing: Dantzig (largest reduced-cost violation, lowest index
            // on exact ties) while steps make progress; Bland (lowest eligible
            // index) during a degenerate run, which is exactly where cycling
            // is possible and Bland's rule guarantees escape.
            let bland = self.degen_run >= DEGEN_SWITCH;
            let mut enter: Option<(usize, f64, f64)> = None; // (col, dir, score)
            for q in 0..scan_end {
                let range = self.hi[q] - self.lo[q];
                let dir = match self.state[q] {
                    ColState::Basic => continue,
                    ColState::AtLower => {
                        if !(self.d[q] < -OPT_TOL) || range <= 0.0 {
                            continue;
                        }
                        1.0
                    }
                    ColState::AtUpper => {
                        if !(self.d[q] > OPT_TOL) || range <= 0.0 {
                            continue;
                        }
                        -1.0
                    }
                    ColState::FreeZero => {
                        if self.d[q] < -OPT_TOL {
                            1.0
                        } else if self.d[q] > OPT_TOL {
                            -1.0
                        } else {
                            continue;
                        }
                    }
                };
                if bland {
                    enter = Some((q, dir, 0.0));
                    break;
                }
                let score = self.d[q].abs();
                if enter.is_none_or(|(_, _, s)| score > s) {
                    enter = Some((q, dir, score));
                }
            }
            let Some((q, dir, _)) = enter else {
                // Optimality must be decided on exact numbers: refactorize
                // once and rescan if stale.
                if self.dirty() {
                    self.refresh(phase)?;
                    continue 'iterate;
                }
                return Ok(LoopExit::Optimal);
            };
            let range = self.hi[q] - self.lo[q];

            // Ratio test: smallest step that drives a basic variable to one
            // of its bounds, capped by the entering variable's own range (a
            // bound flip). The minimum is exact — tableau rates can reach
            // 1e12, so even a 1e-12 slack on the step axis would overshoot a
            // blocking bound by whole units. Exact ties break on the smallest
            // basic column index (Bland).
            let mut best_t = range; // may be +inf
            let mut leave: Option<(usize, bool, f64)> = None; // (row, to_upper, pivot)
            for i in 0..self.m {
                let coef = self.t[i * self.ncols + q];
                if coef.abs() <= PIVOT_TOL {
                    continue;
                }
                let rate = -dir * coef; // d(xb_i)/dt
                let b = self.basis[i] as usize;
                let (limit, to_upper) = if rate > 0.0 {
                    (self.hi[b], true)
                } else {
                    (self.lo[b], false)
                };
                if limit.is_infinite() {
                    continue;
                }
                let ti = ((limit - self.xb[i]) / rate).max(0.0);
                let better = match leave {
                    None => ti < best_t,
                    Some((r, _, _)) => ti < best_t || (ti == best_t && b < self.basis[r] as usize),
                };
                if better {
                    best_t = ti;
                    leave = Some((i, to_upper, coef));
                }
            }

            match leave {
                None => {
                    if best_t.is_infinite() {
                        // Never trust an unbounded ray read off a drifted
                        // tableau: rescan after an exact rebuild.
                        if self.dirty() {
                            self.refresh(phase)?;
                            continue 'iterate;
                        }
                        return Ok(LoopExit::Unbounded);
                    }
                    // Bound flip: no basis change, values shift by the full
                    // range of the entering variable (always > 0 — progress).
                    self.apply_step(q, dir, best_t, None);
                    self.state[q] = match self.state[q] {
                        ColState::AtLower => ColState::AtUpper,
                        ColState::AtUpper => ColState::AtLower,
                        s => s,
                    };
                    self.iterations += 1;
                    self.flips += 1;
                    self.degen_run = 0;
                    #[cfg(debug_assertions)]
                    self.validate_basics(q, dir, best_t, None);
                }
                Some((r, to_upper, pivot)) => {
                    if pivot.abs() < SMALL_PIVOT && self.dirty() {
                        // A barely-tolerable pivot on a drifted tableau may be
                        // an exact zero in disguise; pivoting on it makes the
                        // basis singular. Rebuild and rescan so the decision
                        // is made on exact numbers.
                        self.refresh(phase)?;
                        continue 'iterate;
                    }
                    self.apply_step(q, dir, best_t, Some((r, to_upper)));
                    self.iterations += 1;
                    if best_t == 0.0 {
                        self.degen_pivots += 1;
                        self.degen_run += 1;
                    } else {
                        self.degen_run = 0;
                    }
                    #[cfg(debug_assertions)]
                    self.validate_basics(q, dir, best_t, Some(r));
                }
            }
        }
    }

    /// Debug-only sanity sweep: every basic value must respect its bounds
    /// (modulo drift slack). Panics with the full step context on the first
    /// violation so ratio-test bugs surface at the step that caused them.
    #[cfg(debug_assertions)]
    fn validate_basics(&self, q: usize, dir: f64, step: f64, pivot_row: Option<usize>) {
        const SLACK: f64 = 1e-6;
        for i in 0..self.m {
            let b = self.basis[i] as usize;
            let v = self.xb[i];
            if v < self.lo[b] - SLACK || v > self.hi[b] + SLACK {
                panic!(
                    "iteration {}: basic col {b} (row {i}) = {v} outside [{}, {}] \
                     after entering q={q} dir={dir} step={step} pivot_row={pivot_row:?}",
                    self.iterations, self.lo[b], self.hi[b]
                );
            }
        }
    }

    /// Moves the entering variable `q` by `dir·step`, updates basic values,
    /// and (for a pivot) performs the row elimination.
    fn apply_step(&mut self, q: usize, dir: f64, step: f64, pivot: Option<(usize, bool)>) {
        let ncols = self.ncols;
        if step > 0.0 {
            for i in 0..self.m {
                let coef = self.t[i * ncols + q];
                if coef != 0.0 {
                    self.xb[i] -= step * dir * coef;
                }
            }
        }
        let Some((r, to_upper)) = pivot else { return };

        let entering_value = self.nonbasic_value(q) + dir * step;
        let leaving = self.basis[r] as usize;
        self.state[leaving] = if to_upper { ColState::AtUpper } else { ColState::AtLower };
        // Snap the leaving variable's row value onto the entering variable.
        self.xb[r] = entering_value;
        self.basis[r] = q as u32;
        self.state[q] = ColState::Basic;

        // Gaussian elimination of column q against the (scaled) pivot row.
        let piv = self.t[r * ncols + q];
        let inv = 1.0 / piv;
        let (head, rest) = self.t.split_at_mut(r * ncols);
        let (prow, tail) = rest.split_at_mut(ncols);
        if inv != 1.0 {
            for v in prow.iter_mut() {
                *v *= inv;
            }
        }
        prow[q] = 1.0;
        let eliminate = |rows: &mut [f64]| {
            for chunk in rows.chunks_exact_mut(ncols) {
                let f = chunk[q];
                if f != 0.0 {
                    for (a, b) in chunk.iter_mut().zip(prow.iter()) {
                        *a -= f * *b;
                    }
                    chunk[q] = 0.0;
                }
            }
        };
        eliminate(head);
        eliminate(tail);
        let f = self.d[q];
        if f != 0.0 {
            for (a, b) in self.d.iter_mut().zip(prow.iter()) {
                *a -= f * *b;
            }
        }
        self.d[q] = 0.0;
    }

    /// Builds the public result and verifies primal feasibility — a failed
    /// check surfaces as a numerical error, never a silently wrong answer.
    fn extract(&self, inst: &MilpInstance) -> Result<LpResult, LpError> {
        let mut x = vec![0.0f64; self.nst];
        let mut basis = vec![BasisStatus::Lower; self.nst];
        for j in 0..self.nst {
            match self.state[j] {
                ColState::AtLower => {
                    x[j] = self.lo[j];
                    basis[j] = BasisStatus::Lower;
                }
                ColState::AtUpper => {
                    x[j] = self.hi[j];
                    basis[j] = BasisStatus::Upper;
                }
                ColState::FreeZero => {
                    x[j] = 0.0;
                    basis[j] = BasisStatus::Zero;
                }
                ColState::Basic => basis[j] = BasisStatus::Basic,
            }
        }
        for i in 0..self.m {
            let b = self.basis[i] as usize;
            if b < self.nst {
                x[b] = self.xb[i];
            }
        }

        let scale = 1.0 + self.inst.rhs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for j in 0..self.nst {
            if x[j] < self.lo[j] - FEAS_TOL * scale || x[j] > self.hi[j] + FEAS_TOL * scale {
                return Err(LpError::NumericalBreakdown {
                    detail: format!("variable {j} out of bounds at extraction: {}", x[j]),
                });
            }
        }
        let activity = inst.row_activity(&x);
        for i in 0..self.m {
            if activity[i] > inst.rhs[i] + FEAS_TOL * scale {
                return Err(LpError::NumericalBreakdown {
                    detail: format!(
                        "row {i} violated at extraction: activity {} > rhs {}",
                        activity[i], inst.rhs[i]
                    ),
                });
            }
        }

        // duals y = c_B' B⁻¹; the slack block of the cost row holds -y.
        let duals: Vec<f64> = (0..self.m).map(|i| -self.d[self.nst + i]).collect();
        let reduced_costs = self.d[..self.nst].to_vec();

        Ok(LpResult {
            status: LpStatus::Optimal,
            objective: inst.objective_value(&x),
            x,
            duals,
            reduced_costs,
            basis,
            iterations: self.iterations,
        })
    }
}
