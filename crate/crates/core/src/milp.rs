//! Mixed-integer linear program model.
//!
//! Instances are stored in a single canonical shape:
//!
//! ```text
//! minimize   c'x
//! subject to Ax <= b        (every row is a <= row; >= rows are negated,
//!                            equalities are stored as a <= pair)
//!            l <= x <= u    (entries may be -inf / +inf)
//!            x_i integer for every i with is_integer[i]
//! ```
//!
//! `A` is sparse (CSR); everything downstream — the simplex, feature
//! extraction, the generators and the text format — works on this one shape.

use thiserror::Error;

/// Row-major compressed sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a CSR matrix from per-row `(column, value)` lists.
    ///
    /// Entries within a row may arrive in any order; they are sorted by
    /// column. Duplicate columns within a row and out-of-range columns are
    /// rejected. Explicit zeros are dropped.
    pub fn from_rows(ncols: usize, rows: &[Vec<(u32, f64)>]) -> Result<Self, InstanceError> {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for (i, row) in rows.iter().enumerate() {
            let mut entries: Vec<(u32, f64)> = row
                .iter()
                .copied()
                .filter(|&(_, v)| v != 0.0)
                .collect();
            entries.sort_by_key(|&(c, _)| c);
            for win in entries.windows(2) {
                if win[0].0 == win[1].0 {
                    return Err(InstanceError::DuplicateEntry { row: i, col: win[0].0 as usize });
                }
            }
            for &(c, v) in &entries {
                if c as usize >= ncols {
                    return Err(InstanceError::ColumnOutOfRange { row: i, col: c as usize, ncols });
                }
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { nrows: rows.len(), ncols, row_ptr, col_idx, values })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Number of nonzeros in row `i`.
    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// `A x` for a dense `x`.
    pub fn multiply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "dimension mismatch in matrix-vector product");
        (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c as usize]).sum()
            })
            .collect()
    }

    /// Column-oriented copy: for each column, the (row, value) pairs sorted by row.
    pub fn to_columns(&self) -> Vec<Vec<(u32, f64)>> {
        let mut cols = vec![Vec::new(); self.ncols];
        for i in 0..self.nrows {
            let (cidx, vals) = self.row(i);
            for (&c, &v) in cidx.iter().zip(vals) {
                cols[c as usize].push((i as u32, v));
            }
        }
        cols
    }
}

/// A mixed-integer linear program in `min c'x, Ax <= b, l <= x <= u` form.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpInstance {
    /// Objective coefficients `c`, length `n`.
    pub objective: Vec<f64>,
    /// Constraint matrix `A` (`m` rows, `n` columns), every row a `<=` row.
    pub rows: SparseMatrix,
    /// Right-hand sides `b`, length `m`.
    pub rhs: Vec<f64>,
    /// Lower bounds `l` (may contain `-inf`), length `n`.
    pub lower: Vec<f64>,
    /// Upper bounds `u` (may contain `+inf`), length `n`.
    pub upper: Vec<f64>,
    /// Integrality mask: `is_integer[i]` marks `x_i` as integer-constrained.
    pub is_integer: Vec<bool>,
}

impl MilpInstance {
    /// Validates and wraps the pieces of an instance.
    pub fn new(
        objective: Vec<f64>,
        rows: SparseMatrix,
        rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        is_integer: Vec<bool>,
    ) -> Result<Self, InstanceError> {
        let inst = Self { objective, rows, rhs, lower, upper, is_integer };
        inst.validate()?;
        Ok(inst)
    }

    /// Convenience constructor from a dense row-major constraint matrix.
    pub fn from_dense(
        objective: Vec<f64>,
        dense_rows: &[Vec<f64>],
        rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        is_integer: Vec<bool>,
    ) -> Result<Self, InstanceError> {
        let n = objective.len();
        let rows: Vec<Vec<(u32, f64)>> = dense_rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(_, &v)| v != 0.0)
                    .map(|(j, &v)| (j as u32, v))
                    .collect()
            })
            .collect();
        Self::new(objective, SparseMatrix::from_rows(n, &rows)?, rhs, lower, upper, is_integer)
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rhs.len()
    }

    /// Checks the structural invariants every consumer relies on.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let n = self.objective.len();
        let m = self.rhs.len();
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        for (what, got) in [
            ("lower bounds", self.lower.len()),
            ("upper bounds", self.upper.len()),
            ("integrality mask", self.is_integer.len()),
        ] {
            if got != n {
                return Err(InstanceError::DimensionMismatch { what, expected: n, got });
            }
        }
        if self.rows.ncols() != n {
            return Err(InstanceError::DimensionMismatch {
                what: "matrix columns",
                expected: n,
                got: self.rows.ncols(),
            });
        }
        if self.rows.nrows() != m {
            return Err(InstanceError::DimensionMismatch {
                what: "matrix rows",
                expected: m,
                got: self.rows.nrows(),
            });
        }
        for (j, &c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(InstanceError::NonFinite { what: format!("objective[{j}]") });
            }
        }
        for (i, &b) in self.rhs.iter().enumerate() {
            if !b.is_finite() {
                return Err(InstanceError::NonFinite { what: format!("rhs[{i}]") });
            }
        }
        for i in 0..m {
            let (cols, vals) = self.rows.row(i);
            if cols.is_empty() {
                return Err(InstanceError::EmptyRow { row: i });
            }
            for (&c, &v) in cols.iter().zip(vals) {
                if !v.is_finite() {
                    return Err(InstanceError::NonFinite { what: format!("A[{i},{c}]") });
                }
            }
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(InstanceError::NonFinite { what: format!("bounds of x{j}") });
            }
            if l > u {
                return Err(InstanceError::BoundOrder { var: j, lower: l, upper: u });
            }
            if self.is_integer[j] && !(l.is_finite() && u.is_finite()) {
                return Err(InstanceError::UnboundedInteger { var: j });
            }
        }
        Ok(())
    }

    /// `c'x`.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    /// Row activities `Ax`.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        self.rows.multiply(x)
    }

    /// True when `x` satisfies rows, bounds, and integrality within `tol`.
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.n_vars() {
            return false;
        }
        for (j, &v) in x.iter().enumerate() {
            if v < self.lower[j] - tol || v > self.upper[j] + tol {
                return false;
            }
            if self.is_integer[j] && (v - v.round()).abs() > tol {
                return false;
            }
        }
        self.row_activity(x).iter().zip(&self.rhs).all(|(&a, &b)| a <= b + tol)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("instance has no variables")]
    Empty,
    #[error("{what}: expected {expected}, got {got}")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
    #[error("constraint row {row} has no nonzero coefficients")]
    EmptyRow { row: usize },
    #[error("non-finite value in {what}")]
    NonFinite { what: String },
    #[error("variable {var} has lower bound {lower} above upper bound {upper}")]
    BoundOrder { var: usize, lower: f64, upper: f64 },
    #[error("integer variable {var} must have finite lower and upper bounds")]
    UnboundedInteger { var: usize },
    #[error("row {row} references column {col}, but the matrix has {ncols} columns")]
    ColumnOutOfRange { row: usize, col: usize, ncols: usize },
    #[error("row {row} lists column {col} twice")]
    DuplicateEntry { row: usize, col: usize },
}
