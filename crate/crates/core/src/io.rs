//! Versioned text format for instances (`milp/1`) plus the batch manifest
//! written next to generated instance files.
//!
//! The format is line oriented and sparse:
//!
//! ```text
//! milp/1
//! vars 3
//! obj 0:5 2:-1.5
//! bound 0 1
//! bound 0 inf
//! bound -2.5 7
//! integer 0 1
//! row -1 0:-1 1:-1
//! row 4 0:2 2:1
//! ```
//!
//! Coefficients print with Rust's shortest-round-trip float formatting, so
//! `read(write(x)) == x` bit-exactly for all finite data; infinite bounds
//! use `inf` / `-inf` tokens. A constraint row with no entries is rejected.

use crate::generators::FamilySpec;
use crate::milp::{InstanceError, MilpInstance, SparseMatrix};
use crate::rng::fnv1a64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

pub const FORMAT_VERSION: &str = "milp/1";

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("instance failed validation: {0}")]
    Invalid(#[from] InstanceError),
}

fn fmt_coef(v: f64) -> String {
    debug_assert!(!v.is_nan());
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

/// Renders an instance in `milp/1` form.
pub fn format_instance(inst: &MilpInstance) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_VERSION);
    out.push('\n');
    let _ = writeln!(out, "vars {}", inst.n_vars());
    out.push_str("obj");
    for (i, &c) in inst.objective.iter().enumerate() {
        if c != 0.0 {
            let _ = write!(out, " {i}:{}", fmt_coef(c));
        }
    }
    out.push('\n');
    for i in 0..inst.n_vars() {
        let _ = writeln!(out, "bound {} {}", fmt_coef(inst.lower[i]), fmt_coef(inst.upper[i]));
    }
    out.push_str("integer");
    for (i, &flag) in inst.is_integer.iter().enumerate() {
        if flag {
            let _ = write!(out, " {i}");
        }
    }
    out.push('\n');
    for j in 0..inst.n_rows() {
        let _ = write!(out, "row {}", fmt_coef(inst.rhs[j]));
        let (cols, vals) = inst.rows.row(j);
        for (&c, &v) in cols.iter().zip(vals) {
            let _ = write!(out, " {c}:{}", fmt_coef(v));
        }
        out.push('\n');
    }
    out
}

pub fn write_instance(path: &Path, inst: &MilpInstance) -> std::io::Result<()> {
    std::fs::write(path, format_instance(inst))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, ReadError> {
    match tok {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => tok.parse::<f64>().map_err(|_| ReadError::Format {
            line,
            message: format!("expected a number, found {tok:?}"),
        }),
    }
}

fn parse_index(tok: &str, n: usize, line: usize) -> Result<usize, ReadError> {
    let i: usize = tok.parse().map_err(|_| ReadError::Format {
        line,
        message: format!("expected a variable index, found {tok:?}"),
    })?;
    if i >= n {
        return Err(ReadError::Format {
            line,
            message: format!("variable index {i} out of range (vars {n})"),
        });
    }
    Ok(i)
}

fn parse_pair(tok: &str, n: usize, line: usize) -> Result<(u32, f64), ReadError> {
    let (idx, val) = tok.split_once(':').ok_or_else(|| ReadError::Format {
        line,
        message: format!("expected index:coefficient, found {tok:?}"),
    })?;
    Ok((parse_index(idx, n, line)? as u32, parse_f64(val, line)?))
}

/// Parses `milp/1` text into a validated instance.
pub fn parse_instance(text: &str) -> Result<MilpInstance, ReadError> {
    // Non-blank lines with their 1-based positions.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty());
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| ReadError::Format {
            line: text.lines().count() + 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    };

    let (line, header) = next("version header")?;
    if header != FORMAT_VERSION {
        return Err(ReadError::Format {
            line,
            message: format!("unsupported version {header:?}, expected {FORMAT_VERSION:?}"),
        });
    }

    let (line, vars_line) = next("vars line")?;
    let n: usize = vars_line
        .strip_prefix("vars ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| ReadError::Format {
            line,
            message: format!("expected `vars <count>`, found {vars_line:?}"),
        })?;

    let (line, obj_line) = next("obj line")?;
    let rest = obj_line.strip_prefix("obj").ok_or_else(|| ReadError::Format {
        line,
        message: format!("expected `obj ...`, found {obj_line:?}"),
    })?;
    let mut objective = vec![0.0; n];
    for tok in rest.split_whitespace() {
        let (i, v) = parse_pair(tok, n, line)?;
        objective[i as usize] = v;
    }

    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, bound_line) = next("bound line")?;
        let rest = bound_line.strip_prefix("bound ").ok_or_else(|| ReadError::Format {
            line,
            message: format!("expected `bound <lo> <hi>`, found {bound_line:?}"),
        })?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(ReadError::Format {
                line,
                message: format!("expected exactly two bound values, found {}", toks.len()),
            });
        }
        lower.push(parse_f64(toks[0], line)?);
        upper.push(parse_f64(toks[1], line)?);
    }

    let (line, int_line) = next("integer line")?;
    let rest = int_line.strip_prefix("integer").ok_or_else(|| ReadError::Format {
        line,
        message: format!("expected `integer ...`, found {int_line:?}"),
    })?;
    let mut is_integer = vec![false; n];
    for tok in rest.split_whitespace() {
        is_integer[parse_index(tok, n, line)?] = true;
    }

    let mut rows: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for (line, row_line) in lines {
        let rest = row_line.strip_prefix("row ").ok_or_else(|| ReadError::Format {
            line,
            message: format!("expected `row <rhs> <pairs>`, found {row_line:?}"),
        })?;
        let mut toks = rest.split_whitespace();
        let rhs_tok = toks.next().ok_or_else(|| ReadError::Format {
            line,
            message: "row is missing its right-hand side".into(),
        })?;
        rhs.push(parse_f64(rhs_tok, line)?);
        let pairs: Vec<(u32, f64)> =
            toks.map(|t| parse_pair(t, n, line)).collect::<Result<_, _>>()?;
        if pairs.is_empty() {
            return Err(ReadError::Format {
                line,
                message: "constraint row has no entries".into(),
            });
        }
        rows.push(pairs);
    }

    let matrix = SparseMatrix::from_rows(n, &rows)?;
    Ok(MilpInstance::new(objective, matrix, rhs, lower, upper, is_integer)?)
}

pub fn read_instance(path: &Path) -> Result<MilpInstance, ReadError> {
    parse_instance(&std::fs::read_to_string(path)?)
}

/// Hex FNV-1a fingerprint of a file's bytes, as recorded in manifests.
pub fn checksum_hex(bytes: &[u8]) -> String {
    format!("{:016x}", fnv1a64(bytes))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub seed: u64,
    pub checksum: String,
}

/// Sidecar written by batch generation: what was generated, from which
/// seeds, with per-file content fingerprints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub family: String,
    pub spec: FamilySpec,
    pub base_seed: u64,
    pub count: usize,
    pub files: Vec<ManifestEntry>,
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), std::io::Error> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(path, text)
}

pub fn read_manifest(path: &Path) -> Result<Manifest, ReadError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| ReadError::Format {
        line: e.line(),
        message: format!("manifest: {e}"),
    })
}
