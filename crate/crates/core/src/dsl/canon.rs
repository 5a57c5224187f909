//! Canonical text form: comments stripped, one space around infix operators,
//! and the minimal parentheses that preserve the tree under the grammar's
//! precedence rules. Floats print as Rust's shortest round-tripping decimal,
//! so `parse(render(p)) == p` holds structurally and bit-for-bit.

use super::ast::{Expr, UnaryOp};
use super::ScoreProgram;
use std::fmt::Write;

const PREC_ATOM: u8 = 4;
const PREC_NEG: u8 = 3;

pub fn render(p: &ScoreProgram) -> String {
    let names: Vec<&str> = p.bindings.iter().map(|(n, _)| n.as_str()).collect();
    let mut out = String::new();
    out.push_str(super::VERSION_HEADER);
    out.push('\n');
    write!(out, "used_features: [{}]\n", join(p.used_features.iter().map(|i| i.to_string())))
        .unwrap();
    write!(out, "params: [{}]\n", join(p.initial_params.iter().map(|v| fmt_num(*v)))).unwrap();
    write!(
        out,
        "bounds: [{}]\n",
        join(p.bounds.iter().map(|(lo, hi)| format!("[{}, {}]", fmt_num(*lo), fmt_num(*hi))))
    )
    .unwrap();
    out.push_str("score:\n");
    for (name, expr) in &p.bindings {
        write!(out, "let {name} = {}\n", expr_to_string(expr, &names)).unwrap();
    }
    write!(out, "return {}\n", expr_to_string(&p.result, &names)).unwrap();
    out
}

fn join(parts: impl Iterator<Item = String>) -> String {
    parts.collect::<Vec<_>>().join(", ")
}

/// Shortest decimal that parses back to the same bits (Rust float Display).
pub fn fmt_num(v: f64) -> String {
    debug_assert!(v.is_finite(), "score programs never contain non-finite literals");
    format!("{v}")
}

pub fn expr_to_string(e: &Expr, binding_names: &[&str]) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0, binding_names);
    s
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8, names: &[&str]) {
    match e {
        Expr::Feature(i) => write!(out, "feature({i})").unwrap(),
        Expr::Param(j) => write!(out, "param({j})").unwrap(),
        Expr::Const(v) => out.push_str(&fmt_num(*v)),
        Expr::Ref(idx) => out.push_str(names[*idx as usize]),
        Expr::Unary(UnaryOp::Neg, a) => {
            let wrap = PREC_NEG < min_prec;
            if wrap {
                out.push('(');
            }
            out.push('-');
            write_expr(out, a, PREC_ATOM, names);
            if wrap {
                out.push(')');
            }
        }
        Expr::Unary(op, a) => {
            write!(out, "{}(", op.name()).unwrap();
            write_expr(out, a, 0, names);
            out.push(')');
        }
        Expr::Binary(op, a, b) if op.is_infix() => {
            let prec = op.precedence();
            let wrap = prec < min_prec;
            if wrap {
                out.push('(');
            }
            write_expr(out, a, prec, names);
            write!(out, " {} ", op.symbol()).unwrap();
            // Left-associative: the right operand needs strictly higher
            // precedence to survive without parentheses.
            write_expr(out, b, prec + 1, names);
            if wrap {
                out.push(')');
            }
        }
        Expr::Binary(op, a, b) => {
            write!(out, "{}(", op.symbol()).unwrap();
            write_expr(out, a, 0, names);
            out.push_str(", ");
            write_expr(out, b, 0, names);
            out.push(')');
        }
        Expr::Clip(x, lo, hi) => {
            out.push_str("clip(");
            write_expr(out, x, 0, names);
            out.push_str(", ");
            write_expr(out, lo, 0, names);
            out.push_str(", ");
            write_expr(out, hi, 0, names);
            out.push(')');
        }
    }
}
