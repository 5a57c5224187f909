//! Vectorized program evaluation over a node's normalized feature matrix.
//!
//! Every operator application is checked for finiteness; the first non-finite
//! intermediate aborts evaluation and names the offending subexpression, so a
//! bad generated program fails loudly instead of corrupting a solve.

use super::ast::Expr;
use super::canon;
use super::ScoreProgram;
use crate::features::FeatureMatrix;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("parameter vector has {got} entries but the program declares {expected}")]
    ParamArity { expected: usize, got: usize },
    #[error("parameter {index} is not finite")]
    NonFiniteParam { index: usize },
    #[error("expression `{expr}` produced a non-finite value")]
    NonFinite { expr: String },
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Value {
    fn is_finite(&self) -> bool {
        match self {
            Value::Scalar(v) => v.is_finite(),
            Value::Vector(v) => v.iter().all(|x| x.is_finite()),
        }
    }

    fn into_vector(self, n: usize) -> Vec<f64> {
        match self {
            Value::Scalar(v) => vec![v; n],
            Value::Vector(v) => v,
        }
    }
}

fn map1(a: Value, f: impl Fn(f64) -> f64) -> Value {
    match a {
        Value::Scalar(x) => Value::Scalar(f(x)),
        Value::Vector(mut xs) => {
            for x in &mut xs {
                *x = f(*x);
            }
            Value::Vector(xs)
        }
    }
}

fn map2(a: Value, b: Value, f: impl Fn(f64, f64) -> f64) -> Value {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(f(x, y)),
        (Value::Scalar(x), Value::Vector(mut ys)) => {
            for y in &mut ys {
                *y = f(x, *y);
            }
            Value::Vector(ys)
        }
        (Value::Vector(mut xs), Value::Scalar(y)) => {
            for x in &mut xs {
                *x = f(*x, y);
            }
            Value::Vector(xs)
        }
        (Value::Vector(mut xs), Value::Vector(ys)) => {
            debug_assert_eq!(xs.len(), ys.len());
            for (x, y) in xs.iter_mut().zip(ys) {
                *x = f(*x, y);
            }
            Value::Vector(xs)
        }
    }
}

/// Evaluates `program` at `theta` on a normalized candidate feature matrix,
/// returning one score per candidate row (scalar results broadcast).
pub fn evaluate(
    program: &ScoreProgram,
    theta: &[f64],
    features: &FeatureMatrix,
) -> Result<Vec<f64>, EvalError> {
    assert!(features.normalized, "score programs evaluate on normalized features");
    if theta.len() != program.bounds.len() {
        return Err(EvalError::ParamArity { expected: program.bounds.len(), got: theta.len() });
    }
    if let Some(index) = theta.iter().position(|v| !v.is_finite()) {
        return Err(EvalError::NonFiniteParam { index });
    }
    let names: Vec<&str> = program.bindings.iter().map(|(n, _)| n.as_str()).collect();
    let mut env: Vec<Value> = Vec::with_capacity(program.bindings.len());
    for (_, expr) in &program.bindings {
        let v = eval_expr(expr, theta, features, &env, &names)?;
        env.push(v);
    }
    let result = eval_expr(&program.result, theta, features, &env, &names)?;
    Ok(result.into_vector(features.n_rows()))
}

fn eval_expr(
    e: &Expr,
    theta: &[f64],
    m: &FeatureMatrix,
    env: &[Value],
    names: &[&str],
) -> Result<Value, EvalError> {
    let out = match e {
        Expr::Feature(i) => {
            let col = *i as usize;
            Value::Vector((0..m.n_rows()).map(|r| m.get(r, col)).collect())
        }
        Expr::Param(j) => Value::Scalar(theta[*j as usize]),
        Expr::Const(v) => Value::Scalar(*v),
        Expr::Ref(idx) => env[*idx as usize].clone(),
        Expr::Unary(op, a) => {
            let a = eval_expr(a, theta, m, env, names)?;
            let op = *op;
            checked(map1(a, |x| op.apply(x)), e, names)?
        }
        Expr::Binary(op, a, b) => {
            let a = eval_expr(a, theta, m, env, names)?;
            let b = eval_expr(b, theta, m, env, names)?;
            let op = *op;
            checked(map2(a, b, |x, y| op.apply(x, y)), e, names)?
        }
        Expr::Clip(x, lo, hi) => {
            let x = eval_expr(x, theta, m, env, names)?;
            let lo = eval_expr(lo, theta, m, env, names)?;
            let hi = eval_expr(hi, theta, m, env, names)?;
            let clipped = map2(map2(x, lo, f64::max), hi, f64::min);
            checked(clipped, e, names)?
        }
    };
    Ok(out)
}

fn checked(v: Value, e: &Expr, names: &[&str]) -> Result<Value, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite { expr: canon::expr_to_string(e, names) })
    }
}
