//! Expression tree for score programs.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Abs,
    Tanh,
    Exp,
    Sqrt,
    Log1p,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Abs => "abs",
            UnaryOp::Tanh => "tanh",
            UnaryOp::Exp => "exp",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Log1p => "log1p",
        }
    }

    pub fn apply(self, v: f64) -> f64 {
        match self {
            UnaryOp::Neg => -v,
            UnaryOp::Abs => v.abs(),
            UnaryOp::Tanh => v.tanh(),
            UnaryOp::Exp => v.exp(),
            UnaryOp::Sqrt => v.sqrt(),
            UnaryOp::Log1p => v.ln_1p(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
    Pow,
}

impl BinaryOp {
    /// Infix operators; `min`/`max`/`pow` always print as function calls.
    pub fn is_infix(self) -> bool {
        matches!(self, BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Min => "min",
            BinaryOp::Max => "max",
            BinaryOp::Pow => "pow",
        }
    }

    /// Binding strength of the infix form (calls bind tightest).
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
            _ => 4,
        }
    }

    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a / b,
            BinaryOp::Min => a.min(b),
            BinaryOp::Max => a.max(b),
            BinaryOp::Pow => a.powf(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Column of the normalized feature matrix (index 0–90).
    Feature(u8),
    /// Tunable parameter θ_j.
    Param(u16),
    Const(f64),
    /// Reference to an earlier `let` binding, by position.
    Ref(u16),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// clip(x, lo, hi) = min(max(x, lo), hi), elementwise.
    Clip(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Indices of every `feature(i)` in this subtree, appended to `out`.
    pub fn collect_features(&self, out: &mut std::collections::BTreeSet<u8>) {
        match self {
            Expr::Feature(i) => {
                out.insert(*i);
            }
            Expr::Param(_) | Expr::Const(_) | Expr::Ref(_) => {}
            Expr::Unary(_, a) => a.collect_features(out),
            Expr::Binary(_, a, b) => {
                a.collect_features(out);
                b.collect_features(out);
            }
            Expr::Clip(a, b, c) => {
                a.collect_features(out);
                b.collect_features(out);
                c.collect_features(out);
            }
        }
    }
}
