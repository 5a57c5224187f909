//! Line-oriented parser for `spl/1` score programs.
//!
//! `#` starts a comment anywhere; blank lines are ignored. The three header
//! lines must appear in order (`used_features`, `params`, `bounds`) before
//! the `score:` block of `let` statements and the final `return`.

use super::ast::{BinaryOp, Expr, UnaryOp};
use super::{ScoreProgram, MAX_FEATURES, VERSION_HEADER};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Malformed tokens or structure.
    Syntax,
    /// Missing or wrong version line.
    Version,
    /// Feature index outside [0, 90].
    FeatureIndex,
    /// More than [`MAX_FEATURES`] distinct features declared.
    TooManyFeatures,
    /// `used_features` disagrees with the body's referenced set.
    HeaderMismatch,
    /// `params` and `bounds` lengths differ.
    Arity,
    /// A bound pair is inverted or non-finite.
    InvalidBound,
    /// A numeric literal overflowed to infinity.
    InvalidNumber,
    /// `param(j)` beyond the declared parameter count.
    ParamIndex,
    /// Reference to a name with no `let` binding.
    UnboundName,
    /// Two `let` statements bind the same name.
    DuplicateBinding,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

fn err(line: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
    ParseError { line, kind, message: message.into() }
}

// ---------------------------------------------------------------- lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(v) => format!("number {v}"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Eq => "`=`".into(),
    }
}

fn lex(line: &str, line_no: usize) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '[' => {
                toks.push(Tok::LBrack);
                i += 1;
            }
            ']' => {
                toks.push(Tok::RBrack);
                i += 1;
            }
            ',' => {
                toks.push(Tok::Comma);
                i += 1;
            }
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '/' => {
                toks.push(Tok::Slash);
                i += 1;
            }
            '=' => {
                toks.push(Tok::Eq);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &line[start..i];
                let v: f64 = text.parse().map_err(|_| {
                    err(line_no, ParseErrorKind::Syntax, format!("bad number `{text}`"))
                })?;
                if !v.is_finite() {
                    return Err(err(
                        line_no,
                        ParseErrorKind::InvalidNumber,
                        format!("literal `{text}` is not representable as a finite number"),
                    ));
                }
                toks.push(Tok::Num(v));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push(Tok::Ident(line[start..i].to_string()));
            }
            _ => {
                return Err(err(
                    line_no,
                    ParseErrorKind::Syntax,
                    format!("unexpected character `{c}` at column {}", i + 1),
                ))
            }
        }
    }
    Ok(toks)
}

// --------------------------------------------------------------- parsing

const RESERVED: &[&str] = &[
    "let", "return", "feature", "param", "abs", "tanh", "exp", "sqrt", "log1p", "min", "max",
    "pow", "clip", "score", "used_features", "params", "bounds",
];

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Tok], line: usize) -> Self {
        Self { toks, pos: 0, line }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        let line = self.line;
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(err(
                line,
                ParseErrorKind::Syntax,
                format!("expected {what}, found {}", describe(t)),
            )),
            None => {
                Err(err(line, ParseErrorKind::Syntax, format!("expected {what}, found end of line")))
            }
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn fail(&self, msg: impl Into<String>) -> ParseError {
        err(self.line, ParseErrorKind::Syntax, msg)
    }
}

struct BodyCtx<'a> {
    names: &'a [String],
    n_params: usize,
    features_seen: &'a mut BTreeSet<u8>,
}

fn parse_expr(c: &mut Cursor, ctx: &mut BodyCtx) -> Result<Expr, ParseError> {
    let mut e = parse_term(c, ctx)?;
    loop {
        let op = match c.peek() {
            Some(Tok::Plus) => BinaryOp::Add,
            Some(Tok::Minus) => BinaryOp::Sub,
            _ => break,
        };
        c.next();
        let rhs = parse_term(c, ctx)?;
        e = Expr::Binary(op, Box::new(e), Box::new(rhs));
    }
    Ok(e)
}

fn parse_term(c: &mut Cursor, ctx: &mut BodyCtx) -> Result<Expr, ParseError> {
    let mut e = parse_unary(c, ctx)?;
    loop {
        let op = match c.peek() {
            Some(Tok::Star) => BinaryOp::Mul,
            Some(Tok::Slash) => BinaryOp::Div,
            _ => break,
        };
        c.next();
        let rhs = parse_unary(c, ctx)?;
        e = Expr::Binary(op, Box::new(e), Box::new(rhs));
    }
    Ok(e)
}

fn parse_unary(c: &mut Cursor, ctx: &mut BodyCtx) -> Result<Expr, ParseError> {
    if matches!(c.peek(), Some(Tok::Minus)) {
        c.next();
        let inner = parse_unary(c, ctx)?;
        return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
    }
    parse_primary(c, ctx)
}

fn parse_primary(c: &mut Cursor, ctx: &mut BodyCtx) -> Result<Expr, ParseError> {
    match c.next().cloned() {
        Some(Tok::Num(v)) => Ok(Expr::Const(v)),
        Some(Tok::LParen) => {
            let e = parse_expr(c, ctx)?;
            c.expect(&Tok::RParen, "`)`")?;
            Ok(e)
        }
        Some(Tok::Ident(name)) => {
            if matches!(c.peek(), Some(Tok::LParen)) {
                parse_call(c, ctx, &name)
            } else if let Some(idx) = ctx.names.iter().position(|n| n == &name) {
                Ok(Expr::Ref(idx as u16))
            } else if RESERVED.contains(&name.as_str()) {
                Err(c.fail(format!("`{name}` is a reserved word and needs arguments")))
            } else {
                Err(err(
                    c.line,
                    ParseErrorKind::UnboundName,
                    format!("unknown name `{name}` (no such let binding)"),
                ))
            }
        }
        Some(t) => Err(c.fail(format!("expected an expression, found {}", describe(&t)))),
        None => Err(c.fail("expected an expression, found end of line")),
    }
}

fn parse_call(c: &mut Cursor, ctx: &mut BodyCtx, name: &str) -> Result<Expr, ParseError> {
    c.expect(&Tok::LParen, "`(`")?;
    let expr = match name {
        "feature" => {
            let idx = parse_index_arg(c, "feature")?;
            if idx > 90 {
                return Err(err(
                    c.line,
                    ParseErrorKind::FeatureIndex,
                    format!("feature index {idx} is outside [0, 90]"),
                ));
            }
            ctx.features_seen.insert(idx as u8);
            Expr::Feature(idx as u8)
        }
        "param" => {
            let idx = parse_index_arg(c, "param")?;
            if idx as usize >= ctx.n_params {
                return Err(err(
                    c.line,
                    ParseErrorKind::ParamIndex,
                    format!(
                        "param({idx}) exceeds the declared parameter count {}",
                        ctx.n_params
                    ),
                ));
            }
            Expr::Param(idx as u16)
        }
        "abs" | "tanh" | "exp" | "sqrt" | "log1p" => {
            let op = match name {
                "abs" => UnaryOp::Abs,
                "tanh" => UnaryOp::Tanh,
                "exp" => UnaryOp::Exp,
                "sqrt" => UnaryOp::Sqrt,
                _ => UnaryOp::Log1p,
            };
            let a = parse_expr(c, ctx)?;
            Expr::Unary(op, Box::new(a))
        }
        "min" | "max" | "pow" => {
            let op = match name {
                "min" => BinaryOp::Min,
                "max" => BinaryOp::Max,
                _ => BinaryOp::Pow,
            };
            let a = parse_expr(c, ctx)?;
            c.expect(&Tok::Comma, "`,`")?;
            let b = parse_expr(c, ctx)?;
            Expr::Binary(op, Box::new(a), Box::new(b))
        }
        "clip" => {
            let x = parse_expr(c, ctx)?;
            c.expect(&Tok::Comma, "`,`")?;
            let lo = parse_expr(c, ctx)?;
            c.expect(&Tok::Comma, "`,`")?;
            let hi = parse_expr(c, ctx)?;
            Expr::Clip(Box::new(x), Box::new(lo), Box::new(hi))
        }
        other => return Err(c.fail(format!("unknown function `{other}`"))),
    };
    c.expect(&Tok::RParen, "`)`")?;
    Ok(expr)
}

fn parse_index_arg(c: &mut Cursor, what: &str) -> Result<u64, ParseError> {
    match c.next() {
        Some(Tok::Num(v)) if *v >= 0.0 && v.fract() == 0.0 && *v <= u64::MAX as f64 => {
            Ok(*v as u64)
        }
        _ => Err(c.fail(format!("{what}(...) takes a non-negative integer index"))),
    }
}

// ----------------------------------------------------------- header lists

fn parse_signed_num(c: &mut Cursor) -> Result<f64, ParseError> {
    let neg = if matches!(c.peek(), Some(Tok::Minus)) {
        c.next();
        true
    } else {
        false
    };
    match c.next() {
        Some(Tok::Num(v)) => Ok(if neg { -v } else { *v }),
        Some(t) => {
            let d = describe(t);
            Err(c.fail(format!("expected a number, found {d}")))
        }
        None => Err(c.fail("expected a number, found end of line")),
    }
}

fn parse_num_list(c: &mut Cursor) -> Result<Vec<f64>, ParseError> {
    c.expect(&Tok::LBrack, "`[`")?;
    let mut out = Vec::new();
    if matches!(c.peek(), Some(Tok::RBrack)) {
        c.next();
        return Ok(out);
    }
    loop {
        out.push(parse_signed_num(c)?);
        match c.next() {
            Some(Tok::Comma) => continue,
            Some(Tok::RBrack) => break,
            Some(t) => {
                let d = describe(t);
                return Err(c.fail(format!("expected `,` or `]`, found {d}")));
            }
            None => return Err(c.fail("unterminated list")),
        }
    }
    Ok(out)
}

fn parse_pair_list(c: &mut Cursor) -> Result<Vec<(f64, f64)>, ParseError> {
    c.expect(&Tok::LBrack, "`[`")?;
    let mut out = Vec::new();
    if matches!(c.peek(), Some(Tok::RBrack)) {
        c.next();
        return Ok(out);
    }
    loop {
        c.expect(&Tok::LBrack, "`[`")?;
        let lo = parse_signed_num(c)?;
        c.expect(&Tok::Comma, "`,`")?;
        let hi = parse_signed_num(c)?;
        c.expect(&Tok::RBrack, "`]`")?;
        out.push((lo, hi));
        match c.next() {
            Some(Tok::Comma) => continue,
            Some(Tok::RBrack) => break,
            Some(t) => {
                let d = describe(t);
                return Err(c.fail(format!("expected `,` or `]`, found {d}")));
            }
            None => return Err(c.fail("unterminated list")),
        }
    }
    Ok(out)
}

// ------------------------------------------------------------ program

/// Parses program text; returns the program plus human-readable warnings
/// (currently only initial-parameter clamps).
pub fn parse(text: &str) -> Result<(ScoreProgram, Vec<String>), ParseError> {
    // Strip comments, keep original line numbers.
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (i + 1, l)
        })
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut it = lines.into_iter();

    let (line_no, version) = it
        .next()
        .ok_or_else(|| err(1, ParseErrorKind::Version, "empty program"))?;
    if version != VERSION_HEADER {
        return Err(err(
            line_no,
            ParseErrorKind::Version,
            format!("expected version line `{VERSION_HEADER}`, found `{version}`"),
        ));
    }

    let mut take_header = |key: &str| -> Result<(usize, Vec<Tok>), ParseError> {
        let (line_no, line) = it
            .next()
            .ok_or_else(|| err(line_no, ParseErrorKind::Syntax, format!("missing `{key}:` header")))?;
        let rest = line.strip_prefix(key).and_then(|r| r.trim_start().strip_prefix(':')).ok_or_else(
            || err(line_no, ParseErrorKind::Syntax, format!("expected `{key}: [...]`, found `{line}`")),
        )?;
        Ok((line_no, lex(rest, line_no)?))
    };

    let (uf_line, uf_toks) = take_header("used_features")?;
    let mut c = Cursor::new(&uf_toks, uf_line);
    let raw_features = parse_num_list(&mut c)?;
    if !c.done() {
        return Err(c.fail("trailing tokens after feature list"));
    }
    let mut used: BTreeSet<u8> = BTreeSet::new();
    for v in raw_features {
        if v < 0.0 || v.fract() != 0.0 || v > 90.0 {
            return Err(err(
                uf_line,
                ParseErrorKind::FeatureIndex,
                format!("feature index {v} is outside [0, 90]"),
            ));
        }
        used.insert(v as u8);
    }
    if used.len() > MAX_FEATURES {
        return Err(err(
            uf_line,
            ParseErrorKind::TooManyFeatures,
            format!("{} distinct features declared; the limit is {MAX_FEATURES}", used.len()),
        ));
    }

    let (p_line, p_toks) = take_header("params")?;
    let mut c = Cursor::new(&p_toks, p_line);
    let mut params = parse_num_list(&mut c)?;
    if !c.done() {
        return Err(c.fail("trailing tokens after parameter list"));
    }

    let (b_line, b_toks) = take_header("bounds")?;
    let mut c = Cursor::new(&b_toks, b_line);
    let bounds = parse_pair_list(&mut c)?;
    if !c.done() {
        return Err(c.fail("trailing tokens after bounds list"));
    }
    if bounds.len() != params.len() {
        return Err(err(
            b_line,
            ParseErrorKind::Arity,
            format!("{} params but {} bounds; each parameter needs one [lo, hi] pair", params.len(), bounds.len()),
        ));
    }
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(err(
                b_line,
                ParseErrorKind::InvalidBound,
                format!("bound {j} is [{lo}, {hi}]; bounds must be finite with lo <= hi"),
            ));
        }
    }

    let mut warnings = Vec::new();
    for (j, v) in params.iter_mut().enumerate() {
        let (lo, hi) = bounds[j];
        let clamped = v.clamp(lo, hi);
        if clamped != *v {
            warnings.push(format!(
                "param({j}) initial value {v} clamped into its bound [{lo}, {hi}]"
            ));
            *v = clamped;
        }
    }

    let (s_line, s) = it
        .next()
        .ok_or_else(|| err(b_line, ParseErrorKind::Syntax, "missing `score:` block"))?;
    if s != "score:" {
        return Err(err(s_line, ParseErrorKind::Syntax, format!("expected `score:`, found `{s}`")));
    }

    let mut binding_names: Vec<String> = Vec::new();
    let mut bindings: Vec<(String, Expr)> = Vec::new();
    let mut features_seen: BTreeSet<u8> = BTreeSet::new();
    let mut result: Option<Expr> = None;
    let mut last_line = s_line;

    for (line_no, line) in it {
        last_line = line_no;
        if result.is_some() {
            return Err(err(line_no, ParseErrorKind::Syntax, "content after `return`"));
        }
        let toks = lex(line, line_no)?;
        let mut c = Cursor::new(&toks, line_no);
        match c.next().cloned() {
            Some(Tok::Ident(kw)) if kw == "let" => {
                let name = match c.next().cloned() {
                    Some(Tok::Ident(n)) => n,
                    other => {
                        return Err(c.fail(format!(
                            "expected a binding name after `let`, found {}",
                            other.map_or_else(|| "end of line".into(), |t| describe(&t))
                        )))
                    }
                };
                if RESERVED.contains(&name.as_str()) {
                    return Err(c.fail(format!("`{name}` is a reserved word")));
                }
                if binding_names.iter().any(|n| n == &name) {
                    return Err(err(
                        line_no,
                        ParseErrorKind::DuplicateBinding,
                        format!("`{name}` is already bound"),
                    ));
                }
                c.expect(&Tok::Eq, "`=`")?;
                let expr = {
                    let mut ctx = BodyCtx {
                        names: &binding_names,
                        n_params: params.len(),
                        features_seen: &mut features_seen,
                    };
                    parse_expr(&mut c, &mut ctx)?
                };
                if !c.done() {
                    return Err(c.fail("trailing tokens after expression"));
                }
                binding_names.push(name.clone());
                bindings.push((name, expr));
            }
            Some(Tok::Ident(kw)) if kw == "return" => {
                let expr = {
                    let mut ctx = BodyCtx {
                        names: &binding_names,
                        n_params: params.len(),
                        features_seen: &mut features_seen,
                    };
                    parse_expr(&mut c, &mut ctx)?
                };
                if !c.done() {
                    return Err(c.fail("trailing tokens after expression"));
                }
                result = Some(expr);
            }
            _ => {
                return Err(err(
                    line_no,
                    ParseErrorKind::Syntax,
                    format!("expected `let` or `return`, found `{line}`"),
                ))
            }
        }
    }

    let result = result
        .ok_or_else(|| err(last_line, ParseErrorKind::Syntax, "missing `return` statement"))?;

    if features_seen != used {
        let missing: Vec<_> = features_seen.difference(&used).collect();
        let unused: Vec<_> = used.difference(&features_seen).collect();
        let msg = if !missing.is_empty() {
            format!("body references feature {} not declared in used_features", missing[0])
        } else {
            format!("used_features declares feature {} never referenced in the body", unused[0])
        };
        return Err(err(uf_line, ParseErrorKind::HeaderMismatch, msg));
    }

    Ok((
        ScoreProgram {
            used_features: used.into_iter().collect(),
            initial_params: params,
            bounds,
            bindings,
            result,
        },
        warnings,
    ))
}
