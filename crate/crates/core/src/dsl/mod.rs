//! `spl/1` — a tiny, deterministic expression language for branching scores.
//!
//! A score program declares which feature columns it reads, a tunable
//! parameter vector with box bounds, and an expression block that maps the
//! normalized candidate-feature matrix to one score per candidate. The
//! variable with the highest score is branched on (ties go to the lowest
//! candidate index).
//!
//! Programs have no loops, no conditionals, no state: evaluation is pure
//! and bit-for-bit reproducible, and any non-finite intermediate is a hard
//! error naming the offending subexpression. [`GRAMMAR_DOC`] is the complete
//! reference handed to program generators.

mod ast;
mod canon;
mod eval;
mod parse;

pub use ast::{BinaryOp, Expr, UnaryOp};
pub use canon::expr_to_string;
pub use eval::{evaluate, EvalError};
pub use parse::{ParseError, ParseErrorKind};

/// A program may read at most this many distinct feature columns.
pub const MAX_FEATURES: usize = 10;

/// Required first line of every program.
pub const VERSION_HEADER: &str = "spl/1";

/// A parsed, validated score program.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreProgram {
    /// Distinct feature columns the body reads, ascending.
    pub used_features: Vec<u8>,
    /// Initial parameter vector θ⁰, already clamped into `bounds`.
    pub initial_params: Vec<f64>,
    /// Per-parameter inclusive box `[lo, hi]`.
    pub bounds: Vec<(f64, f64)>,
    /// `let` bindings in order; later bindings may reference earlier ones.
    pub bindings: Vec<(String, Expr)>,
    /// The `return` expression.
    pub result: Expr,
}

impl ScoreProgram {
    /// Parses and validates program text. Returns the program plus warnings
    /// (initial parameters that had to be clamped into their bounds).
    pub fn parse(text: &str) -> Result<(Self, Vec<String>), ParseError> {
        parse::parse(text)
    }

    /// Canonical serialization; parsing it back yields a structurally equal
    /// program, and serializing again yields the identical string.
    pub fn canonical_text(&self) -> String {
        canon::render(self)
    }

    pub fn n_params(&self) -> usize {
        self.bounds.len()
    }
}

/// Language reference for `spl/1`, suitable for inclusion in generation
/// prompts and reports.
pub const GRAMMAR_DOC: &str = r#"spl/1 score-program reference
=============================

A score program ranks the fractional branching candidates at a search node.
It reads columns of the candidate feature matrix (min-max normalized to
[0, 1] per node), combines them with tunable parameters, and returns one
score per candidate. The candidate with the HIGHEST score is branched on;
ties go to the lowest candidate index.

Layout (line oriented, `#` starts a comment, blank lines ignored):

    spl/1
    used_features: [9, 43]
    params: [0.5, 1.0]
    bounds: [[0, 1], [0, 2]]
    score:
    let centrality = 4 * feature(9) * (1 - feature(9))
    return param(0) * centrality + param(1) * feature(43)

Grammar:

    program  = "spl/1" header "score:" { let-line } return-line
    header   = "used_features: [" ints "]"
               "params: [" numbers "]"
               "bounds: [[lo, hi], ...]"
    let-line = "let" NAME "=" expr        # one statement per line
    return   = "return" expr
    expr     = term { ("+" | "-") term }
    term     = unary { ("*" | "/") unary }
    unary    = "-" unary | primary
    primary  = NUMBER | call | NAME | "(" expr ")"
    call     = "feature(" INT ")" | "param(" INT ")"
             | ("abs" | "tanh" | "exp" | "sqrt" | "log1p") "(" expr ")"
             | ("min" | "max" | "pow") "(" expr "," expr ")"
             | "clip(" expr "," expr "," expr ")"

Rules:
- feature indices are 0..=90; at most 10 distinct features per program.
- used_features must list exactly the features the body references.
- params and bounds have equal length; every bound is finite with lo <= hi;
  initial params outside their bound are clamped with a warning.
- NUMBER is a non-negative decimal literal (optional fraction and exponent,
  e.g. 0.5, 2, 1e-8); negative values are written with unary minus.
- NAME refers to an earlier `let` binding; bindings cannot be reassigned.

Semantics:
- feature(i) is a vector (one entry per candidate); param(j) and literals
  are scalars. Operators work elementwise and broadcast scalars, so a
  scalar return value is broadcast to every candidate.
- clip(x, lo, hi) = min(max(x, lo), hi).
- Every intermediate value must be finite: division by zero, sqrt of a
  negative, log1p at or below -1, or exp overflow abort evaluation with an
  error. Guard denominators with a small constant, e.g. x / (y + 1e-8).
- softplus is available as the identity softplus(z) = log1p(exp(z)).
- Evaluation is deterministic: same program, parameters, and features
  always produce bit-identical scores.
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureMatrix, NUM_FEATURES};

    fn matrix(rows: &[[f64; 3]]) -> FeatureMatrix {
        // Columns 0..3 carry the given values; the rest are zero.
        let mut values = vec![0.0; rows.len() * NUM_FEATURES];
        for (r, row) in rows.iter().enumerate() {
            values[r * NUM_FEATURES..r * NUM_FEATURES + 3].copy_from_slice(row);
        }
        FeatureMatrix {
            values,
            candidate_indices: (0..rows.len()).collect(),
            normalized: true,
        }
    }

    const WEIGHTED: &str = "spl/1\n\
        used_features: [0, 1, 2]\n\
        params: [0.5, 2]\n\
        bounds: [[0, 1], [0, 4]]\n\
        score:\n\
        let mix = param(0) * feature(0) + (1 - param(0)) * feature(1)\n\
        return mix + param(1) * feature(2)\n";

    #[test]
    fn parses_and_evaluates_weighted_sum() {
        let (p, warnings) = ScoreProgram::parse(WEIGHTED).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(p.used_features, vec![0, 1, 2]);
        let m = matrix(&[[1.0, 0.0, 0.25], [0.0, 1.0, 0.5]]);
        let scores = evaluate(&p, &[0.5, 2.0], &m).unwrap();
        assert_eq!(scores, vec![0.5 + 0.5, 0.5 + 1.0]);
    }

    #[test]
    fn scalar_result_broadcasts() {
        let text = "spl/1\nused_features: []\nparams: [0.7]\nbounds: [[0, 1]]\nscore:\nreturn param(0)\n";
        let (p, _) = ScoreProgram::parse(text).unwrap();
        let m = matrix(&[[0.0; 3]; 3]);
        assert_eq!(evaluate(&p, &[0.7], &m).unwrap(), vec![0.7; 3]);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a comment\nspl/1\n\nused_features: [0] # trailing\nparams: []\nbounds: []\nscore:\n# body comment\nreturn feature(0)\n";
        let (p, _) = ScoreProgram::parse(text).unwrap();
        assert!(!p.canonical_text().contains('#'));
    }

    #[test]
    fn canonical_text_round_trips() {
        let (p, _) = ScoreProgram::parse(WEIGHTED).unwrap();
        let canon = p.canonical_text();
        let (again, warnings) = ScoreProgram::parse(&canon).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(again, p, "structural round trip");
        assert_eq!(again.canonical_text(), canon, "canonical form is a fixed point");
    }

    #[test]
    fn clamps_out_of_bound_initial_params_with_warning() {
        let text = "spl/1\nused_features: [0]\nparams: [2.5, -1]\nbounds: [[0, 1], [0, 1]]\nscore:\nreturn feature(0) * param(0) + param(1)\n";
        let (p, warnings) = ScoreProgram::parse(text).unwrap();
        assert_eq!(p.initial_params, vec![1.0, 0.0]);
        assert_eq!(warnings.len(), 2);
        assert!(warnings[0].contains("param(0)"));
    }

    #[test]
    fn rejects_feature_index_out_of_range() {
        let text = "spl/1\nused_features: [91]\nparams: []\nbounds: []\nscore:\nreturn feature(91)\n";
        let e = ScoreProgram::parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::FeatureIndex);
        let text = "spl/1\nused_features: [0]\nparams: []\nbounds: []\nscore:\nreturn feature(0) + feature(200)\n";
        let e = ScoreProgram::parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::FeatureIndex);
    }

    #[test]
    fn rejects_more_than_ten_features() {
        let text = "spl/1\nused_features: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]\nparams: []\nbounds: []\nscore:\nreturn feature(0)\n";
        let e = ScoreProgram::parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::TooManyFeatures);
    }

    #[test]
    fn rejects_header_body_feature_mismatch_both_ways() {
        // Body uses an undeclared feature.
        let text = "spl/1\nused_features: [0]\nparams: []\nbounds: []\nscore:\nreturn feature(0) + feature(5)\n";
        let e = ScoreProgram::parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::HeaderMismatch);
        assert!(e.to_string().contains("feature 5"));
        // Header declares a feature the body never touches.
        let text = "spl/1\nused_features: [0, 7]\nparams: []\nbounds: []\nscore:\nreturn feature(0)\n";
        let e = ScoreProgram::parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::HeaderMismatch);
        assert!(e.to_string().contains("feature 7"));
    }

    #[test]
    fn rejects_param_bound_arity_mismatch() {
        let text = "spl/1\nused_features: []\nparams: [0.5, 0.5]\nbounds: [[0, 1]]\nscore:\nreturn param(0)\n";
        let e = ScoreProgram::parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Arity);
    }

    #[test]
    fn rejects_inverted_or_nonfinite_bounds() {
        let text = "spl/1\nused_features: []\nparams: [0.5]\nbounds: [[1, 0]]\nscore:\nreturn param(0)\n";
        assert_eq!(ScoreProgram::parse(text).unwrap_err().kind, ParseErrorKind::InvalidBound);
        let text = "spl/1\nused_features: []\nparams: [0.5]\nbounds: [[0, 1e999]]\nscore:\nreturn param(0)\n";
        assert_eq!(ScoreProgram::parse(text).unwrap_err().kind, ParseErrorKind::InvalidNumber);
    }

    #[test]
    fn rejects_unbound_and_duplicate_names() {
        let text = "spl/1\nused_features: []\nparams: []\nbounds: []\nscore:\nreturn ghost\n";
        assert_eq!(ScoreProgram::parse(text).unwrap_err().kind, ParseErrorKind::UnboundName);
        let text = "spl/1\nused_features: [0]\nparams: []\nbounds: []\nscore:\nlet a = feature(0)\nlet a = feature(0)\nreturn a\n";
        assert_eq!(ScoreProgram::parse(text).unwrap_err().kind, ParseErrorKind::DuplicateBinding);
    }

    #[test]
    fn rejects_param_index_beyond_arity() {
        let text = "spl/1\nused_features: []\nparams: [0.5]\nbounds: [[0, 1]]\nscore:\nreturn param(1)\n";
        assert_eq!(ScoreProgram::parse(text).unwrap_err().kind, ParseErrorKind::ParamIndex);
    }

    #[test]
    fn rejects_malformed_structure() {
        assert_eq!(ScoreProgram::parse("").unwrap_err().kind, ParseErrorKind::Version);
        let text = "spl/2\nused_features: []\nparams: []\nbounds: []\nscore:\nreturn 1\n";
        assert_eq!(ScoreProgram::parse(text).unwrap_err().kind, ParseErrorKind::Version);
        let text = "spl/1\nused_features: []\nparams: []\nbounds: []\nscore:\nlet x = 1\n";
        let e = ScoreProgram::parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert!(e.to_string().contains("missing `return`"));
        let text = "spl/1\nused_features: []\nparams: []\nbounds: []\nscore:\nreturn 1\nlet y = 2\n";
        let e = ScoreProgram::parse(text).unwrap_err();
        assert!(e.to_string().contains("after `return`"));
        let text = "spl/1\nused_features: []\nparams: []\nbounds: []\nscore:\nreturn 1 +\n";
        assert_eq!(ScoreProgram::parse(text).unwrap_err().kind, ParseErrorKind::Syntax);
        let text = "spl/1\nused_features: []\nparams: []\nbounds: []\nscore:\nlet min = 1\nreturn min\n";
        assert_eq!(ScoreProgram::parse(text).unwrap_err().kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn error_messages_carry_line_numbers() {
        let text = "spl/1\nused_features: [0]\nparams: []\nbounds: []\nscore:\nlet a = feature(0)\nreturn a @ 2\n";
        let e = ScoreProgram::parse(text).unwrap_err();
        assert_eq!(e.line, 7);
        assert!(e.to_string().starts_with("line 7:"));
    }

    #[test]
    fn evaluation_flags_nonfinite_with_offending_expression() {
        // param(0) ranges over [-1, 0]; sqrt of a negative is NaN.
        let text = "spl/1\nused_features: []\nparams: [-0.5]\nbounds: [[-1, 0]]\nscore:\nreturn sqrt(param(0))\n";
        let (p, _) = ScoreProgram::parse(text).unwrap();
        let m = matrix(&[[0.0; 3]]);
        let e = evaluate(&p, &[-0.5], &m).unwrap_err();
        match e {
            EvalError::NonFinite { expr } => assert_eq!(expr, "sqrt(param(0))"),
            other => panic!("unexpected error {other:?}"),
        }
        // Division by an exact zero feature column.
        let text = "spl/1\nused_features: [0]\nparams: []\nbounds: []\nscore:\nreturn 1 / feature(0)\n";
        let (p, _) = ScoreProgram::parse(text).unwrap();
        let m = matrix(&[[0.0; 3]]);
        let e = evaluate(&p, &[], &m).unwrap_err();
        assert!(matches!(e, EvalError::NonFinite { .. }));
    }

    #[test]
    fn eval_checks_theta_arity_and_finiteness() {
        let text = "spl/1\nused_features: []\nparams: [0.5]\nbounds: [[0, 1]]\nscore:\nreturn param(0)\n";
        let (p, _) = ScoreProgram::parse(text).unwrap();
        let m = matrix(&[[0.0; 3]]);
        assert!(matches!(
            evaluate(&p, &[], &m).unwrap_err(),
            EvalError::ParamArity { expected: 1, got: 0 }
        ));
        assert!(matches!(
            evaluate(&p, &[f64::NAN], &m).unwrap_err(),
            EvalError::NonFiniteParam { index: 0 }
        ));
    }

    #[test]
    fn builtin_calls_all_work() {
        let text = "spl/1\nused_features: [0, 1]\nparams: []\nbounds: []\nscore:\nlet a = min(feature(0), feature(1))\nlet b = max(feature(0), 0.25)\nlet c = pow(feature(0) + 0.5, 2)\nlet d = clip(feature(1), 0.2, 0.8)\nreturn a + b + c + d + tanh(feature(0)) + log1p(feature(1)) + exp(feature(0)) + sqrt(feature(1)) + abs(-feature(0))\n";
        let (p, _) = ScoreProgram::parse(text).unwrap();
        let m = matrix(&[[0.5, 0.1, 0.0], [1.0, 0.9, 0.0]]);
        let scores = evaluate(&p, &[], &m).unwrap();
        let expect = |f0: f64, f1: f64| {
            f0.min(f1)
                + f0.max(0.25)
                + (f0 + 0.5).powf(2.0)
                + f1.clamp(0.2, 0.8)
                + f0.tanh()
                + f1.ln_1p()
                + f0.exp()
                + f1.sqrt()
                + f0.abs()
        };
        assert!((scores[0] - expect(0.5, 0.1)).abs() < 1e-15);
        assert!((scores[1] - expect(1.0, 0.9)).abs() < 1e-15);
    }

    #[test]
    fn header_feature_list_is_normalized_to_ascending_set() {
        let text = "spl/1\nused_features: [7, 0, 7]\nparams: []\nbounds: []\nscore:\nreturn feature(0) + feature(7)\n";
        let (p, _) = ScoreProgram::parse(text).unwrap();
        assert_eq!(p.used_features, vec![0, 7]);
    }

    #[test]
    fn grammar_doc_mentions_every_operator() {
        for needle in
            ["abs", "tanh", "exp", "sqrt", "log1p", "min", "max", "pow", "clip", "softplus"]
        {
            assert!(GRAMMAR_DOC.contains(needle), "grammar doc missing {needle}");
        }
    }
}
