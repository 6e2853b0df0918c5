use std::collections::BTreeMap;

use thiserror::Error;

use super::{BinaryOp, Expr, ExpressionAst, UnaryOp};

/// Variable bindings for one evaluation.
///
/// Every variable of the AST must be bound; an unbound lookup is an error,
/// never a silent default. The `pi` constant needs no binding, it is
/// resolved at parse time.
#[derive(Debug, Clone, Default)]
pub struct EvalContext {
    bindings: BTreeMap<String, f64>,
}

impl EvalContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, name: impl Into<String>, value: f64) -> Self {
        self.bindings.insert(name.into(), value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.bindings.insert(name.to_string(), value);
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        let mut ctx = Self::new();
        for (name, value) in pairs {
            ctx.set(name, value);
        }
        ctx
    }

    fn lookup(&self, name: &str) -> Option<f64> {
        self.bindings.get(name).copied()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("unbound variable '{name}'")]
    UnboundVariable { name: String },
    #[error("non-finite result from '{op}'")]
    NonFinite { op: &'static str },
}

/// IEEE-754 double evaluation. The first subexpression producing a
/// non-finite value (division by zero, log of a non-positive number, an
/// overflowing exp, ...) aborts the evaluation with its operation kind.
pub fn evaluate(ast: &ExpressionAst, ctx: &EvalContext) -> Result<f64, EvalError> {
    eval_node(ast.root(), ctx)
}

fn eval_node(expr: &Expr, ctx: &EvalContext) -> Result<f64, EvalError> {
    match expr {
        Expr::Const(c) => Ok(*c),
        Expr::Var(name) => ctx
            .lookup(name)
            .ok_or_else(|| EvalError::UnboundVariable { name: name.clone() }),
        Expr::Unary(op, inner) => {
            let v = eval_node(inner, ctx)?;
            let (value, kind) = match op {
                UnaryOp::Neg => (-v, "neg"),
                UnaryOp::Cos => (v.cos(), "cos"),
                UnaryOp::Sin => (v.sin(), "sin"),
                UnaryOp::Exp => (v.exp(), "exp"),
                UnaryOp::Log => (v.ln(), "log"),
                UnaryOp::Abs => (v.abs(), "abs"),
            };
            check_finite(value, kind)
        }
        Expr::Binary(op, l, r) => {
            let a = eval_node(l, ctx)?;
            let b = eval_node(r, ctx)?;
            let (value, kind) = match op {
                BinaryOp::Add => (a + b, "add"),
                BinaryOp::Sub => (a - b, "sub"),
                BinaryOp::Mul => (a * b, "mul"),
                BinaryOp::Div => (a / b, "div"),
                BinaryOp::Pow => (a.powf(b), "pow"),
            };
            check_finite(value, kind)
        }
    }
}

fn check_finite(value: f64, op: &'static str) -> Result<f64, EvalError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::NonFinite { op })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse_expression;

    const NONLINEAR: &str = "cos(x_1^2 * pi/180) - sin(x_2 * pi/180) + x_1*x_2";

    #[test]
    fn identity_at_a_point() {
        let ast = parse_expression("x_1").unwrap();
        let ctx = EvalContext::new().bind("x_1", 0.3);
        assert_eq!(evaluate(&ast, &ctx).unwrap(), 0.3);
    }

    #[test]
    fn nonlinear_expression_at_origin() {
        let ast = parse_expression(NONLINEAR).unwrap();
        let ctx = EvalContext::from_pairs([("x_1", 0.0), ("x_2", 0.0)]);
        assert_eq!(evaluate(&ast, &ctx).unwrap(), 1.0);
    }

    #[test]
    fn nonlinear_expression_matches_manual_composition() {
        let ast = parse_expression(NONLINEAR).unwrap();
        let ctx = EvalContext::from_pairs([("x_1", 1.0), ("x_2", 1.0)]);
        let got = evaluate(&ast, &ctx).unwrap();
        // Step-by-step composition with the standard library.
        let pi = std::f64::consts::PI;
        let want = (1.0f64.powf(2.0) * pi / 180.0).cos() - (1.0 * pi / 180.0).sin() + 1.0 * 1.0;
        assert!(
            (got - want).abs() <= 1e-15 * want.abs().max(1.0),
            "{got} vs {want}"
        );
    }

    #[test]
    fn unbound_variable_is_reported_by_name() {
        let ast = parse_expression("x_1 + x_9").unwrap();
        let ctx = EvalContext::new().bind("x_1", 1.0);
        assert_eq!(
            evaluate(&ast, &ctx),
            Err(EvalError::UnboundVariable { name: "x_9".to_string() })
        );
    }

    #[test]
    fn non_finite_results_are_flagged_with_the_op() {
        let div = parse_expression("1 / x_1").unwrap();
        let ctx = EvalContext::new().bind("x_1", 0.0);
        assert_eq!(evaluate(&div, &ctx), Err(EvalError::NonFinite { op: "div" }));

        let log = parse_expression("log(x_1)").unwrap();
        let ctx = EvalContext::new().bind("x_1", -1.0);
        assert_eq!(evaluate(&log, &ctx), Err(EvalError::NonFinite { op: "log" }));

        let exp = parse_expression("exp(x_1)").unwrap();
        let ctx = EvalContext::new().bind("x_1", 1e9);
        assert_eq!(evaluate(&exp, &ctx), Err(EvalError::NonFinite { op: "exp" }));
    }
}
