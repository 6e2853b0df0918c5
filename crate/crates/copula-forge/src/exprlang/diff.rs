//! Symbolic differentiation.
//!
//! Standard product, quotient, and chain rules. Powers are differentiated
//! only for constant exponents; anything else is an explicit error rather
//! than a wrong answer. Results are simplified only through trivial
//! identities (`x*0 -> 0`, `x*1 -> x`, `x+0 -> x`, `x^1 -> x`, `x^0 -> 1`),
//! so the output is correct rather than pretty.

use thiserror::Error;

use super::{BinaryOp, Expr, ExpressionAst, UnaryOp};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffError {
    #[error("cannot differentiate a power with a non-constant exponent")]
    NonConstantExponent,
}

/// Derivative of `ast` with respect to `wrt`. Differentiating with respect
/// to a variable the expression never mentions yields the zero constant.
pub fn differentiate(ast: &ExpressionAst, wrt: &str) -> Result<ExpressionAst, DiffError> {
    let root = d(ast.root(), wrt)?;
    Ok(ExpressionAst::from_root(root))
}

fn d(expr: &Expr, wrt: &str) -> Result<Expr, DiffError> {
    Ok(match expr {
        Expr::Const(_) => Expr::constant(0.0),
        Expr::Var(name) => {
            if name == wrt {
                Expr::constant(1.0)
            } else {
                Expr::constant(0.0)
            }
        }
        Expr::Unary(op, u) => {
            let du = d(u, wrt)?;
            match op {
                UnaryOp::Neg => neg(du),
                UnaryOp::Cos => mul(neg(sin((**u).clone())), du),
                UnaryOp::Sin => mul(cos((**u).clone()), du),
                UnaryOp::Exp => mul(exp((**u).clone()), du),
                UnaryOp::Log => div(du, (**u).clone()),
                // sign(u) * u', written as (u / |u|) * u'; undefined at
                // u = 0, where evaluation flags the division.
                UnaryOp::Abs => mul(div((**u).clone(), abs((**u).clone())), du),
            }
        }
        Expr::Binary(op, l, r) => {
            let (l, r) = (&**l, &**r);
            match op {
                BinaryOp::Add => add(d(l, wrt)?, d(r, wrt)?),
                BinaryOp::Sub => sub(d(l, wrt)?, d(r, wrt)?),
                BinaryOp::Mul => add(mul(d(l, wrt)?, r.clone()), mul(l.clone(), d(r, wrt)?)),
                BinaryOp::Div => div(
                    sub(mul(d(l, wrt)?, r.clone()), mul(l.clone(), d(r, wrt)?)),
                    pow(r.clone(), Expr::constant(2.0)),
                ),
                BinaryOp::Pow => match r {
                    Expr::Const(c) => mul(
                        mul(
                            Expr::constant(*c),
                            pow(l.clone(), Expr::constant(c - 1.0)),
                        ),
                        d(l, wrt)?,
                    ),
                    _ => return Err(DiffError::NonConstantExponent),
                },
            }
        }
    })
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 1.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Expr::binary(BinaryOp::Add, a, b)
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        a
    } else if is_zero(&a) {
        neg(b)
    } else {
        Expr::binary(BinaryOp::Sub, a, b)
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::constant(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::binary(BinaryOp::Mul, a, b)
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_one(&b) {
        a
    } else {
        Expr::binary(BinaryOp::Div, a, b)
    }
}

fn pow(base: Expr, exponent: Expr) -> Expr {
    match exponent {
        Expr::Const(c) if c == 1.0 => base,
        Expr::Const(c) if c == 0.0 => Expr::constant(1.0),
        e => Expr::binary(BinaryOp::Pow, base, e),
    }
}

fn neg(e: Expr) -> Expr {
    Expr::neg(e)
}

fn cos(e: Expr) -> Expr {
    Expr::unary(UnaryOp::Cos, e)
}

fn sin(e: Expr) -> Expr {
    Expr::unary(UnaryOp::Sin, e)
}

fn exp(e: Expr) -> Expr {
    Expr::unary(UnaryOp::Exp, e)
}

fn abs(e: Expr) -> Expr {
    Expr::unary(UnaryOp::Abs, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::{evaluate, parse_expression, EvalContext};

    #[test]
    fn product_with_constant_cofactor() {
        let ast = parse_expression("x_1 * x_2").unwrap();
        let dx1 = differentiate(&ast, "x_1").unwrap();
        assert_eq!(dx1.root(), &Expr::var("x_2"));
    }

    #[test]
    fn absent_variable_gives_zero() {
        let ast = parse_expression("x_1 * x_2").unwrap();
        let dx3 = differentiate(&ast, "x_3").unwrap();
        assert_eq!(dx3.root(), &Expr::constant(0.0));
    }

    #[test]
    fn non_constant_exponent_is_an_error() {
        let ast = parse_expression("x_1 ^ x_2").unwrap();
        assert_eq!(
            differentiate(&ast, "x_1"),
            Err(DiffError::NonConstantExponent)
        );
        // Constant base with variable exponent is the same case.
        let ast = parse_expression("2 ^ x_1").unwrap();
        assert!(differentiate(&ast, "x_1").is_err());
    }

    fn central_difference(
        ast: &ExpressionAst,
        wrt: &str,
        point: &[(&str, f64)],
        h: f64,
    ) -> f64 {
        let mut plus = EvalContext::new();
        let mut minus = EvalContext::new();
        for (name, v) in point {
            let bump = if name == &wrt { h } else { 0.0 };
            plus.set(name, v + bump);
            minus.set(name, v - bump);
        }
        (evaluate(ast, &plus).unwrap() - evaluate(ast, &minus).unwrap()) / (2.0 * h)
    }

    #[test]
    fn nonlinear_expression_derivative_matches_finite_differences() {
        let ast =
            parse_expression("cos(x_1^2 * pi/180) - sin(x_2 * pi/180) + x_1*x_2").unwrap();
        let dx1 = differentiate(&ast, "x_1").unwrap();
        let mut prng = crate::stats::Prng::new(17);
        for _ in 0..100 {
            let x1 = 2.0 * prng.uniform_open01() - 1.0;
            let x2 = 2.0 * prng.uniform_open01() - 1.0;
            let ctx = EvalContext::from_pairs([("x_1", x1), ("x_2", x2)]);
            let sym = evaluate(&dx1, &ctx).unwrap();
            let fd = central_difference(&ast, "x_1", &[("x_1", x1), ("x_2", x2)], 1e-6);
            assert!(
                (sym - fd).abs() <= 1e-6 * (1.0 + sym.abs()),
                "at ({x1}, {x2}): symbolic {sym}, fd {fd}"
            );
        }
    }

    #[test]
    fn power_rule_and_chain_rule() {
        let ast = parse_expression("exp(-x^2)").unwrap();
        let dx = differentiate(&ast, "x").unwrap();
        for &x in &[-1.5, -0.3, 0.0, 0.7, 2.0] {
            let ctx = EvalContext::new().bind("x", x);
            let sym = evaluate(&dx, &ctx).unwrap();
            let want = -2.0 * x * (-x * x).exp();
            assert!((sym - want).abs() <= 1e-12, "x = {x}: {sym} vs {want}");
        }
    }

    #[test]
    fn abs_derivative_is_sign() {
        let ast = parse_expression("abs(x)").unwrap();
        let dx = differentiate(&ast, "x").unwrap();
        assert_eq!(
            evaluate(&dx, &EvalContext::new().bind("x", 2.0)).unwrap(),
            1.0
        );
        assert_eq!(
            evaluate(&dx, &EvalContext::new().bind("x", -3.0)).unwrap(),
            -1.0
        );
        // Undefined at the kink: flagged, not silently wrong.
        assert!(evaluate(&dx, &EvalContext::new().bind("x", 0.0)).is_err());
    }
}
