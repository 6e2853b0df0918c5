//! The label-function expression language.
//!
//! Expressions map the informative features of a dataset to a scalar
//! regression value. The grammar is deliberately small:
//!
//! - binary operators `+`, `-`, `*`, `/`, `^` (power, right-associative)
//! - unary minus
//! - functions `cos`, `sin`, `exp`, `log`, `abs`, applied with parentheses
//! - the constant `pi`
//! - variables matching `[a-zA-Z_][a-zA-Z0-9_]*`
//!
//! Precedence from loosest to tightest: `+ -`, `* /`, unary minus, `^`.
//! So `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2) = 512`.
//!
//! ASTs are immutable after construction and safe to share across threads;
//! evaluation is pure. [`print_expression`] emits a canonical fully
//! parenthesized form, and `parse(print(ast))` returns a structurally
//! identical AST.

mod diff;
mod eval;
mod lexer;
mod parser;

pub use diff::{differentiate, DiffError};
pub use eval::{evaluate, EvalContext, EvalError};
pub use parser::{parse_expression, ParseError};

use std::fmt;

/// Function names reserved by the grammar.
pub const FUNCTIONS: [&str; 5] = ["cos", "sin", "exp", "log", "abs"];
/// Built-in constants.
pub const CONSTANTS: [&str; 1] = ["pi"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Cos,
    Sin,
    Exp,
    Log,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Expression node.
///
/// Canonical-form invariant: `Neg` never directly wraps a `Const`; the
/// constructors fold that case into a negative constant, so negative
/// literals survive a print/parse round trip unchanged.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn neg(inner: Expr) -> Expr {
        match inner {
            Expr::Const(c) => Expr::Const(-c),
            other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
        }
    }

    pub fn unary(op: UnaryOp, inner: Expr) -> Expr {
        match op {
            UnaryOp::Neg => Expr::neg(inner),
            _ => Expr::Unary(op, Box::new(inner)),
        }
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Expr {
        Expr::Binary(op, Box::new(left), Box::new(right))
    }
}

/// A parsed expression together with its referenced variables, in order of
/// first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionAst {
    root: Expr,
    variables: Vec<String>,
}

impl ExpressionAst {
    pub fn from_root(root: Expr) -> Self {
        let mut variables = Vec::new();
        collect_variables(&root, &mut variables);
        Self { root, variables }
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn references(&self, name: &str) -> bool {
        self.variables.iter().any(|v| v == name)
    }
}

fn collect_variables(expr: &Expr, out: &mut Vec<String>) {
    match expr {
        Expr::Const(_) => {}
        Expr::Var(name) => {
            if !out.iter().any(|v| v == name) {
                out.push(name.clone());
            }
        }
        Expr::Unary(_, inner) => collect_variables(inner, out),
        Expr::Binary(_, l, r) => {
            collect_variables(l, out);
            collect_variables(r, out);
        }
    }
}

/// Canonical fully parenthesized text form. `parse(print(ast))` is the
/// structural identity.
pub fn print_expression(ast: &ExpressionAst) -> String {
    let mut out = String::new();
    write_expr(ast.root(), &mut out);
    out
}

fn write_expr(expr: &Expr, out: &mut String) {
    use fmt::Write;
    match expr {
        Expr::Const(c) => {
            // Display for f64 is the shortest digit string that parses
            // back to the same bits.
            write!(out, "{c}").unwrap();
        }
        Expr::Var(name) => out.push_str(name),
        Expr::Unary(UnaryOp::Neg, inner) => {
            out.push_str("(-");
            write_expr(inner, out);
            out.push(')');
        }
        Expr::Unary(op, inner) => {
            let name = match op {
                UnaryOp::Cos => "cos",
                UnaryOp::Sin => "sin",
                UnaryOp::Exp => "exp",
                UnaryOp::Log => "log",
                UnaryOp::Abs => "abs",
                UnaryOp::Neg => unreachable!(),
            };
            out.push_str(name);
            out.push('(');
            write_expr(inner, out);
            out.push(')');
        }
        Expr::Binary(op, l, r) => {
            let sym = match op {
                BinaryOp::Add => '+',
                BinaryOp::Sub => '-',
                BinaryOp::Mul => '*',
                BinaryOp::Div => '/',
                BinaryOp::Pow => '^',
            };
            out.push('(');
            write_expr(l, out);
            out.push(' ');
            out.push(sym);
            out.push(' ');
            write_expr(r, out);
            out.push(')');
        }
    }
}

impl fmt::Display for ExpressionAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expression(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn print_is_canonical() {
        let ast = ExpressionAst::from_root(Expr::binary(
            BinaryOp::Mul,
            Expr::var("x_1"),
            Expr::var("x_2"),
        ));
        assert_eq!(print_expression(&ast), "(x_1 * x_2)");
        assert_eq!(
            print_expression(&ExpressionAst::from_root(Expr::var("x_1"))),
            "x_1"
        );
    }

    #[test]
    fn neg_constant_folds() {
        assert_eq!(Expr::neg(Expr::constant(2.5)), Expr::Const(-2.5));
        assert!(matches!(
            Expr::neg(Expr::var("x")),
            Expr::Unary(UnaryOp::Neg, _)
        ));
    }

    #[test]
    fn variables_in_first_appearance_order() {
        let ast = parse_expression("x_2 + x_1 * x_2").unwrap();
        assert_eq!(ast.variables(), ["x_2".to_string(), "x_1".to_string()]);
    }
}
