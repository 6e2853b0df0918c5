//! Recursive-descent parser.
//!
//! Grammar (loosest binding first):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'pi' | func '(' expr (',' expr)* ')'
//!          | identifier | '(' expr ')'
//! ```

use thiserror::Error;

use super::lexer::{lex, SpannedTok, Tok};
use super::{BinaryOp, Expr, ExpressionAst, UnaryOp, CONSTANTS, FUNCTIONS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("lexical error at offset {offset}: {message}")]
    Lexical { offset: usize, message: String },
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("arity error at offset {offset}: function '{function}' takes exactly 1 argument, found {found}")]
    Arity { offset: usize, function: String, found: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Lexical { offset, .. }
            | ParseError::Syntax { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

pub fn parse_expression(source: &str) -> Result<ExpressionAst, ParseError> {
    let toks = lex(source)?;
    let mut parser = Parser { toks, pos: 0, last_offset: 0 };
    let root = parser.expr()?;
    if let Some(t) = parser.peek() {
        return Err(ParseError::Syntax {
            offset: t.offset,
            message: format!("unexpected {}", describe(&t.tok)),
        });
    }
    Ok(ExpressionAst::from_root(root))
}

struct Parser {
    toks: Vec<SpannedTok>,
    pos: usize,
    // Offset of the most recently consumed token; unexpected-end-of-input
    // errors point here, at the construct that was left incomplete.
    last_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<&SpannedTok> {
        self.toks.get(self.pos)
    }

    fn advance(&mut self) -> Option<SpannedTok> {
        let t = self.toks.get(self.pos).cloned();
        if let Some(ref t) = t {
            self.last_offset = t.offset;
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(want) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn end_of_input(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.last_offset,
            message: format!("expected {expected}, found end of input"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.term()?;
        loop {
            let op = match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) => BinaryOp::Add,
                Some(Tok::Minus) => BinaryOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.term()?;
            node = Expr::binary(op, node, rhs);
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.unary()?;
        loop {
            let op = match self.peek().map(|t| &t.tok) {
                Some(Tok::Star) => BinaryOp::Mul,
                Some(Tok::Slash) => BinaryOp::Div,
                _ => break,
            };
            self.advance();
            let rhs = self.unary()?;
            node = Expr::binary(op, node, rhs);
        }
        Ok(node)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return Ok(Expr::neg(inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat(&Tok::Caret) {
            // Exponent parsed at unary level: right-associative, and
            // "2^-3" works.
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = match self.advance() {
            Some(t) => t,
            None => return Err(self.end_of_input("an expression")),
        };
        match t.tok {
            Tok::Num(value) => Ok(Expr::constant(value)),
            Tok::LParen => {
                let inner = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.unexpected_or_eof("')'"));
                }
                Ok(inner)
            }
            Tok::Ident(name) => self.ident(name, t.offset),
            other => Err(ParseError::Syntax {
                offset: t.offset,
                message: format!("unexpected {}", describe(&other)),
            }),
        }
    }

    fn ident(&mut self, name: String, offset: usize) -> Result<Expr, ParseError> {
        if CONSTANTS.contains(&name.as_str()) {
            return Ok(Expr::constant(std::f64::consts::PI));
        }
        if let Some(op) = function_op(&name) {
            if !self.eat(&Tok::LParen) {
                return Err(ParseError::Syntax {
                    offset,
                    message: format!("function '{name}' requires a parenthesized argument"),
                });
            }
            let mut args = vec![self.expr()?];
            while self.eat(&Tok::Comma) {
                args.push(self.expr()?);
            }
            if !self.eat(&Tok::RParen) {
                return Err(self.unexpected_or_eof("')'"));
            }
            if args.len() != 1 {
                return Err(ParseError::Arity {
                    offset,
                    function: name,
                    found: args.len(),
                });
            }
            return Ok(Expr::unary(op, args.into_iter().next().unwrap()));
        }
        // A variable followed by '(' reads as a call to an unknown function.
        if self.peek().map(|t| &t.tok) == Some(&Tok::LParen) {
            return Err(ParseError::Syntax {
                offset,
                message: format!("unknown function '{name}'"),
            });
        }
        Ok(Expr::var(name))
    }

    fn unexpected_or_eof(&mut self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::Syntax {
                offset: t.offset,
                message: format!("expected {expected}, found {}", describe(&t.tok)),
            },
            None => self.end_of_input(expected),
        }
    }
}

fn function_op(name: &str) -> Option<UnaryOp> {
    match name {
        "cos" => Some(UnaryOp::Cos),
        "sin" => Some(UnaryOp::Sin),
        "exp" => Some(UnaryOp::Exp),
        "log" => Some(UnaryOp::Log),
        "abs" => Some(UnaryOp::Abs),
        _ => None,
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number '{v}'"),
        Tok::Ident(n) => format!("identifier '{n}'"),
        Tok::Plus => "'+'".to_string(),
        Tok::Minus => "'-'".to_string(),
        Tok::Star => "'*'".to_string(),
        Tok::Slash => "'/'".to_string(),
        Tok::Caret => "'^'".to_string(),
        Tok::LParen => "'('".to_string(),
        Tok::RParen => "')'".to_string(),
        Tok::Comma => "','".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::{evaluate, print_expression, EvalContext};

    fn eval_consts(src: &str) -> f64 {
        evaluate(&parse_expression(src).unwrap(), &EvalContext::new()).unwrap()
    }

    #[test]
    fn single_variable() {
        let ast = parse_expression("x_1").unwrap();
        assert_eq!(ast.root(), &Expr::var("x_1"));
        assert_eq!(ast.variables(), ["x_1".to_string()]);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval_consts("2+3*4"), 14.0);
        assert_eq!(eval_consts("2^3^2"), 512.0);
        assert_eq!(eval_consts("-2^2"), -4.0);
        assert_eq!(eval_consts("2^-1"), 0.5);
        assert_eq!(eval_consts("1 - 2 - 3"), -4.0);
        assert_eq!(eval_consts("8 / 4 / 2"), 1.0);
    }

    #[test]
    fn nonlinear_label_expression_has_three_additive_terms() {
        let ast = parse_expression("cos(x_1^2 * pi/180) - sin(x_2 * pi/180) + x_1*x_2").unwrap();
        // Left-associated chain: Add(Sub(cos(..), sin(..)), Mul(..)).
        fn additive_terms(e: &Expr) -> usize {
            match e {
                Expr::Binary(BinaryOp::Add, l, r) | Expr::Binary(BinaryOp::Sub, l, r) => {
                    additive_terms(l) + additive_terms(r)
                }
                _ => 1,
            }
        }
        assert_eq!(additive_terms(ast.root()), 3);
        assert_eq!(ast.variables(), ["x_1".to_string(), "x_2".to_string()]);
        match ast.root() {
            Expr::Binary(BinaryOp::Add, l, r) => {
                assert!(matches!(**l, Expr::Binary(BinaryOp::Sub, _, _)));
                assert!(matches!(**r, Expr::Binary(BinaryOp::Mul, _, _)));
            }
            other => panic!("unexpected root {other:?}"),
        }
    }

    #[test]
    fn truncated_input_reports_offset_of_dangling_operator() {
        match parse_expression("x_1 +") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn empty_input_reports_offset_zero() {
        match parse_expression("") {
            Err(e) => assert_eq!(e.offset(), 0),
            other => panic!("expected error, got {other:?}"),
        }
    }

    #[test]
    fn arity_errors() {
        match parse_expression("cos(x_1, x_2)") {
            Err(ParseError::Arity { function, found, .. }) => {
                assert_eq!(function, "cos");
                assert_eq!(found, 2);
            }
            other => panic!("expected arity error, got {other:?}"),
        }
    }

    #[test]
    fn function_without_parens_is_rejected() {
        assert!(matches!(
            parse_expression("cos x_1"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expression("foo(x_1)"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn pi_is_a_constant_not_a_variable() {
        let ast = parse_expression("pi * x_1").unwrap();
        assert_eq!(ast.variables(), ["x_1".to_string()]);
        assert_eq!(eval_consts("cos(pi)"), -1.0);
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_expression("x_1+x_2*3").unwrap();
        let b = parse_expression("  x_1 +\tx_2   * 3 ").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_print_round_trip_on_handwritten_cases() {
        for src in [
            "x_1",
            "(x_1 * x_2)",
            "cos(x_1^2 * pi/180) - sin(x_2 * pi/180) + x_1*x_2",
            "-x_1^2 + 2^-3",
            "abs(x_1) / (1 + exp(-x_2))",
            "log(x_1 + 2.5) - 0.001",
        ] {
            let ast = parse_expression(src).unwrap();
            let printed = print_expression(&ast);
            let reparsed = parse_expression(&printed).unwrap();
            assert_eq!(ast, reparsed, "round trip failed for {src} -> {printed}");
        }
    }
}
