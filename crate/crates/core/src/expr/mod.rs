//! One-variable real expressions.
//!
//! The grammar covers constants, a single free variable, the unary operators
//! `-`, `exp`, `ln`, `sin`, `cos`, `abs`, `sqrt` and the binary operators
//! `+ - * / ^`. Precedence from tightest to loosest is `^`, unary `-`,
//! `* /`, `+ -`. All binary operators associate to the left except `^`.
//! There is no implicit multiplication.
//!
//! ```
//! use epsdelta::expr::Expression;
//!
//! let e = Expression::parse("1 - exp(-y)").unwrap();
//! assert_eq!(e.evaluate(0.0).unwrap(), 0.0);
//! assert_eq!(e.to_string(), "1 - exp(-y)");
//! ```

mod parser;

use std::fmt;

use thiserror::Error;

use crate::diff::{central_difference, DerivativeOrder};

pub use parser::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sin,
    Cos,
    Abs,
    Sqrt,
}

impl UnaryOp {
    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "abs" => UnaryOp::Abs,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Abs => "abs",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

/// Expression tree. Constants produced by the parser are always non-negative;
/// a leading minus becomes [`UnaryOp::Neg`].
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
}

// Binding strength used by the printer. Mirrors the parser's levels.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Node {
    pub fn constant(value: f64) -> Self {
        Node::Const(value)
    }

    pub fn unary(op: UnaryOp, arg: Node) -> Self {
        Node::Unary(op, Box::new(arg))
    }

    pub fn binary(op: BinaryOp, lhs: Node, rhs: Node) -> Self {
        Node::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    fn precedence(&self) -> u8 {
        match self {
            Node::Const(_) | Node::Var => PREC_ATOM,
            Node::Unary(UnaryOp::Neg, _) => PREC_UNARY,
            Node::Unary(..) => PREC_ATOM,
            Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => PREC_SUM,
            Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => PREC_PRODUCT,
            Node::Binary(BinaryOp::Pow, ..) => PREC_POWER,
        }
    }

    fn write(&self, var: &str, out: &mut String) {
        match self {
            Node::Const(c) => out.push_str(&c.to_string()),
            Node::Var => out.push_str(var),
            Node::Unary(UnaryOp::Neg, arg) => {
                out.push('-');
                arg.write_at(PREC_UNARY, var, out);
            }
            Node::Unary(op, arg) => {
                out.push_str(op.name());
                out.push('(');
                arg.write(var, out);
                out.push(')');
            }
            Node::Binary(op, lhs, rhs) => {
                let (left_min, right_min) = match op {
                    BinaryOp::Add | BinaryOp::Sub => (PREC_SUM, PREC_PRODUCT),
                    BinaryOp::Mul | BinaryOp::Div => (PREC_PRODUCT, PREC_UNARY),
                    BinaryOp::Pow => (PREC_ATOM, PREC_UNARY),
                };
                lhs.write_at(left_min, var, out);
                if *op == BinaryOp::Pow {
                    out.push('^');
                } else {
                    out.push(' ');
                    out.push_str(op.symbol());
                    out.push(' ');
                }
                rhs.write_at(right_min, var, out);
            }
        }
    }

    fn write_at(&self, min_prec: u8, var: &str, out: &mut String) {
        if self.precedence() < min_prec {
            out.push('(');
            self.write(var, out);
            out.push(')');
        } else {
            self.write(var, out);
        }
    }

    fn render(&self, var: &str) -> String {
        let mut out = String::new();
        self.write(var, &mut out);
        out
    }

    fn eval(&self, y: f64, var: &str) -> Result<f64, EvalError> {
        let fail = |kind| EvalError {
            kind,
            node: self.render(var),
            at: y,
        };
        let value = match self {
            Node::Const(c) => *c,
            Node::Var => y,
            Node::Unary(op, arg) => {
                let v = arg.eval(y, var)?;
                match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Exp => v.exp(),
                    UnaryOp::Ln if v <= 0.0 => return Err(fail(EvalErrorKind::LogOfNonPositive)),
                    UnaryOp::Ln => v.ln(),
                    UnaryOp::Sin => v.sin(),
                    UnaryOp::Cos => v.cos(),
                    UnaryOp::Abs => v.abs(),
                    UnaryOp::Sqrt if v < 0.0 => return Err(fail(EvalErrorKind::SqrtOfNegative)),
                    UnaryOp::Sqrt => v.sqrt(),
                }
            }
            Node::Binary(op, lhs, rhs) => {
                let l = lhs.eval(y, var)?;
                let r = rhs.eval(y, var)?;
                match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div if r == 0.0 => return Err(fail(EvalErrorKind::DivisionByZero)),
                    BinaryOp::Div => l / r,
                    BinaryOp::Pow => {
                        let p = l.powf(r);
                        if p.is_nan() {
                            return Err(fail(EvalErrorKind::InvalidPower));
                        }
                        p
                    }
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(fail(EvalErrorKind::NonFinite))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    InvalidPower,
    NonFinite,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::LogOfNonPositive => "logarithm of a non-positive value",
            EvalErrorKind::SqrtOfNegative => "square root of a negative value",
            EvalErrorKind::InvalidPower => "power is undefined",
            EvalErrorKind::NonFinite => "non-finite result",
        })
    }
}

/// Domain error raised while evaluating an expression. `node` is the printed
/// subexpression that failed.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error in `{node}` at {at}: {kind}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub node: String,
    pub at: f64,
}

/// A parsed expression in one free variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    ast: Node,
    variable: String,
    source: String,
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let (ast, variable) = parser::parse(source)?;
        Ok(Expression {
            ast,
            variable: variable.unwrap_or_else(|| "y".to_owned()),
            source: source.to_owned(),
        })
    }

    /// Builds an expression directly from a tree. The source text is the
    /// printed form of the tree.
    pub fn from_ast(ast: Node, variable: &str) -> Self {
        let source = ast.render(variable);
        Expression {
            ast,
            variable: variable.to_owned(),
            source,
        }
    }

    pub fn ast(&self) -> &Node {
        &self.ast
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn evaluate(&self, y: f64) -> Result<f64, EvalError> {
        self.ast.eval(y, &self.variable)
    }

    /// Central finite difference of the given order at `y`.
    pub fn differentiate_numeric(&self, y: f64, order: DerivativeOrder) -> Result<f64, EvalError> {
        self.evaluate(y)?;
        central_difference(|t| self.evaluate(t), y, order)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ast.render(&self.variable))
    }
}
