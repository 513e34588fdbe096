//! Closed-form expressions over the variables `t, u, r, s, n`, evaluated in
//! the extended reals.
//!
//! Functions Φ(t, u), plane maps E(t, u) and weights φ(r), ω(s) are all
//! values of [`Expr`], so they can travel through JSON and the command line.

mod compile;
mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ext_real::ExtReal;

pub use compile::Program;
pub use eval::{Bindings, EvalTrace};
pub use parse::parse_expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    U,
    R,
    S,
    N,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::T, Var::U, Var::R, Var::S, Var::N];

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::U => "u",
            Var::R => "r",
            Var::S => "s",
            Var::N => "n",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == name)
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Abs,
    Exp,
    Ln,
    Sqrt,
    Cosh,
}

impl UnaryOp {
    fn func_name(self) -> Option<&'static str> {
        match self {
            UnaryOp::Neg => None,
            UnaryOp::Abs => Some("abs"),
            UnaryOp::Exp => Some("exp"),
            UnaryOp::Ln => Some("ln"),
            UnaryOp::Sqrt => Some("sqrt"),
            UnaryOp::Cosh => Some("cosh"),
        }
    }

    pub fn apply(self, x: ExtReal) -> ExtReal {
        match self {
            UnaryOp::Neg => -x,
            UnaryOp::Abs => x.abs(),
            UnaryOp::Exp => x.exp(),
            UnaryOp::Ln => x.ln(),
            UnaryOp::Sqrt => x.sqrt(),
            UnaryOp::Cosh => x.cosh(),
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
    Min,
    Max,
}

impl BinaryOp {
    pub fn apply(self, a: ExtReal, b: ExtReal) -> ExtReal {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a / b,
            BinaryOp::Pow => a.pow(b),
            BinaryOp::Min => a.min(b),
            BinaryOp::Max => a.max(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Comparison {
    fn symbol(self) -> &'static str {
        match self {
            Comparison::Lt => "<",
            Comparison::Le => "<=",
            Comparison::Gt => ">",
            Comparison::Ge => ">=",
            Comparison::Eq => "==",
        }
    }

    /// `None` when either side is undefined.
    pub fn holds(self, a: ExtReal, b: ExtReal) -> Option<bool> {
        let ord = a.partial_cmp(&b)?;
        use std::cmp::Ordering::*;
        Some(match self {
            Comparison::Lt => ord == Less,
            Comparison::Le => ord != Greater,
            Comparison::Gt => ord == Greater,
            Comparison::Ge => ord != Less,
            Comparison::Eq => ord == Equal,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(ExtReal),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Cond {
        cmp: Comparison,
        left: Box<Expr>,
        right: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("variable `{name}` at offset {offset} is not allowed here")]
    VariableNotAllowed { offset: usize, name: String },
    #[error("unbound variable `{0}`")]
    Unbound(Var),
}

impl Expr {
    pub fn constant(x: f64) -> Expr {
        Expr::Const(ExtReal::from_f64(x))
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn cond(cmp: Comparison, left: Expr, right: Expr, then: Expr, otherwise: Expr) -> Expr {
        Expr::Cond {
            cmp,
            left: Box::new(left),
            right: Box::new(right),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        }
    }

    /// Parses with every variable allowed.
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        parse_expr(text, &Var::ALL)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Unary(_, e) => e.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Cond {
                left,
                right,
                then,
                otherwise,
                ..
            } => {
                for e in [left, right, then, otherwise] {
                    e.collect_vars(out);
                }
            }
        }
    }

    /// Replaces variables simultaneously; variables without a replacement stay.
    pub fn substitute(&self, replace: &dyn Fn(Var) -> Option<Expr>) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(v) => replace(*v).unwrap_or(Expr::Var(*v)),
            Expr::Unary(op, e) => Expr::unary(*op, e.substitute(replace)),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.substitute(replace), b.substitute(replace)),
            Expr::Cond {
                cmp,
                left,
                right,
                then,
                otherwise,
            } => Expr::cond(
                *cmp,
                left.substitute(replace),
                right.substitute(replace),
                then.substitute(replace),
                otherwise.substitute(replace),
            ),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Unary(_, e) => 1 + e.node_count(),
            Expr::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
            Expr::Cond {
                left,
                right,
                then,
                otherwise,
                ..
            } => 1 + left.node_count() + right.node_count() + then.node_count() + otherwise.node_count(),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Add, self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Mul, self, rhs)
    }
}

impl FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

// Printing is fully parenthesized so that `parse(print(e)) == e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => match c {
                ExtReal::Finite(x) if *x >= 0.0 => write!(f, "{x:?}"),
                ExtReal::Finite(x) => write!(f, "(-{:?})", -x),
                ExtReal::PosInf => f.write_str("inf"),
                ExtReal::NegInf => f.write_str("(-inf)"),
                ExtReal::Undefined => f.write_str("(0/0)"),
            },
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Unary(UnaryOp::Neg, e) => write!(f, "(-{e})"),
            Expr::Unary(op, e) => write!(f, "{}({e})", op.func_name().unwrap_or_default()),
            Expr::Binary(op, a, b) => match op {
                BinaryOp::Add => write!(f, "({a} + {b})"),
                BinaryOp::Sub => write!(f, "({a} - {b})"),
                BinaryOp::Mul => write!(f, "({a} * {b})"),
                BinaryOp::Div => write!(f, "({a} / {b})"),
                BinaryOp::Pow => write!(f, "({a} ^ {b})"),
                BinaryOp::Min => write!(f, "min({a}, {b})"),
                BinaryOp::Max => write!(f, "max({a}, {b})"),
            },
            Expr::Cond {
                cmp,
                left,
                right,
                then,
                otherwise,
            } => write!(f, "if({left} {} {right}, {then}, {otherwise})", cmp.symbol()),
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Expr::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_vars_examples() {
        let vars = |s: &str| Expr::parse(s).unwrap().free_vars();
        assert_eq!(vars("t*u^2"), [Var::T, Var::U].into_iter().collect());
        assert!(vars("3.5").is_empty());
        assert_eq!(vars("if(u<1, s, r)"), [Var::U, Var::S, Var::R].into_iter().collect());
    }

    #[test]
    fn substitution_composes_maps() {
        let phi = Expr::parse("t*u^2").unwrap();
        let composed = phi.substitute(&|v| match v {
            Var::T => Some(Expr::parse("abs(t)").unwrap()),
            Var::U => Some(Expr::parse("2*u").unwrap()),
            _ => None,
        });
        assert_eq!(composed, Expr::parse("abs(t)*(2*u)^2").unwrap());
    }

    #[test]
    fn printing_negative_constants_keeps_the_value() {
        let e = Expr::binary(BinaryOp::Add, Expr::constant(-2.5), Expr::var(Var::U));
        let back = Expr::parse(&e.to_string()).unwrap();
        let b = Bindings::new().with(Var::U, 1.0);
        assert_eq!(back.eval(&b).unwrap(), e.eval(&b).unwrap());
    }
}
