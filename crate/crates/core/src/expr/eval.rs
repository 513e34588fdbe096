use super::{BinaryOp, Expr, ExprError, UnaryOp, Var};
use crate::ext_real::ExtReal;

/// Values for the free variables of an expression.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bindings {
    values: [Option<ExtReal>; 5],
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tu(t: f64, u: f64) -> Self {
        Self::new().with(Var::T, t).with(Var::U, u)
    }

    pub fn with(mut self, var: Var, value: impl Into<ExtReal>) -> Self {
        self.values[var.index()] = Some(value.into());
        self
    }

    pub fn set(&mut self, var: Var, value: impl Into<ExtReal>) {
        self.values[var.index()] = Some(value.into());
    }

    pub fn get(&self, var: Var) -> Option<ExtReal> {
        self.values[var.index()]
    }
}

/// Side information gathered while evaluating.
///
/// `overflow` is set when an operation on finite operands produced an
/// infinity (as opposed to `ln 0` or `0^-p`, which are genuinely infinite).
/// `branch_sig` folds the sequence of conditional decisions, so two points
/// with different signatures lie on different pieces of a piecewise formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalTrace {
    pub overflow: bool,
    pub branch_sig: u64,
}

impl Default for EvalTrace {
    fn default() -> Self {
        EvalTrace {
            overflow: false,
            branch_sig: 0xcbf2_9ce4_8422_2325,
        }
    }
}

impl EvalTrace {
    pub(super) fn record_branch(&mut self, taken: bool) {
        self.branch_sig = (self.branch_sig ^ (1 + taken as u64)).wrapping_mul(0x0100_0000_01b3);
    }
}

impl Expr {
    pub fn eval(&self, bindings: &Bindings) -> Result<ExtReal, ExprError> {
        self.eval_traced(bindings, &mut EvalTrace::default())
    }

    pub fn eval_traced(&self, bindings: &Bindings, trace: &mut EvalTrace) -> Result<ExtReal, ExprError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => bindings.get(*v).ok_or(ExprError::Unbound(*v))?,
            Expr::Unary(op, e) => {
                let x = e.eval_traced(bindings, trace)?;
                let y = op.apply(x);
                if x.is_finite() && y.is_infinite() && *op != UnaryOp::Ln {
                    trace.overflow = true;
                }
                y
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval_traced(bindings, trace)?;
                let y = b.eval_traced(bindings, trace)?;
                let z = op.apply(x, y);
                if x.is_finite() && y.is_finite() && z.is_infinite() {
                    let genuine = *op == BinaryOp::Pow && x.is_zero();
                    if !genuine {
                        trace.overflow = true;
                    }
                }
                z
            }
            Expr::Cond {
                cmp,
                left,
                right,
                then,
                otherwise,
            } => {
                let l = left.eval_traced(bindings, trace)?;
                let r = right.eval_traced(bindings, trace)?;
                match cmp.holds(l, r) {
                    None => ExtReal::Undefined,
                    Some(taken) => {
                        trace.record_branch(taken);
                        if taken {
                            then.eval_traced(bindings, trace)?
                        } else {
                            otherwise.eval_traced(bindings, trace)?
                        }
                    }
                }
            }
        })
    }

    /// Evaluates at `(t, u)`, treating an unbound variable as an error.
    pub fn eval_tu(&self, t: f64, u: f64) -> Result<ExtReal, ExprError> {
        self.eval(&Bindings::tu(t, u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext_real::ExtReal::{Finite, NegInf, PosInf, Undefined};

    fn ev(s: &str, t: f64, u: f64) -> ExtReal {
        Expr::parse(s).unwrap().eval_tu(t, u).unwrap()
    }

    #[test]
    fn ordinary_arithmetic() {
        assert_eq!(ev("t*u^2", 3.0, 2.0), Finite(12.0));
        assert_eq!(ev("-u^2", 0.0, 3.0), Finite(-9.0));
        assert_eq!(ev("min(t, u) + max(t, u)", 1.0, 5.0), Finite(6.0));
        assert_eq!(ev("2^3^2", 0.0, 0.0), Finite(512.0));
    }

    #[test]
    fn extended_rules() {
        assert_eq!(ev("ln(u)", 0.0, 0.0), NegInf);
        assert_eq!(ev("exp(ln(u))", 0.0, 0.0), Finite(0.0));
        assert_eq!(ev("u/0", 0.0, 1.0), Undefined);
        assert_eq!(ev("inf - inf", 0.0, 0.0), Undefined);
        assert_eq!(ev("0*inf", 0.0, 0.0), Finite(0.0));
        assert_eq!(ev("u^(-1)", 0.0, 0.0), PosInf);
    }

    #[test]
    fn untaken_branch_is_not_evaluated() {
        let e = Expr::parse("if(u < 1, u, s)").unwrap();
        assert_eq!(e.eval(&Bindings::new().with(Var::U, 0.5)).unwrap(), Finite(0.5));
        assert_eq!(
            e.eval(&Bindings::new().with(Var::U, 2.0)),
            Err(ExprError::Unbound(Var::S))
        );
    }

    #[test]
    fn overflow_versus_genuine_infinity() {
        let mut tr = EvalTrace::default();
        let e = Expr::parse("exp(u) - 1").unwrap();
        assert_eq!(e.eval_traced(&Bindings::tu(0.0, 1000.0), &mut tr).unwrap(), PosInf);
        assert!(tr.overflow);

        for s in ["if(u < 1, 0, inf)", "u^(-2)", "-ln(u)"] {
            let mut tr = EvalTrace::default();
            let v = Expr::parse(s).unwrap().eval_traced(&Bindings::tu(0.0, 0.0), &mut tr).unwrap();
            assert!(v.is_infinite() || v == Finite(0.0), "{s}");
            assert!(!tr.overflow, "{s}");
        }
    }

    #[test]
    fn branch_signature_separates_pieces() {
        let e = Expr::parse("if(u < 1, u, 2*u - 1)").unwrap();
        let sig = |u: f64| {
            let mut tr = EvalTrace::default();
            e.eval_traced(&Bindings::tu(0.0, u), &mut tr).unwrap();
            tr.branch_sig
        };
        assert_eq!(sig(0.2), sig(0.7));
        assert_ne!(sig(0.7), sig(1.5));
    }

    #[test]
    fn undefined_comparison_gives_undefined() {
        assert_eq!(ev("if(u/0 < 1, 1, 2)", 0.0, 1.0), Undefined);
    }
}
