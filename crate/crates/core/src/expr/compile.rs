use super::eval::{Bindings, EvalTrace};
use super::{BinaryOp, Comparison, Expr, ExprError, UnaryOp};
use crate::ext_real::ExtReal;

const STACK: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Const(ExtReal),
    Load(super::Var),
    Unary(UnaryOp),
    Binary(BinaryOp),
    /// Pops the two comparison operands; falls through into the `then`
    /// code when the comparison holds.
    Test { cmp: Comparison, else_pc: usize, end_pc: usize },
    Jump(usize),
}

/// Postfix form of an [`Expr`] for hot evaluation loops. Produces exactly
/// the values and traces of [`Expr::eval_traced`].
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    code: Vec<Instr>,
    depth: usize,
    tree: Expr,
}

impl Program {
    pub fn new(expr: &Expr) -> Program {
        let mut code = Vec::new();
        let depth = emit(expr, &mut code);
        Program {
            code,
            depth,
            tree: expr.clone(),
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.tree
    }

    pub fn eval(&self, bindings: &Bindings, trace: &mut EvalTrace) -> Result<ExtReal, ExprError> {
        if self.depth > STACK {
            return self.tree.eval_traced(bindings, trace);
        }
        let mut stack = [ExtReal::ZERO; STACK];
        let mut sp = 0;
        let mut pc = 0;
        while pc < self.code.len() {
            match self.code[pc] {
                Instr::Const(c) => {
                    stack[sp] = c;
                    sp += 1;
                }
                Instr::Load(v) => {
                    stack[sp] = bindings.get(v).ok_or(ExprError::Unbound(v))?;
                    sp += 1;
                }
                Instr::Unary(op) => {
                    let x = stack[sp - 1];
                    let y = op.apply(x);
                    if x.is_finite() && y.is_infinite() && op != UnaryOp::Ln {
                        trace.overflow = true;
                    }
                    stack[sp - 1] = y;
                }
                Instr::Binary(op) => {
                    let x = stack[sp - 2];
                    let y = stack[sp - 1];
                    let z = op.apply(x, y);
                    if x.is_finite() && y.is_finite() && z.is_infinite() && !(op == BinaryOp::Pow && x.is_zero()) {
                        trace.overflow = true;
                    }
                    sp -= 1;
                    stack[sp - 1] = z;
                }
                Instr::Test { cmp, else_pc, end_pc } => {
                    let l = stack[sp - 2];
                    let r = stack[sp - 1];
                    sp -= 2;
                    match cmp.holds(l, r) {
                        None => {
                            stack[sp] = ExtReal::Undefined;
                            sp += 1;
                            pc = end_pc;
                            continue;
                        }
                        Some(taken) => {
                            trace.record_branch(taken);
                            if !taken {
                                pc = else_pc;
                                continue;
                            }
                        }
                    }
                }
                Instr::Jump(target) => {
                    pc = target;
                    continue;
                }
            }
            pc += 1;
        }
        Ok(stack[0])
    }
}

/// Appends the code for `e` and returns the stack depth it needs.
fn emit(e: &Expr, code: &mut Vec<Instr>) -> usize {
    match e {
        Expr::Const(c) => {
            code.push(Instr::Const(*c));
            1
        }
        Expr::Var(v) => {
            code.push(Instr::Load(*v));
            1
        }
        Expr::Unary(op, a) => {
            let d = emit(a, code);
            code.push(Instr::Unary(*op));
            d
        }
        Expr::Binary(op, a, b) => {
            let da = emit(a, code);
            let db = emit(b, code);
            code.push(Instr::Binary(*op));
            da.max(db + 1)
        }
        Expr::Cond {
            cmp,
            left,
            right,
            then,
            otherwise,
        } => {
            let dl = emit(left, code);
            let dr = emit(right, code);
            let test = code.len();
            code.push(Instr::Jump(0));
            let dt = emit(then, code);
            let jump = code.len();
            code.push(Instr::Jump(0));
            let else_pc = code.len();
            let de = emit(otherwise, code);
            let end_pc = code.len();
            code[test] = Instr::Test {
                cmp: *cmp,
                else_pc,
                end_pc,
            };
            code[jump] = Instr::Jump(end_pc);
            dl.max(dr + 1).max(dt).max(de)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both(s: &str, t: f64, u: f64) -> ((ExtReal, EvalTrace), (ExtReal, EvalTrace)) {
        let e = Expr::parse(s).unwrap();
        let b = Bindings::tu(t, u);
        let mut t1 = EvalTrace::default();
        let mut t2 = EvalTrace::default();
        let v1 = e.eval_traced(&b, &mut t1).unwrap();
        let v2 = Program::new(&e).eval(&b, &mut t2).unwrap();
        ((v1, t1), (v2, t2))
    }

    #[test]
    fn matches_tree_walk() {
        for s in [
            "t*u^2",
            "if(u < 1, u - abs(t), u + abs(t) - 2)",
            "if(u > 1, if(t >= 0, t*ln(u), -ln(u)), 0) + max(u, t)",
            "exp(u*1000)",
            "u^(-1)",
            "if(u/0 < 1, 1, 2)",
            "-(cosh(t*exp(u)) - 1)",
        ] {
            for (t, u) in [(0.5, 0.0), (-1.0, 2.0), (2.0, 0.5), (0.0, 3.0)] {
                let (a, b) = both(s, t, u);
                assert_eq!(a, b, "{s} at ({t}, {u})");
            }
        }
    }

    #[test]
    fn untaken_branch_may_be_unbound() {
        let e = Expr::parse("if(u < 1, u, s)").unwrap();
        let p = Program::new(&e);
        let b = Bindings::new().with(super::super::Var::U, 0.5);
        assert_eq!(p.eval(&b, &mut EvalTrace::default()).unwrap(), ExtReal::Finite(0.5));
        let b = Bindings::new().with(super::super::Var::U, 5.0);
        assert!(p.eval(&b, &mut EvalTrace::default()).is_err());
    }

    #[test]
    fn deep_expressions_fall_back() {
        let mut s = String::from("u");
        for _ in 0..30 {
            s = format!("(1 + {s})");
        }
        // Right-nested sums need one stack slot per level.
        let mut r = String::from("u");
        for _ in 0..30 {
            r = format!("(u + {r})");
        }
        for text in [s, r] {
            let (a, b) = both(&text, 0.0, 1.0);
            assert_eq!(a, b);
        }
    }
}
