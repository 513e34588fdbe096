use eorlicz::expr::{BinaryOp, Bindings, Comparison, EvalTrace, Expr, Program, UnaryOp, Var};
use eorlicz::ext_real::ExtReal;
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::var(Var::T)),
        Just(Expr::var(Var::U)),
        (0.0f64..100.0).prop_map(Expr::constant),
        (0u32..8).prop_map(|k| Expr::constant(k as f64)),
        Just(Expr::Const(ExtReal::PosInf)),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    let unary = prop_oneof![
        Just(UnaryOp::Neg),
        Just(UnaryOp::Abs),
        Just(UnaryOp::Exp),
        Just(UnaryOp::Ln),
        Just(UnaryOp::Sqrt),
        Just(UnaryOp::Cosh),
    ];
    let binary = prop_oneof![
        Just(BinaryOp::Add),
        Just(BinaryOp::Sub),
        Just(BinaryOp::Mul),
        Just(BinaryOp::Div),
        Just(BinaryOp::Pow),
        Just(BinaryOp::Min),
        Just(BinaryOp::Max),
    ];
    let cmp = prop_oneof![
        Just(Comparison::Lt),
        Just(Comparison::Le),
        Just(Comparison::Gt),
        Just(Comparison::Ge),
        Just(Comparison::Eq),
    ];
    leaf().prop_recursive(5, 40, 4, move |inner| {
        prop_oneof![
            (unary.clone(), inner.clone()).prop_map(|(op, e)| Expr::unary(op, e)),
            (binary.clone(), inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            (cmp.clone(), inner.clone(), inner.clone(), inner.clone(), inner.clone())
                .prop_map(|(c, l, r, a, b)| Expr::cond(c, l, r, a, b)),
        ]
    })
}

fn ext() -> impl Strategy<Value = ExtReal> {
    prop_oneof![
        4 => (-1e6f64..1e6).prop_map(ExtReal::Finite),
        1 => Just(ExtReal::ZERO),
        1 => Just(ExtReal::PosInf),
        1 => Just(ExtReal::NegInf),
        1 => Just(ExtReal::Undefined),
    ]
}

fn same(a: ExtReal, b: ExtReal) -> bool {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => x.to_bits() == y.to_bits() || x == y,
        _ => a == b || (a.is_undefined() && b.is_undefined()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn printing_then_parsing_is_the_identity(e in expr()) {
        let text = e.to_string();
        let back = Expr::parse(&text).unwrap();
        prop_assert_eq!(&back, &e, "printed as {}", text);
    }

    #[test]
    fn compiled_programs_agree_with_the_tree(e in expr(), t in -3.0f64..3.0, u in 0.0f64..20.0) {
        let b = Bindings::tu(t, u);
        let mut tree_trace = EvalTrace::default();
        let mut prog_trace = EvalTrace::default();
        let tree = e.eval_traced(&b, &mut tree_trace).unwrap();
        let prog = Program::new(&e).eval(&b, &mut prog_trace).unwrap();
        prop_assert!(same(tree, prog), "{} at ({}, {}): {:?} vs {:?}", e, t, u, tree, prog);
        prop_assert_eq!(tree_trace, prog_trace);
    }

    #[test]
    fn substituting_variables_commutes_with_evaluation(e in expr(), t in -3.0f64..3.0, u in 0.0f64..5.0) {
        // e(2t, u + 1) by substitution and by binding.
        let sub = e.substitute(&|v| match v {
            Var::T => Some(Expr::constant(2.0) * Expr::var(Var::T)),
            Var::U => Some(Expr::var(Var::U) + Expr::constant(1.0)),
            _ => None,
        });
        let direct = e.eval(&Bindings::tu(2.0 * t, u + 1.0)).unwrap();
        let via = sub.eval(&Bindings::tu(t, u)).unwrap();
        prop_assert!(same(direct, via));
    }

    #[test]
    fn addition_and_multiplication_commute(a in ext(), b in ext()) {
        prop_assert!(same(a + b, b + a));
        prop_assert!(same(a * b, b * a));
    }

    #[test]
    fn undefined_absorbs_and_zero_annihilates(a in ext()) {
        prop_assert!((a + ExtReal::Undefined).is_undefined());
        prop_assert!((a * ExtReal::Undefined).is_undefined());
        if !a.is_undefined() {
            prop_assert_eq!(a * ExtReal::ZERO, ExtReal::ZERO);
        }
    }

    #[test]
    fn order_is_consistent_with_min_and_max(a in ext(), b in ext()) {
        if let Some(ord) = a.partial_cmp(&b) {
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(lo <= hi);
            let expected = if ord.is_le() { a } else { b };
            prop_assert!(same(lo, expected));
        } else {
            prop_assert!(a.is_undefined() || b.is_undefined());
        }
    }

    #[test]
    fn finite_arithmetic_matches_f64(x in -1e3f64..1e3, y in -1e3f64..1e3) {
        let (a, b) = (ExtReal::Finite(x), ExtReal::Finite(y));
        prop_assert_eq!(a + b, ExtReal::Finite(x + y));
        prop_assert_eq!(a * b, ExtReal::Finite(x * y));
        if y != 0.0 {
            prop_assert_eq!(a / b, ExtReal::Finite(x / y));
        }
    }
}

#[test]
fn parse_errors_carry_offsets() {
    let err = Expr::parse("u + * 2").unwrap_err().to_string();
    assert!(err.contains("offset 4"), "{err}");
    let err = Expr::parse("u + foo").unwrap_err().to_string();
    assert!(err.contains("foo"), "{err}");
}
