//! Cross-module invariants of the expression language and term sequences.

use proptest::prelude::*;
use zseries::expr::{BinaryOp, Decimal, Expression, Function, MathConst, VarName};
use zseries::{corpus, parse_expression, PrecisionContext, Real};

#[test]
fn eval_agrees_across_precisions() {
    // Working precisions 128 and 256 must agree to at least 120 bits over
    // the first 10000 indices of every registered series.
    let c128 = PrecisionContext::new(128).unwrap();
    let c256 = PrecisionContext::new(256).unwrap();
    let rel = Real::two_pow(-120, &c256);
    for id in corpus::list() {
        let entry = corpus::get(id).unwrap();
        let start = entry.seq.start();
        for n in start..=start + 10_000 {
            let lo = entry.seq.eval_term(n, &c128).unwrap();
            let hi = entry.seq.eval_term(n, &c256).unwrap();
            let diff = lo.sub(&hi, &c256).abs();
            let budget = hi.abs().mul(&rel, &c256);
            assert!(diff.le(&budget), "{}: eval disagreement at n = {}", id, n);
        }
    }
}

#[test]
fn signed_term_is_sign_times_magnitude() {
    let c = PrecisionContext::new(192).unwrap();
    for id in corpus::list() {
        let entry = corpus::get(id).unwrap();
        let start = entry.seq.start();
        for n in start..start + 500 {
            let mag = entry.seq.eval_term(n, &c).unwrap();
            let signed = entry.seq.signed_term(n, &c).unwrap();
            assert_eq!(signed.abs(), mag, "{} at n = {}", id, n);
            let sign = entry.seq.sign_at(n, &c).unwrap();
            if mag.is_zero() {
                assert!(signed.is_zero());
            } else {
                assert_eq!(signed.is_negative(), sign < 0, "{} at n = {}", id, n);
            }
        }
    }
}

fn arb_decimal() -> impl Strategy<Value = Decimal> {
    (0u64..100000, proptest::option::of(0u64..100000)).prop_map(|(int, frac)| {
        let text = match frac {
            Some(f) => format!("{}.{}", int, f),
            None => format!("{}", int),
        };
        Decimal::new(&text).expect("generated decimal is valid")
    })
}

fn arb_expression() -> impl Strategy<Value = Expression> {
    let leaf = prop_oneof![
        arb_decimal().prop_map(Expression::Number),
        Just(Expression::Var(VarName::N)),
        Just(Expression::Var(VarName::K)),
        Just(Expression::Var(VarName::X)),
        Just(Expression::Constant(MathConst::Pi)),
        Just(Expression::Constant(MathConst::E)),
    ];
    leaf.prop_recursive(6, 48, 3, |inner| {
        let op = prop_oneof![
            Just(BinaryOp::Add),
            Just(BinaryOp::Sub),
            Just(BinaryOp::Mul),
            Just(BinaryOp::Div),
            Just(BinaryOp::Pow),
        ];
        let func = prop_oneof![
            Just(Function::Sin),
            Just(Function::Cos),
            Just(Function::Ln),
            Just(Function::Exp),
            Just(Function::Sqrt),
            Just(Function::Abs),
            Just(Function::Floor),
        ];
        prop_oneof![
            (op, inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Expression::Binary(op, Box::new(l), Box::new(r))),
            inner.clone().prop_map(|e| Expression::Neg(Box::new(e))),
            (func, inner).prop_map(|(f, a)| Expression::Call(f, Box::new(a))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// Printing then re-parsing yields a structurally identical tree.
    #[test]
    fn print_parse_roundtrip(ast in arb_expression()) {
        let printed = ast.to_string();
        let reparsed = parse_expression(&printed)
            .unwrap_or_else(|e| panic!("printed `{}` failed to parse: {}", printed, e));
        prop_assert_eq!(ast, reparsed, "printed form `{}`", printed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Determinism: the same tree evaluated twice in fresh contexts gives
    /// bit-identical results (or fails identically).
    #[test]
    fn eval_is_deterministic(ast in arb_expression(), x in 1u64..1000) {
        let c1 = PrecisionContext::new(192).unwrap();
        let c2 = PrecisionContext::new(192).unwrap();
        let a = ast.eval(&Real::from_u64(x, &c1), &c1);
        let b = ast.eval(&Real::from_u64(x, &c2), &c2);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "divergent outcomes: {:?}", other),
        }
    }
}
