use fracsub::exprparse::{parse, Bindings, Expr, ParseError};
use proptest::prelude::*;
use proptest::test_runner::{TestRng, TestRunner};

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        (0.0f64..100.0).prop_map(|v| format!("{v}")),
        (1u32..9, -3i32..4).prop_map(|(m, e)| format!("{m}.5e{e}")),
        Just("pi".to_string()),
        Just("x".to_string()),
        Just("y".to_string()),
        Just("t".to_string()),
        Just("nu1".to_string()),
        Just("nu2".to_string()),
    ]
}

fn source() -> impl Strategy<Value = String> {
    leaf().prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/", "^"]), inner.clone())
                .prop_map(|(a, op, b)| format!("{a} {op} {b}")),
            inner.clone().prop_map(|a| format!("-{a}")),
            inner.clone().prop_map(|a| format!("({a})")),
            (
                prop::sample::select(vec!["sin", "cos", "exp", "ln", "abs", "sqrt", "gamma"]),
                inner.clone()
            )
                .prop_map(|(f, a)| format!("{f}({a})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("omega(abs({a}) + 0.1, abs({b}) + 0.01)")),
            inner.clone().prop_map(|a| format!("ml1(0.5, sin({a}))")),
            inner.prop_map(|a| format!("ml2(0.7, 1.2, cos({a}))")),
        ]
    })
}

fn random_bindings(rng: &mut TestRng) -> Bindings {
    Bindings {
        x: Some(rng.random_range(-2.0..2.0)),
        y: Some(rng.random_range(-2.0..2.0)),
        t: Some(rng.random_range(0.0..3.0)),
        nu1: Some(rng.random_range(0.01..1.0)),
        nu2: Some(rng.random_range(0.01..1.0)),
    }
}

fn same(a: &Expr, b: &Expr, bindings: &Bindings) -> bool {
    match (a.eval(bindings), b.eval(bindings)) {
        (Ok(u), Ok(v)) => u.to_bits() == v.to_bits() || (u.is_nan() && v.is_nan()),
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_form_evaluates_identically(src in source()) {
        let ast = parse(&src).unwrap();
        let printed = ast.to_string();
        let again = parse(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
        let mut rng = TestRunner::deterministic().new_rng();
        for _ in 0..1000 {
            let b = random_bindings(&mut rng);
            prop_assert!(same(&ast, &again, &b), "{src} / {printed}");
        }
    }

    #[test]
    fn folding_preserves_values(src in source()) {
        let ast = parse(&src).unwrap();
        let folded = ast.fold_constants();
        let mut rng = TestRunner::deterministic().new_rng();
        for _ in 0..50 {
            let b = random_bindings(&mut rng);
            if let (Ok(u), Ok(v)) = (ast.eval(&b), folded.eval(&b)) {
                prop_assert!(u.to_bits() == v.to_bits() || (u.is_nan() && v.is_nan()) || (u - v).abs() <= 1e-12 * u.abs());
            }
        }
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        let text = String::from_utf8_lossy(&bytes);
        if let Err(e) = parse(&text) {
            prop_assert!(e.offset() <= text.len());
        }
    }

    #[test]
    fn grammar_soup_never_panics(parts in prop::collection::vec(
        prop::sample::select(vec!["(", ")", ",", "+", "-", "*", "/", "^", "x", "nu1", "1", ".5e", "e3", "sin", "ml2", " ", "pi", "2.", "gamma"]),
        0..40,
    )) {
        let text: String = parts.concat();
        if let Ok(ast) = parse(&text) {
            let _ = ast.eval(&Bindings { x: Some(0.3), nu1: Some(0.5), ..Bindings::default() });
        }
    }
}

#[test]
fn deep_nesting_is_rejected_not_overflowed() {
    let text = "(".repeat(100_000) + "1" + &")".repeat(100_000);
    assert!(matches!(parse(&text), Err(ParseError::TooDeep { .. })));
    let text = "-".repeat(100_000) + "1";
    assert!(parse(&text).is_err());
    let text = "2^".repeat(100_000) + "1";
    assert!(parse(&text).is_err());
}

#[test]
fn documented_values() {
    let b = Bindings {
        nu1: Some(1.0),
        x: Some(0.5),
        ..Bindings::default()
    };
    assert_eq!(parse("2^3^2").unwrap().eval(&b).unwrap(), 512.0);
    assert_eq!(parse("gamma(1+nu1)").unwrap().eval(&b).unwrap(), 1.0);
    assert_eq!(parse("x-0.5").unwrap().eval(&b).unwrap(), 0.0);
    let w = parse("omega(0.5,1)").unwrap().eval(&b).unwrap();
    assert!((w - 0.564_189_583_547_756_3).abs() < 1e-15);
    let rho2 = parse("1+(t+1)*(x+0.01)").unwrap();
    let v = rho2.eval(&Bindings { t: Some(0.3), x: Some(0.2), ..b }).unwrap();
    assert!((v - (1.0 + 1.3 * 0.21)).abs() < 1e-15);
}
