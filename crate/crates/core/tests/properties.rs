//! Property tests over random expressions and the fixture corpus.

use proptest::prelude::*;
use semifourier::expr::structurally_equal;
use semifourier::json::{expr_from_json, expr_to_json, sequence_from_json, sequence_to_json};
use semifourier::print::{expr_to_string, Style};
use semifourier::tower::order_generators;
use semifourier::{
    collect_t_subexpressions, differentiate, eisf, eisf_with, et, normalize, parse, DegreeIndex,
    EtsfOptions, Expr, Rational, TKind,
};

const FIXTURES: [&str; 8] = [
    "x^3+3*x^2+5*x+7",
    "exp(x*int(exp(-x^2))) - int(exp(-x^2)) - 3",
    "exp(exp(exp(x)))*exp(-exp(exp(x-exp(-exp(x))))) - 100000",
    "exp(x)*(exp(inv(x)-exp(-x))-exp(inv(x)))+5",
    "exp(x)*int(inv(x)) + exp(x^2) + x",
    "x*inv(exp(x)-1) - int(inv(exp(x)-1)) - inv(x)",
    "2*int(-exp(-1/2*int(-2*x*inv(4-x^2)))) - 1/2*x*exp(1/2*int(-2*x*inv(4-x^2)))",
    "int(2*x*exp(x^2+2)*inv(x^2+2)) - exp(x^2+2) - int(2*x*inv(int(2*x*inv(x^2+2))))",
];

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        3 => Just(Expr::x()),
        2 => (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Expr::constant(Rational::new(n.into(), d.into()))),
    ];
    leaf.prop_recursive(3, 20, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::sum),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::product),
            inner.clone().prop_map(Expr::exp),
            inner.clone().prop_map(Expr::int),
            inner.prop_map(Expr::inv),
        ]
    })
}

fn t_nodes(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    e.visit(&mut |n| {
        if n.as_t().is_some() {
            out.push(n.clone());
        }
    });
    out
}

proptest! {
    #[test]
    fn print_then_parse_round_trips(e in arb_expr()) {
        let text = expr_to_string(&e, Style::Ascii);
        let back = parse(&text).unwrap();
        prop_assert!(structurally_equal(&back, &normalize(&e)), "{text}");
    }

    #[test]
    fn normalize_is_idempotent(e in arb_expr()) {
        let n = normalize(&e);
        prop_assert_eq!(normalize(&n), n);
    }

    #[test]
    fn json_round_trips(e in arb_expr()) {
        let n = normalize(&e);
        prop_assert_eq!(expr_from_json(&expr_to_json(&n)).unwrap(), n);
    }

    #[test]
    fn derivative_stays_inside_the_expression(e in arb_expr()) {
        let n = normalize(&e);
        let d = differentiate(&n);
        prop_assert!(d.rank() <= n.rank());
        let mine = t_nodes(&n);
        for t in t_nodes(&d) {
            prop_assert!(mine.contains(&t), "{} not in {}", expr_to_string(&t, Style::Ascii), expr_to_string(&n, Style::Ascii));
        }
    }

    #[test]
    fn collected_generators_respect_dependencies(e in arb_expr()) {
        let gens = collect_t_subexpressions(&e);
        for (i, g) in gens.iter().enumerate() {
            if i > 0 {
                prop_assert!(gens[i - 1].rank() <= g.rank());
            }
            let (_, arg) = g.as_t().unwrap();
            for sub in t_nodes(arg) {
                let j = gens.iter().position(|h| *h == sub).unwrap();
                prop_assert!(j < i);
            }
        }
        if let Ok(ordered) = order_generators(&gens) {
            prop_assert_eq!(ordered.len(), gens.len());
            for (i, g) in ordered.iter().enumerate() {
                for sub in t_nodes(g.as_t().unwrap().1) {
                    prop_assert!(ordered[..i].contains(&sub));
                }
            }
        }
    }

    #[test]
    fn parser_never_panics(s in "[x0-9+*/^() intvexp-]{0,24}") {
        match parse(&s) {
            Ok(_) => {}
            Err(err) => prop_assert!(err.span.start <= s.len()),
        }
    }

    #[test]
    fn random_sequences_are_well_formed(e in arb_expr()) {
        let opts = EtsfOptions { budget: 100_000, trace: false };
        let Ok((seq, _)) = eisf_with(&e, &opts) else { return Ok(()) };
        let t = &seq.tower;
        for p in &seq.pairs {
            prop_assert!(t.check(&p.g).is_ok());
            prop_assert!(t.h_is_legal(&p.h));
        }
        prop_assert!(t.diff(&seq.last().g).is_zero());
    }
}

#[test]
fn fixture_sequences_are_well_formed_and_deterministic() {
    for src in FIXTURES {
        let e = parse(src).unwrap();
        let seq = eisf(&e).unwrap();
        assert_eq!(seq, eisf(&e).unwrap(), "{src}");
        let t = &seq.tower;
        for p in &seq.pairs {
            t.check(&p.g).unwrap();
            assert!(t.h_is_legal(&p.h));
        }
        assert!(t.diff(&seq.last().g).is_zero());
        assert!(semifourier::verify::verify_symbolic(&seq).pass, "{src}");
        let back = sequence_from_json(&sequence_to_json(&seq)).unwrap();
        assert_eq!(back, seq);
    }
}

#[test]
fn inverse_levels_only_carry_negative_powers() {
    let seq = eisf(&parse("x*inv(exp(x)-1) - int(inv(exp(x)-1)) - inv(x)").unwrap()).unwrap();
    for p in &seq.pairs {
        for (level, e) in p.h.iter() {
            match seq.tower.kind(level) {
                TKind::Inv => assert!(e < 0),
                TKind::Exp => assert_ne!(e, 0),
                TKind::Int => panic!("integral generator in a multiplier"),
            }
        }
    }
}

#[test]
fn descending_chains_are_bounded() {
    // every strictly decreasing chain from (k, n) passes through at most
    // (k + 1) levels, each with finitely many degrees
    let start = DegreeIndex {
        level: 3,
        degree: 2,
    };
    let mut chain = vec![start];
    let mut cur = start;
    while cur
        != (DegreeIndex {
            level: 0,
            degree: 0,
        })
    {
        cur = if cur.degree > 0 {
            DegreeIndex {
                degree: cur.degree - 1,
                ..cur
            }
        } else {
            DegreeIndex {
                level: cur.level - 1,
                degree: 2,
            }
        };
        assert!(cur < *chain.last().unwrap());
        chain.push(cur);
    }
    assert!(chain.len() <= (start.level + 1) * (2 + 1));
}

#[test]
fn polynomial_sequences_are_fourier_sequences() {
    let e = parse("(x-1)^2*(x+2)").unwrap();
    let seq = eisf(&e).unwrap();
    assert_eq!(seq.len(), 4);
    assert!(seq.tower.is_empty());
    assert!(seq.pairs.iter().all(|p| p.h.is_one()));
}

#[test]
fn generator_arguments_live_below_their_level() {
    // the tower is built from the ordered generator list, so every generator
    // argument sits in a strictly lower level
    for src in FIXTURES {
        let e = parse(src).unwrap();
        let gens = order_generators(&collect_t_subexpressions(&e)).unwrap();
        let (_, tower) = et(&[e], &gens).unwrap();
        for (k, g) in tower.generators().iter().enumerate() {
            assert!(
                g.arg.level() <= k,
                "{src}: f{} depends on a higher level",
                k + 1
            );
        }
    }
}
