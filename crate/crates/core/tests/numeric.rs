//! Numeric evaluation and verification against independent oracles.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semifourier::tower::order_generators;
use semifourier::verify::{
    eval_elem, evaluate_tower, root_count_bound, root_count_bound_exact, sign_changes,
    verify_numeric, EvalConfig, Parity,
};
use semifourier::{
    collect_t_subexpressions, eisf, et, parse, DensePoly, RatElem, RatTower, Rational,
};

fn build(src: &str) -> (RatElem, RatTower) {
    let e = parse(src).unwrap();
    let gens = order_generators(&collect_t_subexpressions(&e)).unwrap();
    let (mut v, t) = et(&[e], &gens).unwrap();
    (v.pop().unwrap(), t)
}

#[test]
fn gaussian_integral_matches_erf() {
    // sqrt(pi)/2 * erf(x), from the C library
    let oracle: [(f64, f64); 3] = [
        (1.0, 0.746824132812427),
        (-0.5, -0.4612810064127924),
        (2.0, 0.8820813907624215),
    ];
    let (_, t) = build("int(exp(-x^2))");
    let cfg = EvalConfig::with_interval(-2.0, 2.0);
    let xs: Vec<f64> = oracle.iter().map(|p| p.0).collect();
    let vals = evaluate_tower(&t, &cfg, &xs).unwrap();
    for ((x, want), v) in oracle.iter().zip(&vals) {
        assert!((v[1] - want).abs() < 1e-9, "x = {x}: {} vs {want}", v[1]);
        assert!((v[0] - (-x * x).exp()).abs() < 1e-12);
    }
}

#[test]
fn inverse_towers_match_exact_evaluation() {
    let (a, t) = build("inv(x^2+1) + x*inv(x-3) - inv(inv(x^2+1) + 2)");
    let cfg = EvalConfig::with_interval(-2.0, 2.0);
    for (n, d) in [(-7i64, 4i64), (-1, 3), (0, 1), (5, 7), (3, 2)] {
        let x = n as f64 / d as f64;
        let vals = evaluate_tower(&t, &cfg, &[x]).unwrap().pop().unwrap();
        let q = Rational::new(n.into(), d.into());
        let one = Rational::from_integer(1.into());
        let two = Rational::from_integer(2.into());
        let three = Rational::from_integer(3.into());
        let u = one.clone() / (q.clone() * q.clone() + one.clone());
        let want = u.clone() + q.clone() / (q.clone() - three) - one / (u + two);
        let want = num_traits::ToPrimitive::to_f64(&want).unwrap();
        let got: f64 = eval_elem(&a, x, &vals);
        assert!(
            (got - want).abs() < 1e-10 * want.abs().max(1.0),
            "x = {x}: {got} vs {want}"
        );
    }
}

#[test]
fn rational_forms_evaluate_like_their_elements() {
    let (_, t) = build("inv(x^2+1)*inv(x-3) + inv(x+5)");
    let cfg = EvalConfig::with_interval(-2.0, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let mut a = RatElem::zero();
        for _ in 0..3 {
            let c: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
            let mut term = RatElem::Poly(DensePoly::from_ints(&c));
            for level in 1..=t.len() {
                term = t.mul(&term, &t.pow(&t.generator(level), rng.gen_range(0..=2)));
            }
            a = t.add(&a, &term);
        }
        let rf = t.to_rational_form(&a);
        for x in [-1.5, -0.25, 0.5, 1.75] {
            let vals = evaluate_tower(&t, &cfg, &[x]).unwrap().pop().unwrap();
            let den: f64 = eval_elem(&rf.den, x, &vals);
            if den.abs() < 1e-9 {
                continue;
            }
            let lhs: f64 = eval_elem(&a, x, &vals);
            let rhs = eval_elem(&rf.num, x, &vals) / den;
            assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
        }
    }
}

#[test]
fn fixture_sequences_pass_numeric_checks() {
    let ln2 = std::f64::consts::LN_2;
    let cases: [(&str, f64, f64, BTreeMap<usize, f64>); 7] = [
        (
            "exp(x*int(exp(-x^2))) - int(exp(-x^2)) - 3",
            -2.0,
            2.0,
            BTreeMap::new(),
        ),
        (
            "exp(exp(exp(x)))*exp(-exp(exp(x-exp(-exp(x))))) - 100000",
            -1.0,
            0.5,
            BTreeMap::new(),
        ),
        (
            "exp(x)*(exp(inv(x)-exp(-x))-exp(inv(x)))+5",
            0.5,
            3.0,
            BTreeMap::new(),
        ),
        (
            "exp(x)*int(inv(x)) + exp(x^2) + x",
            0.5,
            3.0,
            BTreeMap::new(),
        ),
        (
            "x*inv(exp(x)-1) - int(inv(exp(x)-1)) - inv(x)",
            0.5,
            3.0,
            BTreeMap::new(),
        ),
        (
            "2*int(-exp(-1/2*int(-2*x*inv(4-x^2)))) - 1/2*x*exp(1/2*int(-2*x*inv(4-x^2)))",
            -1.5,
            1.5,
            BTreeMap::new(),
        ),
        // f3 = int(2x/(x^2+2)) is log(x^2+2); it must not vanish at the base point
        (
            "int(2*x*exp(x^2+2)*inv(x^2+2)) - exp(x^2+2) - int(2*x*inv(int(2*x*inv(x^2+2))))",
            -1.0,
            1.0,
            BTreeMap::from([(3, ln2)]),
        ),
    ];
    for (src, a, b, constants) in cases {
        let seq = eisf(&parse(src).unwrap()).unwrap();
        let cfg = EvalConfig {
            constants,
            ..EvalConfig::with_interval(a, b)
        };
        let r = verify_numeric(&seq, &cfg).unwrap_or_else(|e| panic!("{src}: {e}"));
        assert!(r.pass, "{src}: {:?}", r.failures());
        let fd = r
            .conditions
            .iter()
            .find(|c| c.name == "finite-difference")
            .unwrap();
        assert!(fd.pass && fd.max_rel_residual <= 1e-4, "{src}");
    }
}

#[test]
fn wrong_multiplier_fails_numerically() {
    let mut seq = eisf(&parse("exp(x*int(exp(-x^2))) - int(exp(-x^2)) - 3").unwrap()).unwrap();
    seq.pairs[2].h = semifourier::HMultiplier::one();
    let r = verify_numeric(&seq, &EvalConfig::with_interval(-2.0, 2.0)).unwrap();
    assert!(!r.pass);
    assert_eq!(r.failures(), vec!["2:2->3"]);
}

#[test]
fn pole_inside_the_interval_is_reported() {
    let seq = eisf(&parse("x*inv(exp(x)-1) - int(inv(exp(x)-1)) - inv(x)").unwrap()).unwrap();
    let cfg = EvalConfig {
        base_point: Some(0.5),
        ..EvalConfig::with_interval(-1.0, 1.0)
    };
    let r = verify_numeric(&seq, &cfg).unwrap();
    assert!(r.pass);
    assert!(!r.discarded_samples.is_empty());
    assert_eq!(r.singularities.len(), 1);
    assert!(r.singularities[0].abs() < 1e-6);
}

#[test]
fn sign_change_oracle() {
    // Fourier sequence of x^3+3x^2+5x+7 at -10 and at 0
    assert_eq!(sign_changes(&[-743, 245, -54, 6]), 3);
    assert_eq!(sign_changes(&[7, 5, 6, 6]), 0);
    assert_eq!(sign_changes(&[1, 0, -1, 0, 0, 2]), 2);
}

#[test]
fn sum_of_squares_has_an_even_bound() {
    let seq = eisf(&parse("x^2+1").unwrap()).unwrap();
    let r = root_count_bound(&seq, -5.0, 5.0, &EvalConfig::default()).unwrap();
    assert_eq!((r.nu_a, r.nu_b, r.bound, r.parity), (2, 0, 2, Parity::Even));
}

#[test]
fn numeric_and_exact_bounds_agree_on_polynomials() {
    let seq = eisf(&parse("(x-1)*(x-2)*(x-3)").unwrap()).unwrap();
    let q = |n: i64| Rational::from_integer(n.into());
    let exact = root_count_bound_exact(&seq, &q(0), &q(4)).unwrap();
    let float = root_count_bound(&seq, 0.0, 4.0, &EvalConfig::default()).unwrap();
    assert_eq!(exact, float);
    assert_eq!(exact.bound, 3);
}

#[test]
fn bound_through_a_tower() {
    // exp(x) - 2 has one root, at log 2
    let seq = eisf(&parse("exp(x) - 2").unwrap()).unwrap();
    let r = root_count_bound(&seq, 0.0, 1.0, &EvalConfig::default()).unwrap();
    assert_eq!(r.bound, 1);
    let r = root_count_bound(&seq, 1.0, 2.0, &EvalConfig::default()).unwrap();
    assert_eq!(r.bound, 0);
}
