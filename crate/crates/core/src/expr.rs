//! Exp-Int expression trees.
//!
//! An [`Expr`] is built from the variable `x`, rational constants, n-ary sums
//! and products, and the unary operators `inv`, `exp` and `int`. Every
//! constructor in this module returns normalized trees: sums and products are
//! flattened, constant children are folded into one, like terms of a sum are
//! collected, product factors appear in `Ord` order, and sum terms are
//! ordered by their non-constant factors with the constant term last.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::Rational;

/// Syntax tree of an Exp-Int expression.
///
/// The derived `Ord` (variant tag first, then children, then constant value)
/// is the canonical child order used inside sums and products.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Var,
    Const(Rational),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Inv(Box<Expr>),
    Exp(Box<Expr>),
    Int(Box<Expr>),
}

/// The three unary operators that introduce tower generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TKind {
    Inv,
    Exp,
    Int,
}

impl TKind {
    pub fn name(self) -> &'static str {
        match self {
            TKind::Inv => "inv",
            TKind::Exp => "exp",
            TKind::Int => "int",
        }
    }
}

impl Expr {
    pub fn x() -> Expr {
        Expr::Var
    }

    pub fn constant(c: Rational) -> Expr {
        Expr::Const(c)
    }

    pub fn int_const(n: i64) -> Expr {
        Expr::Const(Rational::from_integer(n.into()))
    }

    pub fn zero() -> Expr {
        Expr::int_const(0)
    }

    pub fn one() -> Expr {
        Expr::int_const(1)
    }

    pub fn sum(children: Vec<Expr>) -> Expr {
        normalize_sum(children)
    }

    pub fn product(children: Vec<Expr>) -> Expr {
        normalize_product(children)
    }

    pub fn inv(e: Expr) -> Expr {
        match e {
            Expr::Const(c) if !c.is_zero() => Expr::Const(c.recip()),
            other => Expr::Inv(Box::new(other)),
        }
    }

    pub fn exp(e: Expr) -> Expr {
        Expr::Exp(Box::new(e))
    }

    pub fn int(e: Expr) -> Expr {
        Expr::Int(Box::new(e))
    }

    /// `self` multiplied by itself `n` times; `n = 0` gives 1.
    pub fn pow(&self, n: u32) -> Expr {
        Expr::product(vec![self.clone(); n as usize])
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    /// The operator and argument when `self` is `inv(u)`, `exp(u)` or `int(u)`.
    pub fn as_t(&self) -> Option<(TKind, &Expr)> {
        match self {
            Expr::Inv(a) => Some((TKind::Inv, a)),
            Expr::Exp(a) => Some((TKind::Exp, a)),
            Expr::Int(a) => Some((TKind::Int, a)),
            _ => None,
        }
    }

    pub fn children(&self) -> &[Expr] {
        match self {
            Expr::Sum(c) | Expr::Product(c) => c,
            Expr::Inv(a) | Expr::Exp(a) | Expr::Int(a) => std::slice::from_ref(a.as_ref()),
            Expr::Var | Expr::Const(_) => &[],
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Expr::size).sum::<usize>()
    }

    /// Nesting depth of `inv`, `exp` and `int`.
    pub fn rank(&self) -> usize {
        match self {
            Expr::Var | Expr::Const(_) => 0,
            Expr::Sum(c) | Expr::Product(c) => c.iter().map(Expr::rank).max().unwrap_or(0),
            Expr::Inv(a) | Expr::Exp(a) | Expr::Int(a) => a.rank() + 1,
        }
    }

    pub fn contains(&self, needle: &Expr) -> bool {
        self == needle || self.children().iter().any(|c| c.contains(needle))
    }

    /// Pre-order visit of every node.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }
}

/// Canonical form under commutativity, associativity and constant folding.
pub fn normalize(e: &Expr) -> Expr {
    match e {
        Expr::Var | Expr::Const(_) => e.clone(),
        Expr::Sum(c) => normalize_sum(c.iter().map(normalize).collect()),
        Expr::Product(c) => normalize_product(c.iter().map(normalize).collect()),
        Expr::Inv(a) => Expr::inv(normalize(a)),
        Expr::Exp(a) => Expr::exp(normalize(a)),
        Expr::Int(a) => Expr::int(normalize(a)),
    }
}

/// Identity of two normalized trees.
pub fn structurally_equal(a: &Expr, b: &Expr) -> bool {
    a == b
}

/// Split a product term into its rational coefficient and remaining factors.
fn split_coefficient(term: Expr) -> (Rational, Vec<Expr>) {
    match term {
        Expr::Product(mut factors) => {
            if let Some(Expr::Const(_)) = factors.first() {
                let Expr::Const(c) = factors.remove(0) else {
                    unreachable!()
                };
                (c, factors)
            } else {
                (Rational::one(), factors)
            }
        }
        Expr::Const(c) => (c, Vec::new()),
        other => (Rational::one(), vec![other]),
    }
}

fn build_term(coeff: Rational, mut body: Vec<Expr>) -> Expr {
    if coeff.is_zero() {
        return Expr::zero();
    }
    if body.is_empty() {
        return Expr::Const(coeff);
    }
    if coeff.is_one() {
        if body.len() == 1 {
            return body.pop().unwrap();
        }
        return Expr::Product(body);
    }
    body.insert(0, Expr::Const(coeff));
    Expr::Product(body)
}

/// Children must already be normalized.
fn normalize_sum(children: Vec<Expr>) -> Expr {
    let mut constant = Rational::zero();
    let mut terms: BTreeMap<Vec<Expr>, Rational> = BTreeMap::new();
    let mut stack = children;
    stack.reverse();
    while let Some(child) = stack.pop() {
        match child {
            Expr::Sum(inner) => stack.extend(inner.into_iter().rev()),
            Expr::Const(c) => constant += c,
            other => {
                let (c, body) = split_coefficient(other);
                *terms.entry(body).or_insert_with(Rational::zero) += c;
            }
        }
    }
    let mut out: Vec<Expr> = terms
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(body, c)| build_term(c, body))
        .collect();
    if !constant.is_zero() {
        out.push(Expr::Const(constant));
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::Sum(out),
    }
}

/// Children must already be normalized.
fn normalize_product(children: Vec<Expr>) -> Expr {
    let mut constant = Rational::one();
    let mut factors = Vec::new();
    let mut stack = children;
    stack.reverse();
    while let Some(child) = stack.pop() {
        match child {
            Expr::Product(inner) => stack.extend(inner.into_iter().rev()),
            Expr::Const(c) => constant *= c,
            other => factors.push(other),
        }
    }
    if constant.is_zero() {
        return Expr::zero();
    }
    factors.sort();
    build_term(constant, factors)
}

/// Derivative with respect to `x`, normalized.
pub fn differentiate(e: &Expr) -> Expr {
    match e {
        Expr::Var => Expr::one(),
        Expr::Const(_) => Expr::zero(),
        Expr::Sum(c) => Expr::sum(c.iter().map(differentiate).collect()),
        Expr::Product(c) => Expr::sum(
            (0..c.len())
                .map(|i| {
                    let mut factors = c.clone();
                    factors[i] = differentiate(&c[i]);
                    Expr::product(factors)
                })
                .collect(),
        ),
        Expr::Inv(a) => Expr::product(vec![
            Expr::int_const(-1),
            e.clone(),
            e.clone(),
            differentiate(a),
        ]),
        Expr::Exp(a) => Expr::product(vec![e.clone(), differentiate(a)]),
        Expr::Int(a) => normalize(a),
    }
}

/// Tie-break between two distinct T-subexpressions of equal rank.
///
/// `exp` precedes `inv`, which precedes `int`. Within a kind, arguments are
/// compared by [`argument_order`].
pub fn generator_order(a: &Expr, b: &Expr) -> Ordering {
    let (ka, ua) = a.as_t().expect("generator_order on a T-expression");
    let (kb, ub) = b.as_t().expect("generator_order on a T-expression");
    kind_rank(ka)
        .cmp(&kind_rank(kb))
        .then_with(|| argument_order(ua, ub))
}

/// `exp` before `inv` before `int`.
pub fn kind_order(a: TKind, b: TKind) -> Ordering {
    kind_rank(a).cmp(&kind_rank(b))
}

fn kind_rank(k: TKind) -> u8 {
    match k {
        TKind::Exp => 0,
        TKind::Inv => 1,
        TKind::Int => 2,
    }
}

/// Ordering on generator arguments: rational coefficients are stripped and
/// the remaining bodies compared first, size-first; ties fall back to the
/// coefficient, so `-u` precedes `u`.
pub fn argument_order(a: &Expr, b: &Expr) -> Ordering {
    let (ca, ba) = split_coefficient(a.clone());
    let (cb, bb) = split_coefficient(b.clone());
    body_order(&ba, &bb)
        .then_with(|| ca.cmp(&cb))
        .then_with(|| a.cmp(b))
}

fn body_order(a: &[Expr], b: &[Expr]) -> Ordering {
    let size = |v: &[Expr]| v.iter().map(Expr::size).sum::<usize>();
    size(a).cmp(&size(b)).then_with(|| a.cmp(b))
}

/// All distinct `inv`/`exp`/`int` subexpressions of `e`, sorted by rank with
/// ties broken by [`generator_order`].
///
/// Every T-subexpression of an entry's argument sits at a smaller index.
pub fn collect_t_subexpressions(e: &Expr) -> Vec<Expr> {
    collect_t_subexpressions_all(std::slice::from_ref(e))
}

/// Joint collection over several expressions.
pub fn collect_t_subexpressions_all(exprs: &[Expr]) -> Vec<Expr> {
    let mut seen: HashSet<Expr> = HashSet::new();
    let mut found: Vec<Expr> = Vec::new();
    for e in exprs {
        let e = normalize(e);
        e.visit(&mut |node| {
            if node.as_t().is_some() && seen.insert(node.clone()) {
                found.push(node.clone());
            }
        });
    }
    found.sort_by(|a, b| a.rank().cmp(&b.rank()).then_with(|| generator_order(a, b)));
    found
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int_const(n)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Expr {
        Expr::Const(c)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product(vec![self, rhs])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product(vec![Expr::int_const(-1), self])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::x()
    }

    fn c(n: i64) -> Expr {
        Expr::from(n)
    }

    /// exp(x*int(exp(-x^2))) - int(exp(-x^2)) - 3
    fn example_one() -> Expr {
        let e1 = Expr::exp(-x().pow(2));
        let e2 = Expr::int(e1);
        Expr::exp(x() * e2.clone()) - e2 - c(3)
    }

    #[test]
    fn normalize_folds_constants() {
        let raw = Expr::Sum(vec![Expr::int_const(3), Expr::Var, Expr::int_const(4)]);
        assert_eq!(normalize(&raw), Expr::Sum(vec![Expr::Var, c(7)]));
    }

    #[test]
    fn normalize_drops_unit_factor() {
        let raw = Expr::Product(vec![Expr::Var, Expr::int_const(1)]);
        assert_eq!(normalize(&raw), Expr::Var);
    }

    #[test]
    fn normalize_collects_like_terms() {
        let raw = Expr::Sum(vec![
            Expr::Product(vec![Expr::Var, c(2)]),
            Expr::Product(vec![c(2), Expr::Var]),
        ]);
        assert_eq!(normalize(&raw), Expr::Product(vec![c(4), Expr::Var]));
    }

    #[test]
    fn zero_factor_collapses_product() {
        let raw = Expr::Product(vec![Expr::exp(x()), c(0)]);
        assert!(normalize(&raw).is_zero());
    }

    #[test]
    fn normalize_does_not_distribute() {
        let sq = (x() + c(1)) * (x() + c(1));
        let expanded = x().pow(2) + c(2) * x() + c(1);
        assert!(!structurally_equal(&sq, &expanded));
        assert!(structurally_equal(
            &Expr::exp(-x().pow(2)),
            &Expr::exp(-x().pow(2))
        ));
        assert!(!structurally_equal(&Expr::exp(x()), &Expr::exp(x().pow(2))));
    }

    #[test]
    fn derivative_of_x_is_one() {
        assert_eq!(differentiate(&x()), c(1));
    }

    #[test]
    fn derivative_of_exponential_sum() {
        let e = Expr::exp(x()) + Expr::exp(x().pow(2));
        let want = Expr::exp(x()) + c(2) * x() * Expr::exp(x().pow(2));
        assert_eq!(differentiate(&e), want);
    }

    #[test]
    fn derivative_of_integral_is_integrand() {
        let e = Expr::int(Expr::inv(x()));
        assert_eq!(differentiate(&e), Expr::inv(x()));
    }

    #[test]
    fn derivative_of_inverse() {
        let e = Expr::inv(x());
        let want = -(Expr::inv(x()) * Expr::inv(x()));
        assert_eq!(differentiate(&e), want);
    }

    #[test]
    fn ranks() {
        assert_eq!(x().rank(), 0);
        assert_eq!(Expr::inv(x()).rank(), 1);
        let e = Expr::exp(x() * Expr::int(Expr::exp(-x().pow(2))));
        assert_eq!(e.rank(), 3);
    }

    #[test]
    fn collect_example_one() {
        let got = collect_t_subexpressions(&example_one());
        let e1 = Expr::exp(-x().pow(2));
        let e2 = Expr::int(e1.clone());
        let e3 = Expr::exp(x() * e2.clone());
        assert_eq!(got, vec![e1, e2, e3]);
    }

    #[test]
    fn collect_polynomial_is_empty() {
        let p = x().pow(3) + c(3) * x().pow(2) + c(5) * x() + c(7);
        assert!(collect_t_subexpressions(&p).is_empty());
    }

    #[test]
    fn collect_equal_rank_exponentials() {
        let e = Expr::exp(x()) + Expr::exp(x().pow(2));
        assert_eq!(
            collect_t_subexpressions(&e),
            vec![Expr::exp(x()), Expr::exp(x().pow(2))]
        );
    }

    #[test]
    fn collect_deduplicates() {
        let g = Expr::exp(-x().pow(2));
        let e = g.clone() * x() + g.clone() * g;
        assert_eq!(collect_t_subexpressions(&e).len(), 1);
    }

    #[test]
    fn inverse_of_constant_folds() {
        assert_eq!(
            Expr::inv(c(2)),
            Expr::Const(Rational::new(1.into(), 2.into()))
        );
        assert!(matches!(Expr::inv(c(0)), Expr::Inv(_)));
    }
}
