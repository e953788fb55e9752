//! Conversion of expressions into tower elements.
//!
//! The conversion peels the last generator `er = T(vr)`: every input is
//! rewritten as a polynomial in `er` with `er`-free coefficients, the
//! coefficients and `vr` are converted recursively over `e1, ..., e(r-1)`,
//! and `fr = T(wr)` is appended to the resulting tower.

use std::cmp::Ordering;

use crate::expr::{normalize, Expr};
use crate::poly::DensePoly;
use crate::tower::{Tower, TowerElem, TowerError};
use crate::Rational;

/// Convert `exprs` into canonical elements of the tower generated by `gens`.
///
/// `gens` must contain every `inv`/`exp`/`int` subexpression of the inputs,
/// dependency-ordered (as produced by
/// [`collect_t_subexpressions_all`](crate::expr::collect_t_subexpressions_all)).
/// Generator `i` of the returned tower is built from `gens[i - 1]`.
pub fn et(
    exprs: &[Expr],
    gens: &[Expr],
) -> Result<(Vec<TowerElem<Rational>>, Tower<Rational>), TowerError> {
    let exprs: Vec<Expr> = exprs.iter().map(normalize).collect();
    let gens: Vec<Expr> = gens.iter().map(normalize).collect();
    et_rec(exprs, &gens)
}

fn et_rec(
    exprs: Vec<Expr>,
    gens: &[Expr],
) -> Result<(Vec<TowerElem<Rational>>, Tower<Rational>), TowerError> {
    let Some((top, rest)) = gens.split_last() else {
        let elems = exprs
            .iter()
            .map(|a| poly_from_expr(a).map(TowerElem::Poly))
            .collect::<Result<_, _>>()?;
        return Ok((elems, Tower::new()));
    };
    let (kind, arg) = top
        .as_t()
        .expect("generator list holds only inv/exp/int nodes");

    // a_j ~ c_{j,n_j} e_r^{n_j} + ... + c_{j,0}
    let split: Vec<Vec<Expr>> = exprs.iter().map(|a| powers_of(a, top)).collect();
    let mut flat: Vec<Expr> = split.iter().flatten().cloned().collect();
    flat.push(arg.clone());

    let (mut converted, mut tower) = et_rec(flat, rest)?;
    let w = converted.pop().expect("argument was appended last");
    let level = tower.push(kind, w, top.clone())?;

    let mut it = converted.into_iter();
    let out = split
        .iter()
        .map(|coeffs| {
            let ds: Vec<TowerElem<Rational>> = it.by_ref().take(coeffs.len()).collect();
            // make() moves leading zero coefficients into the unit exponent at exp levels.
            tower.make(level, 0, ds)
        })
        .collect();
    Ok((out, tower))
}

/// Coefficients of `a` as a polynomial in `target`, treating every other
/// node as opaque. `target` may not occur below another `inv`/`exp`/`int`.
fn powers_of(a: &Expr, target: &Expr) -> Vec<Expr> {
    if a == target {
        return vec![Expr::zero(), Expr::one()];
    }
    match a {
        Expr::Sum(children) => {
            let mut acc: Vec<Vec<Expr>> = Vec::new();
            for c in children {
                for (i, t) in powers_of(c, target).into_iter().enumerate() {
                    if acc.len() <= i {
                        acc.resize_with(i + 1, Vec::new);
                    }
                    acc[i].push(t);
                }
            }
            acc.into_iter().map(Expr::sum).collect()
        }
        Expr::Product(children) => {
            let mut acc = vec![Expr::one()];
            for c in children {
                let rhs = powers_of(c, target);
                let mut next: Vec<Vec<Expr>> = vec![Vec::new(); acc.len() + rhs.len() - 1];
                for (i, p) in acc.iter().enumerate() {
                    for (j, q) in rhs.iter().enumerate() {
                        if !p.is_zero() && !q.is_zero() {
                            next[i + j].push(p.clone() * q.clone());
                        }
                    }
                }
                acc = next.into_iter().map(Expr::sum).collect();
            }
            acc
        }
        _ => vec![a.clone()],
    }
}

/// Reorder dependency-sorted generators so that, within one rank, they are
/// sorted by kind (`exp`, `inv`, `int`) and then by their arguments viewed
/// as elements of the tower of lower-rank generators (see [`elem_cmp`]).
pub fn order_generators(gens: &[Expr]) -> Result<Vec<Expr>, TowerError> {
    let gens: Vec<Expr> = gens.iter().map(normalize).collect();
    let mut tower = Tower::new();
    let mut out = Vec::with_capacity(gens.len());
    let mut start = 0;
    while start < gens.len() {
        let rank = gens[start].rank();
        let end = gens[start..]
            .iter()
            .position(|g| g.rank() != rank)
            .map_or(gens.len(), |p| start + p);
        let mut group = gens[start..end]
            .iter()
            .map(|g| {
                let (kind, arg) = g
                    .as_t()
                    .expect("generator list holds only inv/exp/int nodes");
                Ok((kind, elem_from_expr(arg, &tower)?, g.clone()))
            })
            .collect::<Result<Vec<_>, TowerError>>()?;
        group.sort_by(|a, b| {
            crate::expr::kind_order(a.0, b.0)
                .then_with(|| elem_cmp(&a.1, &b.1))
                .then_with(|| a.2.cmp(&b.2))
        });
        for (kind, arg, origin) in group {
            tower.push(kind, arg, origin.clone())?;
            out.push(origin);
        }
        start = end;
    }
    Ok(out)
}

/// Convert a normalized expression over an existing tower, mapping each
/// `inv`/`exp`/`int` node to the generator built from it.
pub fn elem_from_expr(
    e: &Expr,
    tower: &Tower<Rational>,
) -> Result<TowerElem<Rational>, TowerError> {
    Ok(match e {
        Expr::Var => TowerElem::x(),
        Expr::Const(c) => TowerElem::constant(c.clone()),
        Expr::Sum(cs) => cs.iter().try_fold(TowerElem::zero(), |acc, c| {
            Ok::<_, TowerError>(tower.add(&acc, &elem_from_expr(c, tower)?))
        })?,
        Expr::Product(cs) => cs.iter().try_fold(TowerElem::one(), |acc, c| {
            Ok::<_, TowerError>(tower.mul(&acc, &elem_from_expr(c, tower)?))
        })?,
        _ => match tower.generators().iter().position(|g| &g.origin == e) {
            Some(k) => tower.generator(k + 1),
            None => {
                return Err(TowerError::MissingGenerator(crate::print::expr_to_string(
                    e,
                    crate::print::Style::Ascii,
                )))
            }
        },
    })
}

/// Total order on canonical elements: degree index first, then the unit
/// exponent, then coefficients compared from the highest power down.
pub fn elem_cmp(a: &TowerElem<Rational>, b: &TowerElem<Rational>) -> Ordering {
    a.degree_index()
        .cmp(&b.degree_index())
        .then_with(|| match (a, b) {
            (TowerElem::Poly(p), TowerElem::Poly(q)) => {
                p.coeffs().iter().rev().cmp(q.coeffs().iter().rev())
            }
            (
                TowerElem::Ext {
                    unit: ua,
                    coeffs: ca,
                    ..
                },
                TowerElem::Ext {
                    unit: ub,
                    coeffs: cb,
                    ..
                },
            ) => ua.cmp(ub).then_with(|| {
                ca.iter()
                    .rev()
                    .zip(cb.iter().rev())
                    .map(|(x, y)| elem_cmp(x, y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }),
            _ => unreachable!("equal degree indices imply equal levels"),
        })
}

/// Expand an `inv`/`exp`/`int`-free expression into a polynomial in `x`.
pub fn poly_from_expr(a: &Expr) -> Result<DensePoly<Rational>, TowerError> {
    Ok(match a {
        Expr::Var => DensePoly::x(),
        Expr::Const(c) => DensePoly::constant(c.clone()),
        Expr::Sum(children) => children.iter().try_fold(DensePoly::zero(), |acc, c| {
            Ok::<_, TowerError>(acc.add(&poly_from_expr(c)?))
        })?,
        Expr::Product(children) => children.iter().try_fold(DensePoly::one(), |acc, c| {
            Ok::<_, TowerError>(acc.mul(&poly_from_expr(c)?))
        })?,
        Expr::Inv(_) | Expr::Exp(_) | Expr::Int(_) => {
            return Err(TowerError::MissingGenerator(crate::print::expr_to_string(
                a,
                crate::print::Style::Ascii,
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::collect_t_subexpressions_all;

    /// Independent route: structural recursion with tower arithmetic, looking
    /// each `T(u)` node up among the generator origins.
    fn direct(e: &Expr, tower: &Tower<Rational>) -> TowerElem<Rational> {
        match e {
            Expr::Var => TowerElem::x(),
            Expr::Const(c) => TowerElem::constant(c.clone()),
            Expr::Sum(cs) => cs.iter().fold(TowerElem::zero(), |acc, c| {
                tower.add(&acc, &direct(c, tower))
            }),
            Expr::Product(cs) => cs.iter().fold(TowerElem::one(), |acc, c| {
                tower.mul(&acc, &direct(c, tower))
            }),
            _ => {
                let k = tower
                    .generators()
                    .iter()
                    .position(|g| &g.origin == e)
                    .expect("generator present");
                tower.generator(k + 1)
            }
        }
    }

    fn x() -> Expr {
        Expr::x()
    }

    fn c(n: i64) -> Expr {
        Expr::from(n)
    }

    fn run(e: &Expr) -> (TowerElem<Rational>, Tower<Rational>) {
        let gens = collect_t_subexpressions_all(std::slice::from_ref(e));
        let (mut bs, tower) = et(std::slice::from_ref(e), &gens).unwrap();
        (bs.pop().unwrap(), tower)
    }

    #[test]
    fn polynomial_base_case() {
        let p = x().pow(3) + c(3) * x().pow(2) + c(5) * x() + c(7);
        let (b, tower) = run(&p);
        assert!(tower.is_empty());
        assert_eq!(b, TowerElem::Poly(DensePoly::from_ints(&[7, 5, 3, 1])));
    }

    #[test]
    fn example_one_tower() {
        let e2 = Expr::int(Expr::exp(-x().pow(2)));
        let e = Expr::exp(x() * e2.clone()) - e2 - c(3);
        let (b, tower) = run(&e);
        assert_eq!(tower.len(), 3);
        // f3 - f2 - 3
        let want = tower.sub(
            &tower.sub(&tower.generator(3), &tower.generator(2)),
            &TowerElem::constant(Rational::from_integer(3.into())),
        );
        assert_eq!(b, want);
        // f3 = exp(x f2)
        assert_eq!(
            tower.gen(3).arg,
            tower.mul(&TowerElem::x(), &tower.generator(2))
        );
        assert_eq!(tower.gen(2).arg, tower.generator(1));
        assert_eq!(b, direct(&normalize(&e), &tower));
    }

    #[test]
    fn exp_powers_become_units() {
        let f = Expr::exp(x());
        let e = f.clone() * f.clone() + f.pow(3);
        let (b, tower) = run(&e);
        let TowerElem::Ext {
            level,
            unit,
            coeffs,
        } = &b
        else {
            panic!("expected level 1")
        };
        assert_eq!((*level, *unit, coeffs.len()), (1, 2, 2));
        tower.check(&b).unwrap();
    }

    #[test]
    fn missing_generator_is_reported() {
        let e = Expr::exp(x()) + Expr::inv(x());
        let err = et(&[e], &[Expr::exp(x())]).unwrap_err();
        assert!(matches!(err, TowerError::MissingGenerator(_)));
    }

    #[test]
    fn zero_inverse_argument_is_rejected() {
        let e = Expr::inv(x() - x());
        let gens = collect_t_subexpressions_all(std::slice::from_ref(&e));
        assert!(matches!(
            et(&[e], &gens),
            Err(TowerError::ZeroArgument { .. })
        ));
    }

    #[test]
    fn matches_direct_conversion_on_mixed_input() {
        let e = Expr::exp(x())
            * (Expr::exp(Expr::inv(x()) - Expr::exp(-x())) - Expr::exp(Expr::inv(x())))
            + c(5);
        let (b, tower) = run(&e);
        assert_eq!(b, direct(&normalize(&e), &tower));
        tower.check(&b).unwrap();
    }
}
