//! Rational forms: each `inv` generator `fj = inv(tj)` is replaced by `1/tj`
//! and denominators are cleared, so cancellation of `e * inv(e)` turns into
//! plain equality of cross-multiplied numerators.

use crate::expr::TKind;
use crate::poly::DensePoly;
use crate::scalar::Coeff;
use crate::tower::{Tower, TowerElem};

/// `num / den` with both parts free of `inv` generators.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm<C> {
    pub num: TowerElem<C>,
    pub den: TowerElem<C>,
}

impl<C: Coeff> RationalForm<C> {
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<C: Coeff> Tower<C> {
    /// Rational form of `a`, reduced by polynomial gcd when the denominator
    /// is a polynomial in `x` and by common powers of `exp`/`int` generators.
    pub fn to_rational_form(&self, a: &TowerElem<C>) -> RationalForm<C> {
        let (num, den) = self.rf_raw(a);
        self.reduce(num, den)
    }

    pub fn rf_mul(&self, a: &RationalForm<C>, b: &RationalForm<C>) -> RationalForm<C> {
        RationalForm {
            num: self.mul(&a.num, &b.num),
            den: self.mul(&a.den, &b.den),
        }
    }

    /// Equality of rational functions by cross-multiplication.
    pub fn rf_equal(&self, a: &RationalForm<C>, b: &RationalForm<C>) -> bool {
        self.mul(&a.num, &b.den) == self.mul(&b.num, &a.den)
    }

    fn rf_raw(&self, a: &TowerElem<C>) -> (TowerElem<C>, TowerElem<C>) {
        let (level, unit, coeffs) = match a {
            TowerElem::Poly(_) => return (a.clone(), TowerElem::one()),
            TowerElem::Ext {
                level,
                unit,
                coeffs,
            } => (*level, *unit, coeffs),
        };
        let n = coeffs.len() - 1;
        let mut acc: Option<(TowerElem<C>, TowerElem<C>)> = None;
        match self.kind(level) {
            TKind::Inv => {
                // fk = 1 / t = dt / nt; bring every term over nt^n.
                let (nt, dt) = self.rf_raw(&self.gen(level).arg);
                for (i, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let (nc, dc) = self.rf_raw(c);
                    let term = self.mul(
                        &nc,
                        &self.mul(&self.pow(&dt, i as u32), &self.pow(&nt, (n - i) as u32)),
                    );
                    acc = Some(self.frac_add(acc, term, dc));
                }
                let (num, den) = acc.expect("nonzero element");
                (num, self.mul(&den, &self.pow(&nt, n as u32)))
            }
            TKind::Exp | TKind::Int => {
                for (i, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let (nc, dc) = self.rf_raw(c);
                    let term = self.mul(&nc, &self.gen_power(level, i as i64 + unit));
                    acc = Some(self.frac_add(acc, term, dc));
                }
                acc.expect("nonzero element")
            }
        }
    }

    fn frac_add(
        &self,
        acc: Option<(TowerElem<C>, TowerElem<C>)>,
        num: TowerElem<C>,
        den: TowerElem<C>,
    ) -> (TowerElem<C>, TowerElem<C>) {
        match acc {
            None => (num, den),
            Some((an, ad)) if ad == den => (self.add(&an, &num), ad),
            Some((an, ad)) => (
                self.add(&self.mul(&an, &den), &self.mul(&num, &ad)),
                self.mul(&ad, &den),
            ),
        }
    }

    fn reduce(&self, mut num: TowerElem<C>, mut den: TowerElem<C>) -> RationalForm<C> {
        if num.is_zero() {
            return RationalForm {
                num,
                den: TowerElem::one(),
            };
        }
        for level in 1..=self.len() {
            if self.kind(level) == TKind::Inv {
                continue;
            }
            let (Some(a), Some(b)) = (min_exponent(&num, level), min_exponent(&den, level)) else {
                continue;
            };
            let common = a.min(b);
            if common != 0 {
                num = self.shift(&num, level, -common);
                den = self.shift(&den, level, -common);
            }
        }
        if let TowerElem::Poly(d) = &den {
            let g = num
                .leaves()
                .into_iter()
                .fold(d.clone(), |g, leaf| g.gcd(leaf));
            let g = if g.degree() > 0 { g } else { DensePoly::one() };
            let lead = d
                .div_rem(&g)
                .0
                .leading()
                .cloned()
                .expect("nonzero denominator");
            let scale = |p: &DensePoly<C>| {
                let (q, _) = p.div_rem(&g);
                q.scale(&(C::one() / lead.clone()))
            };
            num = num.map_leaves(&scale);
            den = TowerElem::Poly(scale(d));
        }
        RationalForm { num, den }
    }

    /// Multiply by `f_level^s`; at `int` levels a negative `s` must divide exactly.
    fn shift(&self, e: &TowerElem<C>, level: usize, s: i64) -> TowerElem<C> {
        if s == 0 || e.is_zero() {
            return e.clone();
        }
        if self.kind(level) == TKind::Exp || s > 0 {
            return self.mul(e, &self.gen_power(level, s));
        }
        match e {
            TowerElem::Ext {
                level: l, coeffs, ..
            } if *l == level => self.make(level, 0, coeffs[(-s) as usize..].to_vec()),
            TowerElem::Ext {
                level: l,
                unit,
                coeffs,
            } if *l > level => self.make(
                *l,
                *unit,
                coeffs.iter().map(|c| self.shift(c, level, s)).collect(),
            ),
            _ => unreachable!("inexact division by a generator power"),
        }
    }
}

/// Smallest exponent of `f_level` over the terms of `e`; `None` for zero.
fn min_exponent<C: Coeff>(e: &TowerElem<C>, level: usize) -> Option<i64> {
    match e {
        _ if e.is_zero() => None,
        TowerElem::Poly(_) => Some(0),
        TowerElem::Ext { level: l, .. } if *l < level => Some(0),
        TowerElem::Ext {
            level: l,
            unit,
            coeffs,
        } if *l == level => {
            let first = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
            Some(unit + first as i64)
        }
        TowerElem::Ext { coeffs, .. } => coeffs.iter().filter_map(|c| min_exponent(c, level)).min(),
    }
}
