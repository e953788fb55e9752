//! Extension towers `E<f1, ..., fr>` and their elements.
//!
//! Each generator `fk = T(pk)` has an argument living in the tower built from
//! `f1, ..., f(k-1)`. Elements are recursive dense polynomials: a level-0
//! element is a polynomial in `x`, a level-`k` element is a polynomial in
//! `fk` whose coefficients live at lower levels. At `exp` levels the element
//! also carries an integer unit exponent `u`, so it reads
//! `fk^u (a0 + a1 fk + ... + an fk^n)` with `a0 != 0`.
//!
//! Zero tests are syntactic: an element is zero iff its canonical form is the
//! empty polynomial.

mod et;
mod rational;

pub use et::{elem_cmp, elem_from_expr, et, order_generators, poly_from_expr};
pub use rational::RationalForm;

use std::borrow::Cow;
use std::fmt;

use thiserror::Error;

use crate::expr::{Expr, TKind};
use crate::poly::DensePoly;
use crate::scalar::Coeff;

/// Kind of a tower generator.
pub type GeneratorKind = TKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("element refers to generator f{level} but the tower has {len} generators")]
    Mismatch { level: usize, len: usize },
    #[error("generator argument must live strictly below level {level}")]
    ArgumentLevel { level: usize },
    #[error("argument of generator f{level} is zero")]
    ZeroArgument { level: usize },
    #[error("subexpression {0} is not among the supplied generators")]
    MissingGenerator(String),
    #[error("invalid element: {0}")]
    Invalid(String),
}

/// Canonical element of an extension tower.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TowerElem<C> {
    /// Level 0: a polynomial in `x`.
    Poly(DensePoly<C>),
    /// Level `k >= 1`: `fk^unit * sum(coeffs[i] * fk^i)`.
    Ext {
        level: usize,
        unit: i64,
        coeffs: Vec<TowerElem<C>>,
    },
}

/// `d(h) = (k, n)`: top generator index and degree in it. Compared
/// lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DegreeIndex {
    pub level: usize,
    pub degree: usize,
}

impl fmt::Display for DegreeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.level, self.degree)
    }
}

impl<C: Coeff> TowerElem<C> {
    pub fn zero() -> Self {
        TowerElem::Poly(DensePoly::zero())
    }

    pub fn one() -> Self {
        TowerElem::Poly(DensePoly::one())
    }

    pub fn constant(c: C) -> Self {
        TowerElem::Poly(DensePoly::constant(c))
    }

    pub fn x() -> Self {
        TowerElem::Poly(DensePoly::x())
    }

    pub fn poly(p: DensePoly<C>) -> Self {
        TowerElem::Poly(p)
    }

    pub fn level(&self) -> usize {
        match self {
            TowerElem::Poly(_) => 0,
            TowerElem::Ext { level, .. } => *level,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TowerElem::Poly(p) if p.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, TowerElem::Poly(p) if p.is_one())
    }

    /// Unit exponent at the top level (0 below `exp` levels).
    pub fn unit(&self) -> i64 {
        match self {
            TowerElem::Poly(_) => 0,
            TowerElem::Ext { unit, .. } => *unit,
        }
    }

    pub fn as_poly(&self) -> Option<&DensePoly<C>> {
        match self {
            TowerElem::Poly(p) => Some(p),
            TowerElem::Ext { .. } => None,
        }
    }

    pub fn degree_index(&self) -> DegreeIndex {
        match self {
            TowerElem::Poly(p) => DegreeIndex {
                level: 0,
                degree: p.degree(),
            },
            TowerElem::Ext { level, coeffs, .. } => DegreeIndex {
                level: *level,
                degree: coeffs.len() - 1,
            },
        }
    }

    /// Apply `f` to every level-0 polynomial. `f` must map nonzero
    /// polynomials to nonzero polynomials (e.g. scaling by a unit), otherwise
    /// the result is not canonical.
    pub fn map_leaves(&self, f: &impl Fn(&DensePoly<C>) -> DensePoly<C>) -> Self {
        match self {
            TowerElem::Poly(p) => TowerElem::Poly(f(p)),
            TowerElem::Ext {
                level,
                unit,
                coeffs,
            } => TowerElem::Ext {
                level: *level,
                unit: *unit,
                coeffs: coeffs.iter().map(|c| c.map_leaves(f)).collect(),
            },
        }
    }

    /// Every level-0 polynomial, in storage order.
    pub fn leaves(&self) -> Vec<&DensePoly<C>> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a DensePoly<C>>) {
        match self {
            TowerElem::Poly(p) => out.push(p),
            TowerElem::Ext { coeffs, .. } => coeffs.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn neg(&self) -> Self {
        self.map_leaves(&|p| p.neg())
    }

    /// Multiply by a nonzero scalar.
    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        self.map_leaves(&|p| p.scale(c))
    }
}

/// One generator `fk = T(pk)` of a tower.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator<C> {
    pub kind: GeneratorKind,
    /// `pk`, at a level below this generator.
    pub arg: TowerElem<C>,
    /// `D(pk)`, cached.
    pub arg_diff: TowerElem<C>,
    /// Source subexpression this generator was built from.
    pub origin: Expr,
}

/// Ordered list of generators; generator `k` (1-based) is `gens[k - 1]`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Tower<C> {
    gens: Vec<Generator<C>>,
}

impl<C: Coeff> Tower<C> {
    pub fn new() -> Self {
        Tower { gens: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator<C>] {
        &self.gens
    }

    /// Generator `k`, 1-based.
    pub fn gen(&self, level: usize) -> &Generator<C> {
        &self.gens[level - 1]
    }

    pub fn kind(&self, level: usize) -> GeneratorKind {
        self.gen(level).kind
    }

    /// Append `T(arg)` as the next generator and return its level.
    pub fn push(
        &mut self,
        kind: GeneratorKind,
        arg: TowerElem<C>,
        origin: Expr,
    ) -> Result<usize, TowerError> {
        let level = self.gens.len() + 1;
        if arg.level() >= level {
            return Err(TowerError::ArgumentLevel { level });
        }
        if arg.is_zero() {
            return Err(TowerError::ZeroArgument { level });
        }
        self.check(&arg)?;
        let arg_diff = self.diff(&arg);
        self.gens.push(Generator {
            kind,
            arg,
            arg_diff,
            origin,
        });
        Ok(level)
    }

    /// The element `fk`.
    pub fn generator(&self, level: usize) -> TowerElem<C> {
        self.gen_power(level, 1)
    }

    /// `fk^e`; negative `e` only at `exp` levels.
    pub fn gen_power(&self, level: usize, e: i64) -> TowerElem<C> {
        if e == 0 {
            return TowerElem::one();
        }
        match self.kind(level) {
            TKind::Exp => TowerElem::Ext {
                level,
                unit: e,
                coeffs: vec![TowerElem::one()],
            },
            _ => {
                assert!(e > 0, "negative power of a non-exp generator");
                let mut coeffs = vec![TowerElem::zero(); e as usize];
                coeffs.push(TowerElem::one());
                TowerElem::Ext {
                    level,
                    unit: 0,
                    coeffs,
                }
            }
        }
    }

    /// Canonical constructor for `fk^unit * sum(coeffs[i] fk^i)`.
    pub fn make(&self, level: usize, mut unit: i64, mut coeffs: Vec<TowerElem<C>>) -> TowerElem<C> {
        if level == 0 {
            debug_assert!(unit == 0 && coeffs.len() <= 1);
            return coeffs.pop().unwrap_or_else(TowerElem::zero);
        }
        while coeffs.last().is_some_and(TowerElem::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return TowerElem::zero();
        }
        if self.kind(level) == TKind::Exp {
            let lead_zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
            if lead_zeros > 0 {
                coeffs.drain(..lead_zeros);
                unit += lead_zeros as i64;
            }
        } else if unit != 0 {
            assert!(unit > 0, "negative unit at a non-exp level");
            let shift = unit as usize;
            coeffs.splice(0..0, std::iter::repeat_n(TowerElem::zero(), shift));
            unit = 0;
        }
        if coeffs.len() == 1 && unit == 0 {
            return coeffs.pop().unwrap();
        }
        TowerElem::Ext {
            level,
            unit,
            coeffs,
        }
    }

    /// View `a` as a polynomial in `f_level`: `(unit, coefficients)`.
    fn view<'a>(&self, a: &'a TowerElem<C>, level: usize) -> (i64, Cow<'a, [TowerElem<C>]>) {
        match a {
            TowerElem::Ext {
                level: l,
                unit,
                coeffs,
            } if *l == level => (*unit, Cow::Borrowed(coeffs)),
            _ if a.is_zero() => (0, Cow::Owned(Vec::new())),
            _ => (0, Cow::Owned(vec![a.clone()])),
        }
    }

    pub fn add(&self, a: &TowerElem<C>, b: &TowerElem<C>) -> TowerElem<C> {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        let level = a.level().max(b.level());
        if level == 0 {
            let (TowerElem::Poly(p), TowerElem::Poly(q)) = (a, b) else {
                unreachable!()
            };
            return TowerElem::Poly(p.add(q));
        }
        let (ua, ca) = self.view(a, level);
        let (ub, cb) = self.view(b, level);
        let unit = ua.min(ub);
        let end = (ua + ca.len() as i64).max(ub + cb.len() as i64);
        let mut out = vec![TowerElem::zero(); (end - unit) as usize];
        for (i, c) in ca.iter().enumerate() {
            out[i + (ua - unit) as usize] = c.clone();
        }
        for (i, c) in cb.iter().enumerate() {
            let slot = i + (ub - unit) as usize;
            out[slot] = self.add(&out[slot], c);
        }
        self.make(level, unit, out)
    }

    pub fn sub(&self, a: &TowerElem<C>, b: &TowerElem<C>) -> TowerElem<C> {
        self.add(a, &b.neg())
    }

    pub fn mul(&self, a: &TowerElem<C>, b: &TowerElem<C>) -> TowerElem<C> {
        if a.is_zero() || b.is_zero() {
            return TowerElem::zero();
        }
        if a.is_one() {
            return b.clone();
        }
        if b.is_one() {
            return a.clone();
        }
        let level = a.level().max(b.level());
        if level == 0 {
            let (TowerElem::Poly(p), TowerElem::Poly(q)) = (a, b) else {
                unreachable!()
            };
            return TowerElem::Poly(p.mul(q));
        }
        let (ua, ca) = self.view(a, level);
        let (ub, cb) = self.view(b, level);
        let mut out = vec![TowerElem::zero(); ca.len() + cb.len() - 1];
        for (i, x) in ca.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in cb.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let prod = self.mul(x, y);
                out[i + j] = self.add(&out[i + j], &prod);
            }
        }
        self.make(level, ua + ub, out)
    }

    pub fn pow(&self, a: &TowerElem<C>, n: u32) -> TowerElem<C> {
        let mut acc = TowerElem::one();
        for _ in 0..n {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Multiply by a machine integer.
    pub fn scale_int(&self, a: &TowerElem<C>, n: i64) -> TowerElem<C> {
        match n {
            0 => TowerElem::zero(),
            1 => a.clone(),
            _ => a.scale(&C::from_int(n)),
        }
    }

    /// Derivative with respect to `x`.
    pub fn diff(&self, a: &TowerElem<C>) -> TowerElem<C> {
        let (level, unit, coeffs) = match a {
            TowerElem::Poly(p) => return TowerElem::Poly(p.derivative()),
            TowerElem::Ext {
                level,
                unit,
                coeffs,
            } => (*level, *unit, coeffs),
        };
        let gen = self.gen(level);
        let n = coeffs.len();
        let out: Vec<TowerElem<C>> = match gen.kind {
            // D(fk) = -fk^2 D(g)
            TKind::Inv => (0..=n)
                .map(|j| {
                    let own = coeffs
                        .get(j)
                        .map(|c| self.diff(c))
                        .unwrap_or_else(TowerElem::zero);
                    if j == 0 || j == 1 {
                        return own;
                    }
                    let lower = self.mul(&coeffs[j - 1], &gen.arg_diff);
                    self.sub(&own, &self.scale_int(&lower, (j - 1) as i64))
                })
                .collect(),
            // D(fk) = g
            TKind::Int => (0..n)
                .map(|j| {
                    let own = self.diff(&coeffs[j]);
                    match coeffs.get(j + 1) {
                        Some(next) if !next.is_zero() => {
                            let carry = self.scale_int(&self.mul(next, &gen.arg), (j + 1) as i64);
                            self.add(&own, &carry)
                        }
                        _ => own,
                    }
                })
                .collect(),
            // D(fk) = fk D(g)
            TKind::Exp => coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let own = self.diff(c);
                    let power = j as i64 + unit;
                    if power == 0 {
                        return own;
                    }
                    let carry = self.scale_int(&self.mul(c, &gen.arg_diff), power);
                    self.add(&own, &carry)
                })
                .collect(),
        };
        self.make(level, unit, out)
    }

    /// Validate every canonical-form invariant of `a` against this tower.
    pub fn check(&self, a: &TowerElem<C>) -> Result<(), TowerError> {
        match a {
            TowerElem::Poly(p) => {
                if p.leading().is_some_and(|c| c.is_zero()) {
                    return Err(TowerError::Invalid(
                        "level-0 leading coefficient is zero".into(),
                    ));
                }
                Ok(())
            }
            TowerElem::Ext {
                level,
                unit,
                coeffs,
            } => {
                let level = *level;
                if level == 0 || level > self.len() {
                    return Err(TowerError::Mismatch {
                        level,
                        len: self.len(),
                    });
                }
                let Some(last) = coeffs.last() else {
                    return Err(TowerError::Invalid(format!(
                        "empty coefficient list at level {level}"
                    )));
                };
                if last.is_zero() {
                    return Err(TowerError::Invalid(format!(
                        "zero leading coefficient at level {level}"
                    )));
                }
                if self.kind(level) == TKind::Exp {
                    if coeffs[0].is_zero() {
                        return Err(TowerError::Invalid(format!(
                            "zero constant coefficient at exp level {level}"
                        )));
                    }
                } else if *unit != 0 {
                    return Err(TowerError::Invalid(format!(
                        "nonzero unit at non-exp level {level}"
                    )));
                }
                if coeffs.len() == 1 && *unit == 0 {
                    return Err(TowerError::Invalid(format!(
                        "element does not involve f{level}"
                    )));
                }
                for c in coeffs {
                    if c.level() >= level {
                        return Err(TowerError::Invalid(format!(
                            "coefficient at level {} under level {level}",
                            c.level()
                        )));
                    }
                    self.check(c)?;
                }
                Ok(())
            }
        }
    }

    fn check_level(&self, a: &TowerElem<C>) -> Result<(), TowerError> {
        if a.level() > self.len() {
            return Err(TowerError::Mismatch {
                level: a.level(),
                len: self.len(),
            });
        }
        Ok(())
    }

    /// [`Tower::add`] that rejects elements from a larger tower.
    pub fn checked_add(
        &self,
        a: &TowerElem<C>,
        b: &TowerElem<C>,
    ) -> Result<TowerElem<C>, TowerError> {
        self.check_level(a)?;
        self.check_level(b)?;
        Ok(self.add(a, b))
    }

    /// [`Tower::mul`] that rejects elements from a larger tower.
    pub fn checked_mul(
        &self,
        a: &TowerElem<C>,
        b: &TowerElem<C>,
    ) -> Result<TowerElem<C>, TowerError> {
        self.check_level(a)?;
        self.check_level(b)?;
        Ok(self.mul(a, b))
    }

    /// [`Tower::diff`] that rejects elements from a larger tower.
    pub fn checked_diff(&self, a: &TowerElem<C>) -> Result<TowerElem<C>, TowerError> {
        self.check_level(a)?;
        Ok(self.diff(a))
    }

    /// The tower truncated to its first `len` generators.
    pub fn prefix(&self, len: usize) -> Tower<C> {
        Tower {
            gens: self.gens[..len].to_vec(),
        }
    }
}
