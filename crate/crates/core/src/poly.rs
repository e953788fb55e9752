//! Dense univariate polynomials in `x`.
//!
//! Coefficients are stored in ascending degree order. The vector is empty for
//! the zero polynomial and otherwise ends in a nonzero coefficient.

use std::fmt;

use crate::scalar::{Coeff, Real};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DensePoly<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> DensePoly<C> {
    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn x() -> Self {
        DensePoly {
            coeffs: vec![C::zero(), C::one()],
        }
    }

    pub fn constant(c: C) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// Build from ascending coefficients; trailing zeros are dropped.
    pub fn from_coeffs(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| C::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.clone() + b.clone(),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        DensePoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * C::from_int(i as i64))
                .collect(),
        )
    }

    /// Horner evaluation in the coefficient ring.
    pub fn eval(&self, x: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn eval_real<R: Real>(&self, x: R) -> R {
        self.coeffs.iter().rev().fold(R::zero(), |acc, c| {
            acc * x + R::from_f64_lossy(c.to_f64_lossy())
        })
    }

    /// Horner evaluation with every coefficient and `|x|` taken in absolute
    /// value; bounds the magnitude of the terms that cancel in [`Self::eval_real`].
    pub fn eval_abs<R: Real>(&self, x: R) -> R {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(R::zero(), |acc, c| {
            acc * ax + R::from_f64_lossy(c.to_f64_lossy()).abs()
        })
    }

    /// Division with remainder; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let lead = divisor.leading().unwrap().clone();
        let dn = divisor.degree();
        let mut rem = self.coeffs.clone();
        if rem.len() < divisor.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![C::zero(); rem.len() - dn];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dn].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
            }
            quot[k] = c;
        }
        rem.truncate(dn);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) if !l.is_one() => {
                let inv = C::one() / l.clone();
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }
}

impl<C: Coeff> fmt::Display for DensePoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::poly_to_string(
            self,
            crate::print::Style::Ascii,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    type P = DensePoly<Rational>;

    #[test]
    fn trailing_zeros_are_stripped() {
        assert!(P::from_ints(&[0, 0, 0]).is_zero());
        assert_eq!(P::from_ints(&[1, 2, 0]).degree(), 1);
    }

    #[test]
    fn add_and_cancel() {
        let a = P::from_ints(&[1, 1]);
        let b = P::from_ints(&[1, 2, 1]);
        assert_eq!(a.add(&b), P::from_ints(&[2, 3, 1]));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn square_of_binomial() {
        let a = P::from_ints(&[1, 1]);
        assert_eq!(a.mul(&a), P::from_ints(&[1, 2, 1]));
        assert_eq!(a.pow(2), P::from_ints(&[1, 2, 1]));
    }

    #[test]
    fn derivative_of_cubic() {
        let p = P::from_ints(&[7, 5, 3, 1]);
        assert_eq!(p.derivative(), P::from_ints(&[5, 6, 3]));
    }

    #[test]
    fn gcd_of_shared_factor() {
        let a = P::from_ints(&[-1, 0, 1]);
        let b = P::from_ints(&[-1, 1]);
        assert_eq!(a.gcd(&b), b);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, P::from_ints(&[1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn evaluation() {
        let p = P::from_ints(&[7, 5, 3, 1]);
        assert_eq!(
            p.eval(&Rational::from_integer((-10).into())),
            Rational::from_integer((-743).into())
        );
        assert_eq!(p.eval_real(-10.0f64), -743.0);
        assert_eq!(p.eval_abs(-10.0f64), 1357.0);
    }
}
