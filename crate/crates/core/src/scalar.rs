//! Coefficient and evaluation scalar traits.
//!
//! Tower arithmetic is written against [`Coeff`], a thin bundle of
//! `num-traits` bounds. The exact instantiation is [`crate::Rational`]; `f64`
//! also satisfies the bound and is handy for cross-checks, but zero tests on
//! floating coefficients are only meaningful while values stay integral.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Signed, ToPrimitive};

/// Coefficient ring for dense polynomials and tower elements.
pub trait Coeff:
    Signed + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync
{
    /// Embed a signed machine integer.
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("every coefficient type embeds i64")
    }

    /// Nearest double, used by numeric evaluation.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Storage size in machine words, used for work accounting.
    fn words(&self) -> u64 {
        1
    }
}

impl Coeff for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn words(&self) -> u64 {
        (self.numer().bits() + self.denom().bits())
            .div_ceil(64)
            .max(1)
    }
}

impl Coeff for f64 {}

impl Coeff for f32 {}

/// Floating-point type used by the numeric evaluator.
pub trait Real: Float + Debug + Display + Send + Sync + 'static {
    fn from_f64_lossy(v: f64) -> Self {
        Self::from(v).unwrap_or_else(Self::nan)
    }
}

impl Real for f64 {}

impl Real for f32 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_embeds_integers() {
        let r = <BigRational as Coeff>::from_int(-7);
        assert_eq!(r.to_string(), "-7");
        assert_eq!(r.to_f64_lossy(), -7.0);
    }

    #[test]
    fn floats_embed_integers() {
        assert_eq!(<f64 as Coeff>::from_int(3), 3.0);
        assert_eq!(<f32 as Real>::from_f64_lossy(0.5), 0.5f32);
    }
}
