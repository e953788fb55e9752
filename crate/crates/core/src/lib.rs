//! Semi-Fourier sequences of Exp-Int expressions.
//!
//! Expressions built from `x`, rationals, `+`, `*`, `inv`, `exp` and `int`
//! are converted into elements of an extension tower over `Q[x]`. For such an
//! element `f` a semi-Fourier sequence `(g1, h1), ..., (gm, hm)` is computed:
//! `g1` is `f` times a positive multiplier and each `g(k+1)` is `D(gk)` times
//! a positive multiplier, ending in a constant. Sign variations of the
//! sequence then bound the number of real roots of `f` on an interval, just
//! like a Fourier sequence does for polynomials.
//!
//! ```
//! use semifourier::{eisf, parse};
//!
//! let e = parse("exp(x*int(exp(-x^2))) - int(exp(-x^2)) - 3").unwrap();
//! let seq = eisf(&e).unwrap();
//! assert_eq!(seq.len(), 17);
//! ```
//!
//! Tower arithmetic is generic over the coefficient type (see [`Coeff`]);
//! numeric checks are generic over [`Real`]. The aliases at the crate root
//! fix the exact rational instance used by the conversion from expressions.

pub mod expr;
pub mod json;
pub mod parse;
pub mod poly;
pub mod print;
pub mod scalar;
pub mod sequence;
pub mod tower;
pub mod verify;

pub use expr::{collect_t_subexpressions, differentiate, normalize, Expr, TKind};
pub use parse::{parse, ParseError, SourceSpan};
pub use poly::DensePoly;
pub use scalar::{Coeff, Real};
pub use sequence::{
    descent_witness, eisf, eisf_with, etsf, etsf_with, CallRecord, CallSite, EtsfOptions,
    HMultiplier, SfError, SfPair, SfSequence, TraceEvent,
};
pub use tower::{
    et, DegreeIndex, Generator, GeneratorKind, RationalForm, Tower, TowerElem, TowerError,
};

/// Exact rational coefficients.
pub type Rational = num_rational::BigRational;
/// Polynomial in `x` over the rationals.
pub type RatPoly = DensePoly<Rational>;
/// Tower with rational coefficients.
pub type RatTower = Tower<Rational>;
/// Tower element with rational coefficients.
pub type RatElem = TowerElem<Rational>;
/// Semi-Fourier sequence with rational coefficients.
pub type RatSequence = SfSequence<Rational>;
/// Tower element with `f64` coefficients.
pub type F64Elem = TowerElem<f64>;
