//! Exact arithmetic and dense linear algebra.
//!
//! Everything authoritative runs over [`Rational`] or [`QuadExt`]. The
//! elimination routines are generic over [`Scalar`] so the same code also runs
//! on `f64` and on 60-digit [`BigDecimal`] when a caller asks for a float check.

mod decimal;
mod gf2;
mod linalg;
mod matrix;
mod quad;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use bigdecimal::BigDecimal;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use decimal::{decimal_from_rational, decimal_sqrt, negligible, DECIMAL_DIGITS};
pub use gf2::{gf2_rank, BitVector};
pub use linalg::{
    inverse, nullspace, rank, rank_fraction_free, rat_det, rat_nullspace, rat_rank, rat_rref,
    rref, solve,
};
pub use matrix::Matrix;
pub use quad::{quad_mul, quad_rank, squarefree_part, QuadExt, SquarefreeKernel, DEFAULT_PRIME_BOUND};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("trial division up to {bound} left the cofactor {cofactor} unfactored")]
    FactorizationIncomplete { cofactor: String, bound: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected a positive rational, got {0}")]
    NotPositive(String),
    #[error("matrix is singular")]
    Singular,
}

/// Field element usable by the generic elimination routines.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    /// True for types with exact zero tests; pivoting then takes the first nonzero entry.
    const EXACT: bool;

    /// Zero test used when choosing pivots. Exact types use `is_zero`.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    /// Size used for partial pivoting on inexact types.
    fn magnitude(&self) -> f64;

    fn from_rational(q: &Rational) -> Self;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-9
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigDecimal {
    const EXACT: bool = false;

    fn is_negligible(&self) -> bool {
        self.abs() < decimal::negligible()
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_rational(q: &Rational) -> Self {
        decimal_from_rational(q)
    }
}

impl Scalar for QuadExt {
    const EXACT: bool = true;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn from_rational(q: &Rational) -> Self {
        QuadExt::from_rational(q.clone())
    }
}

/// Matrix of rationals.
pub type RatMatrix = Matrix<Rational>;
/// Matrix of multi-quadratic field elements.
pub type QuadMatrix = Matrix<QuadExt>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p/q" or an integer string.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Formats as "num/den" (always with a denominator).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("-4"), Some(rat(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&rat(5)), "5/1");
        assert_eq!(format_rational(&ratio(-2, 4)), "-1/2");
    }
}
