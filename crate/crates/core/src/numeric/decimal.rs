use std::str::FromStr;

use bigdecimal::BigDecimal;
use num_traits::{Signed, Zero};

use super::Rational;

/// Working precision of the high-precision float path.
pub const DECIMAL_DIGITS: u64 = 60;

/// Agreement threshold for the float path.
pub fn negligible() -> BigDecimal {
    BigDecimal::from_str("1e-30").expect("literal parses")
}

pub fn decimal_from_rational(q: &Rational) -> BigDecimal {
    let n = BigDecimal::from(q.numer().clone());
    let d = BigDecimal::from(q.denom().clone());
    (n / d).with_prec(DECIMAL_DIGITS + 10)
}

/// Square root of a nonnegative value; negative input is treated as zero.
pub fn decimal_sqrt(x: &BigDecimal) -> BigDecimal {
    if !x.is_positive() {
        return BigDecimal::zero();
    }
    x.sqrt().map(|r| r.with_prec(DECIMAL_DIGITS + 10)).unwrap_or_else(BigDecimal::zero)
}
