//! Elements of Q[√p₁, √p₂, …] in the basis of square roots of squarefree integers.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{rank_fraction_free, NumericError, QuadMatrix, Rational};

pub const DEFAULT_PRIME_BOUND: u64 = 1_000_000;

/// Sorted set of distinct primes; the empty set stands for the radicand 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquarefreeKernel(Vec<u64>);

impl SquarefreeKernel {
    pub fn one() -> Self {
        SquarefreeKernel(Vec::new())
    }

    /// Caller guarantees the entries are distinct primes.
    pub fn from_primes(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        primes.dedup();
        SquarefreeKernel(primes)
    }

    pub fn primes(&self) -> &[u64] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn radicand(&self) -> BigUint {
        self.0.iter().fold(BigUint::one(), |acc, &p| acc * p)
    }

    /// √K·√L = c·√M with M the symmetric difference and c the product of the shared primes.
    pub fn mul(&self, other: &Self) -> (Self, BigUint) {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut shared = BigUint::one();
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                out.push(b[j]);
                j += 1;
            } else {
                shared *= a[i];
                i += 1;
                j += 1;
            }
        }
        (SquarefreeKernel(out), shared)
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    fn without(&self, p: u64) -> Self {
        SquarefreeKernel(self.0.iter().copied().filter(|&q| q != p).collect())
    }
}

/// Splits n into (square root of its square part, squarefree primes).
fn split_square(n: &BigUint, bound: u64) -> Result<(BigUint, Vec<u64>), NumericError> {
    let mut rem = n.clone();
    let mut root = BigUint::one();
    let mut primes = Vec::new();
    let mut p: u64 = 2;
    loop {
        if rem.is_one() {
            return Ok((root, primes));
        }
        let pp = BigUint::from(p) * p;
        if pp > rem {
            // rem has no factor below p, so it is prime
            let q = rem.to_u64().expect("prime cofactor below bound squared fits in u64");
            primes.push(q);
            return Ok((root, primes));
        }
        if p > bound {
            return Err(NumericError::FactorizationIncomplete { cofactor: rem.to_string(), bound });
        }
        let mut e = 0u32;
        if let Some(small) = rem.to_u64() {
            let mut s = small;
            while s % p == 0 {
                s /= p;
                e += 1;
            }
            rem = BigUint::from(s);
        } else {
            let bp = BigUint::from(p);
            loop {
                let (q, r) = rem.div_rem(&bp);
                if !r.is_zero() {
                    break;
                }
                rem = q;
                e += 1;
            }
        }
        for _ in 0..e / 2 {
            root *= p;
        }
        if e % 2 == 1 {
            primes.push(p);
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
}

/// Writes q = c²·∏K with K squarefree, returning (K, c).
pub fn squarefree_part(q: &Rational, bound: u64) -> Result<(SquarefreeKernel, Rational), NumericError> {
    if !q.is_positive() {
        return Err(NumericError::NotPositive(q.to_string()));
    }
    let n = q.numer().magnitude().clone();
    let d = q.denom().magnitude().clone();
    let (a, kn) = split_square(&n, bound)?;
    let (b, kd) = split_square(&d, bound)?;
    // n/d = (a/(b·k_d))²·k_n·k_d, and k_n, k_d are coprime
    let kd_prod: BigUint = kd.iter().fold(BigUint::one(), |acc, &p| acc * p);
    let cofactor = Rational::new(BigInt::from(a), BigInt::from(b * kd_prod));
    let mut primes = kn;
    primes.extend(kd);
    Ok((SquarefreeKernel::from_primes(primes), cofactor))
}

/// Σ_K c_K·√K with every coefficient nonzero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct QuadExt {
    terms: BTreeMap<SquarefreeKernel, Rational>,
}

impl QuadExt {
    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(SquarefreeKernel::one(), q);
        }
        QuadExt { terms }
    }

    pub fn from_term(kernel: SquarefreeKernel, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(kernel, c);
        }
        QuadExt { terms }
    }

    /// √q for a nonnegative rational q.
    pub fn sqrt_of(q: &Rational, bound: u64) -> Result<Self, NumericError> {
        if q.is_zero() {
            return Ok(QuadExt::zero());
        }
        let (k, c) = squarefree_part(q, bound)?;
        Ok(QuadExt::from_term(k, c))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SquarefreeKernel, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value when no irrational term is present.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&SquarefreeKernel::one()).cloned(),
            _ => None,
        }
    }

    pub fn kernels(&self) -> Vec<SquarefreeKernel> {
        self.terms.keys().cloned().collect()
    }

    fn add_term(&mut self, k: SquarefreeKernel, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let mut out = QuadExt::default();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let (k, shared) = ka.mul(kb);
                out.add_term(k, ca * cb * Rational::from_integer(BigInt::from(shared)));
            }
        }
        out
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return QuadExt::zero();
        }
        QuadExt { terms: self.terms.iter().map(|(k, c)| (k.clone(), c * q)).collect() }
    }

    /// Multiplicative inverse; `None` for zero.
    ///
    /// Peels off the largest prime p: with x = a + b√p, x⁻¹ = (a − b√p)/(a² − p·b²),
    /// and the denominator no longer involves p.
    pub fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(QuadExt::from_rational(q.recip()));
        }
        let p = self.terms.keys().filter_map(|k| k.primes().last().copied()).max()?;
        let mut a = QuadExt::default();
        let mut b = QuadExt::default();
        for (k, c) in &self.terms {
            if k.contains(p) {
                b.add_term(k.without(p), c.clone());
            } else {
                a.add_term(k.clone(), c.clone());
            }
        }
        let norm = a.mul_ref(&a).add_ref(&b.mul_ref(&b).scale(&-Rational::from_integer(BigInt::from(p))));
        let conj = a.add_ref(&b.mul_ref(&QuadExt::from_term(SquarefreeKernel(vec![p]), -Rational::one())));
        Some(conj.mul_ref(&norm.checked_inv()?))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| c.to_f64().unwrap_or(f64::NAN) * k.radicand().to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }

    pub fn to_decimal(&self) -> bigdecimal::BigDecimal {
        let mut acc = bigdecimal::BigDecimal::zero();
        for (k, c) in &self.terms {
            let r = super::decimal_sqrt(&super::decimal_from_rational(&Rational::from_integer(
                BigInt::from(k.radicand()),
            )));
            acc += super::decimal_from_rational(c) * r;
        }
        acc
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| if k.is_one() { c.to_string() } else { format!("{}*sqrt({})", c, k.radicand()) })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Zero for QuadExt {
    fn zero() -> Self {
        QuadExt::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for QuadExt {
    fn one() -> Self {
        QuadExt::from_rational(Rational::one())
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: QuadExt) -> QuadExt {
        self.add_ref(&rhs)
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: QuadExt) -> QuadExt {
        self.add_ref(&-rhs)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: QuadExt) -> QuadExt {
        self.mul_ref(&rhs)
    }
}

impl Div for QuadExt {
    type Output = QuadExt;
    fn div(self, rhs: QuadExt) -> QuadExt {
        self.mul_ref(&rhs.checked_inv().expect("division by zero in QuadExt"))
    }
}

/// Exact product. Kernels combine by set arithmetic on their primes, so no factoring is needed.
pub fn quad_mul(a: &QuadExt, b: &QuadExt) -> QuadExt {
    a.mul_ref(b)
}

/// Exact rank by division-free elimination.
pub fn quad_rank(m: &QuadMatrix) -> usize {
    rank_fraction_free(m)
}

#[cfg(test)]
mod tests {
    use super::super::{rat, ratio, Matrix};
    use super::*;

    fn sqrt(n: i64) -> QuadExt {
        QuadExt::sqrt_of(&rat(n), DEFAULT_PRIME_BOUND).unwrap()
    }

    #[test]
    fn squarefree_examples() {
        let b = DEFAULT_PRIME_BOUND;
        assert_eq!(squarefree_part(&rat(8), b).unwrap(), (SquarefreeKernel(vec![2]), rat(2)));
        assert_eq!(squarefree_part(&rat(1), b).unwrap(), (SquarefreeKernel::one(), rat(1)));
        assert_eq!(squarefree_part(&ratio(9, 2), b).unwrap(), (SquarefreeKernel(vec![2]), ratio(3, 2)));
        assert_eq!(squarefree_part(&ratio(12, 25), b).unwrap(), (SquarefreeKernel(vec![3]), ratio(2, 5)));
        assert!(squarefree_part(&rat(0), b).is_err());
    }

    #[test]
    fn large_prime_within_bound_squared() {
        // 999983 is prime; its square is beyond any trial divisor we try
        let (k, c) = squarefree_part(&rat(999_983 * 4), DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(k, SquarefreeKernel(vec![999_983]));
        assert_eq!(c, rat(2));
    }

    #[test]
    fn factorization_incomplete() {
        // 1009·1013 with a bound below both factors
        let err = squarefree_part(&rat(1009 * 1013), 100).unwrap_err();
        assert!(matches!(err, NumericError::FactorizationIncomplete { .. }));
    }

    #[test]
    fn products() {
        assert_eq!(quad_mul(&sqrt(2), &sqrt(8)), QuadExt::from_rational(rat(4)));
        assert_eq!(quad_mul(&sqrt(2), &sqrt(3)), sqrt(6));
        assert!(quad_mul(&sqrt(5), &QuadExt::zero()).is_zero());
        assert_eq!(quad_mul(&sqrt(7), &QuadExt::one()), sqrt(7));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = QuadExt::one() + sqrt(2) + sqrt(3).scale(&ratio(1, 2)) + sqrt(30);
        let inv = x.checked_inv().unwrap();
        assert_eq!(x.mul_ref(&inv), QuadExt::one());
        assert!(QuadExt::zero().checked_inv().is_none());
    }

    #[test]
    fn ranks() {
        let z = QuadExt::zero;
        let m = Matrix::from_rows(vec![vec![sqrt(2), z()], vec![z(), sqrt(3)]], 2).unwrap();
        assert_eq!(quad_rank(&m), 2);
        let m = Matrix::from_rows(vec![vec![sqrt(2), sqrt(2)]], 2).unwrap();
        assert_eq!(quad_rank(&m), 1);
        let m = Matrix::from_rows(vec![vec![sqrt(2)], vec![sqrt(8)]], 1).unwrap();
        assert_eq!(quad_rank(&m), 1);
    }
}
