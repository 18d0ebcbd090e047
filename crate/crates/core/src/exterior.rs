//! Exterior algebra of Q^{N+1} in the standard basis.
//!
//! A basis blade e_{i1}∧…∧e_{ir} (i1 < … < ir) is stored as the bitmask of its
//! indices; indices are 0-based.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::numeric::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("multivector is not grade-homogeneous")]
    NotHomogeneous,
    #[error("{0:?} is not a subset of {1:?}")]
    NotSubset(Vec<usize>, Vec<usize>),
    #[error("face {0:?} is not contained in {1:?}")]
    FaceNotNested(Vec<usize>, Vec<usize>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiVector {
    dim: usize,
    terms: BTreeMap<u64, Rational>,
}

fn blade_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Sign of e_a ∧ e_b relative to e_{a|b}; zero when the blades overlap.
fn blade_sign(a: u64, b: u64) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

impl MultiVector {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= 63, "ambient dimension above 63");
        MultiVector { dim, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, q: Rational) -> Self {
        let mut m = MultiVector::zero(dim);
        m.add_term(0, q);
        m
    }

    pub fn one(dim: usize) -> Self {
        MultiVector::scalar(dim, Rational::one())
    }

    /// e_{i1}∧…∧e_{ir} for distinct indices in the given order.
    pub fn basis(dim: usize, indices: &[usize]) -> Self {
        let mut m = MultiVector::one(dim);
        for &i in indices {
            m = m.wedge_unchecked(&MultiVector::basis_vector(dim, i));
        }
        m
    }

    pub fn basis_vector(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut m = MultiVector::zero(dim);
        m.add_term(1 << i, Rational::one());
        m
    }

    /// The 1-vector with the given coordinates.
    pub fn vector(coords: &[Rational]) -> Self {
        let mut m = MultiVector::zero(coords.len());
        for (i, c) in coords.iter().enumerate() {
            m.add_term(1 << i, c.clone());
        }
        m
    }

    /// ξ = e_1∧…∧e_{N+1}.
    pub fn volume_form(dim: usize) -> Self {
        let mut m = MultiVector::zero(dim);
        m.add_term((1u64 << dim) - 1, Rational::one());
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common grade of all terms, if any. Zero is homogeneous of every grade and reports `None`.
    pub fn grade(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.count_ones() as usize);
        let g = it.next()?;
        it.all(|h| h == g).then_some(g)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.grade().is_some()
    }

    pub fn grade_part(&self, r: usize) -> Self {
        MultiVector {
            dim: self.dim,
            terms: self.terms.iter().filter(|(m, _)| m.count_ones() as usize == r).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    /// Terms as (sorted 0-based index tuple, coefficient).
    pub fn terms(&self) -> Vec<(Vec<usize>, Rational)> {
        self.terms.iter().map(|(m, c)| (blade_indices(*m), c.clone())).collect()
    }

    pub fn coefficient(&self, indices: &[usize]) -> Rational {
        let mask = indices.iter().fold(0u64, |acc, &i| acc | 1 << i);
        self.terms.get(&mask).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of the scalar part.
    pub fn scalar_part(&self) -> Rational {
        self.terms.get(&0).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coordinates of a 1-vector.
    pub fn as_vector(&self) -> Vec<Rational> {
        (0..self.dim).map(|i| self.terms.get(&(1 << i)).cloned().unwrap_or_else(Rational::zero)).collect()
    }

    /// All coefficients of grade r in lexicographic order of index tuples.
    pub fn grade_coordinates(&self, r: usize) -> Vec<Rational> {
        blades_of_grade(self.dim, r).into_iter().map(|m| self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)).collect()
    }

    fn add_term(&mut self, mask: u64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(mask).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExteriorError> {
        check_dims(self, other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return MultiVector::zero(self.dim);
        }
        MultiVector { dim: self.dim, terms: self.terms.iter().map(|(m, c)| (*m, c * q)).collect() }
    }

    fn wedge_unchecked(&self, other: &Self) -> Self {
        let mut out = MultiVector::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let s = blade_sign(*ma, *mb);
                if s != 0 {
                    let c = ca * cb;
                    out.add_term(ma | mb, if s > 0 { c } else { -c });
                }
            }
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self, ExteriorError> {
        wedge(self, other)
    }
}

/// Bitmasks of all grade-r blades in lexicographic order of their index tuples.
pub fn blades_of_grade(dim: usize, r: usize) -> Vec<u64> {
    let mut out = Vec::new();
    fn go(start: usize, dim: usize, r: usize, mask: u64, out: &mut Vec<u64>) {
        if r == 0 {
            out.push(mask);
            return;
        }
        for i in start..dim {
            go(i + 1, dim, r - 1, mask | 1 << i, out);
        }
    }
    go(0, dim, r, 0, &mut out);
    out
}

/// Index tuples of all grade-r blades in lexicographic order.
pub fn blade_tuples(dim: usize, r: usize) -> Vec<Vec<usize>> {
    blades_of_grade(dim, r).into_iter().map(blade_indices).collect()
}

fn check_dims(a: &MultiVector, b: &MultiVector) -> Result<(), ExteriorError> {
    if a.dim != b.dim {
        return Err(ExteriorError::DimensionMismatch(a.dim, b.dim));
    }
    Ok(())
}

pub fn wedge(a: &MultiVector, b: &MultiVector) -> Result<MultiVector, ExteriorError> {
    check_dims(a, b)?;
    Ok(a.wedge_unchecked(b))
}

/// Standard inner product, extended to blades orthonormally.
pub fn inner(a: &MultiVector, b: &MultiVector) -> Result<Rational, ExteriorError> {
    check_dims(a, b)?;
    let mut acc = Rational::zero();
    for (m, c) in &a.terms {
        if let Some(d) = b.terms.get(m) {
            acc += c * d;
        }
    }
    Ok(acc)
}

fn star_blade(dim: usize, mask: u64) -> (u64, i32) {
    let full = (1u64 << dim) - 1;
    let comp = full & !mask;
    (comp, blade_sign(mask, comp))
}

/// Hodge star: the unique linear map with α∧★β = ⟨α,β⟩ξ.
pub fn hodge_star(a: &MultiVector) -> Result<MultiVector, ExteriorError> {
    if !a.is_homogeneous() {
        return Err(ExteriorError::NotHomogeneous);
    }
    let mut out = MultiVector::zero(a.dim);
    for (m, c) in &a.terms {
        let (comp, s) = star_blade(a.dim, *m);
        out.add_term(comp, if s > 0 { c.clone() } else { -c.clone() });
    }
    Ok(out)
}

/// Inverse of the Hodge star: ★⁻¹ = (-1)^{r(N+1-r)} ★ on r-vectors.
pub fn hodge_star_inv(a: &MultiVector) -> Result<MultiVector, ExteriorError> {
    let s = hodge_star(a)?;
    let Some(r) = a.grade() else {
        return Ok(s);
    };
    if (r * (a.dim - r)) % 2 == 1 {
        Ok(s.scale(&-Rational::one()))
    } else {
        Ok(s)
    }
}

/// Grassmann–Cayley meet a ∧̃ b = ★⁻¹(★a ∧ ★b).
pub fn gc_meet(a: &MultiVector, b: &MultiVector) -> Result<MultiVector, ExteriorError> {
    check_dims(a, b)?;
    let w = wedge(&hodge_star(a)?, &hodge_star(b)?)?;
    hodge_star_inv(&w)
}

/// Sign of the permutation (U′, U \ U′) of U, where U is listed in its own order.
pub fn sgn(u_prime: &[usize], u: &[usize]) -> Result<i32, ExteriorError> {
    let mut perm = Vec::with_capacity(u.len());
    for x in u_prime {
        match u.iter().position(|y| y == x) {
            Some(p) => perm.push(p),
            None => return Err(ExteriorError::NotSubset(u_prime.to_vec(), u.to_vec())),
        }
    }
    for (p, x) in u.iter().enumerate() {
        if !u_prime.contains(x) {
            perm.push(p);
        }
    }
    if perm.len() != u.len() {
        return Err(ExteriorError::NotSubset(u_prime.to_vec(), u.to_vec()));
    }
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    Ok(if inversions % 2 == 0 { 1 } else { -1 })
}

/// m_{F′,F} = ν(F) ∧̃ ★ν(F′) from the two face multivectors.
pub fn m_vector_of(nu_f_prime: &MultiVector, nu_f: &MultiVector) -> Result<MultiVector, ExteriorError> {
    gc_meet(nu_f, &hodge_star(nu_f_prime)?)
}

impl fmt::Debug for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let idx = blade_indices(*m);
                if idx.is_empty() {
                    c.to_string()
                } else {
                    let e: Vec<String> = idx.iter().map(|i| format!("e{}", i + 1)).collect();
                    format!("{}·{}", c, e.join("∧"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
