//! Rigidity matrices, stress spaces and pivotal orders.
//!
//! A stress of degree r on a d-complex is a function on its (d-r)-faces
//! satisfying, at every (d-r-1)-face G, Σ_v a(G∪v)·ν(G)∧ν(v) = 0. Values are
//! stored as a vector aligned with the lexicographic list of (d-r)-faces.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{face_with, ComplexError, Face, SimplicialComplex};
use crate::exterior::{sgn, MultiVector};
use crate::numeric::{
    decimal_from_rational, decimal_sqrt, dot, inverse, rat, rat_det, rat_rref, Matrix, RatMatrix, Rational,
};
use crate::realization::{m_vector, LinkRealization, Realization, RealizationError};
use bigdecimal::BigDecimal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RigidityError {
    #[error("degree {0} is outside 0..=d+1")]
    InvalidDegree(isize),
    #[error("vertices are not in general position")]
    NotGeneralPosition,
    #[error("column order is not pivotal")]
    NotPivotal,
    #[error("vertex set is not {0}-autonomous")]
    NotAutonomous(isize),
    #[error("pivot descent stalled: {0}")]
    DescentStalled(String),
    #[error("stress values have length {got}, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("link basis is not distinguished")]
    BasisNotDistinguished,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Realization(#[from] RealizationError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumForm {
    Projective,
    Geometric,
    Cayley,
}

/// Element of Ψ_r: values on the (d-r)-faces in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StressVector {
    pub degree: usize,
    pub values: Vec<Rational>,
}

impl StressVector {
    pub fn zero(c: &SimplicialComplex, degree: usize) -> Self {
        StressVector { degree, values: vec![Rational::zero(); c.num_faces(face_dim(c, degree))] }
    }

    /// Order of the stress in the sense "s-stress on (s-1)-faces": d + 1 - degree.
    pub fn stress_order(&self, c: &SimplicialComplex) -> isize {
        c.dim() + 1 - self.degree as isize
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|x| x.is_zero())
    }

    pub fn value_at(&self, c: &SimplicialComplex, f: &[usize]) -> Rational {
        if f.len() as isize - 1 != face_dim(c, self.degree) {
            return Rational::zero();
        }
        c.face_index(f).map_or_else(Rational::zero, |i| self.values[i].clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        StressVector { degree: self.degree, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        StressVector { degree: self.degree, values: self.values.iter().map(|a| a * q).collect() }
    }
}

/// Dimension of the faces carrying degree-r stresses.
pub fn face_dim(c: &SimplicialComplex, degree: usize) -> isize {
    c.dim() - degree as isize
}

/// Orthogonal projector onto span(ν(F))^⊥.
pub fn complement_projector(real: &Realization, f: &[usize]) -> RatMatrix {
    let n = real.ambient_dim() + 1;
    if f.is_empty() {
        return RatMatrix::identity(n);
    }
    let m = real.face_matrix(f);
    let mt = m.transpose();
    let gram = mt.mul(&m).expect("shapes agree");
    let gi = inverse(&gram).expect("face vectors are independent");
    let p = m.mul(&gi).and_then(|x| x.mul(&mt)).expect("shapes agree");
    Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { Rational::one() } else { Rational::zero() };
        id - p.get(i, j)
    })
}

/// R^k: for each (k-1)-face F a block of d+1 rows, column H = F∪v holding P_F ν(v).
///
/// P_F is the projector onto span(ν(F))^⊥, so a column vector x lies in the
/// nullspace exactly when Σ_v x(F∪v)ν(v) ∈ span ν(F) for every F, which is the
/// projective equilibrium condition. For k = 0 this is the coordinate matrix.
pub fn rigidity_matrix(
    c: &SimplicialComplex,
    real: &Realization,
    k: isize,
    row_order: Option<&[Face]>,
    col_order: Option<&[Face]>,
) -> RatMatrix {
    let n = real.ambient_dim() + 1;
    let rows: Vec<Face> = row_order.map_or_else(|| c.faces(k - 1).to_vec(), |r| r.to_vec());
    let cols: Vec<Face> = col_order.map_or_else(|| c.faces(k).to_vec(), |r| r.to_vec());
    let col_pos: HashMap<&Face, usize> = cols.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut m = RatMatrix::zeros(n * rows.len(), cols.len());
    for (fi, f) in rows.iter().enumerate() {
        let p = complement_projector(real, f);
        for v in c.extensions(f) {
            let h = face_with(f, v);
            let Some(&j) = col_pos.get(&h) else {
                continue;
            };
            let col = p.mul_vec(real.vector(v)).expect("shapes agree");
            for (i, x) in col.into_iter().enumerate() {
                m.set(fi * n + i, j, x);
            }
        }
    }
    m
}

/// Bases of every Ψ_r, r = 0..=d+1.
#[derive(Clone, Debug)]
pub struct GradedStressSpace {
    pub d: isize,
    /// bases[r]: RREF-parametrized nullspace basis of R^{d-r}.
    pub bases: Vec<Vec<StressVector>>,
    /// free[r]: non-pivot columns; a stress is determined by its values there.
    pub free: Vec<Vec<usize>>,
    /// rref[r]: reduced R^{d-r} and its pivots.
    pub rref: Vec<(RatMatrix, Vec<usize>)>,
}

impl GradedStressSpace {
    pub fn dim(&self, r: usize) -> usize {
        self.bases.get(r).map_or(0, |b| b.len())
    }

    pub fn basis(&self, r: usize) -> &[StressVector] {
        &self.bases[r]
    }

    pub fn hilbert(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.len()).collect()
    }

    pub fn contains(&self, a: &StressVector) -> bool {
        let (m, pivots) = &self.rref[a.degree];
        if a.values.len() != m.cols() {
            return false;
        }
        // x ∈ null(R) iff every RREF row vanishes on x
        (0..pivots.len()).all(|i| dot(m.row(i), &a.values).is_zero())
    }

    /// Coordinates in the RREF basis (the values at the free columns), if `a` is a stress.
    pub fn coordinates(&self, a: &StressVector) -> Option<Vec<Rational>> {
        if !self.contains(a) {
            return None;
        }
        Some(self.free[a.degree].iter().map(|&j| a.values[j].clone()).collect())
    }

    pub fn combine(&self, r: usize, coeffs: &[Rational]) -> StressVector {
        let len = self.rref[r].0.cols();
        let mut values = vec![Rational::zero(); len];
        for (b, q) in self.bases[r].iter().zip(coeffs) {
            if q.is_zero() {
                continue;
            }
            for (x, y) in values.iter_mut().zip(&b.values) {
                if !y.is_zero() {
                    *x += q * y;
                }
            }
        }
        StressVector { degree: r, values }
    }

    /// Random combination of the basis with integer coefficients in [-bound, bound].
    pub fn random_element<R: Rng>(&self, r: usize, rng: &mut R, bound: i64) -> StressVector {
        let coeffs: Vec<Rational> = (0..self.dim(r)).map(|_| rat(rng.gen_range(-bound..=bound))).collect();
        self.combine(r, &coeffs)
    }
}

/// Exact bases of Ψ_0..Ψ_{d+1}; degrees are computed in parallel.
pub fn stress_space(c: &SimplicialComplex, real: &Realization) -> GradedStressSpace {
    let d = c.dim();
    let per_degree: Vec<(Vec<StressVector>, Vec<usize>, (RatMatrix, Vec<usize>))> = (0..=(d + 1) as usize)
        .into_par_iter()
        .map(|r| {
            let k = d - r as isize;
            let m = if k < 0 {
                // degree d+1: any scalar on ∅
                RatMatrix::zeros(0, 1)
            } else {
                rigidity_matrix(c, real, k, None, None)
            };
            let (red, pivots) = rat_rref(&m);
            let cols = m.cols();
            let free: Vec<usize> = (0..cols).filter(|j| !pivots.contains(j)).collect();
            let basis = free
                .iter()
                .map(|&j| {
                    let mut v = vec![Rational::zero(); cols];
                    v[j] = Rational::one();
                    for (i, &p) in pivots.iter().enumerate() {
                        v[p] = -red.get(i, j).clone();
                    }
                    StressVector { degree: r, values: v }
                })
                .collect();
            (basis, free, (red, pivots))
        })
        .collect();
    let mut bases = Vec::new();
    let mut free = Vec::new();
    let mut rref = Vec::new();
    for (b, f, r) in per_degree {
        bases.push(b);
        free.push(f);
        rref.push(r);
    }
    GradedStressSpace { d, bases, free, rref }
}

/// Verifies the equilibrium equations of `a` in the requested form.
///
/// The geometric form needs faces of dimension ≥ 1; for degrees d and d+1 it
/// reduces to the projective form.
pub fn check_equilibrium(c: &SimplicialComplex, real: &Realization, a: &StressVector, form: EquilibriumForm) -> bool {
    let k = face_dim(c, a.degree);
    if a.values.len() != c.num_faces(k) {
        return false;
    }
    match form {
        EquilibriumForm::Projective => projective_ok(c, real, a, k),
        EquilibriumForm::Cayley => cayley_ok(c, real, a, k),
        EquilibriumForm::Geometric => {
            if k < 1 {
                projective_ok(c, real, a, k)
            } else {
                geometric_ok(c, real, a, k)
            }
        }
    }
}

fn projective_ok(c: &SimplicialComplex, real: &Realization, a: &StressVector, k: isize) -> bool {
    let n = real.ambient_dim() + 1;
    c.faces(k - 1).iter().all(|g| {
        let mut w = vec![Rational::zero(); n];
        for v in c.extensions(g) {
            let val = &a.values[c.face_index(&face_with(g, v)).expect("face")];
            if val.is_zero() {
                continue;
            }
            for (x, y) in w.iter_mut().zip(real.vector(v)) {
                *x += val * y;
            }
        }
        real.face_multivector(g).wedge(&MultiVector::vector(&w)).expect("dims").is_zero()
    })
}

fn cayley_ok(c: &SimplicialComplex, real: &Realization, a: &StressVector, k: isize) -> bool {
    let n = real.ambient_dim() + 1;
    c.faces(k - 1).iter().all(|g| {
        let mut acc = MultiVector::zero(n);
        for v in c.extensions(g) {
            let f = face_with(g, v);
            let val = &a.values[c.face_index(&f).expect("face")];
            if val.is_zero() {
                continue;
            }
            let s = sgn(g, &f).expect("subset");
            let m = m_vector(real, g, &f).expect("nested");
            acc = acc.add(&m.scale(&(val * rat(s as i64)))).expect("dims");
        }
        acc.is_zero()
    })
}

/// Component of x orthogonal to span(basis), exact.
pub(crate) fn orthogonal_part(x: &[Rational], basis: &[Vec<Rational>]) -> Vec<Rational> {
    if basis.is_empty() {
        return x.to_vec();
    }
    let m = Matrix::from_fn(x.len(), basis.len(), |i, j| basis[j][i].clone());
    let mt = m.transpose();
    let gram = mt.mul(&m).expect("shapes");
    let gi = inverse(&gram).expect("independent");
    let coeff = gi.mul_vec(&mt.mul_vec(x).expect("shapes")).expect("shapes");
    let proj = m.mul_vec(&coeff).expect("shapes");
    x.iter().zip(proj).map(|(a, b)| a - b).collect()
}

fn edge_vectors(points: &[Vec<Rational>], f: &[usize]) -> Vec<Vec<Rational>> {
    let p0 = &points[f[0]];
    f[1..].iter().map(|&u| points[u].iter().zip(p0).map(|(a, b)| a - b).collect()).collect()
}

/// det of the Gram matrix of the edge vectors, = (k!·vol)².
pub fn gram_det(points: &[Vec<Rational>], f: &[usize]) -> Rational {
    let e = edge_vectors(points, f);
    if e.is_empty() {
        return Rational::one();
    }
    let g = Matrix::from_fn(e.len(), e.len(), |i, j| dot(&e[i], &e[j]));
    rat_det(&g).expect("square")
}

pub(crate) fn factorial(k: usize) -> Rational {
    (1..=k).fold(Rational::one(), |acc, i| acc * rat(i as i64))
}

fn geometric_ok(c: &SimplicialComplex, real: &Realization, a: &StressVector, k: isize) -> bool {
    let points: Vec<Vec<Rational>> = (0..c.num_vertices()).map(|v| real.induced_point(v)).collect();
    let lambda: Vec<Rational> = (0..c.num_vertices()).map(|v| real.vector(v)[real.ambient_dim()].clone()).collect();
    let dim = real.ambient_dim();
    let tol = BigDecimal::from(1) / BigDecimal::from(10u64.pow(15)) / BigDecimal::from(10u64.pow(15));
    let kf = decimal_from_rational(&factorial(k as usize));
    c.faces(k - 1).iter().all(|g| {
        let mut sum = vec![BigDecimal::zero(); dim];
        let mut scale = BigDecimal::zero();
        let g_edges = edge_vectors(&points, g);
        for v in c.extensions(g) {
            let f = face_with(g, v);
            let raw = &a.values[c.face_index(&f).expect("face")];
            if raw.is_zero() {
                continue;
            }
            // stress for the normalized realization
            let val = f.iter().fold(raw.clone(), |acc, &u| acc * &lambda[u]);
            let pv: Vec<Rational> = points[v].iter().zip(&points[g[0]]).map(|(x, y)| x - y).collect();
            let w = orthogonal_part(&pv, &g_edges);
            let wnorm = decimal_sqrt(&decimal_from_rational(&dot(&w, &w)));
            let vol = decimal_sqrt(&decimal_from_rational(&gram_det(&points, &f))) / &kf;
            let coef = decimal_from_rational(&val) * vol / wnorm;
            for (s, wi) in sum.iter_mut().zip(&w) {
                // outer normal points away from v: n = -w/|w|
                let t = &coef * decimal_from_rational(wi);
                *s -= &t;
                scale += t.abs();
            }
        }
        sum.iter().all(|s| s.abs() <= &tol * &scale)
    })
}

/// a′(G) = a(F ∪ G) on the link, checked against the link realization.
pub fn restrict_to_link(
    c: &SimplicialComplex,
    a: &StressVector,
    f: &[usize],
    lr: &LinkRealization,
) -> Result<StressVector, RigidityError> {
    let link = &lr.link;
    let k = face_dim(link, a.degree);
    let values: Vec<Rational> = link
        .faces(k)
        .iter()
        .map(|g| {
            let mut h = f.to_vec();
            h.extend(g.iter().map(|&u| lr.vertex_map[u]));
            h.sort_unstable();
            a.value_at(c, &h)
        })
        .collect();
    let out = StressVector { degree: a.degree, values };
    if !check_equilibrium(link, &lr.realization, &out, EquilibriumForm::Projective) {
        return Err(RigidityError::BasisNotDistinguished);
    }
    Ok(out)
}

/// Column order whose first f_k - N columns are the pivots of the reduced R^k.
#[derive(Clone, Debug)]
pub struct PivotalOrder {
    pub k: isize,
    pub order: Vec<Face>,
    pub num_pivots: usize,
    /// (f_k - N) × N block to the right of the identity.
    pub rhat: RatMatrix,
    pub general_position: bool,
}

impl PivotalOrder {
    pub fn nullity(&self) -> usize {
        self.order.len() - self.num_pivots
    }

    pub fn pivots(&self) -> &[Face] {
        &self.order[..self.num_pivots]
    }

    pub fn non_pivots(&self) -> &[Face] {
        &self.order[self.num_pivots..]
    }

    pub fn position(&self, h: &[usize]) -> Option<usize> {
        self.order.iter().position(|f| f.as_slice() == h)
    }
}

/// Builds the pivotal structure for a column order, failing if the order is not pivotal.
pub fn pivotal_order_from(
    c: &SimplicialComplex,
    real: &Realization,
    k: isize,
    order: Vec<Face>,
) -> Result<PivotalOrder, RigidityError> {
    let m = rigidity_matrix(c, real, k, None, Some(&order));
    let (red, pivots) = rat_rref(&m);
    let np = pivots.len();
    if pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return Err(RigidityError::NotPivotal);
    }
    let n = order.len() - np;
    let rhat = Matrix::from_fn(np, n, |i, j| red.get(i, np + j).clone());
    Ok(PivotalOrder { k, order, num_pivots: np, rhat, general_position: real.in_general_position() })
}

/// Pivot columns first, then the rest, starting from lexicographic (or seeded shuffled) order.
pub fn pivotal_order(
    c: &SimplicialComplex,
    real: &Realization,
    k: isize,
    seed: Option<u64>,
) -> Result<PivotalOrder, RigidityError> {
    let mut cols = c.faces(k).to_vec();
    if let Some(s) = seed {
        cols.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
    }
    let m = rigidity_matrix(c, real, k, None, Some(&cols));
    let (_, pivots) = rat_rref(&m);
    let mut order: Vec<Face> = pivots.iter().map(|&p| cols[p].clone()).collect();
    order.extend(cols.iter().enumerate().filter(|(j, _)| !pivots.contains(j)).map(|(_, f)| f.clone()));
    pivotal_order_from(c, real, k, order)
}

#[derive(Clone, Debug)]
pub struct PivotalWeights {
    pub wt: HashMap<Face, usize>,
    pub subwt: HashMap<Face, usize>,
    /// wt(Ĥ) = min subwt over the facets of Ĥ, for every pivot face.
    pub min_over_facets_holds: bool,
    /// subwt(F) = max wt over the cofacets of F.
    pub max_over_cofacets_holds: bool,
}

/// Weights from R̂: a pivot face is determined by the non-pivots where its row is nonzero.
pub fn pivotal_weights(c: &SimplicialComplex, po: &PivotalOrder) -> Result<PivotalWeights, RigidityError> {
    if !po.general_position {
        return Err(RigidityError::NotGeneralPosition);
    }
    let n = po.nullity();
    let mut wt = HashMap::new();
    for (i, h) in po.pivots().iter().enumerate() {
        let w = (0..n).rev().find(|&t| !po.rhat.get(i, t).is_zero()).map_or(1, |t| t + 1);
        wt.insert(h.clone(), if n == 0 { 0 } else { w });
    }
    for (t, h) in po.non_pivots().iter().enumerate() {
        wt.insert(h.clone(), t + 1);
    }
    // subweight by the determination semantics: every cofacet value must be known
    let mut subwt = HashMap::new();
    for f in c.faces(po.k - 1) {
        let s = c.cofacets(f).iter().map(|h| wt[h]).max().unwrap_or(0);
        subwt.insert(f.clone(), s);
    }
    let max_over_cofacets_holds =
        c.faces(po.k - 1).iter().all(|f| subwt[f] == c.cofacets(f).iter().map(|h| wt[h]).max().unwrap_or(0));
    let min_over_facets_holds = po.pivots().iter().all(|h| {
        let m = (0..h.len()).map(|i| subwt[&crate::complex::face_without(h, h[i])]).min().unwrap_or(0);
        m == wt[h]
    });
    Ok(PivotalWeights { wt, subwt, min_over_facets_holds, max_over_cofacets_holds })
}

/// Every k-face avoiding A has a link vertex in A; (-1)-autonomous iff A ≠ ∅.
pub fn is_autonomous(c: &SimplicialComplex, a: &[usize], k: isize) -> bool {
    if k == -1 {
        return !a.is_empty();
    }
    c.faces(k)
        .iter()
        .filter(|f| f.iter().all(|v| !a.contains(v)))
        .all(|f| c.extensions(f).iter().any(|v| a.contains(v)))
}

#[derive(Clone, Debug)]
pub struct PivotCompatible {
    pub hhat: Vec<Face>,
    pub order: PivotalOrder,
    pub swaps: usize,
}

/// Ĥ = {F_i ∪ v_i} for the (k-1)-faces F_i avoiding A, made pivotal by swap descent.
pub fn pivot_compatible_set(
    c: &SimplicialComplex,
    real: &Realization,
    a: &[usize],
    k: isize,
    seed: Option<u64>,
) -> Result<PivotCompatible, RigidityError> {
    if !is_autonomous(c, a, k - 1) {
        return Err(RigidityError::NotAutonomous(k - 1));
    }
    let mut a_sorted = a.to_vec();
    a_sorted.sort_unstable();
    let mut private: Vec<(Face, Face)> = Vec::new(); // (F_i, F_i ∪ v_i)
    for f in c.faces(k - 1) {
        if f.iter().any(|v| a_sorted.contains(v)) {
            continue;
        }
        let ext = c.extensions(f);
        let v = *a_sorted.iter().find(|v| ext.contains(v)).expect("autonomous");
        private.push((f.clone(), face_with(f, v)));
    }
    let hhat: Vec<Face> = private.iter().map(|(_, h)| h.clone()).collect();
    let mut po = pivotal_order(c, real, k, seed)?;
    let mut swaps = 0;
    loop {
        let offender = private.iter().find(|(_, h)| po.non_pivots().contains(h));
        let Some((f1, h)) = offender.cloned() else {
            break;
        };
        if swaps > hhat.len() {
            return Err(RigidityError::DescentStalled(format!("{swaps} swaps without convergence")));
        }
        // pivotal reordering: move H to the last non-pivot slot so wt(H) = N
        let mut order = po.order.clone();
        let pos = order.iter().position(|x| *x == h).expect("non-pivot");
        let face = order.remove(pos);
        order.push(face);
        po = pivotal_order_from(c, real, k, order)?;
        let w = pivotal_weights(c, &po)?;
        let n = po.nullity();
        let substitute = c
            .cofacets(&f1)
            .into_iter()
            .filter(|x| *x != h && w.wt[x] == n && po.pivots().contains(x))
            .find(|x| !hhat.contains(x));
        let Some(sub) = substitute else {
            return Err(RigidityError::DescentStalled(format!(
                "no substitute cofacet of weight {n} for {}",
                c.show_face(&f1)
            )));
        };
        let mut order = po.order.clone();
        let i = order.iter().position(|x| *x == sub).expect("pivot");
        let j = order.len() - 1;
        order.swap(i, j);
        po = pivotal_order_from(c, real, k, order)
            .map_err(|_| RigidityError::DescentStalled("swapped order is not pivotal".into()))?;
        swaps += 1;
    }
    Ok(PivotCompatible { hhat, order: po, swaps })
}

/// Sign of a rational as ±1 (0 for zero).
pub fn signum(q: &Rational) -> i64 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cross_polytope_boundary, simplex_boundary};
    use crate::realization::realize_random;

    #[test]
    fn coordinate_matrix_at_k0() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 1, 100).unwrap();
        let m = rigidity_matrix(&o, &r, 0, None, None);
        assert_eq!((m.rows(), m.cols()), (3, 6));
        for v in 0..6 {
            assert_eq!(m.column(v), r.vector(v));
        }
    }

    #[test]
    fn triangle_in_line() {
        let t = simplex_boundary(2).unwrap();
        let r = realize_random(&t, 4, 20).unwrap();
        let s = stress_space(&t, &r);
        assert_eq!(s.dim(0), 1);
        assert_eq!(s.hilbert(), vec![1, 1, 1]);
    }

    #[test]
    fn octahedron_hilbert() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 1, 100).unwrap();
        let s = stress_space(&o, &r);
        assert_eq!(s.hilbert(), vec![1, 3, 3, 1]);
        for deg in 0..4 {
            for b in s.basis(deg) {
                for form in [EquilibriumForm::Projective, EquilibriumForm::Cayley, EquilibriumForm::Geometric] {
                    assert!(check_equilibrium(&o, &r, b, form), "degree {deg} {form:?}");
                }
                let mut bad = b.clone();
                let i = bad.values.iter().position(|x| !x.is_zero()).unwrap();
                bad.values[i] += Rational::one();
                if deg <= 2 {
                    for form in [EquilibriumForm::Projective, EquilibriumForm::Cayley, EquilibriumForm::Geometric] {
                        assert!(!check_equilibrium(&o, &r, &bad, form), "degree {deg} {form:?}");
                    }
                }
            }
            assert!(check_equilibrium(&o, &r, &StressVector::zero(&o, deg), EquilibriumForm::Geometric));
        }
    }

    #[test]
    fn scaled_realization_keeps_forms_in_agreement() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 2, 30).unwrap();
        let lam: Vec<Rational> = (0..6).map(|i| rat(i as i64 + 2)).collect();
        let rs = r.scaled(&lam).unwrap();
        let s = stress_space(&o, &rs);
        assert_eq!(s.hilbert(), vec![1, 3, 3, 1]);
        for b in s.basis(1) {
            assert!(check_equilibrium(&o, &rs, b, EquilibriumForm::Geometric));
            assert!(check_equilibrium(&o, &rs, b, EquilibriumForm::Cayley));
        }
    }

    #[test]
    fn link_restriction() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 5, 60).unwrap();
        let s = stress_space(&o, &r);
        let lr = crate::realization::link_realization(&o, &r, &[0], 3).unwrap();
        for b in s.basis(1) {
            let a = restrict_to_link(&o, b, &[0], &lr).unwrap();
            assert_eq!(a.values.len(), 4);
        }
        let z = restrict_to_link(&o, &StressVector::zero(&o, 1), &[0], &lr).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn pivotal_structure() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 1, 100).unwrap();
        let po = pivotal_order(&o, &r, 1, None).unwrap();
        assert_eq!(po.nullity(), 3);
        let w = pivotal_weights(&o, &po).unwrap();
        for (t, h) in po.non_pivots().iter().enumerate() {
            assert_eq!(w.wt[h], t + 1);
        }
        assert!(w.max_over_cofacets_holds);
        let mut order = po.order.clone();
        let np = po.num_pivots;
        order[np..].reverse();
        order[..np].reverse();
        let re = pivotal_order_from(&o, &r, 1, order).unwrap();
        let mut a: Vec<Face> = re.non_pivots().to_vec();
        let mut b: Vec<Face> = po.non_pivots().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        let full = pivotal_order(&o, &r, 0, Some(3)).unwrap();
        assert_eq!(full.nullity(), 3);
    }

    #[test]
    fn autonomy() {
        let o = cross_polytope_boundary(3).unwrap();
        let cone = o.cone("a").unwrap();
        let apex = cone.vertex_id("a").unwrap();
        for k in -1..=2 {
            assert!(is_autonomous(&cone, &[apex], k));
        }
        assert!(!is_autonomous(&o, &[], -1));
        // edge {2,3} avoids vertex 1 but 1 is in its link; edge {2,-1} has link {3,-3}
        assert!(!is_autonomous(&o, &[o.vertex_id("1").unwrap()], 1));
    }

    #[test]
    fn cone_pivot_compatible() {
        let o = cross_polytope_boundary(3).unwrap();
        let cone = o.cone("a").unwrap();
        let apex = cone.vertex_id("a").unwrap();
        let r = realize_random(&cone, 9, 40).unwrap();
        for k in 1..=2 {
            let pc = pivot_compatible_set(&cone, &r, &[apex], k, None).unwrap();
            assert_eq!(pc.hhat.len(), o.num_faces(k - 1));
            assert!(pc.hhat.iter().all(|h| pc.order.pivots().contains(h)));
            let again = pivotal_order_from(&cone, &r, k, pc.order.order.clone()).unwrap();
            assert_eq!(again.num_pivots, pc.order.num_pivots);
        }
    }
}
