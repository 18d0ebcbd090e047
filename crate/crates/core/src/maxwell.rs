//! Maxwell–Cremona correspondence for simplicial manifolds realized in R^d:
//! PL orientations, liftings, reciprocals, the ζ scalars and the A/B matrices.

use std::collections::VecDeque;

use bigdecimal::BigDecimal;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{face_without, is_subface, ComplexError, Face, SimplicialComplex};
use crate::numeric::{
    decimal_from_rational, decimal_sqrt, dot, gf2_rank, negligible, inverse, quad_rank, rat, rat_det, rat_rank, rat_rref, solve, squarefree_part, BitVector,
    Matrix, NumericError, QuadExt, QuadMatrix, RatMatrix, Rational, SquarefreeKernel,
};
use crate::realization::Realization;
use crate::rigidity::{factorial, gram_det, orthogonal_part, StressVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MaxwellError {
    #[error("ridge {0} does not lie in one or two facets")]
    NotPseudomanifold(String),
    #[error("no consistent PL orientation (conflict at ridge {0})")]
    NonOrientable(String),
    #[error("facet {0} has a singular vertex matrix")]
    SingularFacetMatrix(String),
    #[error("vertex {0} belongs to the base facet")]
    VertexInBase(String),
    #[error("heights do not vanish on the base facet")]
    NotPinned,
    #[error("stress is not in the image of the lifting map")]
    NotInImage,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Per-facet and per-ridge data of a d-complex realized in R^d.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub d: usize,
    /// Dehomogenized vertex positions.
    pub points: Vec<Vec<Rational>>,
    pub facets: Vec<Face>,
    /// W_F⁻¹, W_F having rows (p_v, 1) for v ∈ F in increasing order.
    facet_inv: Vec<RatMatrix>,
    facet_det: Vec<Rational>,
    pub ridges: Vec<Face>,
    /// Facet indices containing each ridge; second is None on the boundary.
    pub ridge_cofacets: Vec<(usize, Option<usize>)>,
    /// Component of p_v - p_g orthogonal to aff(G), v the apex of the second cofacet.
    ridge_w: Vec<Vec<Rational>>,
    /// det Gram of the edge vectors of G = ((d-1)!·vol G)².
    ridge_gram: Vec<Rational>,
    /// Last coordinate λ_v of each ν(v).
    pub lambda: Vec<Rational>,
}

impl Geometry {
    pub fn new(c: &SimplicialComplex, real: &Realization) -> Result<Self, MaxwellError> {
        let d = c.dim();
        if d < 1 || real.ambient_dim() != d as usize {
            return Err(MaxwellError::InvalidParameters(format!(
                "need a d-complex in R^d with d ≥ 1, got dim {d} in R^{}",
                real.ambient_dim()
            )));
        }
        let d = d as usize;
        let points: Vec<Vec<Rational>> = (0..c.num_vertices()).map(|v| real.induced_point(v)).collect();
        let facets = c.faces(d as isize).to_vec();
        let mut facet_inv = Vec::with_capacity(facets.len());
        let mut facet_det = Vec::with_capacity(facets.len());
        for f in &facets {
            let w = normalized_matrix(&points, f);
            let det = rat_det(&w)?;
            if det.is_zero() {
                return Err(MaxwellError::SingularFacetMatrix(c.show_face(f)));
            }
            facet_inv.push(inverse(&w)?);
            facet_det.push(det);
        }
        let ridges = c.faces(d as isize - 1).to_vec();
        let mut ridge_cofacets = Vec::with_capacity(ridges.len());
        let mut ridge_w = Vec::with_capacity(ridges.len());
        let mut ridge_gram = Vec::with_capacity(ridges.len());
        for g in &ridges {
            let cof: Vec<usize> =
                c.cofacets(g).iter().map(|f| facets.binary_search(f).expect("cofacet is a facet")).collect();
            let pair = match cof.as_slice() {
                [a] => (*a, None),
                [a, b] => (*a, Some(*b)),
                _ => return Err(MaxwellError::NotPseudomanifold(c.show_face(g))),
            };
            let apex_facet = pair.1.unwrap_or(pair.0);
            ridge_w.push(inward(&points, g, &facets[apex_facet]));
            ridge_gram.push(gram_det(&points, g));
            ridge_cofacets.push(pair);
        }
        let lambda = (0..c.num_vertices()).map(|v| real.vector(v)[d].clone()).collect();
        Ok(Geometry { d, points, facets, facet_inv, facet_det, ridges, ridge_cofacets, ridge_w, ridge_gram, lambda })
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn facet_index(&self, f: &[usize]) -> Option<usize> {
        self.facets.binary_search(&f.to_vec()).ok()
    }

    pub fn is_closed(&self) -> bool {
        self.ridge_cofacets.iter().all(|(_, b)| b.is_some())
    }

    /// |det W_F| / d! = vol(F).
    pub fn facet_volume(&self, i: usize) -> Rational {
        self.facet_det[i].abs() / factorial(self.d)
    }

    /// vol(G)² for ridge index j.
    pub fn ridge_volume_sq(&self, j: usize) -> Rational {
        let k = factorial(self.d - 1);
        &self.ridge_gram[j] / (&k * &k)
    }

    /// Slope vectors m_F of the affine interpolation of the heights on each facet.
    fn slopes(&self, heights: &[Rational]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let mut slopes = Vec::with_capacity(self.facets.len());
        let mut offsets = Vec::with_capacity(self.facets.len());
        for (f, inv) in self.facets.iter().zip(&self.facet_inv) {
            let h: Vec<Rational> = f.iter().map(|&v| heights[v].clone()).collect();
            let mut mc = inv.mul_vec(&h).expect("shapes");
            offsets.push(mc.pop().expect("d+1 entries"));
            slopes.push(mc);
        }
        (slopes, offsets)
    }

    /// m_F for the lifting with height 1 at v and 0 elsewhere, without pinning.
    pub fn vertex_slope(&self, v: usize, facet: usize) -> Vec<Rational> {
        match self.facets[facet].iter().position(|&u| u == v) {
            None => vec![Rational::zero(); self.d],
            Some(k) => (0..self.d).map(|i| self.facet_inv[facet].get(i, k).clone()).collect(),
        }
    }

    /// ρ(F)/vol(G)·⟨m_{F′} − m_F, n_{G,F}⟩ with F the second cofacet, as a rational.
    ///
    /// n = −w/‖w‖ and ‖w‖·vol(G) = |det W_F|/(d−1)!, so the square roots cancel.
    fn ridge_value(&self, rho: &PLOrientation, j: usize, m_first: &[Rational], m_second: &[Rational]) -> Rational {
        let (f1, f2) = self.ridge_cofacets[j];
        let Some(f2) = f2 else {
            let _ = f1;
            return Rational::zero();
        };
        let diff: Vec<Rational> = m_first.iter().zip(m_second).map(|(a, b)| a - b).collect();
        let ip = dot(&diff, &self.ridge_w[j]);
        -(rat(rho.rho[f2] as i64) * ip * factorial(self.d - 1)) / self.facet_det[f2].abs()
    }
}

fn normalized_matrix(points: &[Vec<Rational>], f: &[usize]) -> RatMatrix {
    let d = points[0].len();
    Matrix::from_fn(f.len(), d + 1, |i, j| if j < d { points[f[i]][j].clone() } else { Rational::one() })
}

/// Component of p_v − p_{g0} orthogonal to aff(G), v = F \ G: points from G into F.
fn inward(points: &[Vec<Rational>], g: &[usize], f: &[usize]) -> Vec<Rational> {
    let v = *f.iter().find(|u| !g.contains(u)).expect("F = G ∪ v");
    let p0 = &points[g[0]];
    let edges: Vec<Vec<Rational>> =
        g[1..].iter().map(|&u| points[u].iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    let pv: Vec<Rational> = points[v].iter().zip(p0).map(|(a, b)| a - b).collect();
    orthogonal_part(&pv, &edges)
}

/// ρ on facets, indexed like `Geometry::facets`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLOrientation {
    pub base: Face,
    pub rho: Vec<i8>,
}

impl PLOrientation {
    pub fn get(&self, geom: &Geometry, facet: &[usize]) -> Option<i8> {
        geom.facet_index(facet).map(|i| self.rho[i])
    }
}

/// Propagates ρ(base) = +1 across ridges: ρ(F) = ρ(F′) iff the apexes lie on opposite sides of aff(G).
pub fn pl_orientation(geom: &Geometry, base: Option<&[usize]>) -> Result<PLOrientation, MaxwellError> {
    let base_idx = match base {
        Some(b) => geom
            .facet_index(b)
            .ok_or_else(|| MaxwellError::InvalidParameters("base is not a facet".into()))?,
        None => 0,
    };
    let nf = geom.facets.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nf];
    for (j, &(a, b)) in geom.ridge_cofacets.iter().enumerate() {
        if let Some(b) = b {
            adj[a].push((b, j));
            adj[b].push((a, j));
        }
    }
    let mut rho = vec![0i8; nf];
    rho[base_idx] = 1;
    let mut queue = VecDeque::from([base_idx]);
    while let Some(f) = queue.pop_front() {
        for &(h, j) in &adj[f] {
            let g = &geom.ridges[j];
            let side = |facet: usize| {
                let v = *geom.facets[facet].iter().find(|u| !g.contains(u)).expect("apex");
                let mut rows = g.clone();
                rows.push(v);
                let det = rat_det(&normalized_matrix(&geom.points, &rows)).expect("square");
                if det.is_positive() {
                    1
                } else {
                    -1
                }
            };
            let opposite = side(f) != side(h);
            let want = if opposite { rho[f] } else { -rho[f] };
            if rho[h] == 0 {
                rho[h] = want;
                queue.push_back(h);
            } else if rho[h] != want {
                return Err(MaxwellError::NonOrientable(format!("{:?}", geom.ridges[j])));
            }
        }
    }
    if rho.iter().any(|&r| r == 0) {
        return Err(MaxwellError::InvalidParameters("facet graph is disconnected".into()));
    }
    Ok(PLOrientation { base: geom.facets[base_idx].clone(), rho })
}

/// A lifting pinned at a base facet, keyed by vertex heights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lifting {
    pub base: Face,
    pub heights: Vec<Rational>,
    /// m_F per facet.
    pub slopes: Vec<Vec<Rational>>,
    /// c_F per facet.
    pub offsets: Vec<Rational>,
}

impl Lifting {
    pub fn from_heights(geom: &Geometry, base: &[usize], heights: Vec<Rational>) -> Result<Self, MaxwellError> {
        if geom.facet_index(base).is_none() {
            return Err(MaxwellError::InvalidParameters("base is not a facet".into()));
        }
        if heights.len() != geom.num_vertices() {
            return Err(MaxwellError::InvalidParameters("one height per vertex".into()));
        }
        if base.iter().any(|&v| !heights[v].is_zero()) {
            return Err(MaxwellError::NotPinned);
        }
        let (slopes, offsets) = geom.slopes(&heights);
        Ok(Lifting { base: base.to_vec(), heights, slopes, offsets })
    }

    pub fn zero(geom: &Geometry, base: &[usize]) -> Result<Self, MaxwellError> {
        Lifting::from_heights(geom, base, vec![Rational::zero(); geom.num_vertices()])
    }

    pub fn add(&self, geom: &Geometry, other: &Self) -> Result<Self, MaxwellError> {
        let h = self.heights.iter().zip(&other.heights).map(|(a, b)| a + b).collect();
        Lifting::from_heights(geom, &self.base, h)
    }

    pub fn scale(&self, geom: &Geometry, q: &Rational) -> Result<Self, MaxwellError> {
        Lifting::from_heights(geom, &self.base, self.heights.iter().map(|h| h * q).collect())
    }

    /// ⟨m_F, p_v⟩ + c_F = height(v) for every vertex of every facet.
    pub fn interpolates(&self, geom: &Geometry) -> bool {
        geom.facets.iter().enumerate().all(|(i, f)| {
            f.iter().all(|&v| dot(&self.slopes[i], &geom.points[v]) + &self.offsets[i] == self.heights[v])
        })
    }

    /// The affine maps of adjacent facets agree on their shared ridge.
    pub fn agrees_on_ridges(&self, geom: &Geometry) -> bool {
        geom.ridges.iter().zip(&geom.ridge_cofacets).all(|(g, &(a, b))| {
            let Some(b) = b else { return true };
            g.iter().all(|&v| {
                dot(&self.slopes[a], &geom.points[v]) + &self.offsets[a]
                    == dot(&self.slopes[b], &geom.points[v]) + &self.offsets[b]
            })
        })
    }
}

/// μ_i: height 1 at vertex i, 0 elsewhere.
pub fn basis_lifting(geom: &Geometry, base: &[usize], i: usize) -> Result<Lifting, MaxwellError> {
    if base.contains(&i) {
        return Err(MaxwellError::VertexInBase(i.to_string()));
    }
    let mut h = vec![Rational::zero(); geom.num_vertices()];
    h[i] = Rational::one();
    Lifting::from_heights(geom, base, h)
}

/// Degree-one stress of a lifting; boundary ridges get 0.
///
/// The ridge formula is a stress of the dehomogenized realization; dividing by ∏_{u∈G} λ_u
/// turns it into a stress of ν itself.
pub fn lifting_to_stress(geom: &Geometry, rho: &PLOrientation, mu: &Lifting) -> StressVector {
    let values = (0..geom.ridges.len())
        .map(|j| {
            let (a, b) = geom.ridge_cofacets[j];
            match b {
                Some(b) => {
                    let scale = geom.ridges[j].iter().fold(Rational::one(), |acc, &u| acc * &geom.lambda[u]);
                    geom.ridge_value(rho, j, &mu.slopes[a], &mu.slopes[b]) / scale
                }
                None => Rational::zero(),
            }
        })
        .collect();
    StressVector { degree: 1, values }
}

/// Inverse of [`lifting_to_stress`] on Lift(Q), by solving against the basis liftings.
pub fn stress_to_lifting(
    geom: &Geometry,
    rho: &PLOrientation,
    base: &[usize],
    a: &StressVector,
) -> Result<Lifting, MaxwellError> {
    let free: Vec<usize> = (0..geom.num_vertices()).filter(|v| !base.contains(v)).collect();
    let images: Vec<StressVector> = free
        .iter()
        .map(|&i| basis_lifting(geom, base, i).map(|mu| lifting_to_stress(geom, rho, &mu)))
        .collect::<Result<_, _>>()?;
    let m = Matrix::from_fn(a.values.len(), free.len(), |r, j| images[j].values[r].clone());
    let alpha = solve(&m, &a.values)?.ok_or(MaxwellError::NotInImage)?;
    let mut h = vec![Rational::zero(); geom.num_vertices()];
    for (&i, x) in free.iter().zip(alpha) {
        h[i] = x;
    }
    Lifting::from_heights(geom, base, h)
}

#[derive(Clone, Debug)]
pub struct Reciprocal {
    pub base: Face,
    /// R(F) = m_F per facet.
    pub points: Vec<Vec<Rational>>,
    /// ℓ_G per ridge (0 on the boundary).
    pub edge_lengths: Vec<QuadExt>,
    /// ℓ_G / vol(G).
    pub normalized: Vec<QuadExt>,
}

impl Reciprocal {
    /// R(F′) − R(F) is a multiple of the ridge normal for every interior ridge.
    pub fn is_parallel(&self, geom: &Geometry) -> bool {
        geom.ridge_cofacets.iter().enumerate().all(|(j, &(a, b))| {
            let Some(b) = b else { return true };
            let w = &geom.ridge_w[j];
            let diff: Vec<Rational> = self.points[a].iter().zip(&self.points[b]).map(|(x, y)| x - y).collect();
            let t = dot(&diff, w) / dot(w, w);
            diff.iter().zip(w).all(|(x, y)| *x == &t * y)
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        Reciprocal {
            base: self.base.clone(),
            points: self
                .points
                .iter()
                .zip(&other.points)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
            edge_lengths: self.edge_lengths.iter().zip(&other.edge_lengths).map(|(a, b)| a.add_ref(b)).collect(),
            normalized: self.normalized.iter().zip(&other.normalized).map(|(a, b)| a.add_ref(b)).collect(),
        }
    }
}

/// R(F) = m_F; ℓ_G solves R(F′) − R(F) = ℓ_G·ρ(F)·n_{G,F} with F the second cofacet.
pub fn lifting_to_reciprocal(
    geom: &Geometry,
    rho: &PLOrientation,
    mu: &Lifting,
    prime_bound: u64,
) -> Result<Reciprocal, MaxwellError> {
    let fact = QuadExt::from_rational(factorial(geom.d - 1));
    let mut edge_lengths = Vec::with_capacity(geom.ridges.len());
    let mut normalized = Vec::with_capacity(geom.ridges.len());
    for (j, &(a, b)) in geom.ridge_cofacets.iter().enumerate() {
        let Some(b) = b else {
            edge_lengths.push(QuadExt::zero());
            normalized.push(QuadExt::zero());
            continue;
        };
        let w = &geom.ridge_w[j];
        let diff: Vec<Rational> = mu.slopes[a].iter().zip(&mu.slopes[b]).map(|(x, y)| x - y).collect();
        let ip = dot(&diff, w);
        if ip.is_zero() {
            edge_lengths.push(QuadExt::zero());
            normalized.push(QuadExt::zero());
            continue;
        }
        let norm_w = QuadExt::sqrt_of(&dot(w, w), prime_bound)?;
        let ell = QuadExt::from_rational(-(rat(rho.rho[b] as i64) * ip)).mul_ref(&norm_w.checked_inv().expect("w ≠ 0"));
        let vol = QuadExt::sqrt_of(&geom.ridge_gram[j], prime_bound)?.mul_ref(&fact.checked_inv().expect("nonzero"));
        normalized.push(ell.mul_ref(&vol.checked_inv().expect("vol ≠ 0")));
        edge_lengths.push(ell);
    }
    Ok(Reciprocal { base: mu.base.clone(), points: mu.slopes.clone(), edge_lengths, normalized })
}

/// Heights recovered from the reciprocal points, propagating the offsets c_F across ridges from the base.
pub fn reciprocal_to_lifting(geom: &Geometry, rec: &Reciprocal) -> Result<Lifting, MaxwellError> {
    let b = geom.facet_index(&rec.base).ok_or_else(|| MaxwellError::InvalidParameters("base is not a facet".into()))?;
    if rec.points.len() != geom.facets.len() {
        return Err(MaxwellError::InvalidParameters("one reciprocal point per facet".into()));
    }
    let v0 = geom.facets[b][0];
    let mut offsets: Vec<Option<Rational>> = vec![None; geom.facets.len()];
    offsets[b] = Some(-dot(&rec.points[b], &geom.points[v0]));
    let mut queue = VecDeque::from([b]);
    while let Some(f) = queue.pop_front() {
        for (j, &(x, y)) in geom.ridge_cofacets.iter().enumerate() {
            let Some(y) = y else { continue };
            let other = if x == f { y } else if y == f { x } else { continue };
            if offsets[other].is_some() {
                continue;
            }
            let g = geom.ridges[j][0];
            let cf = offsets[f].clone().expect("visited");
            let h = dot(&rec.points[f], &geom.points[g]) + cf;
            offsets[other] = Some(h - dot(&rec.points[other], &geom.points[g]));
            queue.push_back(other);
        }
    }
    let mut heights = vec![Rational::zero(); geom.num_vertices()];
    for (i, f) in geom.facets.iter().enumerate() {
        let c = offsets[i].clone().ok_or_else(|| MaxwellError::InvalidParameters("dual graph is disconnected".into()))?;
        for &v in f {
            heights[v] = dot(&rec.points[i], &geom.points[v]) + &c;
        }
    }
    Lifting::from_heights(geom, &rec.base, heights)
}

#[derive(Clone, Debug)]
pub struct RoundTrip {
    pub lifting_back: bool,
    pub stress_back: bool,
    pub parallel: bool,
    /// Normalized edge lengths equal the stress values.
    pub normalized_match: bool,
}

impl RoundTrip {
    pub fn identity(&self) -> bool {
        self.lifting_back && self.stress_back && self.parallel && self.normalized_match
    }
}

/// Ψ_1 → Lift → Rec → Lift → Ψ_1 on one stress.
pub fn round_trip(
    geom: &Geometry,
    rho: &PLOrientation,
    base: &[usize],
    a: &StressVector,
    prime_bound: u64,
) -> Result<RoundTrip, MaxwellError> {
    let mu = stress_to_lifting(geom, rho, base, a)?;
    let rec = lifting_to_reciprocal(geom, rho, &mu, prime_bound)?;
    let back = reciprocal_to_lifting(geom, &rec)?;
    let s = lifting_to_stress(geom, rho, &back);
    let scale = |j: usize| geom.ridges[j].iter().fold(Rational::one(), |acc, &u| acc * &geom.lambda[u]);
    let normalized_match = rec
        .normalized
        .iter()
        .enumerate()
        .all(|(j, x)| x.as_rational().is_some_and(|q| q / scale(j) == a.values[j]));
    Ok(RoundTrip { lifting_back: back == mu, stress_back: s == *a, parallel: rec.is_parallel(geom), normalized_match })
}

/// ℓ_G / vol(G) at 60 digits, for when the prime bound cannot split ‖w‖² or the Gram determinant.
pub fn normalized_lengths_decimal(geom: &Geometry, rho: &PLOrientation, mu: &Lifting) -> Vec<BigDecimal> {
    let fact = decimal_from_rational(&factorial(geom.d - 1));
    geom.ridge_cofacets
        .iter()
        .enumerate()
        .map(|(j, &(a, b))| {
            let Some(b) = b else { return BigDecimal::zero() };
            let w = &geom.ridge_w[j];
            let diff: Vec<Rational> = mu.slopes[a].iter().zip(&mu.slopes[b]).map(|(x, y)| x - y).collect();
            let ip = -(rat(rho.rho[b] as i64) * dot(&diff, w));
            let denom = decimal_sqrt(&decimal_from_rational(&dot(w, w))) * decimal_sqrt(&decimal_from_rational(&geom.ridge_gram[j]));
            decimal_from_rational(&ip) * &fact / denom
        })
        .collect()
}

/// [`round_trip`] with the reciprocal lengths compared at 60 digits.
pub fn round_trip_decimal(geom: &Geometry, rho: &PLOrientation, base: &[usize], a: &StressVector) -> Result<RoundTrip, MaxwellError> {
    let mu = stress_to_lifting(geom, rho, base, a)?;
    let rec = Reciprocal { base: mu.base.clone(), points: mu.slopes.clone(), edge_lengths: Vec::new(), normalized: Vec::new() };
    let back = reciprocal_to_lifting(geom, &rec)?;
    let s = lifting_to_stress(geom, rho, &back);
    let lengths = normalized_lengths_decimal(geom, rho, &mu);
    let normalized_match = lengths.iter().enumerate().all(|(j, x)| {
        let scale = geom.ridges[j].iter().fold(Rational::one(), |acc, &u| acc * &geom.lambda[u]);
        (x - decimal_from_rational(&(&a.values[j] * scale))).abs() < negligible()
    });
    Ok(RoundTrip { lifting_back: back == mu, stress_back: s == *a, parallel: rec.is_parallel(geom), normalized_match })
}

fn ridge_slopes(geom: &Geometry, j: usize, v: usize) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let (a, b) = geom.ridge_cofacets[j];
    let b = b?;
    Some((geom.vertex_slope(v, a), geom.vertex_slope(v, b)))
}

/// ζ^{ρ}_{(G,v)} with ρ taken on the second cofacet of G. Always rational.
pub fn zeta_rho(geom: &Geometry, rho: &PLOrientation, j: usize, v: usize) -> Rational {
    match ridge_slopes(geom, j, v) {
        Some((m1, m2)) => geom.ridge_value(rho, j, &m1, &m2),
        None => Rational::zero(),
    }
}

/// ζ² = ‖m_{G′} − m_{G″}‖² / vol(G)².
pub fn zeta_sq(geom: &Geometry, j: usize, v: usize) -> Rational {
    match ridge_slopes(geom, j, v) {
        Some((m1, m2)) => {
            let diff: Vec<Rational> = m1.iter().zip(&m2).map(|(a, b)| a - b).collect();
            dot(&diff, &diff) / geom.ridge_volume_sq(j)
        }
        None => Rational::zero(),
    }
}

/// ζ^{ρ}_{(G,v)} as sign·√(ζ²) in the quadratic field.
pub fn zeta(geom: &Geometry, rho: &PLOrientation, j: usize, v: usize, prime_bound: u64) -> Result<QuadExt, MaxwellError> {
    let s = zeta_rho(geom, rho, j, v);
    let abs = QuadExt::sqrt_of(&zeta_sq(geom, j, v), prime_bound)?;
    Ok(if s.is_negative() { -abs } else { abs })
}

/// Vertices of the closed star of ridge j.
pub fn ridge_star_vertices(geom: &Geometry, j: usize) -> Vec<usize> {
    let (a, b) = geom.ridge_cofacets[j];
    let mut vs = geom.facets[a].clone();
    if let Some(b) = b {
        vs.extend(geom.facets[b].iter().copied());
    }
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// ζ_w(G) = Σ w(v)·ζ^{ρ}_{(G,v)} over star vertices of G outside the base.
pub fn zeta_w(
    geom: &Geometry,
    rho: &PLOrientation,
    base: &[usize],
    w: &[Rational],
    j: usize,
    prime_bound: u64,
) -> Result<QuadExt, MaxwellError> {
    let mut acc = QuadExt::zero();
    for v in ridge_star_vertices(geom, j) {
        if base.contains(&v) || w[v].is_zero() {
            continue;
        }
        acc = acc.add_ref(&zeta(geom, rho, j, v, prime_bound)?.scale(&w[v]));
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct ZetaEntry {
    pub ridge: Face,
    pub vertex: usize,
    pub zeta_sq: Rational,
    pub kernel: Option<SquarefreeKernel>,
}

#[derive(Clone, Debug)]
pub struct GenericityReport {
    pub is_rational: bool,
    pub general_position: bool,
    pub entries: Vec<ZetaEntry>,
    pub kernel_gf2_rank: usize,
    pub verdict: bool,
}

impl GenericityReport {
    pub fn all_nonzero(&self) -> bool {
        self.entries.iter().all(|e| !e.zeta_sq.is_zero())
    }

    pub fn rational_count(&self) -> usize {
        self.entries.iter().filter(|e| e.kernel.as_ref().is_some_and(|k| k.is_one())).count()
    }
}

/// ζ² for every (G, v) with v in the closed star of G, with squarefree kernels and their GF(2) rank.
pub fn q_genericity_check(geom: &Geometry, real: &Realization, prime_bound: u64) -> Result<GenericityReport, MaxwellError> {
    let pairs: Vec<(usize, usize)> =
        (0..geom.ridges.len()).flat_map(|j| ridge_star_vertices(geom, j).into_iter().map(move |v| (j, v))).collect();
    let entries: Vec<ZetaEntry> = pairs
        .par_iter()
        .map(|&(j, v)| {
            let z = zeta_sq(geom, j, v);
            let kernel = if z.is_zero() { None } else { Some(squarefree_part(&z, prime_bound)?.0) };
            Ok(ZetaEntry { ridge: geom.ridges[j].clone(), vertex: v, zeta_sq: z, kernel })
        })
        .collect::<Result<_, NumericError>>()?;
    let mut primes: Vec<u64> = entries.iter().flat_map(|e| e.kernel.iter().flat_map(|k| k.primes().to_vec())).collect();
    primes.sort_unstable();
    primes.dedup();
    let vectors: Vec<BitVector> = entries
        .iter()
        .map(|e| {
            let mut b = BitVector::zeros(primes.len());
            if let Some(k) = &e.kernel {
                for p in k.primes() {
                    b.set(primes.binary_search(p).expect("collected"));
                }
            }
            b
        })
        .collect();
    let kernel_gf2_rank = gf2_rank(&vectors);
    let general_position = real.in_general_position();
    let all_nonzero = entries.iter().all(|e| !e.zeta_sq.is_zero());
    let verdict = general_position && all_nonzero && kernel_gf2_rank == entries.len();
    Ok(GenericityReport { is_rational: true, general_position, entries, kernel_gf2_rank, verdict })
}

#[derive(Clone, Debug)]
pub struct ABMatrices {
    /// Row order: vertices outside Q in increasing id, then the vertices of Q.
    pub vertex_order: Vec<usize>,
    pub a: QuadMatrix,
    pub b: RatMatrix,
    pub b_bar: RatMatrix,
    pub row_spaces_equal: bool,
    pub abt_rank: usize,
    pub abt_invertible: bool,
    pub c_rank: usize,
    pub c_invertible: bool,
    /// Σ_i A_{ij} over all vertices; zero columns expose the affine relations among the μ_i.
    pub column_sums_vanish: bool,
}

/// A_{ij} = ζ^{ρ}_{(G_j, v_i)}, B_{ij} = [v_i ∉ G_j], B̄ the vertex-ridge incidence matrix, and C.
pub fn ab_matrices(
    geom: &Geometry,
    real: &Realization,
    rho: &PLOrientation,
    base: &[usize],
    prime_bound: u64,
) -> Result<ABMatrices, MaxwellError> {
    let n = geom.num_vertices();
    let m = geom.ridges.len();
    let d = geom.d;
    let mut order: Vec<usize> = (0..n).filter(|v| !base.contains(v)).collect();
    let nq = order.len();
    order.extend(base.iter().copied());
    let entries: Vec<QuadExt> = (0..n * m)
        .into_par_iter()
        .map(|idx| zeta(geom, rho, idx % m, order[idx / m], prime_bound))
        .collect::<Result<_, _>>()?;
    let a = Matrix::from_fn(n, m, |i, j| entries[i * m + j].clone());
    let b = Matrix::from_fn(n, m, |i, j| if geom.ridges[j].contains(&order[i]) { rat(0) } else { rat(1) });
    let b_bar = Matrix::from_fn(n, m, |i, j| if geom.ridges[j].contains(&order[i]) { rat(1) } else { rat(0) });
    let row_spaces_equal = {
        let (rb, _) = rat_rref(&b);
        let (rbb, _) = rat_rref(&b_bar);
        rb == rbb
    };
    let bt = b.transpose().map(|x| QuadExt::from_rational(x.clone()));
    let abt = a.mul(&bt)?;
    let abt_rank = quad_rank(&abt);
    // column operations with the rational relation b(Q) = -(W̄ W_Q⁻¹)ᵀ b(rest)
    let wq = Matrix::from_fn(d + 1, d + 1, |i, j| real.vector(base[i])[j].clone());
    let wbar = Matrix::from_fn(nq, d + 1, |i, j| real.vector(order[i])[j].clone());
    let wrel = wbar.mul(&inverse(&wq)?)?.transpose();
    let mut cprime = abt.clone();
    for i in 0..=d {
        for j in 0..nq {
            let coef = wrel.get(i, j);
            if coef.is_zero() {
                continue;
            }
            for r in 0..n {
                let x = cprime.get(r, j).clone() - cprime.get(r, nq + i).scale(coef);
                cprime.set(r, j, x);
            }
        }
    }
    let c = Matrix::from_fn(nq, nq, |i, j| cprime.get(i, j).clone());
    let c_rank = quad_rank(&c);
    let column_sums_vanish = (0..m).all(|j| (0..n).fold(QuadExt::zero(), |acc, i| acc.add_ref(a.get(i, j))).is_zero());
    Ok(ABMatrices {
        vertex_order: order,
        a,
        b,
        b_bar,
        row_spaces_equal,
        abt_rank,
        abt_invertible: abt_rank == n,
        c_rank,
        c_invertible: c_rank == nq,
        column_sums_vanish,
    })
}

#[derive(Clone, Debug)]
pub struct ProductFormula {
    /// (ab)(∅) from the pair-sum product.
    pub product: Rational,
    /// Σ_v (Σ_{G ∌ v} L̂_a(G))·b(v) through the reciprocal of a.
    pub reciprocal_side: QuadExt,
    pub equal: bool,
}

/// Compares (ab)(∅) for a ∈ Ψ_1, b ∈ Ψ_d with the normalized edge-length formula.
pub fn product_formula_check(
    c: &SimplicialComplex,
    real: &Realization,
    geom: &Geometry,
    rho: &PLOrientation,
    base: &[usize],
    a: &StressVector,
    b: &StressVector,
    prime_bound: u64,
) -> Result<ProductFormula, MaxwellError> {
    let product = crate::algebra::stress_product(c, real, a, b).value_at(c, &[]);
    let mu = stress_to_lifting(geom, rho, base, a)?;
    let rec = lifting_to_reciprocal(geom, rho, &mu, prime_bound)?;
    let mut rhs = QuadExt::zero();
    for v in 0..geom.num_vertices() {
        let bv = b.value_at(c, &[v]);
        if bv.is_zero() {
            continue;
        }
        let mut s = QuadExt::zero();
        for (j, g) in geom.ridges.iter().enumerate() {
            if !g.contains(&v) {
                s = s.add_ref(&rec.normalized[j]);
            }
        }
        rhs = rhs.add_ref(&s.scale(&bv));
    }
    let equal = QuadExt::from_rational(product.clone()) == rhs;
    Ok(ProductFormula { product, reciprocal_side: rhs, equal })
}

/// [`product_formula_check`] with the reciprocal side evaluated at 60 digits.
pub fn product_formula_decimal(
    c: &SimplicialComplex,
    real: &Realization,
    geom: &Geometry,
    rho: &PLOrientation,
    base: &[usize],
    a: &StressVector,
    b: &StressVector,
) -> Result<(Rational, BigDecimal, bool), MaxwellError> {
    let product = crate::algebra::stress_product(c, real, a, b).value_at(c, &[]);
    let mu = stress_to_lifting(geom, rho, base, a)?;
    let lengths = normalized_lengths_decimal(geom, rho, &mu);
    let mut rhs = BigDecimal::zero();
    for v in 0..geom.num_vertices() {
        let bv = b.value_at(c, &[v]);
        if bv.is_zero() {
            continue;
        }
        let s: BigDecimal = geom.ridges.iter().zip(&lengths).filter(|(g, _)| !g.contains(&v)).map(|(_, x)| x.clone()).sum();
        rhs += s * decimal_from_rational(&bv);
    }
    let equal = (decimal_from_rational(&product) - &rhs).abs() < negligible();
    Ok((product, rhs, equal))
}

/// Sub-realization of a full subcomplex given by vertex labels.
pub fn restrict_realization(
    c: &SimplicialComplex,
    real: &Realization,
    sub: &SimplicialComplex,
) -> Result<Realization, MaxwellError> {
    let coords = sub
        .labels()
        .iter()
        .map(|l| {
            c.vertex_id(l)
                .map(|v| real.vector(v).to_vec())
                .ok_or_else(|| MaxwellError::InvalidParameters(format!("unknown vertex {l}")))
        })
        .collect::<Result<_, _>>()?;
    Realization::new(coords).map_err(|e| MaxwellError::InvalidParameters(e.to_string()))
}

/// Ψ_1 basis of local stresses on H: values on ridges containing H.
pub fn local_stress_rank(c: &SimplicialComplex, real: &Realization, h: &[usize]) -> usize {
    let d = c.dim();
    let cols: Vec<Face> = c.faces(d - 1).iter().filter(|g| is_subface(h, g)).cloned().collect();
    let rows: Vec<Face> = c.faces(d - 2).iter().filter(|g| is_subface(h, g)).cloned().collect();
    let r = crate::rigidity::rigidity_matrix(c, real, d - 1, Some(&rows), Some(&cols));
    cols.len() - rat_rank(&r)
}

/// The vertex of F opposite to ridge G.
pub fn apex(f: &[usize], g: &[usize]) -> usize {
    let rest: Vec<usize> = f.iter().copied().filter(|v| !g.contains(v)).collect();
    debug_assert_eq!(rest.len(), 1);
    debug_assert_eq!(face_without(f, rest[0]), g);
    rest[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cross_polytope_boundary, real_projective_plane_6, SimplicialComplex};
    use crate::numeric::DEFAULT_PRIME_BOUND;
    use crate::realization::realize_random;
    use crate::rigidity::{check_equilibrium, stress_space, EquilibriumForm};

    fn pentagon() -> SimplicialComplex {
        SimplicialComplex::from_facets(&[
            vec!["1", "2"],
            vec!["2", "3"],
            vec!["3", "4"],
            vec!["4", "5"],
            vec!["1", "5"],
        ])
        .unwrap()
    }

    #[test]
    fn orientation() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 2, 50).unwrap();
        let g = Geometry::new(&o, &r).unwrap();
        let rho = pl_orientation(&g, None).unwrap();
        assert_eq!(rho.rho[0], 1);
        let p = real_projective_plane_6();
        let rp = realize_random(&p, 2, 50).unwrap();
        let gp = Geometry::new(&p, &rp).unwrap();
        assert!(matches!(pl_orientation(&gp, None), Err(MaxwellError::NonOrientable(_))));
        let pent = pentagon();
        let gr = Geometry::new(&pent, &realize_random(&pent, 1, 30).unwrap()).unwrap();
        assert!(pl_orientation(&gr, None).is_ok());
    }

    #[test]
    fn liftings_and_stresses() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 4, 40).unwrap();
        let g = Geometry::new(&o, &r).unwrap();
        let rho = pl_orientation(&g, None).unwrap();
        let q = g.facets[0].clone();
        assert!(matches!(basis_lifting(&g, &q, q[0]), Err(MaxwellError::VertexInBase(_))));
        let space = stress_space(&o, &r);
        let mut images = Vec::new();
        for i in (0..6).filter(|v| !q.contains(v)) {
            let mu = basis_lifting(&g, &q, i).unwrap();
            assert!(mu.interpolates(&g) && mu.agrees_on_ridges(&g));
            let s = lifting_to_stress(&g, &rho, &mu);
            assert!(!s.is_zero());
            assert!(space.contains(&s));
            assert!(check_equilibrium(&o, &r, &s, EquilibriumForm::Geometric));
            let rec = lifting_to_reciprocal(&g, &rho, &mu, DEFAULT_PRIME_BOUND).unwrap();
            assert!(rec.is_parallel(&g));
            for (x, y) in rec.normalized.iter().zip(&s.values) {
                assert_eq!(x.as_rational().as_ref(), Some(y));
            }
            images.push(s.values);
        }
        let m = Matrix::from_rows(images, g.ridges.len()).unwrap();
        assert_eq!(rat_rank(&m), space.dim(1));
        let zero = Lifting::zero(&g, &q).unwrap();
        assert!(lifting_to_stress(&g, &rho, &zero).is_zero());
    }

    #[test]
    fn scaled_vectors_give_stresses_of_the_scaled_realization() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 4, 40).unwrap();
        let lambda: Vec<Rational> = (0..6).map(|i| rat(if i % 2 == 0 { -2 - i } else { 3 + i })).collect();
        let r = r.scaled(&lambda).unwrap();
        let g = Geometry::new(&o, &r).unwrap();
        let rho = pl_orientation(&g, None).unwrap();
        let q = g.facets[0].clone();
        let space = stress_space(&o, &r);
        for i in (0..6).filter(|v| !q.contains(v)) {
            let s = lifting_to_stress(&g, &rho, &basis_lifting(&g, &q, i).unwrap());
            assert!(space.contains(&s));
        }
    }

    #[test]
    fn round_trip_through_the_reciprocal() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 6, 30).unwrap();
        let g = Geometry::new(&o, &r).unwrap();
        let rho = pl_orientation(&g, None).unwrap();
        let q = g.facets[0].clone();
        for a in stress_space(&o, &r).basis(1) {
            assert!(round_trip(&g, &rho, &q, a, DEFAULT_PRIME_BOUND).unwrap().identity());
            assert!(round_trip_decimal(&g, &rho, &q, a).unwrap().identity());
        }
    }

    #[test]
    fn zeta_scalars() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 4, 40).unwrap();
        let g = Geometry::new(&o, &r).unwrap();
        let rho = pl_orientation(&g, None).unwrap();
        for j in 0..g.ridges.len() {
            let star = ridge_star_vertices(&g, j);
            for v in 0..6 {
                let z = zeta_rho(&g, &rho, j, v);
                assert_eq!(&z * &z, zeta_sq(&g, j, v));
                assert_eq!(star.contains(&v), !z.is_zero());
            }
        }
        let rep = q_genericity_check(&g, &r, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(rep.entries.len(), g.ridges.len() * 4);
        assert!(!rep.verdict);
        let ab = ab_matrices(&g, &r, &rho, &g.facets[0].clone(), DEFAULT_PRIME_BOUND).unwrap();
        assert!(ab.row_spaces_equal);
        assert!(ab.column_sums_vanish);
        assert!(!ab.abt_invertible);
    }

    #[test]
    fn pentagon_product_formula() {
        let p = pentagon();
        let r = realize_random(&p, 3, 30).unwrap();
        let g = Geometry::new(&p, &r).unwrap();
        let rho = pl_orientation(&g, None).unwrap();
        let space = stress_space(&p, &r);
        let q = g.facets[0].clone();
        for a in space.basis(1) {
            for b in space.basis(1) {
                let pf = product_formula_check(&p, &r, &g, &rho, &q, a, b, DEFAULT_PRIME_BOUND).unwrap();
                assert!(pf.equal, "{:?}", pf);
                assert!(product_formula_decimal(&p, &r, &g, &rho, &q, a, b).unwrap().2);
            }
        }
    }

    #[test]
    fn vertex_star_local_versions() {
        let o = cross_polytope_boundary(3).unwrap();
        let r = realize_random(&o, 8, 40).unwrap();
        for v in 0..6 {
            let star = o.closed_star(&[v]).unwrap();
            let rs = restrict_realization(&o, &r, &star).unwrap();
            let g = Geometry::new(&star, &rs).unwrap();
            let rho = pl_orientation(&g, None).unwrap();
            let q = g.facets[0].clone();
            let sv = star.vertex_id(o.label(v)).unwrap();
            let imgs: Vec<Vec<Rational>> = (0..star.num_vertices())
                .filter(|u| !q.contains(u))
                .map(|u| lifting_to_stress(&g, &rho, &basis_lifting(&g, &q, u).unwrap()).values)
                .collect();
            let rank = rat_rank(&Matrix::from_rows(imgs, g.ridges.len()).unwrap());
            assert_eq!(rank, star.num_vertices() - 3);
            assert_eq!(local_stress_rank(&star, &rs, &[sv]), rank);
        }
    }
}
