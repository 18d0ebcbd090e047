//! Rational PL realizations: one homogeneous vector in Q^{d+1} per vertex.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{face_with, ComplexError, Face, SimplicialComplex};
use crate::exterior::{m_vector_of, ExteriorError, MultiVector};
use crate::numeric::{
    inverse, rat, rat_det, rat_nullspace, rat_rank, solve, Matrix, NumericError, RatMatrix, Rational,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizationError {
    #[error("no valid draw after {0} attempts")]
    RetriesExhausted(usize),
    #[error("realization is degenerate: {0}")]
    Degenerate(String),
    #[error("projection is degenerate: {0}")]
    DegenerateProjection(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Homogeneous coordinates indexed by vertex id. Vectors have length d+1 and a nonzero last entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    coords: Vec<Vec<Rational>>,
    ambient: usize,
}

impl Realization {
    /// Checks lengths and last coordinates. Use [`Realization::validate`] for face checks.
    pub fn new(coords: Vec<Vec<Rational>>) -> Result<Self, RealizationError> {
        let len = coords.first().map_or(0, |c| c.len());
        if len == 0 {
            return Err(RealizationError::InvalidParameters("empty coordinate vectors".into()));
        }
        for (v, c) in coords.iter().enumerate() {
            if c.len() != len {
                return Err(RealizationError::InvalidParameters(format!("vertex {v} has {} coordinates, expected {len}", c.len())));
            }
            if c[len - 1].is_zero() {
                return Err(RealizationError::Degenerate(format!("vertex {v} has last coordinate 0")));
            }
        }
        Ok(Realization { coords, ambient: len - 1 })
    }

    /// Ambient dimension d (vectors live in Q^{d+1}).
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn vector(&self, v: usize) -> &[Rational] {
        &self.coords[v]
    }

    pub fn coords(&self) -> &[Vec<Rational>] {
        &self.coords
    }

    /// (last coordinate)⁻¹ · first d coordinates.
    pub fn induced_point(&self, v: usize) -> Vec<Rational> {
        let c = &self.coords[v];
        let last = &c[self.ambient];
        c[..self.ambient].iter().map(|x| x / last).collect()
    }

    /// ν(F) = ν(v_0)∧…∧ν(v_k) in increasing vertex order; ν(∅) = 1.
    pub fn face_multivector(&self, f: &[usize]) -> MultiVector {
        let n = self.ambient + 1;
        let mut m = MultiVector::one(n);
        for &v in f {
            m = m.wedge(&MultiVector::vector(&self.coords[v])).expect("same ambient dimension");
        }
        m
    }

    /// Columns ν(v) for v in `f`.
    pub fn face_matrix(&self, f: &[usize]) -> RatMatrix {
        Matrix::from_fn(self.ambient + 1, f.len(), |i, j| self.coords[f[j]][i].clone())
    }

    /// Same point set with every vector rescaled: ν(v) ↦ λ_v ν(v).
    pub fn scaled(&self, lambda: &[Rational]) -> Result<Self, RealizationError> {
        if lambda.len() != self.coords.len() {
            return Err(RealizationError::InvalidParameters("one scale per vertex".into()));
        }
        Realization::new(self.coords.iter().zip(lambda).map(|(c, l)| c.iter().map(|x| x * l).collect()).collect())
    }

    /// The realization with every last coordinate equal to 1.
    pub fn normalized(&self) -> Self {
        let lambda: Vec<Rational> = self.coords.iter().map(|c| c[self.ambient].recip()).collect();
        self.scaled(&lambda).expect("rescaling keeps last coordinates nonzero")
    }

    /// Checks vertex count and that every face has independent vectors.
    pub fn validate(&self, c: &SimplicialComplex) -> Result<(), RealizationError> {
        if c.num_vertices() != self.coords.len() {
            return Err(RealizationError::InvalidParameters(format!(
                "{} vertices in the complex, {} coordinate vectors",
                c.num_vertices(),
                self.coords.len()
            )));
        }
        for f in c.facets() {
            if rat_rank(&self.face_matrix(f)) < f.len() {
                return Err(RealizationError::Degenerate(format!("ν({}) = 0", c.show_face(f))));
            }
        }
        Ok(())
    }

    /// Every set of at most d+1 vertices is affinely independent.
    pub fn in_general_position(&self) -> bool {
        self.degenerate_subset().is_none()
    }

    /// The first (d+1)-subset, in lexicographic order, with vanishing determinant.
    pub fn degenerate_subset(&self) -> Option<Vec<usize>> {
        let n = self.coords.len();
        let k = self.ambient + 1;
        if n <= k {
            let all: Vec<usize> = (0..n).collect();
            return (rat_rank(&self.face_matrix(&all)) < n).then_some(all);
        }
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            if rat_det(&self.face_matrix(&subset)).expect("square").is_zero() {
                return Some(subset);
            }
            if !next_subset(&mut subset, n) {
                return None;
            }
        }
    }

    /// Tests `samples` random (d+1)-subsets instead of all of them.
    pub fn in_general_position_sampled(&self, samples: usize, seed: u64) -> bool {
        let n = self.coords.len();
        let k = self.ambient + 1;
        if n <= k {
            return self.in_general_position();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples).all(|_| {
            let mut s = rand::seq::index::sample(&mut rng, n, k).into_vec();
            s.sort_unstable();
            !rat_det(&self.face_matrix(&s)).expect("square").is_zero()
        })
    }
}

fn next_subset(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if s[i] < n - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub const MAX_RETRIES: usize = 1000;

/// Random integer coordinates in [-bound, bound] with last coordinate 1, redrawn until
/// the vertices are in general position.
pub fn realize_random(c: &SimplicialComplex, seed: u64, bound: u64) -> Result<Realization, RealizationError> {
    realize_random_with(c, seed, bound, MAX_RETRIES)
}

pub fn realize_random_with(
    c: &SimplicialComplex,
    seed: u64,
    bound: u64,
    retries: usize,
) -> Result<Realization, RealizationError> {
    if c.dim() < 0 {
        return Err(RealizationError::InvalidParameters("cannot realize the empty complex".into()));
    }
    if bound == 0 {
        return Err(RealizationError::RetriesExhausted(0));
    }
    let d = c.dim() as usize;
    let b = bound as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..retries {
        let coords: Vec<Vec<Rational>> = (0..c.num_vertices())
            .map(|_| {
                let mut v: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(-b..=b))).collect();
                v.push(Rational::one());
                v
            })
            .collect();
        let r = Realization::new(coords)?;
        if r.in_general_position() && r.validate(c).is_ok() {
            return Ok(r);
        }
    }
    Err(RealizationError::RetriesExhausted(retries))
}

/// Basis of V̂_F = span(ν(F))^⊥ with coordinates map T_B.
#[derive(Clone, Debug)]
pub struct DistinguishedBasis {
    pub face: Face,
    /// Basis vectors in Q^{d+1}.
    pub basis: Vec<Vec<Rational>>,
}

impl DistinguishedBasis {
    /// T_B: coordinates of a vector of V̂_F in the basis.
    pub fn coordinates(&self, x: &[Rational]) -> Result<Vec<Rational>, RealizationError> {
        let n = x.len();
        let m = Matrix::from_fn(n, self.basis.len(), |i, j| self.basis[j][i].clone());
        solve(&m, x)?.ok_or_else(|| RealizationError::Degenerate("vector outside the link space".into()))
    }
}

#[derive(Clone, Debug)]
pub struct LinkRealization {
    pub basis: DistinguishedBasis,
    pub link: SimplicialComplex,
    pub realization: Realization,
    /// Link vertex id → vertex id in the ambient complex.
    pub vertex_map: Vec<usize>,
}

/// m_{F′,F} as a multivector.
pub fn m_vector(real: &Realization, f_prime: &[usize], f: &[usize]) -> Result<MultiVector, RealizationError> {
    if !crate::complex::is_subface(f_prime, f) {
        return Err(ExteriorError::FaceNotNested(f_prime.to_vec(), f.to_vec()).into());
    }
    Ok(m_vector_of(&real.face_multivector(f_prime), &real.face_multivector(f))?)
}

/// Realizes Lk(F) in R^{d-k-1} through a random distinguished basis of V̂_F.
pub fn link_realization(
    c: &SimplicialComplex,
    real: &Realization,
    f: &[usize],
    seed: u64,
) -> Result<LinkRealization, RealizationError> {
    if !c.contains(f) {
        return Err(ComplexError::FaceNotFound(c.show_face(f)).into());
    }
    let n = real.ambient_dim() + 1;
    if f.len() >= n {
        return Err(RealizationError::InvalidParameters(format!("{} spans the whole space", c.show_face(f))));
    }
    let link = c.link(f)?;
    if link.dim() < 0 {
        return Err(RealizationError::InvalidParameters(format!("{} is a facet; its link is {{∅}}", c.show_face(f))));
    }
    let vertex_map: Vec<usize> = link.labels().iter().map(|l| c.vertex_id(l).expect("link label")).collect();
    let complement = rat_nullspace(&real.face_matrix(f).transpose());
    let k = complement.len();
    // pairs G′ ≺ G with F ⊆ G′ whose m-vectors must have nonzero last coordinate
    let mut pairs: Vec<(Face, Face)> = Vec::new();
    for g_prime in c.all_faces().filter(|g| crate::complex::is_subface(f, g)) {
        for v in c.extensions(g_prime) {
            pairs.push((g_prime.clone(), face_with(g_prime, v)));
        }
    }
    let m_vectors: Vec<Vec<Rational>> =
        pairs.iter().map(|(a, b)| m_vector(real, a, b).map(|m| m.as_vector())).collect::<Result<_, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..MAX_RETRIES {
        let mix = if attempt == 0 {
            RatMatrix::identity(k)
        } else {
            Matrix::from_fn(k, k, |_, _| rat(rng.gen_range(-9..=9)))
        };
        if inverse(&mix).is_err() {
            continue;
        }
        let basis: Vec<Vec<Rational>> = (0..k)
            .map(|j| (0..n).map(|i| (0..k).fold(Rational::zero(), |acc, t| acc + &mix[(t, j)] * &complement[t][i])).collect())
            .collect();
        let db = DistinguishedBasis { face: f.to_vec(), basis };
        let mut ok = true;
        for m in &m_vectors {
            let t = db.coordinates(m)?;
            if t[k - 1].is_zero() {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let coords: Vec<Vec<Rational>> = vertex_map
            .iter()
            .map(|&v| db.coordinates(&m_vector(real, f, &face_with(f, v))?.as_vector()))
            .collect::<Result<_, _>>()?;
        let realization = Realization::new(coords)?;
        realization.validate(&link)?;
        return Ok(LinkRealization { basis: db, link, realization, vertex_map });
    }
    Err(RealizationError::RetriesExhausted(MAX_RETRIES))
}

/// Central projection from the apex of a cone.
#[derive(Clone, Debug)]
pub struct ConeProjection {
    /// Normal vector u of the target hyperplane U = {x : ⟨u, x⟩ = 0}.
    pub normal: Vec<Rational>,
    /// Coordinate dropped to identify U with Q^{d+1}.
    pub dropped: usize,
    pub apex_vector: Vec<Rational>,
    pub base: SimplicialComplex,
    pub realization: Realization,
    /// Base vertex id → vertex id in the cone.
    pub vertex_map: Vec<usize>,
}

impl ConeProjection {
    /// π_a(x) = x − (⟨u,x⟩/⟨u,ν′(a)⟩)ν′(a), written in coordinates of U.
    pub fn project(&self, x: &[Rational]) -> Vec<Rational> {
        let ua = crate::numeric::dot(&self.normal, &self.apex_vector);
        let t = crate::numeric::dot(&self.normal, x) / ua;
        (0..x.len()).filter(|&i| i != self.dropped).map(|i| &x[i] - &t * &self.apex_vector[i]).collect()
    }
}

/// Projects a realization of Δ*{a} from ν′(a) onto the hyperplane with normal `normal`
/// (default: the first coordinate hyperplane that yields a valid realization of Δ).
pub fn cone_and_project(
    cone: &SimplicialComplex,
    real: &Realization,
    apex: usize,
    normal: Option<Vec<Rational>>,
) -> Result<ConeProjection, RealizationError> {
    let n = real.ambient_dim() + 1;
    let a = real.vector(apex).to_vec();
    let base = cone.link(&[apex])?;
    if base.num_vertices() + 1 != cone.num_vertices() || base.all_faces().count() * 2 != cone.all_faces().count() {
        return Err(RealizationError::InvalidParameters(format!("{} is not a cone point", cone.label(apex))));
    }
    let vertex_map: Vec<usize> = base.labels().iter().map(|l| cone.vertex_id(l).expect("base label")).collect();
    let candidates: Vec<Vec<Rational>> = match normal {
        Some(u) => vec![u],
        None => (0..n)
            .map(|j| (0..n).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect(),
    };
    let mut last_err = RealizationError::DegenerateProjection("no hyperplane tried".into());
    for u in candidates {
        if u.len() != n {
            return Err(RealizationError::InvalidParameters("normal has the wrong length".into()));
        }
        if crate::numeric::dot(&u, &a).is_zero() {
            last_err = RealizationError::DegenerateProjection("hyperplane contains the apex vector".into());
            continue;
        }
        let Some(dropped) = (0..n).rev().find(|&j| !u[j].is_zero()) else {
            continue;
        };
        let proj = ConeProjection {
            normal: u.clone(),
            dropped,
            apex_vector: a.clone(),
            base: base.clone(),
            realization: Realization { coords: Vec::new(), ambient: 0 },
            vertex_map: vertex_map.clone(),
        };
        let coords: Vec<Vec<Rational>> = vertex_map.iter().map(|&v| proj.project(real.vector(v))).collect();
        if coords.iter().any(|c| c.last().map_or(true, |x| x.is_zero())) {
            last_err = RealizationError::DegenerateProjection("a projected vector has last coordinate 0".into());
            continue;
        }
        let r = Realization::new(coords)?;
        if let Err(e) = r.validate(&base) {
            last_err = RealizationError::DegenerateProjection(e.to_string());
            continue;
        }
        return Ok(ConeProjection { realization: r, ..proj });
    }
    Err(last_err)
}

/// Sign of a nonzero rational as ±1.
pub fn sign_of(q: &Rational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Serializable form: vertex label → coordinate strings "num/den".
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RealizationData {
    pub dim: usize,
    pub coords: std::collections::BTreeMap<String, Vec<String>>,
}

impl RealizationData {
    pub fn from_realization(c: &SimplicialComplex, r: &Realization) -> Self {
        RealizationData {
            dim: r.ambient_dim(),
            coords: (0..c.num_vertices())
                .map(|v| (c.label(v).to_string(), r.vector(v).iter().map(crate::numeric::format_rational).collect()))
                .collect(),
        }
    }

    pub fn to_realization(&self, c: &SimplicialComplex) -> Result<Realization, RealizationError> {
        let r = self.to_unvalidated(c)?;
        r.validate(c)?;
        Ok(r)
    }

    /// Parses the coordinates without the face checks of [`Realization::validate`].
    pub fn to_unvalidated(&self, c: &SimplicialComplex) -> Result<Realization, RealizationError> {
        let mut coords = Vec::with_capacity(c.num_vertices());
        for l in c.labels() {
            let raw = self
                .coords
                .get(l)
                .ok_or_else(|| RealizationError::InvalidParameters(format!("no coordinates for vertex {l}")))?;
            let v: Option<Vec<Rational>> = raw.iter().map(|s| crate::numeric::parse_rational(s)).collect();
            let v = v.ok_or_else(|| RealizationError::InvalidParameters(format!("bad coordinate for vertex {l}")))?;
            if v.len() != self.dim + 1 {
                return Err(RealizationError::InvalidParameters(format!("vertex {l} needs {} coordinates", self.dim + 1)));
            }
            coords.push(v);
        }
        Realization::new(coords)
    }
}
