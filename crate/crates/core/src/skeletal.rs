//! Skeletal chain complexes R_r(Δ,ν), the cone projection Π, the chain map φ built from
//! ζ_w, the ξ/M matrices and the comparison of (φ)_* with multiplication by ω.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{lefschetz_middle, Multiplier};
use crate::complex::{face_without, is_subface, ComplexError, Face, SimplicialComplex};
use crate::exterior::{blade_tuples, MultiVector};
use crate::maxwell::{self, Geometry, MaxwellError, PLOrientation};
use crate::numeric::{rat, rat_nullspace, rat_rank, rat_rref, Matrix, RatMatrix, Rational};
use crate::realization::{cone_and_project, realize_random, ConeProjection, Realization, RealizationError};
use crate::rigidity::{self, stress_space, RigidityError, StressVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkeletalError {
    #[error("r = {0} is outside 0..=d+1")]
    InvalidDegree(usize),
    #[error("weight vanishes at vertex {0}")]
    WeightNotInXi0(String),
    #[error("weights must have one entry per vertex")]
    WrongLength,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Maxwell(#[from] MaxwellError),
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
}

/// W^{(k)}_F realized as the image of α ↦ α∧ν(F); pivot blades are the canonical representatives.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    pub k: usize,
    n: usize,
    /// rank × C(n,k): class coordinates of each blade.
    reduce: RatMatrix,
    pub reps: Vec<Vec<usize>>,
    /// Blade-coordinate vectors spanning the relation subspace.
    pub relations: Vec<Vec<Rational>>,
}

impl QuotientSpace {
    pub fn new(real: &Realization, f: &[usize], k: usize) -> Self {
        let n = real.ambient_dim() + 1;
        let blades = blade_tuples(n, k);
        let nu_f = real.face_multivector(f);
        let top = k + f.len();
        let images: Vec<Vec<Rational>> = blades
            .iter()
            .map(|s| {
                if top > n {
                    Vec::new()
                } else {
                    MultiVector::basis(n, s).wedge(&nu_f).expect("same dim").grade_coordinates(top)
                }
            })
            .collect();
        let rows = if top > n { 0 } else { images.first().map_or(0, |v| v.len()) };
        let l = Matrix::from_fn(rows, blades.len(), |i, j| images[j][i].clone());
        let (red, pivots) = rat_rref(&l);
        let rank = pivots.len();
        let reduce = Matrix::from_fn(rank, blades.len(), |i, j| red.get(i, j).clone());
        let reps = pivots.iter().map(|&p| blades[p].clone()).collect();
        QuotientSpace { k, n, reduce, reps, relations: rat_nullspace(&l) }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn class_of(&self, m: &MultiVector) -> Vec<Rational> {
        self.class_of_coords(&m.grade_coordinates(self.k))
    }

    pub fn class_of_coords(&self, coords: &[Rational]) -> Vec<Rational> {
        self.reduce.mul_vec(coords).expect("blade count")
    }

    pub fn rep(&self, j: usize) -> MultiVector {
        MultiVector::basis(self.n, &self.reps[j])
    }
}

/// ⊕_{F ∈ F_i} W^{(r−1−i)}_F with block offsets.
#[derive(Clone, Debug)]
pub struct ChainGroup {
    pub i: isize,
    pub faces: Vec<Face>,
    pub spaces: Vec<QuotientSpace>,
    pub offsets: Vec<usize>,
    pub dim: usize,
}

impl ChainGroup {
    fn new(c: &SimplicialComplex, real: &Realization, r: usize, i: isize) -> Self {
        let k = r as isize - 1 - i;
        let faces = if k < 0 { Vec::new() } else { c.faces(i).to_vec() };
        let spaces: Vec<QuotientSpace> = faces.iter().map(|f| QuotientSpace::new(real, f, k as usize)).collect();
        let mut offsets = Vec::with_capacity(spaces.len());
        let mut dim = 0;
        for s in &spaces {
            offsets.push(dim);
            dim += s.dim();
        }
        ChainGroup { i, faces, spaces, offsets, dim }
    }

    fn position(&self, f: &[usize]) -> Option<usize> {
        self.faces.binary_search_by(|x| x.as_slice().cmp(f)).ok()
    }

    /// (face index, basis index) for each coordinate.
    pub fn basis(&self) -> Vec<(usize, usize)> {
        self.spaces.iter().enumerate().flat_map(|(fi, s)| (0..s.dim()).map(move |j| (fi, j))).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SkeletalChainComplex {
    pub r: usize,
    /// groups[i + 1] for i = −1..=r−1.
    pub groups: Vec<ChainGroup>,
    /// boundaries[i] = ∂_i: C_i → C_{i−1}, i = 0..=r−1.
    pub boundaries: Vec<RatMatrix>,
}

impl SkeletalChainComplex {
    pub fn group(&self, i: isize) -> &ChainGroup {
        &self.groups[(i + 1) as usize]
    }

    pub fn dim(&self, i: isize) -> usize {
        if i < -1 || i >= self.r as isize {
            return 0;
        }
        self.group(i).dim
    }

    pub fn boundary(&self, i: isize) -> Option<&RatMatrix> {
        if i < 0 {
            return None;
        }
        self.boundaries.get(i as usize)
    }

    fn boundary_rank(&self, i: isize) -> usize {
        self.boundary(i).map_or(0, rat_rank)
    }

    /// dim H_i = dim C_i − rank ∂_i − rank ∂_{i+1}.
    pub fn homology_dim(&self, i: isize) -> usize {
        self.dim(i) - self.boundary_rank(i) - self.boundary_rank(i + 1)
    }

    pub fn squares_vanish(&self) -> bool {
        (1..self.boundaries.len()).all(|i| {
            let (a, b) = (&self.boundaries[i - 1], &self.boundaries[i]);
            a.rows() == 0 || b.cols() == 0 || a.mul(b).expect("composable").is_zero()
        })
    }

    /// Basis of ker ∂_{r−1} = H_{r−1} (no boundaries come from above).
    pub fn top_cycles(&self) -> Vec<Vec<Rational>> {
        let i = self.r as isize - 1;
        match self.boundary(i) {
            Some(m) if m.rows() > 0 => rat_nullspace(m),
            _ => (0..self.dim(i)).map(|j| unit(self.dim(i), j)).collect(),
        }
    }
}

fn unit(n: usize, j: usize) -> Vec<Rational> {
    (0..n).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect()
}

fn add_into(target: &mut [Rational], offset: usize, coeff: &Rational, v: &[Rational]) {
    for (t, x) in target[offset..offset + v.len()].iter_mut().zip(v) {
        *t += coeff * x;
    }
}

fn columns_to_matrix(rows: usize, cols: Vec<Vec<Rational>>) -> RatMatrix {
    Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
}

pub fn skeletal_complex(c: &SimplicialComplex, real: &Realization, r: usize) -> Result<SkeletalChainComplex, SkeletalError> {
    let d = c.dim();
    if r as isize > d + 1 {
        return Err(SkeletalError::InvalidDegree(r));
    }
    let groups: Vec<ChainGroup> = (-1..r as isize).map(|i| ChainGroup::new(c, real, r, i)).collect();
    let mut boundaries = Vec::new();
    for i in 0..r as isize {
        let (src, dst) = (&groups[(i + 1) as usize], &groups[i as usize]);
        let cols = src
            .basis()
            .into_iter()
            .map(|(fi, j)| {
                let f = &src.faces[fi];
                let alpha = src.spaces[fi].rep(j);
                let mut col = vec![Rational::zero(); dst.dim];
                for &v in f {
                    let beta = alpha.wedge(&MultiVector::vector(real.vector(v))).expect("same dim");
                    let g = face_without(f, v);
                    let gi = dst.position(&g).expect("subface");
                    add_into(&mut col, dst.offsets[gi], &Rational::one(), &dst.spaces[gi].class_of(&beta));
                }
                col
            })
            .collect();
        boundaries.push(columns_to_matrix(dst.dim, cols));
    }
    Ok(SkeletalChainComplex { r, groups, boundaries })
}

#[derive(Clone, Debug)]
pub struct StressHomology {
    pub r: usize,
    pub homology_dim: usize,
    pub stress_dim: usize,
    pub squares_vanish: bool,
    pub equal: bool,
}

/// dim H_{r−1}(R_r) against dim Ψ_{d+1−r}.
pub fn stress_homology_check(c: &SimplicialComplex, real: &Realization, r: usize) -> Result<StressHomology, SkeletalError> {
    let cx = skeletal_complex(c, real, r)?;
    let homology_dim = cx.homology_dim(r as isize - 1);
    let degree = (c.dim() + 1) as usize - r;
    let k = c.dim() - degree as isize;
    let stress_dim = if k < 0 {
        1
    } else {
        let m = rigidity::rigidity_matrix(c, real, k, None, None);
        m.cols() - rat_rank(&m)
    };
    Ok(StressHomology { r, homology_dim, stress_dim, squares_vanish: cx.squares_vanish(), equal: homology_dim == stress_dim })
}

/// π_a extended to multivectors of grade k.
fn project_multivector(proj: &ConeProjection, m: &MultiVector, k: usize) -> MultiVector {
    let n = m.dim();
    let images: Vec<MultiVector> = (0..n).map(|s| MultiVector::vector(&proj.project(&unit(n, s)))).collect();
    let target = n - 1;
    let mut out = MultiVector::zero(target);
    for (s, coeff) in blade_tuples(n, k).iter().zip(m.grade_coordinates(k)) {
        if coeff.is_zero() {
            continue;
        }
        let mut b = MultiVector::one(target);
        for &i in s {
            b = b.wedge(&images[i]).expect("same dim");
        }
        out = out.add(&b.scale(&coeff)).expect("same dim");
    }
    out
}

/// Π_i: R_r(Δ′,ν′)_i → R_r(Δ,π_aν′)_i; faces through the apex go to zero.
fn pi_matrices(
    cone: &SkeletalChainComplex,
    base: &SkeletalChainComplex,
    proj: &ConeProjection,
    apex: usize,
) -> Vec<RatMatrix> {
    let to_base: std::collections::HashMap<usize, usize> =
        proj.vertex_map.iter().enumerate().map(|(b, &c)| (c, b)).collect();
    (-1..cone.r as isize)
        .map(|i| {
            let (src, dst) = (cone.group(i), base.group(i));
            let cols = src
                .basis()
                .into_iter()
                .map(|(fi, j)| {
                    let mut col = vec![Rational::zero(); dst.dim];
                    let f = &src.faces[fi];
                    if f.contains(&apex) {
                        return col;
                    }
                    let mut g: Face = f.iter().map(|v| to_base[v]).collect();
                    g.sort_unstable();
                    let gi = dst.position(&g).expect("base face");
                    let img = project_multivector(proj, &src.spaces[fi].rep(j), src.spaces[fi].k);
                    add_into(&mut col, dst.offsets[gi], &Rational::one(), &dst.spaces[gi].class_of(&img));
                    col
                })
                .collect();
            columns_to_matrix(dst.dim, cols)
        })
        .collect()
}

fn commutes(a: &RatMatrix, b: &RatMatrix, c: &RatMatrix, d: &RatMatrix) -> bool {
    // a·b == c·d, tolerating empty shapes
    let lhs = if a.cols() == 0 || b.rows() == 0 { None } else { Some(a.mul(b).expect("shape")) };
    let rhs = if c.cols() == 0 || d.rows() == 0 { None } else { Some(c.mul(d).expect("shape")) };
    match (lhs, rhs) {
        (Some(x), Some(y)) => x == y,
        (Some(x), None) | (None, Some(x)) => x.is_zero(),
        (None, None) => true,
    }
}

#[derive(Clone, Debug)]
pub struct ConeChainMap {
    pub r: usize,
    /// pi[i + 1] = Π_i.
    pub pi: Vec<RatMatrix>,
    pub chain_map: bool,
    pub surjective: bool,
    /// (dim H_{r−1} of the cone, of the base, rank of the induced map).
    pub top: (usize, usize, usize),
    pub iso_top: bool,
}

pub fn cone_projection_chain_map(
    cone: &SimplicialComplex,
    real: &Realization,
    apex: usize,
    proj: &ConeProjection,
    r: usize,
) -> Result<ConeChainMap, SkeletalError> {
    let cx = skeletal_complex(cone, real, r)?;
    let bx = skeletal_complex(&proj.base, &proj.realization, r)?;
    let pi = pi_matrices(&cx, &bx, proj, apex);
    let chain_map = (0..r as isize).all(|i| {
        let p_lo = &pi[i as usize];
        let p_hi = &pi[(i + 1) as usize];
        commutes(p_lo, cx.boundary(i).expect("i ≥ 0"), bx.boundary(i).expect("i ≥ 0"), p_hi)
    });
    let surjective = pi.iter().all(|m| rat_rank(m) == m.rows());
    let cycles = cx.top_cycles();
    let top_pi = &pi[r];
    let images: Vec<Vec<Rational>> = cycles.iter().map(|z| top_pi.mul_vec(z).expect("shape")).collect();
    let rank = rat_rank(&columns_to_matrix(top_pi.rows(), images));
    let base_top = bx.homology_dim(r as isize - 1);
    let top = (cycles.len(), base_top, rank);
    Ok(ConeChainMap { r, pi, chain_map, surjective, top, iso_top: rank == cycles.len() && rank == base_top })
}

/// ζ_w on the ridges of Δ together with the data that produced it.
#[derive(Clone, Debug)]
pub struct ZetaData {
    pub q: Face,
    pub w: Vec<Rational>,
    /// ζ_w(G) for G = the j-th ridge in lexicographic order.
    pub zeta_w: Vec<Rational>,
    pub ridges: Vec<Face>,
    pub labels: Vec<String>,
}

impl ZetaData {
    /// Σ ζ_w(G) over ridges G ⊇ F (Δ ids) avoiding `v`.
    fn coefficient(&self, f: Option<&[usize]>, v: Option<usize>) -> Rational {
        let Some(f) = f else { return Rational::zero() };
        self.ridges
            .iter()
            .zip(&self.zeta_w)
            .filter(|(g, _)| is_subface(f, g) && v.map_or(true, |v| !g.contains(&v)))
            .fold(Rational::zero(), |acc, (_, z)| acc + z)
    }

    /// Translates a face of a complex with the same labels into Δ ids; `None` if it leaves Δ.
    fn translate(&self, gamma: &SimplicialComplex, f: &[usize]) -> Option<Face> {
        let mut out = Vec::with_capacity(f.len());
        for &v in f {
            out.push(self.labels.iter().position(|l| l == gamma.label(v))?);
        }
        out.sort_unstable();
        Some(out)
    }

    fn translate_vertex(&self, gamma: &SimplicialComplex, v: usize) -> Option<usize> {
        self.labels.iter().position(|l| l == gamma.label(v))
    }

    /// Σ ζ_w(G) over ridges G with H∖v ⊆ G and v ∉ G, for H, v in Γ.
    pub fn phi_coefficient(&self, gamma: &SimplicialComplex, h: &[usize], v: usize) -> Rational {
        let rest = self.translate(gamma, &face_without(h, v));
        self.coefficient(rest.as_deref(), self.translate_vertex(gamma, v))
    }
}

/// ω(G) = ζ_w(G) with ρ(Q) = +1; w must be nonzero off Q.
pub fn zeta_data(
    delta: &SimplicialComplex,
    nu: &Realization,
    q: Option<&[usize]>,
    w: &[Rational],
) -> Result<(ZetaData, Geometry, PLOrientation), SkeletalError> {
    if w.len() != delta.num_vertices() {
        return Err(SkeletalError::WrongLength);
    }
    let geom = Geometry::new(delta, nu)?;
    let q: Face = q.map(|q| q.to_vec()).unwrap_or_else(|| geom.facets[0].clone());
    let rho = maxwell::pl_orientation(&geom, Some(&q))?;
    for v in 0..delta.num_vertices() {
        if !q.contains(&v) && w[v].is_zero() {
            return Err(SkeletalError::WeightNotInXi0(delta.label(v).to_string()));
        }
    }
    let zeta_w = (0..geom.ridges.len())
        .map(|j| {
            maxwell::ridge_star_vertices(&geom, j)
                .into_iter()
                .filter(|v| !q.contains(v))
                .fold(Rational::zero(), |acc, v| acc + &w[v] * maxwell::zeta_rho(&geom, &rho, j, v))
        })
        .collect();
    let data = ZetaData { q, w: w.to_vec(), zeta_w, ridges: geom.ridges.clone(), labels: delta.labels().to_vec() };
    Ok((data, geom, rho))
}

/// φ_i: R_r(Γ)_i → R_{r−1}(Γ)_{i−1} for i = 0..=r−1, on canonical representatives.
fn phi_matrices(gamma: &SimplicialComplex, src: &SkeletalChainComplex, dst: &SkeletalChainComplex, z: &ZetaData) -> Vec<RatMatrix> {
    (0..src.r as isize)
        .map(|i| {
            let (from, to) = (src.group(i), dst.group(i - 1));
            let cols = from
                .basis()
                .into_iter()
                .map(|(hi, j)| {
                    let h = &from.faces[hi];
                    let alpha = from.spaces[hi].rep(j);
                    let mut col = vec![Rational::zero(); to.dim];
                    for &v in h {
                        let coef = z.phi_coefficient(gamma, h, v);
                        if coef.is_zero() {
                            continue;
                        }
                        let gi = to.position(&face_without(h, v)).expect("subface");
                        add_into(&mut col, to.offsets[gi], &coef, &to.spaces[gi].class_of(&alpha));
                    }
                    col
                })
                .collect();
            columns_to_matrix(to.dim, cols)
        })
        .collect()
}

/// Whether φ kills every relation α ~ 0 in each W^{(k)}_H.
fn phi_well_defined(gamma: &SimplicialComplex, src: &SkeletalChainComplex, dst: &SkeletalChainComplex, z: &ZetaData) -> bool {
    (0..src.r as isize).all(|i| {
        let (from, to) = (src.group(i), dst.group(i - 1));
        from.faces.iter().zip(&from.spaces).all(|(h, space)| {
            space.relations.iter().all(|rel| {
                let mut col = vec![Rational::zero(); to.dim];
                for &v in h {
                    let coef = z.phi_coefficient(gamma, h, v);
                    let gi = to.position(&face_without(h, v)).expect("subface");
                    add_into(&mut col, to.offsets[gi], &coef, &to.spaces[gi].class_of_coords(rel));
                }
                col.iter().all(|x| x.is_zero())
            })
        })
    })
}

#[derive(Clone, Debug)]
pub struct PhiChainMap {
    pub r: usize,
    /// phi[i] = φ_i, i = 0..=r−1.
    pub phi: Vec<RatMatrix>,
    pub is_chain_map: bool,
    pub well_defined: bool,
    pub source: SkeletalChainComplex,
    pub target: SkeletalChainComplex,
}

pub fn phi_chain_map(
    gamma: &SimplicialComplex,
    real: &Realization,
    z: &ZetaData,
    r: usize,
) -> Result<PhiChainMap, SkeletalError> {
    if r == 0 {
        return Err(SkeletalError::InvalidDegree(r));
    }
    let source = skeletal_complex(gamma, real, r)?;
    let target = skeletal_complex(gamma, real, r - 1)?;
    let phi = phi_matrices(gamma, &source, &target, z);
    let is_chain_map = (1..r as isize).all(|i| {
        commutes(
            target.boundary(i - 1).expect("i ≥ 1"),
            &phi[i as usize],
            &phi[(i - 1) as usize],
            source.boundary(i).expect("i ≥ 1"),
        )
    });
    let well_defined = phi_well_defined(gamma, &source, &target, z);
    Ok(PhiChainMap { r, phi, is_chain_map, well_defined, source, target })
}

/// Π^{(r−1)}_{i−1}∘φ′_i = φ_i∘Π^{(r)}_i for every i.
pub fn phi_commutes_with_pi(
    cone: &SimplicialComplex,
    real: &Realization,
    apex: usize,
    proj: &ConeProjection,
    z: &ZetaData,
    r: usize,
) -> Result<bool, SkeletalError> {
    let up = phi_chain_map(cone, real, z, r)?;
    let down = phi_chain_map(&proj.base, &proj.realization, z, r)?;
    let pi_r = pi_matrices(&up.source, &down.source, proj, apex);
    let pi_r1 = pi_matrices(&up.target, &down.target, proj, apex);
    Ok((0..r as isize).all(|i| commutes(&pi_r1[i as usize], &up.phi[i as usize], &down.phi[i as usize], &pi_r[(i + 1) as usize])))
}

/// Random weights in Ξ₀: nonzero integers off Q, zero on Q.
pub fn random_weights(delta: &SimplicialComplex, q: &[usize], seed: u64, bound: i64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..delta.num_vertices())
        .map(|v| {
            if q.contains(&v) {
                return Rational::zero();
            }
            loop {
                let x = rng.gen_range(-bound.max(1)..=bound.max(1));
                if x != 0 {
                    return rat(x);
                }
            }
        })
        .collect()
}

/// (φ^r x)(F) = Σ_{G ∩ H = F} ζ_w(G) x(H) on the (k−1)-faces of Γ, x on the k-faces.
pub fn phi_on_stress(gamma: &SimplicialComplex, z: &ZetaData, x: &StressVector) -> StressVector {
    let k = gamma.dim() - x.degree as isize;
    let mut values = vec![Rational::zero(); gamma.num_faces(k - 1)];
    for (h, xh) in gamma.faces(k).iter().zip(&x.values) {
        if xh.is_zero() {
            continue;
        }
        for &v in h {
            let coef = z.phi_coefficient(gamma, h, v);
            if !coef.is_zero() {
                let fi = gamma.face_index(&face_without(h, v)).expect("subface");
                values[fi] += coef * xh;
            }
        }
    }
    StressVector { degree: x.degree + 1, values }
}

#[derive(Clone, Debug)]
pub struct CruxEntry {
    pub r: usize,
    pub k: isize,
    pub pivot_compatible: bool,
    /// h_{k+1}(Δ′), the number of non-pivot k-faces.
    pub nullity: usize,
    pub m_rank: usize,
    pub full_rank: bool,
    pub stress_dim: usize,
    pub phi_rank: usize,
    pub injective: bool,
    /// Σ_H ξ_{(F,H)} x(H) reproduces (φ^r x)(F) on a basis of Ψ_r(Δ′).
    pub xi_matches_phi: bool,
    pub xi_vanishes_off_base: bool,
    pub image_in_space: bool,
}

impl CruxEntry {
    pub fn passed(&self) -> bool {
        self.full_rank && self.injective && self.xi_matches_phi
    }
}

/// M^{ν,ν′;w} over the non-pivot k-faces of the cone.
pub fn m_matrix(cone: &SimplicialComplex, po: &rigidity::PivotalOrder, z: &ZetaData) -> RatMatrix {
    let k = po.k;
    let rows = cone.faces(k - 1);
    let pivots = po.pivots();
    let sum_avoiding = |f: &[usize], x: &[usize]| -> Rational {
        let Some(ft) = z.translate(cone, f) else { return Rational::zero() };
        let xt = z.translate(cone, x);
        z.ridges
            .iter()
            .zip(&z.zeta_w)
            .filter(|(g, _)| is_subface(&ft, g) && xt.as_ref().map_or(true, |x| !is_subface(x, g)))
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    };
    Matrix::from_fn(rows.len(), po.nullity(), |i, t| {
        let f = &rows[i];
        let h = &po.non_pivots()[t];
        let mut xi = if is_subface(f, h) { sum_avoiding(f, h) } else { Rational::zero() };
        for (p, hh) in pivots.iter().enumerate() {
            if is_subface(f, hh) {
                let r = po.rhat.get(p, t);
                if !r.is_zero() {
                    xi -= r * sum_avoiding(f, hh);
                }
            }
        }
        xi
    })
}

pub fn technical_crux_check(
    cone: &SimplicialComplex,
    nu_prime: &Realization,
    apex: usize,
    z: &ZetaData,
    seed: u64,
) -> Result<Vec<CruxEntry>, SkeletalError> {
    let d = cone.dim() - 1;
    let space = stress_space(cone, nu_prime);
    let mut out = Vec::new();
    for r in 1..=lefschetz_middle(d) {
        let k = d - r as isize + 1;
        let (po, pivot_compatible) = match rigidity::pivot_compatible_set(cone, nu_prime, &[apex], k, Some(seed)) {
            Ok(pc) => (pc.order, true),
            Err(_) => (rigidity::pivotal_order(cone, nu_prime, k, Some(seed))?, false),
        };
        let m = m_matrix(cone, &po, z);
        let m_rank = rat_rank(&m);
        let rows = cone.faces(k - 1);
        let xi_vanishes_off_base =
            (0..rows.len()).filter(|&i| rows[i].contains(&apex)).all(|i| m.row(i).iter().all(|x| x.is_zero()));
        let basis = space.basis(r);
        let images: Vec<StressVector> = basis.iter().map(|x| phi_on_stress(cone, z, x)).collect();
        let phi_rank = rat_rank(&columns_to_matrix(rows.len(), images.iter().map(|s| s.values.clone()).collect()));
        let xi_matches_phi = basis.iter().zip(&images).all(|(x, y)| {
            let xs: Vec<Rational> = po.non_pivots().iter().map(|h| x.value_at(cone, h)).collect();
            m.mul_vec(&xs).expect("shape") == y.values
        });
        let image_in_space = images.iter().all(|y| space.contains(y));
        out.push(CruxEntry {
            r,
            k,
            pivot_compatible,
            nullity: po.nullity(),
            m_rank,
            full_rank: m_rank == po.nullity(),
            stress_dim: basis.len(),
            phi_rank,
            injective: phi_rank == basis.len(),
            xi_matches_phi,
            xi_vanishes_off_base,
            image_in_space,
        });
    }
    Ok(out)
}

/// A base sphere with its cone, realization of the cone, projection and ζ data.
#[derive(Clone, Debug)]
pub struct ConeSetup {
    pub cone: SimplicialComplex,
    pub apex: usize,
    pub nu_prime: Realization,
    pub projection: ConeProjection,
    pub zeta: ZetaData,
    pub geometry: Geometry,
    pub orientation: PLOrientation,
}

fn apex_label(delta: &SimplicialComplex) -> String {
    let mut label = "a".to_string();
    while delta.vertex_id(&label).is_some() {
        label.push('\'');
    }
    label
}

/// Cone on Δ, a random ν′, ν = π_aν′ and random weights in Ξ₀.
pub fn cone_setup(delta: &SimplicialComplex, seed: u64, bound: u64) -> Result<ConeSetup, SkeletalError> {
    let label = apex_label(delta);
    let cone = delta.cone(&label)?;
    let apex = cone.vertex_id(&label).expect("apex");
    let drawn = realize_random(&cone, seed, bound)?;
    let first = cone_and_project(&cone, &drawn, apex, None)?;
    // rescale ν′(v) so that π_aν′ has last coordinate 1 everywhere
    let mut lambda = vec![Rational::one(); cone.num_vertices()];
    for (b, &v) in first.vertex_map.iter().enumerate() {
        lambda[v] = Rational::one() / first.realization.vector(b).last().expect("nonempty");
    }
    let nu_prime = drawn.scaled(&lambda)?;
    let projection = cone_and_project(&cone, &nu_prime, apex, Some(first.normal.clone()))?;
    let base = &projection.base;
    let q = base.faces(base.dim())[0].clone();
    let w = random_weights(base, &q, seed ^ 0x5eed, bound as i64);
    let (zeta, geometry, orientation) = zeta_data(base, &projection.realization, Some(&q), &w)?;
    Ok(ConeSetup { cone, apex, nu_prime, projection, zeta, geometry, orientation })
}

/// A fresh ν′ with the same apex vector and π_aν′ = ν: each base vector is lifted back into
/// the hyperplane and moved by a random multiple of ν′(a).
pub fn redraw_over_base(setup: &ConeSetup, seed: u64, bound: u64) -> Option<Realization> {
    let proj = &setup.projection;
    let u = &proj.normal;
    let b = bound.max(1) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![Vec::new(); setup.cone.num_vertices()];
    coords[setup.apex] = proj.apex_vector.clone();
    for (bv, &v) in proj.vertex_map.iter().enumerate() {
        let x = proj.realization.vector(bv);
        let mut y: Vec<Rational> = Vec::with_capacity(u.len());
        let mut it = x.iter();
        for i in 0..u.len() {
            y.push(if i == proj.dropped { Rational::zero() } else { it.next().expect("length d+1").clone() });
        }
        let rest: Rational = (0..u.len()).map(|i| &u[i] * &y[i]).sum();
        y[proj.dropped] = -rest / &u[proj.dropped];
        let t = rat(rng.gen_range(-b..=b));
        coords[v] = y.iter().zip(&proj.apex_vector).map(|(p, a)| p + &t * a).collect();
    }
    let r = Realization::new(coords).ok()?;
    (r.validate(&setup.cone).is_ok() && r.in_general_position()).then_some(r)
}

#[derive(Clone, Debug)]
pub struct CruxSearch {
    pub attempts: usize,
    pub entries: Vec<CruxEntry>,
    pub passed: bool,
}

/// Redraws ν′ (keeping ν and w) until every r passes or the retries run out.
pub fn technical_crux_with_retries(setup: &ConeSetup, seed: u64, bound: u64, max_retries: usize) -> Result<CruxSearch, SkeletalError> {
    let mut last = Vec::new();
    for t in 0..max_retries.max(1) {
        let nu_prime = if t == 0 {
            setup.nu_prime.clone()
        } else {
            match redraw_over_base(setup, seed.wrapping_add(1000 + t as u64), bound) {
                Some(r) => r,
                None => continue,
            }
        };
        let entries = technical_crux_check(&setup.cone, &nu_prime, setup.apex, &setup.zeta, seed)?;
        if entries.iter().all(CruxEntry::passed) {
            return Ok(CruxSearch { attempts: t + 1, entries, passed: true });
        }
        last = entries;
    }
    Ok(CruxSearch { attempts: max_retries.max(1), entries: last, passed: false })
}

#[derive(Clone, Debug)]
pub struct DiagramDegree {
    pub r: usize,
    /// (φ_*) and ·ω agree as matrices Ψ_{r−1} → functions on (d−r)-faces.
    pub matrices_equal: bool,
    /// ω·x has no support off the (d−r)-faces.
    pub agree_everywhere: bool,
    pub omega_rank: usize,
    pub omega_injective: bool,
}

#[derive(Clone, Debug)]
pub struct DiagramReport {
    pub omega_in_space: bool,
    pub omega_matches_zeta: bool,
    pub degrees: Vec<DiagramDegree>,
    pub crux: CruxSearch,
    /// ·ω injective exactly where the cone-side map is, for r ≤ ⌈(d+1)/2⌉.
    pub injectivity_matches_crux: bool,
    pub random_checks: usize,
    pub random_agree: bool,
}

impl DiagramReport {
    pub fn commutes(&self) -> bool {
        self.omega_in_space && self.omega_matches_zeta && self.degrees.iter().all(|d| d.matrices_equal) && self.random_agree
    }
}

pub fn wlp_diagram_check(delta: &SimplicialComplex, seed: u64, bound: u64, max_retries: usize) -> Result<DiagramReport, SkeletalError> {
    let setup = cone_setup(delta, seed, bound)?;
    let base = &setup.projection.base;
    let nu = &setup.projection.realization;
    let space = stress_space(base, nu);
    let mut omega = StressVector::zero(base, 1);
    for v in 0..base.num_vertices() {
        if setup.zeta.q.contains(&v) {
            continue;
        }
        let mu = maxwell::basis_lifting(&setup.geometry, &setup.zeta.q, v)?;
        let s = maxwell::lifting_to_stress(&setup.geometry, &setup.orientation, &mu);
        omega = omega.add(&s.scale(&setup.zeta.w[v]));
    }
    let omega_in_space = space.contains(&omega);
    let omega_matches_zeta = omega.values == setup.zeta.zeta_w;
    let m = Multiplier::new(base, nu);
    let d = base.dim();
    let mut degrees = Vec::new();
    for r in 1..=(d + 1) as usize {
        let mut equal = true;
        let mut everywhere = true;
        let mut cols = Vec::new();
        for x in space.basis(r - 1) {
            let phi = phi_on_stress(base, &setup.zeta, x);
            let full = m.mul_full(x, &omega);
            let graded = full.component(base).expect("degree ≤ d+1");
            equal &= graded == phi;
            everywhere &= full.off_degree_support(base) == 0;
            cols.push(graded.values);
        }
        let rows = base.num_faces(d - r as isize);
        let omega_rank = rat_rank(&columns_to_matrix(rows, cols));
        degrees.push(DiagramDegree {
            r,
            matrices_equal: equal,
            agree_everywhere: everywhere,
            omega_rank,
            omega_injective: omega_rank == space.dim(r - 1),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_checks = 0;
    let mut random_agree = true;
    for r in 1..=(d + 1) as usize {
        for _ in 0..3 {
            let x = space.random_element(r - 1, &mut rng, 10);
            random_agree &= m.mul(&x, &omega) == Some(phi_on_stress(base, &setup.zeta, &x));
            random_checks += 1;
        }
    }
    let crux = technical_crux_with_retries(&setup, seed, bound, max_retries)?;
    let injectivity_matches_crux =
        crux.entries.iter().all(|e| degrees.get(e.r - 1).is_some_and(|g| g.omega_injective == e.injective));
    Ok(DiagramReport { omega_in_space, omega_matches_zeta, degrees, crux, injectivity_matches_crux, random_checks, random_agree })
}
