//! Abstract simplicial complexes.
//!
//! Vertices carry string labels and get integer ids in lexicographic label
//! order. A face is a strictly increasing vector of ids; the empty face is
//! always present.

mod generators;
mod homology;

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generators::{
    cross_polytope_boundary, cyclic_polytope_boundary, real_projective_plane_6, simplex_boundary,
    torus_7,
};
pub use homology::{betti, boundary_matrix, classify, h_double_prime, BettiProfile, Classification, Field};

/// Sorted vertex ids.
pub type Face = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("facet list contains a duplicate or nested facet: {0}")]
    DuplicateOrNestedFacet(String),
    #[error("face {0} is not in the complex")]
    FaceNotFound(String),
    #[error("vertex label {0} is already in use")]
    VertexCollision(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceVector {
    /// f_0..f_d (f_{-1} = 1 is implicit).
    pub f: Vec<u64>,
    /// h_0..h_{d+1}.
    pub h: Vec<i64>,
    /// g_0..g_{floor((d+1)/2)}.
    pub g: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    facets: Vec<Face>,
    /// faces[k + 1] holds the k-faces in lexicographic order.
    faces: Vec<Vec<Face>>,
    index: HashMap<Face, usize>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.faces == other.faces
    }
}

impl Eq for SimplicialComplex {}

/// Inserts v into a sorted face.
pub fn face_with(f: &[usize], v: usize) -> Face {
    let mut out = f.to_vec();
    let pos = out.binary_search(&v).unwrap_or_else(|p| p);
    out.insert(pos, v);
    out
}

pub fn face_without(f: &[usize], v: usize) -> Face {
    f.iter().copied().filter(|&u| u != v).collect()
}

pub fn is_subface(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}

impl SimplicialComplex {
    /// Builds the complex generated by `facets` given as label lists.
    pub fn from_facets<S: AsRef<str>>(facets: &[Vec<S>]) -> Result<Self, ComplexError> {
        let mut labels: BTreeSet<String> = BTreeSet::new();
        for f in facets {
            for v in f {
                labels.insert(v.as_ref().to_string());
            }
        }
        let labels: Vec<String> = labels.into_iter().collect();
        let id: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut id_facets = Vec::with_capacity(facets.len());
        for f in facets {
            let mut face: Face = f.iter().map(|v| id[v.as_ref()]).collect();
            face.sort_unstable();
            let before = face.len();
            face.dedup();
            if face.len() != before {
                return Err(ComplexError::DuplicateOrNestedFacet(format!(
                    "facet {:?} repeats a vertex",
                    f.iter().map(|v| v.as_ref()).collect::<Vec<_>>()
                )));
            }
            id_facets.push(face);
        }
        Self::from_id_facets(labels, id_facets)
    }

    /// Builds from facets given as ids into `labels`. Labels must be sorted and
    /// every label must occur in some facet.
    pub fn from_id_facets(labels: Vec<String>, facets: Vec<Face>) -> Result<Self, ComplexError> {
        if facets.is_empty() {
            return Err(ComplexError::InvalidParameters("no facets".into()));
        }
        for (i, a) in facets.iter().enumerate() {
            for (j, b) in facets.iter().enumerate() {
                if i != j && is_subface(a, b) {
                    let show = |f: &Face| f.iter().map(|&v| labels[v].clone()).collect::<Vec<_>>().join(",");
                    return Err(ComplexError::DuplicateOrNestedFacet(format!("{{{}}} ⊆ {{{}}}", show(a), show(b))));
                }
            }
        }
        let mut all: HashSet<Face> = HashSet::new();
        for f in &facets {
            let k = f.len();
            for mask in 0u64..(1u64 << k) {
                let sub: Face = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                all.insert(sub);
            }
        }
        let top = facets.iter().map(|f| f.len()).max().unwrap_or(0);
        let mut faces: Vec<Vec<Face>> = vec![Vec::new(); top + 1];
        for f in all {
            faces[f.len()].push(f);
        }
        let mut index = HashMap::new();
        for level in faces.iter_mut() {
            level.sort();
            for (i, f) in level.iter().enumerate() {
                index.insert(f.clone(), i);
            }
        }
        let used: HashSet<usize> = facets.iter().flatten().copied().collect();
        if used.len() != labels.len() {
            return Err(ComplexError::InvalidParameters("labels without a facet".into()));
        }
        Ok(SimplicialComplex { labels, facets, faces, index })
    }

    /// The complex {∅}.
    pub fn empty_sphere() -> Self {
        Self::from_id_facets(Vec::new(), vec![Vec::new()]).expect("valid")
    }

    pub fn dim(&self) -> isize {
        self.faces.len() as isize - 2
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_id(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    /// Face from labels, sorted.
    pub fn face_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Face, ComplexError> {
        let mut f = Vec::with_capacity(labels.len());
        for l in labels {
            f.push(
                self.vertex_id(l.as_ref())
                    .ok_or_else(|| ComplexError::FaceNotFound(format!("vertex {}", l.as_ref())))?,
            );
        }
        f.sort_unstable();
        if !self.contains(&f) {
            return Err(ComplexError::FaceNotFound(self.show_face(&f)));
        }
        Ok(f)
    }

    pub fn show_face(&self, f: &[usize]) -> String {
        let parts: Vec<&str> = f.iter().map(|&v| self.labels.get(v).map_or("?", |s| s.as_str())).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn face_labels(&self, f: &[usize]) -> Vec<String> {
        f.iter().map(|&v| self.labels[v].clone()).collect()
    }

    /// k-faces in lexicographic order; empty for k outside -1..=dim.
    pub fn faces(&self, k: isize) -> &[Face] {
        if k < -1 || k > self.dim() {
            return &[];
        }
        &self.faces[(k + 1) as usize]
    }

    pub fn num_faces(&self, k: isize) -> usize {
        self.faces(k).len()
    }

    pub fn all_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().flatten()
    }

    /// Position of a face among faces of its dimension.
    pub fn face_index(&self, f: &[usize]) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn contains(&self, f: &[usize]) -> bool {
        self.index.contains_key(f)
    }

    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    pub fn facet_labels(&self) -> Vec<Vec<String>> {
        self.facets.iter().map(|f| self.face_labels(f)).collect()
    }

    pub fn is_pure(&self) -> bool {
        let top = self.faces.len() - 1;
        self.facets.iter().all(|f| f.len() == top)
    }

    /// Vertices v ∉ F with F ∪ v a face.
    pub fn extensions(&self, f: &[usize]) -> Vec<usize> {
        self.faces((f.len()) as isize)
            .iter()
            .filter(|g| is_subface(f, g))
            .map(|g| *g.iter().find(|v| f.binary_search(v).is_err()).expect("g has one extra vertex"))
            .collect()
    }

    /// Faces of dimension dim F + 1 containing F.
    pub fn cofacets(&self, f: &[usize]) -> Vec<Face> {
        self.extensions(f).into_iter().map(|v| face_with(f, v)).collect()
    }

    pub fn f_vector(&self) -> Vec<u64> {
        self.faces[1..].iter().map(|l| l.len() as u64).collect()
    }

    pub fn face_vector(&self) -> FaceVector {
        let f = self.f_vector();
        let h = h_from_f(&f);
        let g = g_from_h(&h);
        FaceVector { f, h, g }
    }

    fn check_face(&self, f: &[usize]) -> Result<(), ComplexError> {
        if self.contains(f) {
            Ok(())
        } else {
            Err(ComplexError::FaceNotFound(self.show_face(f)))
        }
    }

    /// Builds a complex on the vertices used by `facets`, keeping the labels.
    fn relabeled(&self, facets: Vec<Face>) -> Result<Self, ComplexError> {
        let labelled: Vec<Vec<&str>> =
            facets.iter().map(|f| f.iter().map(|&v| self.labels[v].as_str()).collect()).collect();
        Self::from_facets(&labelled)
    }

    /// Lk(F) = {G : G ∩ F = ∅, G ∪ F ∈ Δ}, on its own vertex ids.
    pub fn link(&self, f: &[usize]) -> Result<Self, ComplexError> {
        self.check_face(f)?;
        let facets: Vec<Face> = self
            .facets
            .iter()
            .filter(|g| is_subface(f, g))
            .map(|g| g.iter().copied().filter(|v| f.binary_search(v).is_err()).collect())
            .collect();
        self.relabeled(facets)
    }

    /// Open star: all faces containing F.
    pub fn star(&self, f: &[usize]) -> Result<Vec<Face>, ComplexError> {
        self.check_face(f)?;
        Ok(self.all_faces().filter(|g| is_subface(f, g)).cloned().collect())
    }

    /// Faces not containing F.
    pub fn antistar(&self, f: &[usize]) -> Result<Vec<Face>, ComplexError> {
        self.check_face(f)?;
        Ok(self.all_faces().filter(|g| !is_subface(f, g)).cloned().collect())
    }

    pub fn closed_star(&self, f: &[usize]) -> Result<Self, ComplexError> {
        self.check_face(f)?;
        let facets = self.facets.iter().filter(|g| is_subface(f, g)).cloned().collect();
        self.relabeled(facets)
    }

    /// Δ * {apex}.
    pub fn cone(&self, apex: &str) -> Result<Self, ComplexError> {
        if self.vertex_id(apex).is_some() {
            return Err(ComplexError::VertexCollision(apex.to_string()));
        }
        let facets: Vec<Vec<String>> = self
            .facet_labels()
            .into_iter()
            .map(|mut f| {
                f.push(apex.to_string());
                f
            })
            .collect();
        Self::from_facets(&facets)
    }

    pub fn join(&self, other: &Self) -> Result<Self, ComplexError> {
        for l in other.labels() {
            if self.vertex_id(l).is_some() {
                return Err(ComplexError::VertexCollision(l.clone()));
            }
        }
        let mut facets = Vec::new();
        for a in self.facet_labels() {
            for b in other.facet_labels() {
                let mut f = a.clone();
                f.extend(b);
                facets.push(f);
            }
        }
        Self::from_facets(&facets)
    }

    /// Join with two new vertices, named by the first unused labels "s0", "s1", ….
    pub fn suspension(&self) -> Result<Self, ComplexError> {
        let mut fresh = Vec::new();
        let mut k = 0;
        while fresh.len() < 2 {
            let l = format!("s{k}");
            if self.vertex_id(&l).is_none() {
                fresh.push(l);
            }
            k += 1;
        }
        let poles = Self::from_facets(&[vec![fresh[0].clone()], vec![fresh[1].clone()]])?;
        self.join(&poles)
    }

    /// Barycentric subdivision; a vertex is labelled by its face, e.g. "{1,2}".
    pub fn barycentric_subdivision(&self) -> Result<Self, ComplexError> {
        let mut facets = Vec::new();
        for f in &self.facets {
            if f.is_empty() {
                continue;
            }
            // maximal chains of nonempty subfaces = orderings of f's vertices
            for perm in permutations(f) {
                let chain: Vec<String> = (1..=perm.len())
                    .map(|k| {
                        let mut sub = perm[..k].to_vec();
                        sub.sort_unstable();
                        self.show_face(&sub)
                    })
                    .collect();
                facets.push(chain);
            }
        }
        if facets.is_empty() {
            return Ok(Self::empty_sphere());
        }
        Self::from_facets(&facets)
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// h_k = Σ_{i=0}^{k} (-1)^{k-i} C(d+1-i, k-i) f_{i-1}, with f_{-1} = 1.
pub fn h_from_f(f: &[u64]) -> Vec<i64> {
    let d1 = f.len() as i64; // d + 1
    let fm = |i: i64| if i == 0 { 1 } else { f[(i - 1) as usize] as i64 };
    (0..=d1)
        .map(|k| {
            (0..=k)
                .map(|i| {
                    let s = if (k - i) % 2 == 0 { 1 } else { -1 };
                    s * binomial(d1 - i, k - i) * fm(i)
                })
                .sum()
        })
        .collect()
}

/// Inverse of [`h_from_f`]: f_{j-1} = Σ_{i=0}^{j} C(d+1-i, j-i) h_i.
pub fn f_from_h(h: &[i64]) -> Vec<u64> {
    let d1 = h.len() as i64 - 1;
    (1..=d1)
        .map(|j| (0..=j).map(|i| binomial(d1 - i, j - i) * h[i as usize]).sum::<i64>() as u64)
        .collect()
}

pub fn g_from_h(h: &[i64]) -> Vec<i64> {
    let d1 = h.len() - 1;
    let mut g = vec![h[0]];
    for i in 1..=d1 / 2 {
        g.push(h[i] - h[i - 1]);
    }
    g
}
