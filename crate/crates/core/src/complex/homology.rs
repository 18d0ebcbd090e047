use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{binomial, Face, SimplicialComplex};
use crate::numeric::{gf2_rank, rat, rat_rank, BitVector, RatMatrix};
use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Q,
    GF2,
}

/// Reduced Betti numbers β_{-1}..β_d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiProfile {
    pub field: Field,
    /// betti[i + 1] = β_i.
    pub betti: Vec<usize>,
}

impl BettiProfile {
    pub fn get(&self, i: isize) -> usize {
        if i < -1 {
            return 0;
        }
        self.betti.get((i + 1) as usize).copied().unwrap_or(0)
    }

    /// β_m = 1 and every other reduced Betti number vanishes.
    pub fn is_sphere_profile(&self, m: isize) -> bool {
        self.betti.iter().enumerate().all(|(i, &b)| b == usize::from(i as isize - 1 == m))
            && (m + 1) < self.betti.len() as isize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub is_pure: bool,
    pub is_strongly_connected: bool,
    pub is_pseudomanifold: bool,
    pub is_homology_manifold: bool,
    pub is_homology_sphere: bool,
    pub is_orientable_candidate: bool,
}

/// ∂_k : C_k → C_{k-1}; rows are (k-1)-faces, columns k-faces, entry (-1)^i for the i-th vertex removed.
pub fn boundary_matrix(c: &SimplicialComplex, k: isize) -> RatMatrix {
    let rows = c.faces(k - 1);
    let cols = c.faces(k);
    let mut m = RatMatrix::zeros(rows.len(), cols.len());
    for (j, f) in cols.iter().enumerate() {
        for i in 0..f.len() {
            let mut g = f.clone();
            g.remove(i);
            let r = c.face_index(&g).expect("boundary of a face is a face");
            m.set(r, j, rat(if i % 2 == 0 { 1 } else { -1 }));
        }
    }
    m
}

fn boundary_rank(c: &SimplicialComplex, k: isize, field: Field) -> usize {
    if k < 0 || k > c.dim() {
        return 0;
    }
    let m = boundary_matrix(c, k);
    match field {
        Field::Q => rat_rank(&m),
        Field::GF2 => {
            let cols: Vec<BitVector> = (0..m.cols())
                .map(|j| {
                    let bits: Vec<bool> = (0..m.rows()).map(|i| !m.get(i, j).is_zero()).collect();
                    BitVector::from_bools(&bits)
                })
                .collect();
            gf2_rank(&cols)
        }
    }
}

pub fn betti(c: &SimplicialComplex, field: Field) -> BettiProfile {
    let d = c.dim();
    let ranks: Vec<usize> = (-1..=d + 1).map(|k| boundary_rank(c, k, field)).collect();
    let rank = |k: isize| ranks[(k + 1) as usize];
    let betti = (-1..=d).map(|i| c.num_faces(i) - rank(i) - rank(i + 1)).collect();
    BettiProfile { field, betti }
}

fn ridge_facets(c: &SimplicialComplex) -> HashMap<Face, Vec<usize>> {
    let mut map: HashMap<Face, Vec<usize>> = HashMap::new();
    for (i, f) in c.facets().iter().enumerate() {
        for j in 0..f.len() {
            let mut g = f.clone();
            g.remove(j);
            map.entry(g).or_default().push(i);
        }
    }
    map
}

fn strongly_connected(c: &SimplicialComplex, ridges: &HashMap<Face, Vec<usize>>) -> bool {
    let m = c.facets().len();
    let mut adj = vec![Vec::new(); m];
    for fs in ridges.values() {
        for &a in fs {
            for &b in fs {
                if a != b {
                    adj[a].push(b);
                }
            }
        }
    }
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn classify(c: &SimplicialComplex, field: Field) -> Classification {
    let d = c.dim();
    let is_pure = c.is_pure();
    let ridges = ridge_facets(c);
    let is_strongly_connected = is_pure && strongly_connected(c, &ridges);
    let is_pseudomanifold = is_strongly_connected && d >= 0 && ridges.values().all(|fs| fs.len() == 2);
    let is_homology_manifold = is_pure
        && c.all_faces().filter(|f| !f.is_empty()).all(|f| {
            let lk = c.link(f).expect("face of c");
            lk.dim() == d - f.len() as isize && betti(&lk, field).is_sphere_profile(d - f.len() as isize)
        });
    let is_homology_sphere = is_homology_manifold && betti(c, field).is_sphere_profile(d);
    let is_orientable_candidate = is_pseudomanifold && betti(c, Field::Q).get(d) == 1;
    Classification {
        is_pure,
        is_strongly_connected,
        is_pseudomanifold,
        is_homology_manifold,
        is_homology_sphere,
        is_orientable_candidate,
    }
}

/// h''-vector from the h-vector and the reduced Betti numbers over `field`.
pub fn h_double_prime(c: &SimplicialComplex, field: Field) -> Vec<i64> {
    let d = c.dim() as i64;
    let h = c.face_vector().h;
    let b = betti(c, field);
    let beta = |i: i64| b.get(i as isize) as i64;
    let h_prime: Vec<i64> = (0..=d + 1)
        .map(|j| {
            let s: i64 = (0..j).map(|i| if (j - i - 1) % 2 == 0 { beta(i - 1) } else { -beta(i - 1) }).sum();
            h[j as usize] + binomial(d + 1, j) * s
        })
        .collect();
    (0..=d + 1)
        .map(|j| if j <= d { h_prime[j as usize] - binomial(d + 1, j) * beta(j - 1) } else { h_prime[j as usize] })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{cross_polytope_boundary, real_projective_plane_6, simplex_boundary, torus_7};
    use super::*;

    #[test]
    fn octahedron_betti_and_classes() {
        let o = cross_polytope_boundary(3).unwrap();
        assert_eq!(betti(&o, Field::Q).betti, vec![0, 0, 0, 1]);
        let cl = classify(&o, Field::Q);
        assert!(cl.is_pure && cl.is_strongly_connected && cl.is_pseudomanifold);
        assert!(cl.is_homology_manifold && cl.is_homology_sphere && cl.is_orientable_candidate);
        assert_eq!(h_double_prime(&o, Field::Q), vec![1, 3, 3, 1]);
    }

    #[test]
    fn cone_is_acyclic() {
        let c = cross_polytope_boundary(3).unwrap().cone("apex").unwrap();
        assert!(betti(&c, Field::Q).betti.iter().all(|&b| b == 0));
        assert!(betti(&c, Field::GF2).betti.iter().all(|&b| b == 0));
    }

    #[test]
    fn projective_plane() {
        let p = real_projective_plane_6();
        assert_eq!(betti(&p, Field::GF2).get(1), 1);
        assert_eq!(betti(&p, Field::Q).betti, vec![0, 0, 0, 0]);
        let cl = classify(&p, Field::Q);
        assert!(cl.is_homology_manifold);
        assert!(!cl.is_homology_sphere);
        assert!(!cl.is_orientable_candidate);
    }

    #[test]
    fn torus_h_double_prime() {
        let t = torus_7();
        assert_eq!(betti(&t, Field::Q).betti, vec![0, 0, 2, 1]);
        // h = (1,4,10,-1), h' = (1,4,10,1), then h''_2 = 10 - 3·β_1
        assert_eq!(t.face_vector().h, vec![1, 4, 10, -1]);
        assert_eq!(h_double_prime(&t, Field::Q), vec![1, 4, 4, 1]);
    }

    #[test]
    fn pinched_triangles_not_pseudomanifold() {
        let c = SimplicialComplex::from_facets(&[vec!["1", "2", "3"], vec!["2", "3", "4"]]).unwrap();
        assert!(!classify(&c, Field::Q).is_pseudomanifold);
    }

    #[test]
    fn simplex_boundaries_are_spheres() {
        for d in 2..=6 {
            assert!(classify(&simplex_boundary(d).unwrap(), Field::Q).is_homology_sphere, "d={d}");
        }
    }
}
