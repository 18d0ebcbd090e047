use super::{ComplexError, SimplicialComplex};

fn build(facets: Vec<Vec<String>>) -> Result<SimplicialComplex, ComplexError> {
    SimplicialComplex::from_facets(&facets)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Boundary of the d-simplex on vertices 1..=d+1, a (d-1)-sphere.
pub fn simplex_boundary(d: usize) -> Result<SimplicialComplex, ComplexError> {
    if d == 0 {
        return Err(ComplexError::InvalidParameters("simplex boundary needs d >= 1".into()));
    }
    let facets = subsets(d + 1, d)
        .into_iter()
        .map(|s| s.into_iter().map(|i| (i + 1).to_string()).collect())
        .collect();
    build(facets)
}

/// Boundary of the d-dimensional cross-polytope on vertices "i" and "-i".
pub fn cross_polytope_boundary(d: usize) -> Result<SimplicialComplex, ComplexError> {
    if d == 0 {
        return Err(ComplexError::InvalidParameters("cross-polytope needs d >= 1".into()));
    }
    let facets = (0u64..(1 << d))
        .map(|mask| {
            (0..d)
                .map(|i| if mask >> i & 1 == 1 { format!("-{}", i + 1) } else { (i + 1).to_string() })
                .collect()
        })
        .collect();
    build(facets)
}

/// Boundary of the cyclic d-polytope with n vertices, facets by Gale evenness on 1..=n.
pub fn cyclic_polytope_boundary(d: usize, n: usize) -> Result<SimplicialComplex, ComplexError> {
    if d < 2 || n < d + 1 {
        return Err(ComplexError::InvalidParameters(format!("cyclic polytope needs d >= 2 and n >= d+1, got d={d}, n={n}")));
    }
    let facets = subsets(n, d)
        .into_iter()
        .filter(|s| {
            let outside: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
            outside.windows(2).all(|w| s.iter().filter(|&&x| w[0] < x && x < w[1]).count() % 2 == 0)
        })
        .map(|s| s.into_iter().map(|i| (i + 1).to_string()).collect())
        .collect();
    build(facets)
}

/// Six-vertex real projective plane.
pub fn real_projective_plane_6() -> SimplicialComplex {
    let f: [[u8; 3]; 10] = [
        [1, 2, 3],
        [1, 3, 4],
        [1, 4, 5],
        [1, 5, 6],
        [1, 2, 6],
        [2, 3, 5],
        [3, 4, 6],
        [2, 4, 5],
        [3, 5, 6],
        [2, 4, 6],
    ];
    build(f.iter().map(|t| t.iter().map(|v| v.to_string()).collect()).collect()).expect("valid")
}

/// Seven-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
pub fn torus_7() -> SimplicialComplex {
    let mut facets = Vec::new();
    for i in 0..7 {
        for t in [[i, i + 1, i + 3], [i, i + 2, i + 3]] {
            facets.push(t.iter().map(|v| (v % 7 + 1).to_string()).collect());
        }
    }
    build(facets).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_counts() {
        assert_eq!(simplex_boundary(3).unwrap().f_vector(), vec![4, 6, 4]);
        assert_eq!(cross_polytope_boundary(3).unwrap().f_vector(), vec![6, 12, 8]);
        assert_eq!(cyclic_polytope_boundary(4, 7).unwrap().f_vector(), vec![7, 21, 28, 14]);
        assert_eq!(real_projective_plane_6().f_vector(), vec![6, 15, 10]);
        assert_eq!(torus_7().f_vector(), vec![7, 21, 14]);
        assert!(simplex_boundary(0).is_err());
        assert!(cyclic_polytope_boundary(4, 4).is_err());
    }
}
