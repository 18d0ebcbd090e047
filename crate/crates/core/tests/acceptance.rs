//! One PASS/FAIL line per acceptance criterion.
//!
//! Every criterion is evaluated as stated. The test asserts the criteria listed in
//! `MUST_PASS`; the others are printed with their measurements and left to the report.

use std::io::Write;
use std::time::{Duration, Instant};

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stresslab::algebra::{
    closure_check, double_counting_check, g_conjecture_verdict, hilbert_and_generation, lefschetz_middle,
    macaulay_check, quotient_g_vector, socle_and_gorenstein, wlp_check, Multiplier, PipelineOptions,
};
use stresslab::complex::{
    classify, cross_polytope_boundary, cyclic_polytope_boundary, real_projective_plane_6, simplex_boundary, Field,
    SimplicialComplex,
};
use stresslab::maxwell::{
    ab_matrices, pl_orientation, product_formula_check, q_genericity_check, round_trip, Geometry, MaxwellError,
};
use stresslab::numeric::DEFAULT_PRIME_BOUND;
use stresslab::realization::realize_random;
use stresslab::rigidity::{check_equilibrium, stress_space, EquilibriumForm, StressVector};
use stresslab::skeletal::{
    cone_projection_chain_map, cone_setup, phi_chain_map, phi_commutes_with_pi, skeletal_complex,
    stress_homology_check, technical_crux_with_retries, wlp_diagram_check,
};

const MUST_PASS: [usize; 6] = [1, 2, 3, 5, 10, 11];

struct Line {
    id: usize,
    pass: bool,
    detail: String,
}

/// Written to the stdout handle directly so the lines survive the test harness capture.
fn report(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn line(id: usize, pass: bool, detail: String) -> Line {
    report(&format!("criterion {id:>2}: {} {detail}", if pass { "PASS" } else { "FAIL" }));
    Line { id, pass, detail }
}

fn pentagon() -> SimplicialComplex {
    cyclic_polytope_boundary(2, 5).unwrap()
}

fn octahedron() -> SimplicialComplex {
    cross_polytope_boundary(3).unwrap()
}

fn relabel(c: &SimplicialComplex, prefix: &str) -> SimplicialComplex {
    let facets: Vec<Vec<String>> =
        c.facet_labels().into_iter().map(|f| f.into_iter().map(|l| format!("{prefix}{l}")).collect()).collect();
    SimplicialComplex::from_facets(&facets).unwrap()
}

/// Spheres of dimension ≤ 3 with at most 10 vertices.
fn sphere_fixtures() -> Vec<(String, SimplicialComplex)> {
    let pent = pentagon();
    let oct = octahedron();
    vec![
        ("triangle".into(), simplex_boundary(2).unwrap()),
        ("tetrahedron".into(), simplex_boundary(3).unwrap()),
        ("simplex4".into(), simplex_boundary(4).unwrap()),
        ("pentagon".into(), pent.clone()),
        ("hexagon".into(), cyclic_polytope_boundary(2, 6).unwrap()),
        ("octahedron".into(), oct.clone()),
        ("C(4,7)".into(), cyclic_polytope_boundary(4, 7).unwrap()),
        ("C(4,8)".into(), cyclic_polytope_boundary(4, 8).unwrap()),
        ("crosspoly4".into(), cross_polytope_boundary(4).unwrap()),
        ("susp(pentagon)".into(), pent.suspension().unwrap()),
        ("susp(octahedron)".into(), oct.suspension().unwrap()),
        ("susp(susp(pentagon))".into(), pent.suspension().unwrap().suspension().unwrap()),
    ]
}

fn dehn_sommerville(c: &SimplicialComplex) -> bool {
    let h = c.face_vector().h;
    (0..h.len()).all(|i| h[i] == h[h.len() - 1 - i])
}

fn criterion_1() -> Line {
    let t = Instant::now();
    let mut list: Vec<SimplicialComplex> = Vec::new();
    list.extend((1..=6).map(|d| simplex_boundary(d).unwrap()));
    list.extend((1..=5).map(|d| cross_polytope_boundary(d).unwrap()));
    list.extend((5..=9).map(|n| cyclic_polytope_boundary(4, n).unwrap()));
    let base = list.clone();
    list.extend(base.iter().map(|c| c.suspension().unwrap()));
    let small = [simplex_boundary(2).unwrap(), cross_polytope_boundary(2).unwrap(), pentagon()];
    for (i, a) in base.iter().enumerate().filter(|(_, c)| c.num_vertices() <= 8) {
        for (j, b) in small.iter().enumerate() {
            list.push(relabel(a, &format!("x{i}_")).join(&relabel(b, &format!("y{j}_"))).unwrap());
        }
    }
    let failures = list.iter().filter(|c| !dehn_sommerville(c)).count();
    let elapsed = t.elapsed();
    line(1, failures == 0 && elapsed < Duration::from_secs(5), format!("{} complexes, {failures} asymmetric h, {elapsed:.2?}", list.len()))
}

fn hilbert_matches(c: &SimplicialComplex, seed: u64) -> (bool, bool) {
    let r = realize_random(c, seed, 20).unwrap();
    let space = stress_space(c, &r);
    let h = c.face_vector().h;
    let hil = space.hilbert();
    let d = c.dim();
    let full = hil.len() == h.len() && (0..hil.len()).all(|i| hil[i] as i64 == h[h.len() - 1 - i]);
    let psi1 = space.dim(1) as isize == c.num_vertices() as isize - d - 1;
    (full, psi1)
}

fn criteria_2_3() -> (Line, Line) {
    let t = Instant::now();
    let fx = sphere_fixtures();
    let results: Vec<(String, bool, bool)> = fx
        .iter()
        .enumerate()
        .map(|(i, (n, c))| {
            let (a, b) = hilbert_matches(c, 100 + i as u64);
            (n.clone(), a, b)
        })
        .collect();
    let elapsed = t.elapsed();
    let bad2: Vec<&str> = results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    let bad3: Vec<&str> = results.iter().filter(|r| !r.2).map(|r| r.0.as_str()).collect();
    (
        line(2, bad2.is_empty() && elapsed < Duration::from_secs(120), format!("{} fixtures, mismatches {bad2:?}, {elapsed:.2?}", fx.len())),
        line(3, bad3.is_empty(), format!("{} fixtures, mismatches {bad3:?}", fx.len())),
    )
}

fn random_pair_degrees(rng: &mut ChaCha8Rng, top: usize) -> (usize, usize) {
    let r = rng.gen_range(0..=top);
    let s = rng.gen_range(0..=top - r);
    (r, s)
}

fn criterion_4() -> Line {
    let t = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    for (name, c) in [("octahedron", octahedron()), ("pentagon", pentagon())] {
        let real = realize_random(&c, 41, 20).unwrap();
        let space = stress_space(&c, &real);
        let m = Multiplier::new(&c, &real);
        let top = (c.dim() + 1) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut closed, mut comm, mut assoc, mut graded) = (0, 0, 0, 0);
        let trials = 200;
        for _ in 0..trials {
            let (r, s) = random_pair_degrees(&mut rng, top);
            let a = space.random_element(r, &mut rng, 9);
            let b = space.random_element(s, &mut rng, 9);
            let u = rng.gen_range(0..=top - r - s);
            let x = space.random_element(u, &mut rng, 9);
            closed += usize::from(closure_check(&m, &a, &b).closed());
            comm += usize::from(m.mul_full(&a, &b) == m.mul_full(&b, &a));
            graded += usize::from(m.mul_full(&a, &b).off_degree_support(&c) == 0);
            let left = m.mul(&m.mul(&a, &b).unwrap(), &x);
            let right = m.mul(&a, &m.mul(&b, &x).unwrap());
            assoc += usize::from(left == right);
        }
        let faces: Vec<Vec<usize>> = c.all_faces().cloned().collect();
        let dc = faces.iter().filter(|f| double_counting_check(&c, &real, f).unwrap().equal).count();
        pass &= closed == trials && comm == trials && assoc == trials && graded == trials && dc == faces.len();
        details.push(format!(
            "{name}: closed {closed}/{trials}, commutative {comm}/{trials}, associative {assoc}/{trials}, degree-additive {graded}/{trials}, double counting {dc}/{} faces",
            faces.len()
        ));
    }
    let elapsed = t.elapsed();
    line(4, pass && elapsed < Duration::from_secs(120), format!("{}; {elapsed:.2?}", details.join("; ")))
}

fn criterion_5() -> Line {
    let mut details = Vec::new();
    let mut pass = true;
    for (name, c) in [("octahedron", octahedron()), ("pentagon", pentagon()), ("C(4,7)", cyclic_polytope_boundary(4, 7).unwrap())] {
        let real = realize_random(&c, 5, 20).unwrap();
        let geom = Geometry::new(&c, &real).unwrap();
        let rho = pl_orientation(&geom, None).unwrap();
        let base = geom.facets[0].clone();
        let space = stress_space(&c, &real);
        let basis_ok = space.basis(1).iter().all(|a| round_trip(&geom, &rho, &base, a, DEFAULT_PRIME_BOUND).unwrap().identity());
        let d = geom.d;
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let pairs = 20;
        let mut equal = 0;
        for _ in 0..pairs {
            let a = space.random_element(1, &mut rng, 9);
            let b = space.random_element(d, &mut rng, 9);
            equal += usize::from(product_formula_check(&c, &real, &geom, &rho, &base, &a, &b, DEFAULT_PRIME_BOUND).unwrap().equal);
        }
        pass &= basis_ok && equal == pairs;
        details.push(format!("{name}: round trip {basis_ok}, product formula {equal}/{pairs}"));
    }
    line(5, pass, details.join("; "))
}

fn criterion_6() -> Line {
    let mut details = Vec::new();
    let mut pass = true;
    for (name, c) in [("octahedron", octahedron()), ("pentagon", pentagon())] {
        let draws = 20;
        let mut generic = 0;
        let mut first = None;
        let mut ab_ok = true;
        for t in 0..draws {
            let real = realize_random(&c, 600 + t, 20).unwrap();
            let geom = Geometry::new(&c, &real).unwrap();
            let rep = q_genericity_check(&geom, &real, DEFAULT_PRIME_BOUND).unwrap();
            if rep.verdict {
                generic += 1;
                first.get_or_insert(t + 1);
                let rho = pl_orientation(&geom, None).unwrap();
                let ab = ab_matrices(&geom, &real, &rho, &geom.facets[0].clone(), DEFAULT_PRIME_BOUND);
                ab_ok &= matches!(ab, Ok(ref x) if x.abt_invertible && x.c_invertible);
            }
        }
        let rate = generic as f64 / draws as f64;
        let within = first.is_some_and(|k| k <= 10);
        pass &= within && rate >= 0.9 && ab_ok;
        details.push(format!("{name}: Q-generic draws {generic}/{draws}, first at {first:?}"));
    }
    line(6, pass, details.join("; "))
}

fn criterion_7() -> Line {
    let mut details = Vec::new();
    let mut pass = true;
    let opts = PipelineOptions::default();
    for (name, c) in [("octahedron", octahedron()), ("pentagon", pentagon()), ("C(4,7)", cyclic_polytope_boundary(4, 7).unwrap())] {
        let g = g_conjecture_verdict(&c, 70, &opts).unwrap();
        let generic = g.genericity.as_ref().is_some_and(|x| x.verdict);
        let real = &g.realization;
        let space = stress_space(&c, real);
        let m = Multiplier::new(&c, real);
        let soc = socle_and_gorenstein(&m, &space);
        let gen = hilbert_and_generation(&m, &space);
        pass &= generic && soc.total == 1 && gen.generated_in_degree_one;
        details.push(format!(
            "{name}: Q-generic {generic}, socle {} {:?}, generated {:?} vs {:?}",
            soc.total, soc.dims, gen.generated_dims, gen.hilbert
        ));
    }
    line(7, pass, details.join("; "))
}

fn criterion_8() -> Line {
    let mut bad = Vec::new();
    let mut slow = Vec::new();
    let fx = sphere_fixtures();
    for (i, (name, c)) in fx.iter().enumerate() {
        let t = Instant::now();
        let real = realize_random(c, 800 + i as u64, 20).unwrap();
        let space = stress_space(c, &real);
        let m = Multiplier::new(c, &real);
        let w = wlp_check(&m, &space, 3, 8);
        let g = c.face_vector().g;
        let top = (c.dim() + 1) as usize;
        let mid = lefschetz_middle(c.dim());
        let pattern = w.injective_degrees == (1..=mid).collect::<Vec<_>>() && w.surjective_degrees == (mid + 1..=top).collect::<Vec<_>>();
        let q = quotient_g_vector(&m, &space, &space.combine(1, &w.trials[0].omega)).ok();
        let ok = w.verdict_weak && pattern && q.as_ref() == Some(&g) && macaulay_check(&g);
        if !ok {
            bad.push(format!("{name} (inj {:?}, surj {:?}, images in Ψ {})", w.injective_degrees, w.surjective_degrees, w.trials[0].images_in_space));
        }
        if t.elapsed() > Duration::from_secs(60) {
            slow.push(name.clone());
        }
    }
    line(8, bad.is_empty() && slow.is_empty(), format!("{} fixtures; failing: {}; over 1 min: {slow:?}", fx.len(), bad.join(", ")))
}

fn criterion_9() -> Line {
    let t = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    for (name, c) in [("pentagon", pentagon()), ("octahedron", octahedron())] {
        let s = cone_setup(&c, 9, 20).unwrap();
        let d = c.dim() as usize;
        let base = &s.projection.base;
        let nu = &s.projection.realization;
        let squares = (0..=d + 1).all(|r| skeletal_complex(base, nu, r).unwrap().squares_vanish())
            && (0..=d + 2).all(|r| skeletal_complex(&s.cone, &s.nu_prime, r).unwrap().squares_vanish());
        let homology = (1..=d + 1).all(|r| stress_homology_check(base, nu, r).unwrap().equal);
        let pi = (0..=d).all(|r| {
            let p = cone_projection_chain_map(&s.cone, &s.nu_prime, s.apex, &s.projection, r).unwrap();
            p.chain_map && p.surjective && p.iso_top
        });
        let phi: Vec<usize> = (1..=d).filter(|&r| !phi_chain_map(&s.cone, &s.nu_prime, &s.zeta, r).unwrap().is_chain_map).collect();
        let commute: Vec<usize> = (1..=d)
            .filter(|&r| !phi_commutes_with_pi(&s.cone, &s.nu_prime, s.apex, &s.projection, &s.zeta, r).unwrap())
            .collect();
        let diagram = wlp_diagram_check(&c, 9, 20, 10).unwrap();
        let matrices = diagram.degrees.iter().all(|x| x.matrices_equal) && diagram.omega_in_space && diagram.omega_matches_zeta;
        pass &= squares && homology && pi && phi.is_empty() && commute.is_empty() && matrices;
        details.push(format!(
            "{name}: ∂²=0 {squares}, H=Ψ {homology}, Π {pi}, φ not a chain map at r={phi:?}, Πφ≠φΠ at r={commute:?}, ω matrices {matrices}"
        ));
    }
    let elapsed = t.elapsed();
    line(9, pass && elapsed < Duration::from_secs(300), format!("{}; {elapsed:.2?}", details.join("; ")))
}

fn criterion_10() -> Line {
    let mut details = Vec::new();
    let mut pass = true;
    for (name, c) in [("pentagon", pentagon()), ("octahedron", octahedron())] {
        let s = cone_setup(&c, 10, 20).unwrap();
        let crux = technical_crux_with_retries(&s, 10, 20, 10).unwrap();
        let ranks: Vec<String> = crux.entries.iter().map(|e| format!("r={} M {}/{} φ {}/{}", e.r, e.m_rank, e.nullity, e.phi_rank, e.stress_dim)).collect();
        pass &= crux.passed && crux.attempts <= 10;
        details.push(format!("{name}: attempts {}, {}", crux.attempts, ranks.join(", ")));
    }
    line(10, pass, details.join("; "))
}

fn criterion_11() -> Line {
    let rp2 = real_projective_plane_6();
    let sphere = classify(&rp2, Field::Q).is_homology_sphere || classify(&rp2, Field::GF2).is_homology_sphere;
    let real = realize_random(&rp2, 11, 20).unwrap();
    let orient = matches!(pl_orientation(&Geometry::new(&rp2, &real).unwrap(), None), Err(MaxwellError::NonOrientable(_)));
    let oct = octahedron();
    let r = realize_random(&oct, 11, 20).unwrap();
    let space = stress_space(&oct, &r);
    let mut perturbed_fail = true;
    // Ψ_{d+1} is every function on the empty face, so only degrees ≤ d can be perturbed out of Ψ
    for deg in 0..=2 {
        for b in space.basis(deg) {
            for i in 0..b.values.len() {
                let mut p: StressVector = b.clone();
                p.values[i] += stresslab::Rational::one();
                perturbed_fail &= !check_equilibrium(&oct, &r, &p, EquilibriumForm::Projective);
            }
        }
    }
    let zero_ok = check_equilibrium(&oct, &r, &StressVector::zero(&oct, 1), EquilibriumForm::Projective);
    let mac = !macaulay_check(&[1, 2, 4]);
    let pass = !sphere && orient && perturbed_fail && zero_ok && mac;
    line(11, pass, format!("RP² sphere gate {}, NonOrientable {orient}, perturbed stresses rejected {perturbed_fail}, (1,2,4) rejected {mac}", !sphere))
}

#[test]
fn acceptance_criteria() {
    let mut lines = vec![criterion_1()];
    let (l2, l3) = criteria_2_3();
    lines.push(l2);
    lines.push(l3);
    lines.push(criterion_4());
    lines.push(criterion_5());
    lines.push(criterion_6());
    lines.push(criterion_7());
    lines.push(criterion_8());
    lines.push(criterion_9());
    lines.push(criterion_10());
    lines.push(criterion_11());
    let passed = lines.iter().filter(|l| l.pass).count();
    report(&format!("acceptance: {passed}/{} criteria pass", lines.len()));
    for l in &lines {
        if MUST_PASS.contains(&l.id) {
            assert!(l.pass, "criterion {} regressed: {}", l.id, l.detail);
        }
    }
}
