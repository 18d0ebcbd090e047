use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stresslab::algebra::{macaulay_check, Multiplier};
use stresslab::complex::{
    cross_polytope_boundary, cyclic_polytope_boundary, f_from_h, h_from_f, simplex_boundary, SimplicialComplex,
};
use stresslab::maxwell::{pl_orientation, round_trip, Geometry, MaxwellError};
use stresslab::numeric::{format_rational, parse_rational, ratio, NumericError, DEFAULT_PRIME_BOUND};
use stresslab::realization::realize_random;
use stresslab::rigidity::{check_equilibrium, stress_space, EquilibriumForm};
use stresslab::skeletal::skeletal_complex;

fn small_sphere(pick: usize) -> SimplicialComplex {
    match pick % 4 {
        0 => simplex_boundary(2).unwrap(),
        1 => cross_polytope_boundary(2).unwrap(),
        2 => cyclic_polytope_boundary(2, 5).unwrap(),
        _ => cross_polytope_boundary(3).unwrap(),
    }
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 16, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn f_and_h_invert(tail in proptest::collection::vec(0i64..40, 0..6)) {
        let mut h = vec![1];
        h.extend(tail);
        let f = f_from_h(&h);
        prop_assert_eq!(h_from_f(&f), h);
    }

    #[test]
    fn rationals_print_and_parse(n in -10_000i64..10_000, d in 1i64..500) {
        let q = ratio(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&q)), Some(q));
    }

    #[test]
    fn macaulay_accepts_polynomial_rings(vars in 1u64..6, len in 2usize..7) {
        // Hilbert function of a polynomial ring in `vars` variables: C(vars-1+i, i).
        let v: Vec<i64> = (0..len as u64)
            .map(|i| stresslab::algebra::big_binomial(vars - 1 + i, i).try_into().unwrap())
            .collect();
        prop_assert!(macaulay_check(&v));
    }

    #[test]
    fn suspension_and_join_keep_dehn_sommerville(pick in 0usize..4) {
        let c = small_sphere(pick);
        let pair = SimplicialComplex::from_facets(&[vec!["x"], vec!["y"]]).unwrap();
        for s in [c.suspension().unwrap(), c.join(&pair).unwrap()] {
            let h = h_from_f(&s.f_vector());
            let rev: Vec<i64> = h.iter().rev().copied().collect();
            prop_assert_eq!(h, rev);
        }
    }

    #[test]
    fn random_realizations_validate_and_repeat(pick in 0usize..4, seed in 0u64..1000) {
        let c = small_sphere(pick);
        let a = realize_random(&c, seed, 30).unwrap();
        a.validate(&c).unwrap();
        let b = realize_random(&c, seed, 30).unwrap();
        prop_assert_eq!(a.coords(), b.coords());
    }

    #[test]
    fn random_stresses_are_in_equilibrium(pick in 0usize..4, seed in 0u64..1000) {
        let c = small_sphere(pick);
        let real = realize_random(&c, seed, 30).unwrap();
        let space = stress_space(&c, &real);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in 0..space.hilbert().len() {
            let a = space.random_element(r, &mut rng, 9);
            for form in [EquilibriumForm::Projective, EquilibriumForm::Geometric, EquilibriumForm::Cayley] {
                prop_assert!(check_equilibrium(&c, &real, &a, form));
            }
        }
    }

    #[test]
    fn boundary_squares_vanish(pick in 0usize..4, seed in 0u64..1000) {
        let c = small_sphere(pick);
        let real = realize_random(&c, seed, 30).unwrap();
        for r in 0..=(c.dim() + 1) as usize {
            prop_assert!(skeletal_complex(&c, &real, r).unwrap().squares_vanish());
        }
    }

    #[test]
    fn product_commutes(pick in 0usize..4, seed in 0u64..1000) {
        let c = small_sphere(pick);
        let real = realize_random(&c, seed, 30).unwrap();
        let space = stress_space(&c, &real);
        let m = Multiplier::new(&c, &real);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let a = space.random_element(1, &mut rng, 9);
        let b = space.random_element(1, &mut rng, 9);
        prop_assert_eq!(m.mul_full(&a, &b), m.mul_full(&b, &a));
    }

    #[test]
    fn maxwell_round_trip_is_identity(seed in 0u64..1000) {
        let c = cross_polytope_boundary(3).unwrap();
        let real = realize_random(&c, seed, 30).unwrap();
        let g = Geometry::new(&c, &real).unwrap();
        let rho = pl_orientation(&g, None).unwrap();
        let base = g.facets[0].clone();
        for a in stress_space(&c, &real).basis(1) {
            match round_trip(&g, &rho, &base, a, DEFAULT_PRIME_BOUND) {
                Ok(rt) => prop_assert!(rt.identity()),
                Err(MaxwellError::Numeric(NumericError::FactorizationIncomplete { .. })) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }
}
