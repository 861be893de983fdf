use bandkh::morse::{random_diagram, Generated, MorseOptions};
use bandkh::skein::{kauffman_bracket_recursive, recover_p};
use bandkh::verify::{self, Suite};
use bandkh::{
    homology, kauffman_bracket, phi_expand, BracketExpansion, Coefficients, Diagram, GradedComplex, LaurentPolyA,
    SurfaceModel,
};
use bandkh::homology::uct_consistent;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn surface(k: usize) -> SurfaceModel {
    match k % 5 {
        0 => SurfaceModel::disk(),
        1 => SurfaceModel::annulus(),
        2 => SurfaceModel::planar_holes(2).unwrap(),
        3 => SurfaceModel::orientable(1, 1).unwrap(),
        _ => SurfaceModel::moebius_band(),
    }
}

fn generated(seed: u64, k: usize, max_crossings: usize) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = MorseOptions { max_crossings, plant_r3: true, ..Default::default() };
    random_diagram(&surface(k), &opts, &mut rng)
}

fn mirror_poly(p: &LaurentPolyA) -> LaurentPolyA {
    LaurentPolyA::from_terms(p.terms().map(|(c, e)| (c, -e)))
}

fn mirror_expansion(e: &BracketExpansion) -> BracketExpansion {
    let mut out = BracketExpansion::default();
    for (b, p) in &e.0 {
        out.add(b.clone(), &mirror_poly(p));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn text_form_round_trips(seed in any::<u64>(), k in 0usize..5) {
        let d = generated(seed, k, 5).diagram;
        let back: Diagram = d.to_string().parse().unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(back.to_string(), d.to_string());
    }

    #[test]
    fn state_sum_matches_recursion(seed in any::<u64>(), k in 0usize..5) {
        let d = generated(seed, k, 5).diagram;
        prop_assert_eq!(kauffman_bracket(&d), kauffman_bracket_recursive(&d));
    }

    #[test]
    fn mirror_inverts_a(seed in any::<u64>(), k in 0usize..5) {
        let d = generated(seed, k, 5).diagram;
        prop_assert_eq!(kauffman_bracket(&d.mirror()), mirror_expansion(&kauffman_bracket(&d)));
    }

    #[test]
    fn substitution_inverts_on_orientable_surfaces(seed in any::<u64>(), k in 0usize..4) {
        let d = generated(seed, k, 5).diagram;
        let e = kauffman_bracket(&d);
        prop_assert_eq!(recover_p(&phi_expand(&e), d.surface()).unwrap(), e);
    }

    #[test]
    fn coefficient_tables_agree(seed in any::<u64>(), k in 0usize..5) {
        let d = generated(seed, k, 5).diagram;
        let c = GradedComplex::new(&d);
        let z = homology(&c, Coefficients::Integer).unwrap();
        let q = homology(&c, Coefficients::Rational).unwrap();
        let z2 = homology(&c, Coefficients::Mod2).unwrap();
        prop_assert!(uct_consistent(&z, &q, &z2));
        let mut chain = c.chain_euler();
        chain.retain(|_, v| *v != 0);
        prop_assert_eq!(chain, z.euler());
    }

    #[test]
    fn homology_lives_in_one_parity(seed in any::<u64>(), k in 0usize..5) {
        let d = generated(seed, k, 5).diagram;
        let t = homology(&GradedComplex::new(&d), Coefficients::Integer).unwrap();
        let n = d.crossing_count() as i64;
        for ((i, j, _), _) in t.entries() {
            prop_assert_eq!((i - n).rem_euclid(2), 0);
            prop_assert_eq!((j - i).rem_euclid(2), 0);
        }
    }

    #[test]
    fn verification_suites_pass(seed in any::<u64>(), k in 0usize..5) {
        let d = generated(seed, k, 3).diagram;
        for r in verify::run(&d, Suite::All).unwrap() {
            prop_assert!(r.passed(), "{}\n{}", r, d);
        }
    }

    #[test]
    fn planted_moves_pass_face_test(seed in any::<u64>(), k in 0usize..5) {
        let g = generated(seed, k, 4);
        let sites = verify::r3_sites(&g.diagram);
        let sorted = |mut c: [(usize, u8); 3]| {
            c.sort();
            c
        };
        for s in &g.r3_sites {
            let found = sites.iter().any(|t| sorted(t.corners) == sorted(s.corners));
            prop_assert!(found);
        }
        let f = g.diagram.face_count();
        for s in verify::r2_sites(&g.diagram) {
            prop_assert_eq!(g.diagram.apply_r2(s).unwrap().0.face_count(), f + 2);
        }
    }
}
