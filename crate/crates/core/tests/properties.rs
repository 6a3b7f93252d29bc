//! Property tests over random maps, random balanced graphs and random parameters.

use balanced_maps::balance::{is_balanced, is_globally_balanced, is_locally_balanced, is_locally_balanced_thurston, OrientedMap};
use balanced_maps::charge::ChargeGraph;
use balanced_maps::cubic::{alpha_coeff, beta_coeff, c_of_a, phi_critical_value, Branch, CubicParams};
use balanced_maps::enrich::{insert_dots, perfect_matching, pipeline, propagate_labels, DotGraph};
use balanced_maps::gen::{random_charge_graph, random_planar_balanced};
use balanced_maps::ops::{
    balanced_move_at, edge_contract, face_collapse, face_insert, find_simple_pieces, vertex_expand, OpError,
};
use balanced_maps::perm;
use balanced_maps::real_enum::{noncrossing_matchings, real_gb_graph};
use balanced_maps::surface_map::Map;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random connected map: random rotations and a random fixed-point-free involution.
fn random_map(seed: u64, edges: usize) -> Option<Map> {
    let mut r = rng(seed);
    let n = 2 * edges;
    let mut darts: Vec<usize> = (0..n).collect();
    darts.shuffle(&mut r);
    let mut alpha = vec![0; n];
    for p in darts.chunks(2) {
        alpha[p[0]] = p[1];
        alpha[p[1]] = p[0];
    }
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(&mut r);
    Map::new(sigma, alpha).ok()
}

fn random_perm(seed: u64, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng(seed));
    p
}

fn real_graph(d: usize, index: usize) -> OrientedMap {
    let all: Vec<_> = noncrossing_matchings(d).collect();
    real_gb_graph(&all[index % all.len()])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn euler_formula_gives_a_whole_genus(seed in any::<u64>(), edges in 1usize..12) {
        if let Some(map) = random_map(seed, edges) {
            let chi = map.vertex_count() as i64 - map.edge_count() as i64 + map.face_count() as i64;
            prop_assert_eq!(chi, map.euler_characteristic());
            prop_assert_eq!(chi, 2 - 2 * map.genus() as i64);
        }
    }

    #[test]
    fn duality_swaps_vertices_and_faces(seed in any::<u64>(), edges in 1usize..12) {
        if let Some(map) = random_map(seed, edges) {
            let dual = map.dual();
            prop_assert_eq!(dual.vertex_count(), map.face_count());
            prop_assert_eq!(dual.face_count(), map.vertex_count());
            prop_assert_eq!(dual.genus(), map.genus());
            prop_assert!(dual.dual().is_isomorphic(&map));
            prop_assert!(map.mirror().mirror().is_isomorphic(&map));
        }
    }

    #[test]
    fn canonical_form_ignores_dart_names(seed in any::<u64>(), edges in 1usize..12) {
        if let Some(map) = random_map(seed, edges) {
            let p = random_perm(seed ^ 0x5eed, map.dart_count());
            prop_assert_eq!(map.relabel(&p).canonical_form(), map.canonical_form());
        }
    }

    #[test]
    fn permutation_inverse_composes_to_identity(seed in any::<u64>(), n in 1usize..40) {
        let p = random_perm(seed, n);
        prop_assert!(perm::is_identity(&perm::then(&p, &perm::inverse(&p))));
    }

    #[test]
    fn random_planar_maps_are_globally_balanced(seed in any::<u64>(), d in 2usize..7, k in 0usize..4) {
        let om = random_planar_balanced(d, k, &mut rng(seed));
        let t = is_globally_balanced(&om.map).unwrap();
        prop_assert_eq!((t.g, t.d), (0, d));
        prop_assert!(t.m <= 2 * t.g + 2 * t.d - 2);
    }

    #[test]
    fn local_balance_definitions_agree_on_the_sphere(seed in any::<u64>(), d in 2usize..6, k in 0usize..4) {
        let om = random_planar_balanced(d, k, &mut rng(seed));
        let by_multicycles = is_locally_balanced(&om).unwrap().balanced;
        let by_cycles = is_locally_balanced_thurston(&om).unwrap().balanced;
        prop_assert_eq!(by_multicycles, by_cycles);
    }

    #[test]
    fn dots_balance_and_match(seed in any::<u64>(), d in 2usize..6, k in 0usize..3) {
        let om = random_planar_balanced(d, k, &mut rng(seed));
        if is_balanced(&om).is_ok() {
            let dm = insert_dots(&om, None).unwrap();
            prop_assert_eq!(dm.dot_count(balanced_maps::Color::A), dm.dot_count(balanced_maps::Color::B));
            prop_assert!(perfect_matching(&DotGraph::new(&dm)).is_ok());
        }
    }

    #[test]
    fn pipeline_round_trip_on_balanced_maps(seed in any::<u64>(), d in 2usize..6, k in 0usize..3) {
        let om = random_planar_balanced(d, k, &mut rng(seed));
        if is_balanced(&om).is_ok() {
            let report = pipeline(&om, None).unwrap();
            let m = report.labeled.labeling.m;
            let map = &report.labeled.om.map;
            prop_assert!((0..map.face_count()).all(|f| map.face_degree(f) == m));
            prop_assert_eq!(report.passport.genus(), Some(0));
            report.constellation.verify(&report.passport, 0).unwrap();
        }
    }

    #[test]
    fn labels_from_any_seed_differ_by_a_shift(seed in any::<u64>(), d in 2usize..6, start in any::<usize>()) {
        let om = random_planar_balanced(d, 0, &mut rng(seed));
        if is_balanced(&om).is_ok() {
            let enriched = pipeline(&om, None).unwrap().enriched;
            let base = propagate_labels(&enriched, 0).unwrap();
            let other = propagate_labels(&enriched, start % enriched.map.vertex_count()).unwrap();
            let m = base.m;
            let shift = (other.labels[0] + m - base.labels[0]) % m;
            prop_assert!(base.labels.iter().zip(&other.labels).all(|(a, b)| (a + shift) % m == *b));
        }
    }

    #[test]
    fn charge_is_conserved(seed in any::<u64>(), interior in 1usize..8, capacity in 1i64..20) {
        let g = random_charge_graph(interior, capacity, &mut rng(seed));
        prop_assert!(g.is_feasible());
        let (input, output) = g.charge_io();
        prop_assert_eq!(input, output);
    }

    #[test]
    fn charge_defect_tracks_interior_sizes(seed in any::<u64>(), extra in 1usize..4) {
        let mut g: ChargeGraph = random_charge_graph(2, 5, &mut rng(seed));
        // isolated interior vertices on Y only, so the weighting is infeasible but the formula is exact
        g.y_count += extra;
        let (input, output) = g.charge_io();
        let defect = g.conservation_defect();
        prop_assert!(!g.is_feasible());
        prop_assert_eq!(input - output + &g.capacity * num_rational::BigRational::from_integer((extra as i64).into()), defect);
    }

    #[test]
    fn real_graphs_are_balanced_with_all_corners(d in 2usize..7, index in any::<usize>()) {
        let om = real_graph(d, index);
        let t = is_balanced(&om).unwrap();
        prop_assert_eq!((t.g, t.d, t.m), (0, d, 2 * d - 2));
    }

    #[test]
    fn contraction_and_expansion_are_inverse(d in 3usize..6, index in any::<usize>(), pick in any::<usize>()) {
        let om = real_graph(d, index);
        let darts: Vec<usize> = (0..om.map.dart_count()).filter(|&x| om.is_forward(x)).collect();
        let dart = darts[pick % darts.len()];
        match edge_contract(&om, dart) {
            Ok(c) => {
                let t = is_globally_balanced(&c.map.map).unwrap();
                prop_assert_eq!((t.g, t.d, t.m), (0, d, 2 * d - 3));
                let e = vertex_expand(&c.map, c.vertex, &c.part).unwrap();
                prop_assert!(e.map.is_isomorphic(&om));
            }
            Err(OpError::SplittingEdge { .. } | OpError::WouldCreateLoop { .. } | OpError::LocalBalanceLost { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn collapse_and_insert_are_inverse(d in 3usize..6, index in any::<usize>(), pick in any::<usize>()) {
        let om = real_graph(d, index);
        let pieces = find_simple_pieces(&om.map);
        if !pieces.is_empty() {
            let piece = &pieces[pick % pieces.len()];
            if let Ok(c) = face_collapse(&om, piece) {
                prop_assert_eq!(is_globally_balanced(&c.map.map).unwrap().d, d - piece.f);
                let back = face_insert(&c.map, &c.site, piece.f).unwrap();
                prop_assert!(back.is_isomorphic(&om));
            }
        }
    }

    #[test]
    fn moves_preserve_type_and_reverse(d in 3usize..6, index in any::<usize>(), pick in any::<usize>(), mirror in any::<bool>()) {
        let om = real_graph(d, index);
        let dart = pick % om.map.dart_count();
        if let Ok(moved) = balanced_move_at(&om, dart, mirror) {
            prop_assert_eq!(is_globally_balanced(&moved.map).unwrap(), is_globally_balanced(&om.map).unwrap());
            prop_assert_eq!(balanced_move_at(&moved, dart, !mirror).unwrap(), om);
        }
    }

    #[test]
    fn branch_coefficients_invert_c(re in -4.0f64..4.0, im in -4.0f64..4.0) {
        let c = Complex64::new(re, im);
        for a in [alpha_coeff(c), beta_coeff(c)].into_iter().flatten() {
            prop_assert!((c_of_a(a) - c).norm() < 1e-9 * (1.0 + c.norm()));
            prop_assert!((phi_critical_value(a) - a * a * c * c * c).norm() < 1e-8 * (1.0 + (a * a * c * c * c).norm()));
        }
    }

    #[test]
    fn cubic_parameters_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = Complex64::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        for branch in [Branch::Alpha, Branch::Beta] {
            if let Ok(p) = CubicParams::from_c(branch, c) {
                prop_assert!((p.c() - c).norm() < 1e-9 * (1.0 + c.norm()));
            }
        }
    }
}
