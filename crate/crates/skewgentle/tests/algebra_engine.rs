mod common;

use common::{count_paths_avoiding, fixture, graded_dim_oracle};
use num_traits::{One, Zero};
use skewgentle::algebra::{
    corner, int, path_image, scaled, unit_vector, verify_morphism, GeneratorImages, PathQuotient, Scalar,
};
use skewgentle::error::Code;
use skewgentle::presentations::{deform, glue_puzzle, split, triple_from_x_dissection, Piece, SkewGentleTriple};

fn disc_triple() -> SkewGentleTriple {
    triple_from_x_dissection(&fixture("disc_one_x").surface).unwrap().0
}

/// Generator images for the rescaling `e ↦ c·e` of special loops.
fn rescaling(t: &SkewGentleTriple, target: &PathQuotient, c: &Scalar) -> GeneratorImages {
    GeneratorImages {
        vertices: (0..t.quiver.vertices.len()).map(unit_vector).collect(),
        arrows: (0..t.quiver.arrows.len())
            .map(|a| {
                let x = target.arrow_element(a);
                if t.special.contains(&a) {
                    scaled(&x, c)
                } else {
                    x
                }
            })
            .collect(),
    }
}

#[test]
fn garland_dimension_matches_graded_oracle() {
    let pieces = [Piece::Linear(5), Piece::Special, Piece::Special, Piece::Special];
    let t = glue_puzzle(&pieces, &[((0, 1), (1, 0)), ((0, 2), (2, 0)), ((0, 3), (3, 0))]).unwrap();
    let p = split(&t).unwrap().presentation();
    let dim = PathQuotient::new(&p).unwrap().dim();
    assert_eq!(dim, graded_dim_oracle(&p, 8));
}

#[test]
fn split_dimensions_match_graded_oracle_on_fixtures() {
    for name in ["disc_one_x", "disc_two_x", "cyl_d1", "cyl_d2", "cyl_d3", "cyl_d4"] {
        let (t, _) = triple_from_x_dissection(&fixture(name).surface).unwrap();
        let p = split(&t).unwrap().presentation();
        assert_eq!(PathQuotient::new(&p).unwrap().dim(), graded_dim_oracle(&p, 12), "{name}");
    }
}

#[test]
fn deformed_dimension_matches_rewriting_count() {
    // e² → t·e together with the monomial relations is a confluent
    // rewriting system whose normal forms avoid `ee` and the relations
    for name in ["disc_one_x", "disc_two_x", "cyl_d1", "cyl_d3"] {
        let (t, _) = triple_from_x_dissection(&fixture(name).surface).unwrap();
        let mut forbidden = t.relations.clone();
        forbidden.extend(t.special.iter().map(|&e| (e, e)));
        let expected = count_paths_avoiding(&t.quiver, &forbidden, 64);
        for c in [0, 1, 2, 3, -1] {
            let dim = PathQuotient::new(&deform(&t, &int(c))).unwrap().dim();
            assert_eq!(dim, expected, "{name} t={c}");
        }
    }
}

#[test]
fn split_algebra_has_deformed_dimension() {
    for name in ["disc_one_x", "cyl_d1", "cyl_d4"] {
        let (t, _) = triple_from_x_dissection(&fixture(name).surface).unwrap();
        let a = PathQuotient::new(&deform(&t, &Scalar::one())).unwrap().dim();
        let b = PathQuotient::new(&split(&t).unwrap().presentation()).unwrap().dim();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn rescaling_special_loops_gives_isomorphisms() {
    let t = disc_triple();
    let target = PathQuotient::new(&deform(&t, &Scalar::one())).unwrap();
    let table = target.to_table();
    for c in [2, 3, -1] {
        let source = deform(&t, &int(c));
        let dim = PathQuotient::new(&source).unwrap().dim();
        let report = verify_morphism(&source, &rescaling(&t, &target, &int(c)), &table, Some(dim));
        assert!(report.is_isomorphism(), "t={c}: {:?}", report.failures);
    }
}

#[test]
fn degenerate_deformation_is_not_isomorphic_by_these_maps() {
    let t = disc_triple();
    let target = PathQuotient::new(&deform(&t, &Scalar::one())).unwrap();
    let table = target.to_table();
    let source = deform(&t, &Scalar::zero());
    let dim = PathQuotient::new(&source).unwrap().dim();
    // identity on generators violates e² = 0 in the target
    let identity = rescaling(&t, &target, &Scalar::one());
    let report = verify_morphism(&source, &identity, &table, Some(dim));
    assert!(!report.relations);
    // rescaling by zero respects the relations but is not surjective
    let zero = rescaling(&t, &target, &Scalar::zero());
    let report = verify_morphism(&source, &zero, &table, Some(dim));
    assert!(report.is_homomorphism());
    assert!(!report.is_isomorphism());
}

#[test]
fn table_algebras_are_associative_and_unital() {
    for name in ["disc", "disc_one_x", "cyl_d1"] {
        let s = fixture(name).surface.orbifold_points_as_punctures();
        let dq = skewgentle::presentations::quiver_from_dissection(&s).unwrap();
        let table = PathQuotient::new(&dq.pair.presentation()).unwrap().to_table();
        assert_eq!(table.check_associativity(), None, "{name}");
        assert!(table.check_unit(), "{name}");
    }
}

#[test]
fn corner_of_vertex_idempotent() {
    let t = disc_triple();
    let pq = PathQuotient::new(&deform(&t, &Scalar::one())).unwrap();
    let table = pq.to_table();
    let e = unit_vector(0);
    let c = corner(&table, &e).unwrap();
    // e·A·e at the special vertex: the idempotent and the loop
    assert_eq!(c.algebra.dim(), 2);
    assert!(c.algebra.check_unit());
    let mut not_idem = unit_vector(0);
    not_idem.insert(1, Scalar::one());
    assert_eq!(corner(&table, &scaled(&not_idem, &int(2))).unwrap_err().code(), Code::NotIdempotent);
}

#[test]
fn path_images_compose_in_traversal_order() {
    let t = disc_triple();
    let pq = PathQuotient::new(&deform(&t, &Scalar::one())).unwrap();
    let table = pq.to_table();
    let images = rescaling(&t, &pq, &Scalar::one());
    for b in &pq.basis {
        if b.arrows.is_empty() {
            continue;
        }
        assert_eq!(path_image(&images, &table, &b.arrows), pq.path_nf(b.source, &b.arrows));
    }
}

#[test]
fn free_loop_exceeds_path_cap() {
    let t = glue_puzzle(&[Piece::Special], &[]).unwrap();
    let mut p = t.presentation();
    p.relations.clear();
    let e = PathQuotient::with_max_len(&p, 10).unwrap_err();
    assert_eq!(e.code(), Code::NotStabilized);
}
