mod common;

use common::{all_fixtures, fixture, numeric_winding};
use skewgentle::algebra::PathQuotient;
use skewgentle::covering::double_cover;
use skewgentle::error::Code;
use skewgentle::linefield::{
    boundary_curve, build_complex, cover_invariant_tuple, decide_cover_equiv, decide_tilting_equiv, dual_dissection,
    dual_regions, grading_solver, invariant_tuple, puncture_loop, graded_arc_image, verify_d2, winding, Anchor,
    BsegSide, CombinatorialCurve, GradedArc, GradingOutcome, Passage, SlotRef, Verdict,
};
use skewgentle::presentations::quiver_from_dissection;
use skewgentle::surface::{DissectedSurface, PointKind};

/// Open curve from `(polygon id, entry, exit)` with `None` for green points.
fn open_curve(s: &DissectedSurface, steps: &[(&str, Option<usize>, Option<usize>)]) -> CombinatorialCurve {
    let slot = |x: Option<usize>| x.map_or(SlotRef::Green, SlotRef::Slot);
    let passages = steps
        .iter()
        .map(|&(p, a, b)| Passage {
            polygon: s.polygons.iter().position(|q| q.id == p).unwrap(),
            entry: slot(a),
            exit: slot(b),
            side: None,
        })
        .collect();
    CombinatorialCurve { closed: false, passages }
}

fn sorted(mut v: Vec<i64>) -> Vec<i64> {
    v.sort_unstable();
    v
}

#[test]
fn cylinder_boundary_windings() {
    let expected = [("cyl_d1", vec![-2, 0]), ("cyl_d2", vec![-1, -1]), ("cyl_d3", vec![-1, -1]), ("cyl_d4", vec![-2, 0])];
    for (name, w) in expected {
        let t = invariant_tuple(&fixture(name).surface).unwrap();
        assert_eq!(sorted(t.boundary_windings()), w, "{name}");
    }
}

#[test]
fn disc_boundary_winds_twice() {
    let s = fixture("disc").surface;
    assert_eq!(winding(&s, &boundary_curve(&s, 0).unwrap()).unwrap(), 2);
}

#[test]
fn loops_around_interior_points_wind_negatively_once() {
    for (name, f) in all_fixtures() {
        let s = &f.surface;
        for (p, pt) in s.points.iter().enumerate() {
            if pt.kind != PointKind::Boundary {
                assert_eq!(winding(s, &puncture_loop(s, p).unwrap()).unwrap(), -1, "{name} {}", pt.id);
            }
        }
    }
}

#[test]
fn boundary_winding_counts_arc_ends() {
    // each boundary point contributes 2 minus the number of arc ends there
    for (name, f) in all_fixtures() {
        let s = &f.surface;
        let ends = s.arc_end_counts();
        for (i, comp) in s.boundary_components().iter().enumerate() {
            let expected: i64 = comp.bsegs.iter().map(|&b| 2 - ends[s.bsegs[b].tail] as i64).sum();
            assert_eq!(winding(s, &boundary_curve(s, i).unwrap()).unwrap(), expected, "{name} comp {i}");
        }
    }
}

#[test]
fn windings_satisfy_poincare_hopf() {
    // Σ (w + 2) over boundary components and interior points is 4 − 4g
    let check = |name: &str, s: &DissectedSurface| {
        let t = s.topology().unwrap();
        let mut total = 0;
        for i in 0..s.boundary_components().len() {
            total += winding(s, &boundary_curve(s, i).unwrap()).unwrap() + 2;
        }
        for p in 0..s.points.len() {
            if s.points[p].kind != PointKind::Boundary {
                total += winding(s, &puncture_loop(s, p).unwrap()).unwrap() + 2;
            }
        }
        assert_eq!(total, 4 - 4 * t.genus, "{name}");
    };
    for (name, f) in all_fixtures() {
        check(name, &f.surface);
        if f.surface.points.iter().any(|p| p.kind == PointKind::Orbifold) {
            check(name, &double_cover(&f.surface).unwrap().0);
        }
    }
}

#[test]
fn combinatorial_winding_matches_geometric_model() {
    for (name, f) in all_fixtures() {
        let s = &f.surface;
        let mut curves: Vec<CombinatorialCurve> =
            (0..s.boundary_components().len()).map(|i| boundary_curve(s, i).unwrap()).collect();
        curves.extend((0..s.points.len()).filter_map(|p| puncture_loop(s, p).ok()));
        for c in &curves {
            let w = winding(s, c).unwrap();
            let g = numeric_winding(s, c);
            assert!((g - w as f64).abs() < 1e-6, "{name}: {w} vs {g}");
        }
    }
}

#[test]
fn reversing_a_curve_negates_its_winding() {
    for (name, f) in all_fixtures() {
        let s = &f.surface;
        for i in 0..s.boundary_components().len() {
            let c = boundary_curve(s, i).unwrap();
            assert_eq!(winding(s, &c.reversed()).unwrap(), -winding(s, &c).unwrap(), "{name}");
        }
    }
}

#[test]
fn curve_errors() {
    let s = fixture("cyl_d1").surface;
    let t = s.point_index("T").unwrap();
    assert_eq!(puncture_loop(&s, t).unwrap_err().code(), Code::BoundaryPoint);
    // consecutive passages that do not share an arc
    let bad = open_curve(&s, &[("U", None, Some(1)), ("L", Some(2), None)]);
    assert_eq!(bad.validate(&s).unwrap_err().code(), Code::InvalidCurve);
    // a same-side passage needs a declared side
    let mut c = boundary_curve(&s, 0).unwrap();
    c.passages[0].exit = c.passages[0].entry;
    c.passages[0].side = None;
    assert_eq!(c.validate(&s).unwrap_err().code(), Code::InvalidCurve);
}

#[test]
fn cover_windings_of_cylinders() {
    let expected = [
        ("cyl_d1", (0, 4, vec![-2, -2, 0, 0])),
        ("cyl_d2", (0, 4, vec![-1, -1, -1, -1])),
        ("cyl_d3", (1, 2, vec![-2, -2])),
        ("cyl_d4", (1, 2, vec![-4, 0])),
    ];
    for (name, (g, b, w)) in expected {
        let ci = cover_invariant_tuple(&fixture(name).surface).unwrap();
        assert_eq!((ci.genus, ci.boundary_count, sorted(ci.windings.clone())), (g, b, w), "{name}");
        assert!(ci.crosscheck, "{name}");
        assert_eq!(sorted(ci.lifted_windings.clone()), sorted(ci.windings.clone()), "{name}");
    }
}

#[test]
fn decider_verdicts_on_cylinders() {
    let s = |n: &str| fixture(n).surface;
    let tilt = |a: &str, b: &str| decide_tilting_equiv(&s(a), &s(b)).unwrap().verdict;
    let cover = |a: &str, b: &str| decide_cover_equiv(&s(a), &s(b)).unwrap().verdict;
    assert_eq!(tilt("cyl_d1", "cyl_d4"), Verdict::Equivalent);
    assert_eq!(tilt("cyl_d2", "cyl_d3"), Verdict::Equivalent);
    assert_eq!(tilt("cyl_d1", "cyl_d2"), Verdict::NotEquivalent);
    for (a, b) in [("cyl_d1", "cyl_d2"), ("cyl_d1", "cyl_d3"), ("cyl_d2", "cyl_d4"), ("cyl_d3", "cyl_d4")] {
        assert_eq!(cover(a, b), Verdict::NotEquivalent, "{a} {b}");
    }
    assert_ne!(cover("cyl_d1", "cyl_d1"), Verdict::Equivalent);
}

#[test]
fn dual_regions_are_single_points() {
    for (name, f) in all_fixtures() {
        let s = &f.surface;
        let regions = dual_regions(s).unwrap();
        assert!(regions.iter().all(|r| r.len() == 1), "{name}: {regions:?}");
        let mut pts: Vec<usize> = regions.into_iter().flatten().collect();
        pts.sort_unstable();
        pts.dedup();
        let boundary = s.points.iter().filter(|p| p.kind == PointKind::Boundary).count();
        assert!(pts.len() >= boundary, "{name}");
    }
}

#[test]
fn canonical_duals_grade_to_zero() {
    for (name, f) in all_fixtures() {
        let s = &f.surface;
        let duals = dual_dissection(s).unwrap();
        assert_eq!(duals.len(), s.arcs.len());
        let anchors: Vec<Anchor> = (0..duals.len()).map(|c| Anchor { curve: c, crossing: 0, value: 0 }).collect();
        match grading_solver(s, &duals, &anchors, &[]).unwrap() {
            GradingOutcome::Consistent(g) => assert!(g.iter().flatten().all(|&x| x == 0), "{name}"),
            other => panic!("{name}: {other:?}"),
        }
    }
}

fn perturbed_pair(s: &DissectedSurface) -> Vec<CombinatorialCurve> {
    vec![
        open_curve(s, &[("U", None, Some(1)), ("L", Some(1), None)]),
        open_curve(s, &[("U", None, Some(2)), ("L", Some(6), Some(5)), ("L", Some(4), Some(3)), ("L", Some(2), None)]),
    ]
}

#[test]
fn perturbed_dual_has_no_grading() {
    let s = fixture("cyl_d1").surface;
    let curves = perturbed_pair(&s);
    match grading_solver(&s, &curves, &[Anchor { curve: 0, crossing: 0, value: 0 }], &[]).unwrap() {
        GradingOutcome::Inconsistent { defect, cycle } => {
            assert_eq!(defect.abs(), 2);
            assert!(!cycle.is_empty());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unanchored_component_is_reported() {
    // duals of 1p and 1m on the torus share no green point
    let s = fixture("torus_sym").surface;
    let duals = dual_dissection(&s).unwrap();
    let pick = |id: &str| duals[s.arc_index(id).unwrap()].clone();
    let pair = [pick("1p"), pick("1m")];
    let e = grading_solver(&s, &pair, &[Anchor { curve: 0, crossing: 0, value: 0 }], &[]).unwrap_err();
    assert_eq!(e.code(), Code::NotConnectedToAnchor);
}

#[test]
fn complex_of_long_arc_squares_to_zero() {
    let file = fixture("cyl_d1");
    let s = file.surface.orbifold_points_as_punctures();
    let curve = perturbed_pair(&s).remove(1);
    let grades = match grading_solver(&s, std::slice::from_ref(&curve), &[Anchor { curve: 0, crossing: 0, value: 0 }], &[])
        .unwrap()
    {
        GradingOutcome::Consistent(g) => g[0].clone(),
        other => panic!("{other:?}"),
    };
    assert_eq!(grades, vec![0, -1, -2]);
    let dq = quiver_from_dissection(&s).unwrap();
    let garc = GradedArc { curve, grades };
    let c = build_complex(&s, &dq, &garc).unwrap();
    assert_eq!(c.summands.len(), 3);
    assert_eq!(c.entries.len(), 2);
    let pq = PathQuotient::new(&dq.pair.presentation()).unwrap();
    assert!(verify_d2(&c, &pq));
    // monomial oracle: a composite of two entries vanishes iff it contains a relation
    let (e0, e1) = (&c.entries[0], &c.entries[1]);
    let (first, second) = if e0.row == e1.col { (e0, e1) } else { (e1, e0) };
    if first.row == second.col {
        let full: Vec<usize> = first.path.iter().chain(&second.path).copied().collect();
        assert!(full.windows(2).any(|w| dq.pair.has_relation(w[0], w[1])));
    }
    // the grades must follow the passage signs
    let bad = GradedArc { curve: garc.curve.clone(), grades: vec![0, 0, 0] };
    assert!(build_complex(&s, &dq, &bad).is_err());
}

#[test]
fn involution_maps_graded_arcs_to_graded_arcs() {
    let f = fixture("torus_sym");
    let (s, involution) = (&f.surface, f.involution.as_ref().unwrap());
    let dq = quiver_from_dissection(s).unwrap();
    let pq = PathQuotient::new(&dq.pair.presentation()).unwrap();
    for curve in dual_dissection(s).unwrap() {
        let garc = GradedArc { curve, grades: vec![0] };
        let image = graded_arc_image(s, involution, &garc);
        image.validate(s).unwrap();
        assert_eq!(image.curve.crossings(s), vec![involution.arcs[garc.curve.crossings(s)[0]]]);
        assert!(verify_d2(&build_complex(s, &dq, &image).unwrap(), &pq));
        assert_eq!(graded_arc_image(s, involution, &image), garc);
    }
}

#[test]
fn side_signs_flip() {
    assert_eq!(BsegSide::Left.sign(), 1);
    assert_eq!(BsegSide::Right.sign(), -1);
    assert_eq!(BsegSide::Left.flip(), BsegSide::Right);
}
