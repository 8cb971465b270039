mod common;

use common::{all_fixtures, fixture};
use skewgentle::covering::{double_cover, lift_curve, quotient, Sheet};
use skewgentle::error::Code;
use skewgentle::linefield::puncture_loop;
use skewgentle::surface::{find_surface_iso, validate_involution, PointKind};

fn orbifold_fixtures() -> Vec<(&'static str, skewgentle::surface::DissectedSurface)> {
    all_fixtures()
        .into_iter()
        .filter(|(_, f)| f.surface.points.iter().any(|p| p.kind == PointKind::Orbifold))
        .map(|(n, f)| (n, f.surface))
        .collect()
}

#[test]
fn cylinder_cover_topologies() {
    for (name, expected) in [("cyl_d1", (0, 4)), ("cyl_d2", (0, 4)), ("cyl_d3", (1, 2)), ("cyl_d4", (1, 2))] {
        let (cover, _, _) = double_cover(&fixture(name).surface).unwrap();
        let t = cover.topology().unwrap();
        assert_eq!((t.genus, t.boundary.len()), expected, "{name}");
    }
}

#[test]
fn disc_covers() {
    let (c, _, _) = double_cover(&fixture("disc_one_x").surface).unwrap();
    let t = c.topology().unwrap();
    assert_eq!((t.genus, t.boundary.len(), t.boundary[0].points.len()), (0, 1, 8));
    let (c, _, _) = double_cover(&fixture("disc_two_x").surface).unwrap();
    let t = c.topology().unwrap();
    assert_eq!((t.genus, t.boundary.len()), (0, 2));
}

#[test]
fn riemann_hurwitz_on_fixtures() {
    for (name, s) in orbifold_fixtures() {
        let (cover, involution, proj) = double_cover(&s).unwrap();
        let (qt, ct) = (s.topology().unwrap(), cover.topology().unwrap());
        assert_eq!(ct.euler_char, 2 * qt.euler_char - qt.orbifold_points as i64, "{name}");
        assert_eq!(proj.branch_points.len(), qt.orbifold_points, "{name}");
        let fixed = validate_involution(&cover, &involution).unwrap();
        assert_eq!(fixed.len(), qt.orbifold_points, "{name}");
        assert_eq!(ct.orbifold_points, 0, "{name}");
    }
}

#[test]
fn quotient_of_cover_recovers_orbifold() {
    for (name, s) in orbifold_fixtures() {
        let (cover, involution, _) = double_cover(&s).unwrap();
        let (q, _) = quotient(&cover, &involution).unwrap();
        assert!(find_surface_iso(&q, &s).is_some(), "{name}");
    }
}

#[test]
fn torus_quotient_is_first_cylinder_but_cover_is_not_the_torus() {
    let torus = fixture("torus_sym");
    let (q, proj) = quotient(&torus.surface, torus.involution.as_ref().unwrap()).unwrap();
    let d1 = fixture("cyl_d1").surface;
    assert!(find_surface_iso(&q, &d1).is_some());
    assert_eq!(proj.branch_points.len(), 2);
    let (cover, _, _) = double_cover(&d1).unwrap();
    assert_eq!(cover.topology().unwrap().genus, 0);
    assert_eq!(torus.surface.topology().unwrap().genus, 1);
}

#[test]
fn symmetric_disc_quotient_has_one_orbifold_point() {
    let f = fixture("disc8_sym");
    let (q, _) = quotient(&f.surface, f.involution.as_ref().unwrap()).unwrap();
    let t = q.topology().unwrap();
    assert_eq!((t.genus, t.boundary.len(), t.orbifold_points, t.boundary[0].points.len()), (0, 1, 1, 4));
    assert!(find_surface_iso(&q, &fixture("disc_one_x").surface).is_some());
}

#[test]
fn sheets_are_swapped_by_the_involution() {
    for (name, s) in orbifold_fixtures() {
        let (cover, involution, proj) = double_cover(&s).unwrap();
        for (a, &b) in involution.arcs.iter().enumerate() {
            assert_eq!(proj.arc_map[a], proj.arc_map[b], "{name}");
            match proj.arc_sheet[a] {
                Sheet::Fixed => assert_eq!(a, b, "{name}"),
                sh => assert_eq!(proj.arc_sheet[b], sh.flip(), "{name}"),
            }
        }
        for (p, &q) in involution.points.iter().enumerate() {
            assert_ne!(p, q, "{name}: marked point fixed");
            assert_eq!(proj.point_sheet[q], proj.point_sheet[p].flip(), "{name}");
        }
        assert_eq!(cover.polygons.len(), 2 * s.polygons.len(), "{name}");
    }
}

#[test]
fn loops_around_orbifold_points_do_not_lift() {
    let s = fixture("disc_one_x").surface;
    let (cover, _, proj) = double_cover(&s).unwrap();
    let x = s.point_index("x").unwrap();
    let e = lift_curve(&s, &cover, &proj, &puncture_loop(&s, x).unwrap()).unwrap_err();
    assert_eq!(e.code(), Code::CurveThroughBranch);
}

#[test]
fn quotient_rejects_fixed_marked_points() {
    let f = fixture("disc8_sym");
    let mut involution = f.involution.clone().unwrap();
    involution.points = (0..f.surface.points.len()).collect();
    assert!(quotient(&f.surface, &involution).is_err());
}
