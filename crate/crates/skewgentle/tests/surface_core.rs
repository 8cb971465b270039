mod common;

use common::{all_fixtures, fixture};
use skewgentle::error::Code;
use skewgentle::format::{parse_surface, print_surface};
use skewgentle::surface::{find_surface_iso, validate_involution, DissectionKind, PointKind, SurfaceBuilder};

#[test]
fn fixtures_parse_and_validate() {
    for (name, f) in all_fixtures() {
        assert!(f.surface.validate().is_empty(), "{name}");
        f.surface.classify_dissection().unwrap_or_else(|e| panic!("{name}: {e}"));
        if let Some(involution) = &f.involution {
            validate_involution(&f.surface, involution).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn print_parse_is_stable() {
    for (name, f) in all_fixtures() {
        let text = print_surface(&f);
        let again = parse_surface(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(again, f, "{name}");
        assert_eq!(print_surface(&again), text, "{name}");
    }
}

#[test]
fn fixture_topologies() {
    // (genus, boundary components, punctures, orbifold points)
    let expected = [
        ("disc", (0, 1, 0, 0)),
        ("disc_one_x", (0, 1, 0, 1)),
        ("disc_two_x", (0, 1, 0, 2)),
        ("disc8_sym", (0, 1, 0, 0)),
        ("torus_sym", (1, 2, 0, 0)),
        ("cyl_d1", (0, 2, 0, 2)),
        ("cyl_d2", (0, 2, 0, 2)),
        ("cyl_d3", (0, 2, 0, 2)),
        ("cyl_d4", (0, 2, 0, 2)),
    ];
    for (name, (g, b, p, x)) in expected {
        let t = fixture(name).surface.topology().unwrap();
        assert_eq!((t.genus, t.boundary.len(), t.punctures, t.orbifold_points), (g, b, p, x), "{name}");
    }
}

#[test]
fn dissection_kinds() {
    assert_eq!(fixture("disc").surface.classify_dissection().unwrap().kind, DissectionKind::Bullet);
    assert_eq!(fixture("cyl_d1").surface.classify_dissection().unwrap().kind, DissectionKind::X);
    assert!(fixture("torus_sym").surface.is_bullet());
}

#[test]
fn euler_characteristic_counts_cells() {
    // V − E + F over points, arcs and bsegs as edges, polygons as faces,
    // then χ = 2 − 2g − b − p holds with p counting interior points.
    for (name, f) in all_fixtures() {
        let s = &f.surface;
        let t = s.topology().unwrap();
        let chi = s.points.len() as i64 - (s.arcs.len() + s.bsegs.len()) as i64 + s.polygons.len() as i64;
        let interior = s.points.iter().filter(|p| p.kind != PointKind::Boundary).count() as i64;
        assert_eq!(chi - interior, 2 - 2 * t.genus - t.boundary.len() as i64 - interior, "{name}");
    }
}

#[test]
fn unknown_id_is_reported() {
    let text = "surface s\npoint p kind=boundary\nbseg b from=p to=p\narc a from=p to=zz\n";
    let e = parse_surface(text).unwrap_err();
    assert!(e.has(Code::UnknownId), "{e}");
    assert_eq!(e.diagnostics[0].line, Some(4));
}

#[test]
fn syntax_error_carries_line() {
    let e = parse_surface("surface s\npoint p kind=boundary\nwobble\n").unwrap_err();
    assert_eq!(e.code(), Code::Syntax);
    assert_eq!(e.diagnostics[0].line, Some(3));
}

#[test]
fn arc_used_once_is_rejected() {
    let e = SurfaceBuilder::new("s")
        .point("p", PointKind::Boundary)
        .point("q", PointKind::Boundary)
        .bseg("b1", "p", "q")
        .bseg("b2", "q", "p")
        .arc("a", "p", "q")
        .poly("P1", &["b:b1", "a:a:-"])
        .poly("P2", &["b:b2"])
        .build()
        .unwrap_err();
    assert!(e.has(Code::ArcOccurrence), "{e}");
}

#[test]
fn two_boundary_segments_in_a_polygon_are_rejected() {
    let e = SurfaceBuilder::new("s")
        .point("p", PointKind::Boundary)
        .point("q", PointKind::Boundary)
        .bseg("b1", "p", "q")
        .bseg("b2", "q", "p")
        .poly("P", &["b:b1", "b:b2"])
        .build()
        .unwrap_err();
    assert!(e.has(Code::MultipleBseg), "{e}");
}

#[test]
fn same_direction_gluing_is_nonorientable() {
    let e = SurfaceBuilder::new("s")
        .point("p", PointKind::Boundary)
        .point("q", PointKind::Boundary)
        .bseg("b1", "p", "q")
        .bseg("b2", "q", "p")
        .arc("a", "p", "q")
        .poly("P1", &["b:b1", "a:a:+"])
        .poly("P2", &["b:b2", "a:a:+"])
        .build()
        .unwrap_err();
    assert!(e.has(Code::NonorientableGluing) || e.has(Code::CornerMismatch), "{e}");
}

#[test]
fn involution_must_square_to_identity() {
    let f = fixture("disc8_sym");
    let mut involution = f.involution.clone().unwrap();
    involution.points.swap(0, 1);
    let e = validate_involution(&f.surface, &involution).unwrap_err();
    assert!(e.has(Code::NotOrderTwo) || e.has(Code::IncompatibleMap), "{e}");
}

#[test]
fn surface_iso_finds_relabeling_and_rejects_different_surfaces() {
    let a = fixture("cyl_d1").surface;
    assert!(find_surface_iso(&a, &a).is_some());
    let text = print_surface(&fixture("cyl_d1")).replace("arc 1 ", "arc one ").replace("a:1:", "a:one:");
    let renamed = parse_surface(&text).unwrap().surface;
    assert!(find_surface_iso(&a, &renamed).is_some());
    assert!(find_surface_iso(&a, &fixture("cyl_d3").surface).is_none());
}

#[test]
fn rotation_degrees_match_arc_end_counts() {
    for (name, f) in all_fixtures() {
        let s = &f.surface;
        let rots = s.rotation_system().unwrap();
        let counts = s.arc_end_counts();
        for (p, r) in rots.iter().enumerate() {
            assert_eq!(r.ends.len(), counts[p], "{name} point {p}");
            let corners = if r.cyclic { r.ends.len() } else { r.ends.len().saturating_sub(1) };
            assert_eq!(r.corners.len(), corners, "{name} point {p}");
        }
    }
}
