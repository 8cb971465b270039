use std::path::PathBuf;
use std::process::Command as Process;

use serde_json::Value;
use skewgentle::cli::{execute, run, Command, CompareMode, Output};
use skewgentle::format::parse_surface;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.surf"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("skewgentle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(c: &Command) -> (Value, i32) {
    match run(c) {
        (Output::Json(v), code) => (v, code),
        (Output::Text(t), _) => panic!("unexpected text output {t}"),
    }
}

#[test]
fn validate_reports_topology() {
    let (v, code) = json(&Command::Validate { file: fixture_path("cyl_d1") });
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true);
    assert_eq!(v["topology"]["genus"], 0, "{v}");
}

#[test]
fn quiver_and_split_dimensions() {
    let (v, _) = json(&Command::Quiver { file: fixture_path("torus_sym") });
    assert_eq!(v["dimension"], 20);
    let (v, _) = json(&Command::Split { file: fixture_path("cyl_d1") });
    assert_eq!(v["dimension"], 20);
    assert_eq!(v["two_term_relations"], 4);
}

#[test]
fn cover_output_round_trips_through_the_parser() {
    let out = scratch("cover.surf");
    let (v, code) = json(&Command::Cover { file: fixture_path("cyl_d3"), out: Some(out.clone()) });
    assert_eq!(code, 0);
    assert_eq!(v["cover"]["topology"]["genus"], 1, "{v}");
    let cover = parse_surface(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(cover.involution.is_some());
    let (q, code) = json(&Command::Quotient { file: out, out: None });
    assert_eq!(code, 0);
    assert_eq!(q["quotient"]["topology"]["orbifold_points"], 2, "{q}");
}

#[test]
fn quotient_needs_an_involution() {
    let (v, code) = json(&Command::Quotient { file: fixture_path("disc"), out: None });
    assert_eq!(code, 2);
    assert_eq!(v["error"], "BAD_INVOLUTION");
}

#[test]
fn skewgroup_checks_both_directions() {
    let (v, _) = json(&Command::Skewgroup { file: fixture_path("torus_sym") });
    assert_eq!(v["corner_map_isomorphism"], true);
    assert_eq!(v["skew_group_dim"], 40);
    let (v, _) = json(&Command::Skewgroup { file: fixture_path("cyl_d4") });
    assert_eq!(v["cover_map_isomorphism"], true);
}

#[test]
fn invariants_and_windings() {
    let (v, _) = json(&Command::Invariants { file: fixture_path("cyl_d2") });
    assert_eq!(v["cover"]["genus"], 0);
    let (v, _) = json(&Command::Winding { file: fixture_path("cyl_d1") });
    assert_eq!(v["interior_points"]["x2"], -1);
    let mut b: Vec<i64> = v["boundary"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
    b.sort_unstable();
    assert_eq!(b, vec![-2, 0]);
}

#[test]
fn compare_exit_codes() {
    let cmp = |mode, a: &str, b: &str| execute(&Command::Compare { mode, left: fixture_path(a), right: fixture_path(b) });
    let (out, code) = cmp(CompareMode::Tilting, "cyl_d1", "cyl_d4").unwrap();
    assert_eq!(code, 0);
    assert!(out.render().contains("\"EQUIVALENT\""));
    assert_eq!(cmp(CompareMode::Tilting, "cyl_d1", "cyl_d2").unwrap().1, 1);
    assert_eq!(cmp(CompareMode::Cover, "cyl_d1", "cyl_d2").unwrap().1, 1);
}

#[test]
fn complex_for_declared_curve() {
    let mut text = std::fs::read_to_string(fixture_path("cyl_d1")).unwrap();
    text.push_str("curve long open passages=(U,g,2);(L,6,5);(L,4,3);(L,2,g)\n");
    text.push_str("curve short open passages=(U,g,1);(L,1,g)\n");
    let path = scratch("cyl_curves.surf");
    std::fs::write(&path, text).unwrap();
    let (v, code) = json(&Command::Complex { file: path.clone(), curve: "long".into(), anchor: 3 });
    assert_eq!(code, 0);
    assert_eq!(v["grades"], serde_json::json!([3, 2, 1]));
    assert_eq!(v["d_squared_zero"], true);
    let (v, code) = json(&Command::Complex { file: path, curve: "missing".into(), anchor: 0 });
    assert_eq!(code, 2);
    assert_eq!(v["error"], "UNKNOWN_ID");
}

#[test]
fn dot_export_is_a_digraph() {
    let (out, code) = execute(&Command::ExportDot { file: fixture_path("cyl_d1") }).unwrap();
    assert_eq!(code, 0);
    let Output::Text(t) = out else { panic!("expected text") };
    assert!(t.starts_with("digraph"));
    assert!(t.trim_end().ends_with('}'));
    assert_eq!(t.matches("->").count(), 6);
    assert_eq!(t.matches("// relation:").count(), 2);
}

#[test]
fn missing_file_is_an_error() {
    let (v, code) = json(&Command::Validate { file: scratch("does-not-exist.surf") });
    assert_eq!(code, 2);
    assert!(v["error"].is_string());
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_skewgentle");
    let st = Process::new(bin).args(["compare", "--mode", "ghat"]).arg(fixture_path("cyl_d1")).arg(fixture_path("cyl_d2")).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&st.stdout).unwrap();
    assert_eq!(v["verdict"], "NOT_EQUIVALENT");
    let st = Process::new(bin).args(["validate"]).arg(fixture_path("disc")).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
}
