//! Command dispatch: each subcommand reads surface files, runs one module
//! operation and produces a JSON report (or DOT text) plus an exit status.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use num_traits::One;

use crate::algebra::{PathQuotient, Scalar};
use crate::covering::{double_cover, quotient};
use crate::equivariant::{basic_skew_group, induced_involution, verify_cover_map, verify_endomorphism_iso};
use crate::error::{Code, Error, Result};
use crate::format::{parse_surface, print_surface, SurfaceFile};
use crate::linefield::{
    boundary_curve, build_complex, cover_invariant_tuple, decide_cover_equiv, decide_tilting_equiv, grading_solver,
    invariant_tuple, puncture_loop, verify_d2, winding, Anchor, GradedArc, GradingOutcome, Verdict,
};
use crate::presentations::{
    check_gentle, check_skew_gentle, deform, quiver_from_dissection, split, triple_from_x_dissection, Presentation,
};
use crate::surface::{DissectedSurface, PointKind};

#[derive(Debug, Parser)]
#[command(name = "skewgentle", version, about = "Dissected surfaces, orbifolds and skew-gentle algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareMode {
    Tilting,
    /// Necessary conditions on canonical covers (accepted as `ghat` or `cover`).
    #[value(name = "ghat", alias = "cover")]
    Cover,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a surface file; report topology and dissection kind.
    Validate { file: PathBuf },
    /// Quiver with relations (gentle pair or skew-gentle triple) of the dissection.
    Quiver { file: PathBuf },
    /// Split presentation of a ✗-dissection's skew-gentle triple.
    Split { file: PathBuf },
    /// Canonical double cover of a ✗-dissection.
    Cover {
        file: PathBuf,
        /// Write the cover as a surface file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quotient of a surface by its declared involution.
    Quotient {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Skew group algebra checks: the corner isomorphism for surfaces with an
    /// involution, the cover isomorphism for ✗-dissections.
    Skewgroup { file: PathBuf },
    /// Invariant tuple (and cover invariants for ✗-dissections).
    Invariants { file: PathBuf },
    /// Winding numbers of boundary curves, puncture loops and closed curves in the file.
    Winding { file: PathBuf },
    /// Compare two ✗-dissections.
    Compare {
        #[arg(long, value_enum)]
        mode: CompareMode,
        left: PathBuf,
        right: PathBuf,
    },
    /// Complex of projectives for an open curve of the file, graded from an anchor.
    Complex {
        file: PathBuf,
        #[arg(long)]
        curve: String,
        /// Grade of the first crossing.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        anchor: i64,
    },
    /// Quiver as a DOT digraph; relations are listed as comments.
    ExportDot { file: PathBuf },
}

/// Result of running a command.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Json(Value),
    Text(String),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Json(v) => serde_json::to_string_pretty(v).expect("serializable"),
            Output::Text(t) => t.clone(),
        }
    }
}

fn load(path: &Path) -> Result<SurfaceFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::new(Code::Syntax, path.display().to_string(), format!("cannot read file: {e}")))?;
    parse_surface(&text)
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Presentation with readable arrow names and relation terms.
pub fn presentation_json(p: &Presentation) -> Value {
    let q = &p.quiver;
    let arrows: Vec<Value> = q
        .arrows
        .iter()
        .map(|a| json!({"id": a.id, "source": q.vertices[a.source], "target": q.vertices[a.target]}))
        .collect();
    let relations: Vec<Value> = p
        .relations
        .iter()
        .map(|r| {
            Value::Array(
                r.terms
                    .iter()
                    .map(|(c, path)| {
                        let names: Vec<&str> = path.iter().map(|&a| q.arrows[a].id.as_str()).collect();
                        json!({"coefficient": c.to_string(), "path": names})
                    })
                    .collect(),
            )
        })
        .collect();
    let special: Vec<&str> = p.special.iter().map(|&a| q.arrows[a].id.as_str()).collect();
    json!({"vertices": q.vertices, "arrows": arrows, "relations": relations, "special": special})
}

fn has_orbifold(s: &DissectedSurface) -> bool {
    s.points.iter().any(|p| p.kind == PointKind::Orbifold)
}

/// Displayed presentation, the presentation of the algebra itself (special
/// loops idempotent) and gentleness diagnostics.
pub fn presentation_of(s: &DissectedSurface) -> Result<(Presentation, Presentation, Vec<crate::error::Diagnostic>)> {
    if has_orbifold(s) {
        let (t, _) = triple_from_x_dissection(s)?;
        let diags = check_skew_gentle(&t);
        Ok((t.presentation(), deform(&t, &Scalar::one()), diags))
    } else {
        let dq = quiver_from_dissection(s)?;
        let diags = check_gentle(&dq.pair);
        let p = dq.pair.presentation();
        Ok((p.clone(), p, diags))
    }
}

pub fn surface_summary(s: &DissectedSurface) -> Result<Value> {
    let topo = s.topology()?;
    let class = s.classify_dissection()?;
    Ok(json!({"name": s.name, "kind": to_json(&class.kind), "topology": to_json(&topo)}))
}

fn write_out(out: &Option<PathBuf>, file: &SurfaceFile) -> Result<()> {
    if let Some(path) = out {
        std::fs::write(path, print_surface(file))
            .map_err(|e| Error::new(Code::Syntax, path.display().to_string(), format!("cannot write file: {e}")))?;
    }
    Ok(())
}

pub fn dot(p: &Presentation) -> String {
    let q = &p.quiver;
    let mut out = String::from("digraph quiver {\n");
    for (i, v) in q.vertices.iter().enumerate() {
        out.push_str(&format!("  v{i} [label=\"{v}\"];\n"));
    }
    for (i, a) in q.arrows.iter().enumerate() {
        let style = if p.special.contains(&i) { ", style=bold, color=red" } else { "" };
        out.push_str(&format!("  v{} -> v{} [label=\"{}\"{style}];\n", a.source, a.target, a.id));
    }
    for r in &p.relations {
        let terms: Vec<String> = r
            .terms
            .iter()
            .map(|(c, path)| {
                let names: Vec<&str> = path.iter().rev().map(|&a| q.arrows[a].id.as_str()).collect();
                format!("{c}*{}", names.join("."))
            })
            .collect();
        out.push_str(&format!("  // relation: {} = 0\n", terms.join(" + ")));
    }
    out.push_str("}\n");
    out
}

/// Run one command; errors become the caller's exit status 2.
pub fn execute(command: &Command) -> Result<(Output, i32)> {
    let ok = |v: Value| Ok((Output::Json(v), 0));
    match command {
        Command::Validate { file } => {
            let f = load(file)?;
            let mut report = surface_summary(&f.surface)?;
            report["valid"] = json!(true);
            report["involution"] = json!(f.involution.is_some());
            report["curves"] = json!(f.curves.iter().map(|(id, _)| id).collect::<Vec<_>>());
            ok(report)
        }
        Command::Quiver { file } => {
            let f = load(file)?;
            let (p, algebra, diags) = presentation_of(&f.surface)?;
            let dim = PathQuotient::new(&algebra)?.dim();
            ok(json!({"presentation": presentation_json(&p), "diagnostics": to_json(&diags), "dimension": dim}))
        }
        Command::Split { file } => {
            let f = load(file)?;
            let (t, _) = triple_from_x_dissection(&f.surface)?;
            let sp = split(&t)?;
            let p = sp.presentation();
            let dim = PathQuotient::new(&p)?.dim();
            ok(json!({
                "presentation": presentation_json(&p),
                "two_term_relations": sp.two_term_relations(),
                "dimension": dim,
            }))
        }
        Command::Cover { file, out } => {
            let f = load(file)?;
            let (cover, involution, proj) = double_cover(&f.surface)?;
            let cf = SurfaceFile { surface: cover, involution: Some(involution), curves: Vec::new() };
            write_out(out, &cf)?;
            ok(json!({
                "cover": surface_summary(&cf.surface)?,
                "branch_points": proj.branch_points.iter().map(|&p| f.surface.points[p].id.clone()).collect::<Vec<_>>(),
                "surface_file": print_surface(&cf),
            }))
        }
        Command::Quotient { file, out } => {
            let f = load(file)?;
            let involution = f.involution.as_ref().ok_or_else(|| {
                Error::new(Code::BadInvolution, f.surface.name.clone(), "file declares no involution")
            })?;
            let (q, _) = quotient(&f.surface, involution)?;
            let qf = SurfaceFile { surface: q, involution: None, curves: Vec::new() };
            write_out(out, &qf)?;
            ok(json!({"quotient": surface_summary(&qf.surface)?, "surface_file": print_surface(&qf)}))
        }
        Command::Skewgroup { file } => {
            let f = load(file)?;
            let s = &f.surface;
            if let Some(involution) = &f.involution {
                let (q, proj) = quotient(s, involution)?;
                let b = basic_skew_group(s, involution, &q, &proj)?;
                let inv = induced_involution(s, involution, &b.cover_quiver)?;
                let rr = verify_endomorphism_iso(&b.cover_algebra, &inv)?;
                ok(json!({
                    "algebra_dim": b.cover_algebra.dim(),
                    "skew_group_dim": b.skew.algebra.dim(),
                    "basic_corner_dim": b.corner.algebra.dim(),
                    "quotient_split_dim": b.split_algebra.dim(),
                    "corner_map": to_json(&b.corner_map),
                    "corner_map_isomorphism": b.corner_map.is_isomorphism(),
                    "endomorphism_check": to_json(&rr),
                }))
            } else if has_orbifold(s) {
                let d = verify_cover_map(s)?;
                ok(json!({
                    "cover_algebra_dim": d.cover_algebra.dim(),
                    "skew_group_dim": d.skew.algebra.dim(),
                    "basic_corner_dim": d.corner.algebra.dim(),
                    "cover_map": to_json(&d.cover_map),
                    "cover_map_isomorphism": d.cover_map.is_isomorphism(),
                }))
            } else {
                Err(Error::new(Code::BadInvolution, s.name.clone(), "needs an involution or orbifold points"))
            }
        }
        Command::Invariants { file } => {
            let f = load(file)?;
            let s = &f.surface;
            let mut report = json!({"tuple": to_json(&invariant_tuple(s)?)});
            if has_orbifold(s) {
                report["cover"] = to_json(&cover_invariant_tuple(s)?);
            }
            ok(report)
        }
        Command::Winding { file } => {
            let f = load(file)?;
            let s = &f.surface;
            let topo = s.topology()?;
            let boundary: Vec<i64> =
                (0..topo.boundary.len()).map(|i| winding(s, &boundary_curve(s, i)?)).collect::<Result<_>>()?;
            let mut interior = serde_json::Map::new();
            for (p, pt) in s.points.iter().enumerate() {
                if pt.kind != PointKind::Boundary {
                    interior.insert(pt.id.clone(), json!(winding(s, &puncture_loop(s, p)?)?));
                }
            }
            let mut curves = serde_json::Map::new();
            for (id, c) in f.curves.iter().filter(|(_, c)| c.closed) {
                curves.insert(id.clone(), json!(winding(s, c)?));
            }
            ok(json!({"boundary": boundary, "interior_points": interior, "curves": curves}))
        }
        Command::Compare { mode, left, right } => {
            let (a, b) = (load(left)?, load(right)?);
            let report = match mode {
                CompareMode::Tilting => decide_tilting_equiv(&a.surface, &b.surface)?,
                CompareMode::Cover => decide_cover_equiv(&a.surface, &b.surface)?,
            };
            let code = if report.verdict == Verdict::NotEquivalent { 1 } else { 0 };
            Ok((Output::Json(to_json(&report)), code))
        }
        Command::Complex { file, curve, anchor } => {
            let f = load(file)?;
            let s = f.surface.orbifold_points_as_punctures();
            let c = f
                .curves
                .iter()
                .find(|(id, _)| id == curve)
                .map(|(_, c)| c.clone())
                .ok_or_else(|| Error::new(Code::UnknownId, curve.clone(), "no such curve"))?;
            let outcome = grading_solver(&s, std::slice::from_ref(&c), &[Anchor { curve: 0, crossing: 0, value: *anchor }], &[])?;
            let GradingOutcome::Consistent(grades) = outcome else {
                return ok(json!({"grading": to_json(&outcome)}));
            };
            let dq = quiver_from_dissection(&s)?;
            let pq = PathQuotient::new(&dq.pair.presentation())?;
            let garc = GradedArc { curve: c, grades: grades[0].clone() };
            let cx = build_complex(&s, &dq, &garc)?;
            let q = &dq.pair.quiver;
            let summands: Vec<Value> =
                cx.summands.iter().map(|m| json!({"vertex": q.vertices[m.vertex], "shift": m.shift})).collect();
            let entries: Vec<Value> = cx
                .entries
                .iter()
                .map(|e| {
                    let names: Vec<&str> = e.path.iter().map(|&a| q.arrows[a].id.as_str()).collect();
                    json!({"row": e.row, "col": e.col, "path": names})
                })
                .collect();
            ok(json!({"grades": garc.grades, "summands": summands, "entries": entries, "d_squared_zero": verify_d2(&cx, &pq)}))
        }
        Command::ExportDot { file } => {
            let f = load(file)?;
            let (p, _, _) = presentation_of(&f.surface)?;
            Ok((Output::Text(dot(&p)), 0))
        }
    }
}

/// Parse-free entry point: run a command and map errors to a JSON report
/// with exit status 2.
pub fn run(command: &Command) -> (Output, i32) {
    match execute(command) {
        Ok(r) => r,
        Err(e) => (Output::Json(json!({"error": e.code().as_str(), "diagnostics": to_json(&e.diagnostics)})), 2),
    }
}
