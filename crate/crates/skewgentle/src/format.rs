//! Line-oriented surface file format.
//!
//! ```text
//! surface NAME
//! point ID kind=boundary|puncture|orbifold
//! bseg ID from=P to=Q
//! arc ID from=P to=Q
//! poly ID sides=b:ID,a:ID:+,a:ID:-,...
//! involution points P<->Q ... arcs A<->B C~rev D<->E~rev ...
//! curve ID closed|open passages=(POLY,ENTRY,EXIT,left|right);...
//! ```
//!
//! `#` starts a comment. Passage slots are polygon word indices; `g` marks the
//! green point on the boundary segment (endpoints of open curves).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Code, Diagnostic, Error, Result};
use crate::linefield::{BsegSide, CombinatorialCurve, Passage, SlotRef};
use crate::surface::{DissectedSurface, PointKind, Side, SideSpec, SurfaceBuilder, SurfaceInvolution};

/// A parsed surface file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceFile {
    pub surface: DissectedSurface,
    pub involution: Option<SurfaceInvolution>,
    pub curves: Vec<(String, CombinatorialCurve)>,
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Diagnostic::new(Code::Syntax, format!("line {line}"), msg).at_line(line).into()
}

fn keyvals<'a>(toks: &[&'a str], line: usize) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut m = BTreeMap::new();
    for t in toks {
        let (k, v) = t.split_once('=').ok_or_else(|| syntax(line, format!("expected key=value, got `{t}`")))?;
        m.insert(k, v);
    }
    Ok(m)
}

fn need<'a>(m: &BTreeMap<&str, &'a str>, k: &str, line: usize) -> Result<&'a str> {
    m.get(k).copied().ok_or_else(|| syntax(line, format!("missing `{k}=`")))
}

struct RawCurve {
    id: String,
    closed: bool,
    passages: Vec<(String, String, String, Option<String>)>,
    line: usize,
}

/// Parse and validate a surface file.
pub fn parse_surface(text: &str) -> Result<SurfaceFile> {
    let mut builder: Option<SurfaceBuilder> = None;
    let mut inv_points: Vec<(String, String, usize)> = Vec::new();
    let mut inv_arcs: Vec<(String, String, bool, usize)> = Vec::new();
    let mut raw_curves: Vec<RawCurve> = Vec::new();
    let mut has_involution = false;
    // (id, kind) of declarations and (id, acceptable kinds, line) of references
    let mut declared: Vec<(String, &str)> = Vec::new();
    let mut references: Vec<(String, &[&str], usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let kw = toks[0];
        if kw != "surface" && builder.is_none() {
            return Err(syntax(line, "file must start with `surface NAME`"));
        }
        match kw {
            "surface" => {
                if toks.len() != 2 || builder.is_some() {
                    return Err(syntax(line, "expected a single `surface NAME` declaration"));
                }
                builder = Some(SurfaceBuilder::new(toks[1]));
            }
            "point" => {
                if toks.len() != 3 {
                    return Err(syntax(line, "expected `point ID kind=...`"));
                }
                let kv = keyvals(&toks[2..], line)?;
                let kind = match need(&kv, "kind", line)? {
                    "boundary" => PointKind::Boundary,
                    "puncture" => PointKind::Puncture,
                    "orbifold" => PointKind::Orbifold,
                    k => return Err(syntax(line, format!("unknown point kind `{k}`"))),
                };
                builder.as_mut().unwrap().point(toks[1], kind);
                declared.push((toks[1].to_string(), "point"));
            }
            "bseg" | "arc" => {
                if toks.len() != 4 {
                    return Err(syntax(line, format!("expected `{kw} ID from=P to=Q`")));
                }
                let kv = keyvals(&toks[2..], line)?;
                let (f, t) = (need(&kv, "from", line)?, need(&kv, "to", line)?);
                declared.push((toks[1].to_string(), if kw == "bseg" { "bseg" } else { "arc" }));
                references.push((f.to_string(), &["point"], line));
                references.push((t.to_string(), &["point"], line));
                let b = builder.as_mut().unwrap();
                if kw == "bseg" {
                    b.bseg(toks[1], f, t);
                } else {
                    b.arc(toks[1], f, t);
                }
            }
            "poly" => {
                if toks.len() != 3 {
                    return Err(syntax(line, "expected `poly ID sides=...`"));
                }
                let kv = keyvals(&toks[2..], line)?;
                let sides = need(&kv, "sides", line)?
                    .split(',')
                    .map(|s| SideSpec::parse(s).ok_or_else(|| syntax(line, format!("bad side `{s}`"))))
                    .collect::<Result<Vec<_>>>()?;
                for side in &sides {
                    match side {
                        SideSpec::Bseg(b) => references.push((b.clone(), &["bseg"], line)),
                        SideSpec::Arc(a, _) => references.push((a.clone(), &["arc"], line)),
                    }
                }
                builder.as_mut().unwrap().polygon(toks[1], sides);
            }
            "involution" => {
                has_involution = true;
                let mut mode = "";
                for t in &toks[1..] {
                    match *t {
                        "points" | "arcs" => mode = t,
                        _ if mode == "points" => {
                            let (a, b) = t.split_once("<->").ok_or_else(|| syntax(line, format!("bad point pair `{t}`")))?;
                            inv_points.push((a.to_string(), b.to_string(), line));
                        }
                        _ if mode == "arcs" => {
                            let (body, rev) = match t.strip_suffix("~rev") {
                                Some(b) => (b, true),
                                None => (*t, false),
                            };
                            match body.split_once("<->") {
                                Some((a, b)) => inv_arcs.push((a.to_string(), b.to_string(), rev, line)),
                                None if rev => inv_arcs.push((body.to_string(), body.to_string(), true, line)),
                                None => return Err(syntax(line, format!("bad arc entry `{t}`"))),
                            }
                        }
                        _ => return Err(syntax(line, "expected `points` or `arcs` section")),
                    }
                }
            }
            "curve" => {
                if toks.len() != 4 {
                    return Err(syntax(line, "expected `curve ID closed|open passages=...`"));
                }
                let closed = match toks[2] {
                    "closed" => true,
                    "open" => false,
                    k => return Err(syntax(line, format!("expected closed|open, got `{k}`"))),
                };
                let kv = keyvals(&toks[3..], line)?;
                let mut passages = Vec::new();
                for chunk in need(&kv, "passages", line)?.split(';').filter(|c| !c.is_empty()) {
                    let inner = chunk
                        .strip_prefix('(')
                        .and_then(|c| c.strip_suffix(')'))
                        .ok_or_else(|| syntax(line, format!("bad passage `{chunk}`")))?;
                    let f: Vec<&str> = inner.split(',').collect();
                    if f.len() != 3 && f.len() != 4 {
                        return Err(syntax(line, format!("bad passage `{chunk}`")));
                    }
                    passages.push((f[0].to_string(), f[1].to_string(), f[2].to_string(), f.get(3).map(|s| s.to_string())));
                }
                raw_curves.push(RawCurve { id: toks[1].to_string(), closed, passages, line });
            }
            _ => return Err(syntax(line, format!("unknown declaration `{kw}`"))),
        }
    }
    let builder = builder.ok_or_else(|| syntax(1, "empty file"))?;
    for (id, kinds, line) in &references {
        if !declared.iter().any(|(d, k)| d == id && kinds.contains(k)) {
            return Err(unknown(id, *line));
        }
    }
    let surface = builder.build()?;
    surface.ensure_valid()?;

    let involution = if has_involution {
        let mut points: Vec<usize> = (0..surface.points.len()).collect();
        for (a, b, line) in &inv_points {
            let ia = surface.point_index(a).ok_or_else(|| unknown(a, *line))?;
            let ib = surface.point_index(b).ok_or_else(|| unknown(b, *line))?;
            points[ia] = ib;
            points[ib] = ia;
        }
        let mut arcs: Vec<usize> = (0..surface.arcs.len()).collect();
        let mut rev = vec![false; surface.arcs.len()];
        for (a, b, r, line) in &inv_arcs {
            let ia = surface.arc_index(a).ok_or_else(|| unknown(a, *line))?;
            let ib = surface.arc_index(b).ok_or_else(|| unknown(b, *line))?;
            arcs[ia] = ib;
            arcs[ib] = ia;
            rev[ia] = *r;
            rev[ib] = *r;
        }
        let involution = SurfaceInvolution::induce(&surface, points, arcs, rev)?;
        crate::surface::validate_involution(&surface, &involution)?;
        Some(involution)
    } else {
        None
    };

    let mut curves = Vec::new();
    for rc in raw_curves {
        let mut passages = Vec::new();
        for (poly, entry, exit, side) in &rc.passages {
            let polygon = surface.polygon_index(poly).ok_or_else(|| unknown(poly, rc.line))?;
            let slot = |s: &str| -> Result<SlotRef> {
                if s == "g" {
                    Ok(SlotRef::Green)
                } else {
                    s.parse::<usize>().map(SlotRef::Slot).map_err(|_| syntax(rc.line, format!("bad slot `{s}`")))
                }
            };
            let side = match side.as_deref() {
                None | Some("-") => None,
                Some("left") => Some(BsegSide::Left),
                Some("right") => Some(BsegSide::Right),
                Some(s) => return Err(syntax(rc.line, format!("bad side flag `{s}`"))),
            };
            passages.push(Passage { polygon, entry: slot(entry)?, exit: slot(exit)?, side });
        }
        let curve = CombinatorialCurve { closed: rc.closed, passages };
        curve.validate(&surface).map_err(|e| {
            Error::from_diagnostics(e.diagnostics.into_iter().map(|d| d.at_line(rc.line)).collect())
        })?;
        curves.push((rc.id, curve));
    }
    Ok(SurfaceFile { surface, involution, curves })
}

fn unknown(id: &str, line: usize) -> Error {
    Diagnostic::new(Code::UnknownId, id, "unknown id").at_line(line).into()
}

/// Canonical text form; `parse_surface(print_surface(f)) == f`.
pub fn print_surface(file: &SurfaceFile) -> String {
    let s = &file.surface;
    let mut out = String::new();
    let _ = writeln!(out, "surface {}", s.name);
    for p in &s.points {
        let _ = writeln!(out, "point {} kind={}", p.id, p.kind.as_str());
    }
    for b in &s.bsegs {
        let _ = writeln!(out, "bseg {} from={} to={}", b.id, s.points[b.tail].id, s.points[b.head].id);
    }
    for a in &s.arcs {
        let _ = writeln!(out, "arc {} from={} to={}", a.id, s.points[a.tail].id, s.points[a.head].id);
    }
    for p in &s.polygons {
        let sides: Vec<String> = p
            .sides
            .iter()
            .map(|side| match *side {
                Side::Bseg(b) => format!("b:{}", s.bsegs[b].id),
                Side::Arc { arc, forward } => format!("a:{}:{}", s.arcs[arc].id, if forward { "+" } else { "-" }),
            })
            .collect();
        let _ = writeln!(out, "poly {} sides={}", p.id, sides.join(","));
    }
    if let Some(involution) = &file.involution {
        let pts: Vec<String> = (0..s.points.len())
            .filter(|&i| involution.points[i] > i)
            .map(|i| format!("{}<->{}", s.points[i].id, s.points[involution.points[i]].id))
            .collect();
        let arcs: Vec<String> = (0..s.arcs.len())
            .filter(|&i| involution.arcs[i] >= i)
            .map(|i| {
                let j = involution.arcs[i];
                let r = if involution.arc_reversed[i] { "~rev" } else { "" };
                if i == j {
                    format!("{}{}", s.arcs[i].id, r)
                } else {
                    format!("{}<->{}{}", s.arcs[i].id, s.arcs[j].id, r)
                }
            })
            .collect();
        let _ = writeln!(out, "involution points {} arcs {}", pts.join(" "), arcs.join(" "));
    }
    for (id, c) in &file.curves {
        let ps: Vec<String> = c
            .passages
            .iter()
            .map(|p| {
                let slot = |r: SlotRef| match r {
                    SlotRef::Green => "g".to_string(),
                    SlotRef::Slot(k) => k.to_string(),
                };
                let side = match p.side {
                    Some(BsegSide::Left) => "left",
                    Some(BsegSide::Right) => "right",
                    None => "-",
                };
                format!("({},{},{},{})", s.polygons[p.polygon].id, slot(p.entry), slot(p.exit), side)
            })
            .collect();
        let _ = writeln!(out, "curve {} {} passages={}", id, if c.closed { "closed" } else { "open" }, ps.join(";"));
    }
    out
}

/// Shipped fixture files, by name.
pub mod fixtures {
    pub const DISC: &str = include_str!("../fixtures/disc.surf");
    pub const DISC_ONE_X: &str = include_str!("../fixtures/disc_one_x.surf");
    pub const DISC_TWO_X: &str = include_str!("../fixtures/disc_two_x.surf");
    pub const DISC8_SYM: &str = include_str!("../fixtures/disc8_sym.surf");
    pub const TORUS_SYM: &str = include_str!("../fixtures/torus_sym.surf");
    pub const CYL_D1: &str = include_str!("../fixtures/cyl_d1.surf");
    pub const CYL_D2: &str = include_str!("../fixtures/cyl_d2.surf");
    pub const CYL_D3: &str = include_str!("../fixtures/cyl_d3.surf");
    pub const CYL_D4: &str = include_str!("../fixtures/cyl_d4.surf");

    pub const ALL: &[(&str, &str)] = &[
        ("disc", DISC),
        ("disc_one_x", DISC_ONE_X),
        ("disc_two_x", DISC_TWO_X),
        ("disc8_sym", DISC8_SYM),
        ("torus_sym", TORUS_SYM),
        ("cyl_d1", CYL_D1),
        ("cyl_d2", CYL_D2),
        ("cyl_d3", CYL_D3),
        ("cyl_d4", CYL_D4),
    ];

    /// Parse a shipped fixture (panics on a broken fixture).
    pub fn load(text: &str) -> super::SurfaceFile {
        super::parse_surface(text).expect("shipped fixture parses")
    }
}
