//! Combinatorial dissected surfaces and orbifolds.
//!
//! A surface is stored as a gluing of polygons. Every polygon word is read
//! with the interior on the left and contains exactly one boundary segment;
//! every arc appears twice, once in each direction. Rotation systems,
//! boundary components and topology are derived from the polygon words.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{check, Code, Diagnostic, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Boundary,
    Puncture,
    Orbifold,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::Boundary => "boundary",
            PointKind::Puncture => "puncture",
            PointKind::Orbifold => "orbifold",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPoint {
    pub id: String,
    pub kind: PointKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

/// Boundary segment, oriented with the interior on its left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySegment {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Bseg(usize),
    Arc { arc: usize, forward: bool },
}

impl Side {
    pub fn arc(self) -> Option<usize> {
        match self {
            Side::Arc { arc, .. } => Some(arc),
            Side::Bseg(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polygon {
    pub id: String,
    pub sides: Vec<Side>,
}

/// One end of an arc: `head == false` is the tail end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcEnd {
    pub arc: usize,
    pub head: bool,
}

/// The corner of `polygon` between sides `slot` and `slot + 1` (cyclically).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corner {
    pub polygon: usize,
    pub slot: usize,
}

/// Order of arc-ends around a point. Boundary points give a linear order
/// running from the incoming to the outgoing boundary segment; interior
/// points give a cyclic order. `corners[i]` sits between `ends[i]` and
/// `ends[i + 1]` (cyclically for interior points).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rotation {
    pub point: usize,
    pub ends: Vec<ArcEnd>,
    pub corners: Vec<Corner>,
    pub cyclic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryComponent {
    /// Boundary segments in the order they chain (head of one = tail of next).
    pub bsegs: Vec<usize>,
    /// Tails of the segments, i.e. the marked points in boundary order.
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Topology {
    pub euler_char: i64,
    pub genus: i64,
    pub boundary: Vec<BoundaryComponent>,
    pub punctures: usize,
    pub orbifold_points: usize,
}

impl Topology {
    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DissectionKind {
    Bullet,
    X,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: DissectionKind,
    /// (point id, number of incident arc-ends) for every point.
    pub incidences: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DissectedSurface {
    pub name: String,
    pub points: Vec<MarkedPoint>,
    pub arcs: Vec<Arc>,
    pub bsegs: Vec<BoundarySegment>,
    pub polygons: Vec<Polygon>,
}

impl DissectedSurface {
    pub fn side_tail(&self, s: Side) -> usize {
        match s {
            Side::Bseg(b) => self.bsegs[b].tail,
            Side::Arc { arc, forward: true } => self.arcs[arc].tail,
            Side::Arc { arc, forward: false } => self.arcs[arc].head,
        }
    }

    pub fn side_head(&self, s: Side) -> usize {
        match s {
            Side::Bseg(b) => self.bsegs[b].head,
            Side::Arc { arc, forward: true } => self.arcs[arc].head,
            Side::Arc { arc, forward: false } => self.arcs[arc].tail,
        }
    }

    pub fn side(&self, polygon: usize, slot: usize) -> Side {
        self.polygons[polygon].sides[slot]
    }

    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn arc_index(&self, id: &str) -> Option<usize> {
        self.arcs.iter().position(|a| a.id == id)
    }

    pub fn bseg_index(&self, id: &str) -> Option<usize> {
        self.bsegs.iter().position(|b| b.id == id)
    }

    pub fn polygon_index(&self, id: &str) -> Option<usize> {
        self.polygons.iter().position(|p| p.id == id)
    }

    /// The slot of the (first) boundary segment of a polygon.
    pub fn bseg_slot(&self, polygon: usize) -> Option<usize> {
        self.polygons[polygon].sides.iter().position(|s| matches!(s, Side::Bseg(_)))
    }

    /// Position of `slot` counted from the boundary segment (which has position 0).
    pub fn position(&self, polygon: usize, slot: usize) -> usize {
        let len = self.polygons[polygon].sides.len();
        let b = self.bseg_slot(polygon).unwrap_or(0);
        (slot + len - b) % len
    }

    /// Arc slots of a polygon in order, starting right after its boundary segment.
    pub fn slots_after_bseg(&self, polygon: usize) -> Vec<usize> {
        let len = self.polygons[polygon].sides.len();
        let b = self.bseg_slot(polygon).unwrap_or(0);
        (1..len).map(|i| (b + i) % len).collect()
    }

    /// For every arc, its (forward, backward) occurrences as (polygon, slot).
    pub fn occurrences(&self) -> Vec<[Option<(usize, usize)>; 2]> {
        let mut occ = vec![[None, None]; self.arcs.len()];
        for (pi, p) in self.polygons.iter().enumerate() {
            for (k, s) in p.sides.iter().enumerate() {
                if let Side::Arc { arc, forward } = *s {
                    let idx = if forward { 0 } else { 1 };
                    if arc < occ.len() && occ[arc][idx].is_none() {
                        occ[arc][idx] = Some((pi, k));
                    }
                }
            }
        }
        occ
    }

    /// The other occurrence of the arc found at (polygon, slot).
    pub fn opposite_occurrence(&self, polygon: usize, slot: usize) -> Option<(usize, usize)> {
        let Side::Arc { arc, forward } = self.side(polygon, slot) else { return None };
        for (pi, p) in self.polygons.iter().enumerate() {
            for (k, s) in p.sides.iter().enumerate() {
                if *s == (Side::Arc { arc, forward: !forward }) {
                    return Some((pi, k));
                }
            }
        }
        None
    }

    pub fn start_end(&self, s: Side) -> Option<ArcEnd> {
        match s {
            Side::Arc { arc, forward } => Some(ArcEnd { arc, head: !forward }),
            Side::Bseg(_) => None,
        }
    }

    pub fn finish_end(&self, s: Side) -> Option<ArcEnd> {
        match s {
            Side::Arc { arc, forward } => Some(ArcEnd { arc, head: forward }),
            Side::Bseg(_) => None,
        }
    }

    pub fn end_point(&self, e: ArcEnd) -> usize {
        if e.head {
            self.arcs[e.arc].head
        } else {
            self.arcs[e.arc].tail
        }
    }

    /// Number of arc-ends at every point.
    pub fn arc_end_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.points.len()];
        for a in &self.arcs {
            c[a.tail] += 1;
            c[a.head] += 1;
        }
        c
    }

    /// Structural validation; an empty list means the surface is a valid dissection.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut d = Vec::new();
        let np = self.points.len();
        for a in &self.arcs {
            if a.tail >= np || a.head >= np {
                d.push(Diagnostic::new(Code::UnknownId, &a.id, "arc endpoint out of range"));
            }
        }
        for b in &self.bsegs {
            if b.tail >= np || b.head >= np {
                d.push(Diagnostic::new(Code::UnknownId, &b.id, "segment endpoint out of range"));
                continue;
            }
            for q in [b.tail, b.head] {
                if self.points[q].kind != PointKind::Boundary {
                    d.push(Diagnostic::new(
                        Code::CornerMismatch,
                        &b.id,
                        format!("boundary segment ends at non-boundary point {}", self.points[q].id),
                    ));
                }
            }
        }
        if !d.is_empty() {
            return d;
        }

        // arc occurrences
        let mut fwd = vec![0usize; self.arcs.len()];
        let mut bwd = vec![0usize; self.arcs.len()];
        let mut bseg_count = vec![0usize; self.bsegs.len()];
        for p in &self.polygons {
            let mut nb = 0;
            for s in &p.sides {
                match *s {
                    Side::Arc { arc, forward } => {
                        if arc >= self.arcs.len() {
                            d.push(Diagnostic::new(Code::UnknownId, &p.id, "arc index out of range"));
                            continue;
                        }
                        if forward {
                            fwd[arc] += 1
                        } else {
                            bwd[arc] += 1
                        }
                    }
                    Side::Bseg(b) => {
                        if b >= self.bsegs.len() {
                            d.push(Diagnostic::new(Code::UnknownId, &p.id, "segment index out of range"));
                            continue;
                        }
                        bseg_count[b] += 1;
                        nb += 1;
                    }
                }
            }
            if nb != 1 {
                d.push(Diagnostic::new(
                    Code::MultipleBseg,
                    &p.id,
                    format!("polygon has {nb} boundary segments, expected exactly one"),
                ));
            }
        }
        for (i, a) in self.arcs.iter().enumerate() {
            let (f, b) = (fwd[i], bwd[i]);
            if f + b != 2 {
                d.push(Diagnostic::new(
                    Code::ArcOccurrence,
                    &a.id,
                    format!("arc occurs {} times, expected 2", f + b),
                ));
            } else if f != 1 {
                d.push(Diagnostic::new(
                    Code::NonorientableGluing,
                    &a.id,
                    "arc occurs twice in the same direction",
                ));
            }
        }
        for (i, b) in self.bsegs.iter().enumerate() {
            if bseg_count[i] != 1 {
                d.push(Diagnostic::new(
                    Code::MultipleBseg,
                    &b.id,
                    format!("boundary segment occurs {} times, expected once", bseg_count[i]),
                ));
            }
        }
        if !d.is_empty() {
            return d;
        }

        // corners
        for p in &self.polygons {
            let n = p.sides.len();
            for k in 0..n {
                let (s, t) = (p.sides[k], p.sides[(k + 1) % n]);
                if self.side_head(s) != self.side_tail(t) {
                    d.push(Diagnostic::new(
                        Code::CornerMismatch,
                        &p.id,
                        format!("sides {k} and {} do not meet at a common point", (k + 1) % n),
                    ));
                }
            }
        }
        // boundary points: exactly one incoming and one outgoing segment
        let mut bin = vec![0; np];
        let mut bout = vec![0; np];
        for b in &self.bsegs {
            bout[b.tail] += 1;
            bin[b.head] += 1;
        }
        for (i, pt) in self.points.iter().enumerate() {
            if pt.kind == PointKind::Boundary && (bin[i] != 1 || bout[i] != 1) {
                d.push(Diagnostic::new(
                    Code::CornerMismatch,
                    &pt.id,
                    "boundary point must be the endpoint of exactly two boundary segments",
                ));
            }
        }
        let ends = self.arc_end_counts();
        for (i, pt) in self.points.iter().enumerate() {
            if pt.kind != PointKind::Boundary && ends[i] == 0 {
                d.push(Diagnostic::new(Code::CornerMismatch, &pt.id, "interior point meets no arc"));
            }
        }
        if !d.is_empty() {
            return d;
        }
        // links of points must be connected (manifold condition)
        if let Err(e) = self.compute_rotations() {
            d.extend(e.diagnostics);
        }
        d
    }

    pub fn ensure_valid(&self) -> Result<()> {
        check(self.validate())
    }

    fn compute_rotations(&self) -> Result<Vec<Rotation>> {
        // occurrence finishing at each arc-end
        let mut finishing: HashMap<ArcEnd, (usize, usize)> = HashMap::new();
        for (pi, p) in self.polygons.iter().enumerate() {
            for (k, s) in p.sides.iter().enumerate() {
                if let Some(e) = self.finish_end(*s) {
                    finishing.insert(e, (pi, k));
                }
            }
        }
        // step: from an arc-end at p to the next one (and the corner passed)
        let step = |e: ArcEnd| -> Option<(ArcEnd, Corner)> {
            let (pi, k) = finishing[&e];
            let sides = &self.polygons[pi].sides;
            let next = sides[(k + 1) % sides.len()];
            self.start_end(next).map(|n| (n, Corner { polygon: pi, slot: k }))
        };
        let mut ends_at: Vec<Vec<ArcEnd>> = vec![Vec::new(); self.points.len()];
        for (ai, a) in self.arcs.iter().enumerate() {
            ends_at[a.tail].push(ArcEnd { arc: ai, head: false });
            ends_at[a.head].push(ArcEnd { arc: ai, head: true });
        }
        let mut out = Vec::with_capacity(self.points.len());
        let mut diags = Vec::new();
        for (pi, pt) in self.points.iter().enumerate() {
            let mut rot = Rotation { point: pi, ends: Vec::new(), corners: Vec::new(), cyclic: false };
            if pt.kind == PointKind::Boundary {
                let incoming = self.bsegs.iter().position(|b| b.head == pi).expect("validated");
                let (poly, slot) = self
                    .polygons
                    .iter()
                    .enumerate()
                    .find_map(|(i, p)| p.sides.iter().position(|s| *s == Side::Bseg(incoming)).map(|k| (i, k)))
                    .expect("validated");
                let sides = &self.polygons[poly].sides;
                let mut cur = self.start_end(sides[(slot + 1) % sides.len()]);
                while let Some(e) = cur {
                    if rot.ends.len() > ends_at[pi].len() {
                        break;
                    }
                    rot.ends.push(e);
                    cur = match step(e) {
                        Some((n, c)) => {
                            rot.corners.push(c);
                            Some(n)
                        }
                        None => None,
                    };
                }
            } else if let Some(&start) = ends_at[pi].first() {
                rot.cyclic = true;
                let mut e = start;
                loop {
                    rot.ends.push(e);
                    match step(e) {
                        Some((n, c)) => {
                            rot.corners.push(c);
                            e = n;
                        }
                        None => {
                            diags.push(Diagnostic::new(
                                Code::CornerMismatch,
                                &pt.id,
                                "interior point touches a boundary segment",
                            ));
                            break;
                        }
                    }
                    if e == start || rot.ends.len() > ends_at[pi].len() {
                        break;
                    }
                }
            }
            let seen: BTreeSet<ArcEnd> = rot.ends.iter().copied().collect();
            if seen.len() != rot.ends.len() || seen.len() != ends_at[pi].len() {
                diags.push(Diagnostic::new(
                    Code::CornerMismatch,
                    &pt.id,
                    "corners around the point do not form a single fan (link disconnected)",
                ));
            }
            out.push(rot);
        }
        if diags.is_empty() {
            Ok(out)
        } else {
            Err(Error::from_diagnostics(diags))
        }
    }

    /// Rotation system of every point, in point order.
    pub fn rotation_system(&self) -> Result<Vec<Rotation>> {
        self.ensure_valid()?;
        self.compute_rotations()
    }

    /// Boundary components as cycles of boundary segments, ordered by their
    /// smallest segment index.
    pub fn boundary_components(&self) -> Vec<BoundaryComponent> {
        let mut next = vec![usize::MAX; self.bsegs.len()];
        for (i, b) in self.bsegs.iter().enumerate() {
            if let Some(j) = self.bsegs.iter().position(|c| c.tail == b.head) {
                next[i] = j;
            }
        }
        let mut seen = vec![false; self.bsegs.len()];
        let mut comps = Vec::new();
        for start in 0..self.bsegs.len() {
            if seen[start] {
                continue;
            }
            let mut comp = BoundaryComponent { bsegs: Vec::new(), points: Vec::new() };
            let mut b = start;
            while b != usize::MAX && !seen[b] {
                seen[b] = true;
                comp.bsegs.push(b);
                comp.points.push(self.bsegs[b].tail);
                b = next[b];
            }
            comps.push(comp);
        }
        comps
    }

    fn polygon_components(&self) -> usize {
        let n = self.polygons.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for occ in self.occurrences() {
            if let [Some((a, _)), Some((b, _))] = occ {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }

    /// Euler characteristic, genus and boundary data.
    pub fn topology(&self) -> Result<Topology> {
        self.ensure_valid()?;
        let v = self.points.len() as i64;
        let e = (self.arcs.len() + self.bsegs.len()) as i64;
        let f = self.polygons.len() as i64;
        let euler = v - e + f;
        let boundary = self.boundary_components();
        let b = boundary.len() as i64;
        if self.polygon_components() != 1 {
            return Err(Error::new(Code::BadEuler, &self.name, "surface is not connected"));
        }
        let twice_g = 2 - euler - b;
        if b < 1 || twice_g < 0 || twice_g % 2 != 0 {
            return Err(Error::new(
                Code::BadEuler,
                &self.name,
                format!("euler={euler}, b={b} give no nonnegative integer genus"),
            ));
        }
        Ok(Topology {
            euler_char: euler,
            genus: twice_g / 2,
            boundary,
            punctures: self.points.iter().filter(|p| p.kind == PointKind::Puncture).count(),
            orbifold_points: self.points.iter().filter(|p| p.kind == PointKind::Orbifold).count(),
        })
    }

    /// Decide whether the dissection is a ●- or ✗-dissection.
    pub fn classify_dissection(&self) -> Result<Classification> {
        self.ensure_valid()?;
        let ends = self.arc_end_counts();
        let mut diags = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            if p.kind == PointKind::Orbifold && ends[i] != 1 {
                diags.push(Diagnostic::new(
                    Code::XDegree,
                    &p.id,
                    format!("orbifold point has {} arc-ends, expected 1", ends[i]),
                ));
            }
        }
        check(diags)?;
        let has_x = self.points.iter().any(|p| p.kind == PointKind::Orbifold);
        Ok(Classification {
            kind: if has_x { DissectionKind::X } else { DissectionKind::Bullet },
            incidences: self.points.iter().zip(ends).map(|(p, c)| (p.id.clone(), c)).collect(),
        })
    }

    pub fn is_bullet(&self) -> bool {
        !self.points.iter().any(|p| p.kind == PointKind::Orbifold)
    }

    /// Copy with every orbifold point turned into a puncture.
    pub fn orbifold_points_as_punctures(&self) -> DissectedSurface {
        let mut s = self.clone();
        for p in &mut s.points {
            if p.kind == PointKind::Orbifold {
                p.kind = PointKind::Puncture;
            }
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Builder with string ids

/// Assembles a surface from string ids, resolving references.
#[derive(Debug, Default, Clone)]
pub struct SurfaceBuilder {
    name: String,
    points: Vec<MarkedPoint>,
    arcs: Vec<(String, String, String)>,
    bsegs: Vec<(String, String, String)>,
    polygons: Vec<(String, Vec<SideSpec>)>,
}

/// Unresolved side reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideSpec {
    Bseg(String),
    Arc(String, bool),
}

impl SideSpec {
    /// Parse `b:ID`, `a:ID:+` or `a:ID:-`.
    pub fn parse(s: &str) -> Option<SideSpec> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["b", id] if !id.is_empty() => Some(SideSpec::Bseg(id.to_string())),
            ["a", id, "+"] if !id.is_empty() => Some(SideSpec::Arc(id.to_string(), true)),
            ["a", id, "-"] if !id.is_empty() => Some(SideSpec::Arc(id.to_string(), false)),
            _ => None,
        }
    }
}

impl SurfaceBuilder {
    pub fn new(name: &str) -> Self {
        SurfaceBuilder { name: name.to_string(), ..Default::default() }
    }

    pub fn point(&mut self, id: &str, kind: PointKind) -> &mut Self {
        self.points.push(MarkedPoint { id: id.to_string(), kind });
        self
    }

    pub fn arc(&mut self, id: &str, from: &str, to: &str) -> &mut Self {
        self.arcs.push((id.to_string(), from.to_string(), to.to_string()));
        self
    }

    pub fn bseg(&mut self, id: &str, from: &str, to: &str) -> &mut Self {
        self.bsegs.push((id.to_string(), from.to_string(), to.to_string()));
        self
    }

    pub fn polygon(&mut self, id: &str, sides: Vec<SideSpec>) -> &mut Self {
        self.polygons.push((id.to_string(), sides));
        self
    }

    /// Polygon from the compact side syntax, e.g. `["b:b1", "a:x:+"]`.
    pub fn poly(&mut self, id: &str, sides: &[&str]) -> &mut Self {
        let specs = sides.iter().map(|s| SideSpec::parse(s).expect("side syntax")).collect();
        self.polygon(id, specs)
    }

    pub fn build(&self) -> Result<DissectedSurface> {
        let mut diags = Vec::new();
        let mut dup = BTreeSet::new();
        let pidx: BTreeMap<&str, usize> =
            self.points.iter().enumerate().map(|(i, p)| (p.id.as_str(), i)).collect();
        let aidx: BTreeMap<&str, usize> =
            self.arcs.iter().enumerate().map(|(i, a)| (a.0.as_str(), i)).collect();
        let bidx: BTreeMap<&str, usize> =
            self.bsegs.iter().enumerate().map(|(i, b)| (b.0.as_str(), i)).collect();
        for id in self
            .points
            .iter()
            .map(|p| &p.id)
            .chain(self.arcs.iter().map(|a| &a.0))
            .chain(self.bsegs.iter().map(|b| &b.0))
            .chain(self.polygons.iter().map(|p| &p.0))
        {
            if !dup.insert(id.clone()) {
                diags.push(Diagnostic::new(Code::Syntax, id, "duplicate id"));
            }
        }
        let mut lookup = |map: &BTreeMap<&str, usize>, id: &str, what: &str, owner: &str| -> usize {
            match map.get(id) {
                Some(&i) => i,
                None => {
                    diags.push(Diagnostic::new(Code::UnknownId, id, format!("unknown {what} referenced by {owner}")));
                    usize::MAX
                }
            }
        };
        let arcs: Vec<Arc> = self
            .arcs
            .iter()
            .map(|(id, f, t)| Arc { id: id.clone(), tail: lookup(&pidx, f, "point", id), head: lookup(&pidx, t, "point", id) })
            .collect();
        let bsegs: Vec<BoundarySegment> = self
            .bsegs
            .iter()
            .map(|(id, f, t)| BoundarySegment {
                id: id.clone(),
                tail: lookup(&pidx, f, "point", id),
                head: lookup(&pidx, t, "point", id),
            })
            .collect();
        let polygons: Vec<Polygon> = self
            .polygons
            .iter()
            .map(|(id, sides)| Polygon {
                id: id.clone(),
                sides: sides
                    .iter()
                    .map(|s| match s {
                        SideSpec::Bseg(b) => Side::Bseg(lookup(&bidx, b, "boundary segment", id)),
                        SideSpec::Arc(a, f) => Side::Arc { arc: lookup(&aidx, a, "arc", id), forward: *f },
                    })
                    .collect(),
            })
            .collect();
        check(diags)?;
        let surface = DissectedSurface { name: self.name.clone(), points: self.points.clone(), arcs, bsegs, polygons };
        surface.ensure_valid()?;
        Ok(surface)
    }
}

// ---------------------------------------------------------------------------
// Involutions

/// Order-two symmetry of a surface. `polygon_offset[p]` is the rotation such
/// that side `k` of polygon `p` maps to side `k + offset` of `polygons[p]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceInvolution {
    pub points: Vec<usize>,
    pub arcs: Vec<usize>,
    pub arc_reversed: Vec<bool>,
    pub bsegs: Vec<usize>,
    pub polygons: Vec<usize>,
    pub polygon_offset: Vec<usize>,
}

impl SurfaceInvolution {
    pub fn map_side(&self, s: Side) -> Side {
        match s {
            Side::Bseg(b) => Side::Bseg(self.bsegs[b]),
            Side::Arc { arc, forward } => Side::Arc { arc: self.arcs[arc], forward: forward ^ self.arc_reversed[arc] },
        }
    }

    /// Image of a polygon slot.
    pub fn map_slot(&self, surface: &DissectedSurface, polygon: usize, slot: usize) -> (usize, usize) {
        let q = self.polygons[polygon];
        let len = surface.polygons[q].sides.len();
        (q, (slot + self.polygon_offset[polygon]) % len)
    }

    pub fn map_corner(&self, surface: &DissectedSurface, c: Corner) -> Corner {
        let (polygon, slot) = self.map_slot(surface, c.polygon, c.slot);
        Corner { polygon, slot }
    }

    /// Complete point and arc data to a full involution (segments and polygons
    /// are induced).
    pub fn induce(
        surface: &DissectedSurface,
        points: Vec<usize>,
        arcs: Vec<usize>,
        arc_reversed: Vec<bool>,
    ) -> Result<SurfaceInvolution> {
        let mut diags = Vec::new();
        let mut bsegs = vec![usize::MAX; surface.bsegs.len()];
        for (i, b) in surface.bsegs.iter().enumerate() {
            let (t, h) = (points[b.tail], points[b.head]);
            match surface.bsegs.iter().position(|c| c.tail == t && c.head == h) {
                Some(j) => bsegs[i] = j,
                None => {
                    let code = if surface.bsegs.iter().any(|c| c.tail == h && c.head == t) {
                        Code::OrientationReversed
                    } else {
                        Code::IncompatibleMap
                    };
                    diags.push(Diagnostic::new(code, &b.id, "no boundary segment matches the image"));
                }
            }
        }
        for (i, a) in surface.arcs.iter().enumerate() {
            let img = &surface.arcs[arcs[i]];
            let (t, h) = if arc_reversed[i] { (img.head, img.tail) } else { (img.tail, img.head) };
            if points[a.tail] != t || points[a.head] != h {
                diags.push(Diagnostic::new(
                    Code::IncompatibleMap,
                    &a.id,
                    "arc endpoints do not map to the endpoints of the image arc",
                ));
            }
        }
        check(diags)?;
        let mut involution = SurfaceInvolution {
            points,
            arcs,
            arc_reversed,
            bsegs,
            polygons: vec![usize::MAX; surface.polygons.len()],
            polygon_offset: vec![0; surface.polygons.len()],
        };
        let mut diags = Vec::new();
        for (pi, p) in surface.polygons.iter().enumerate() {
            let img: Vec<Side> = p.sides.iter().map(|s| involution.map_side(*s)).collect();
            match find_rotation(surface, &img) {
                Some((q, off)) => {
                    involution.polygons[pi] = q;
                    involution.polygon_offset[pi] = off;
                }
                None => {
                    let rev: Vec<Side> = img
                        .iter()
                        .rev()
                        .map(|s| match *s {
                            Side::Arc { arc, forward } => Side::Arc { arc, forward: !forward },
                            b => b,
                        })
                        .collect();
                    let code = if find_rotation(surface, &rev).is_some() {
                        Code::OrientationReversed
                    } else {
                        Code::IncompatibleMap
                    };
                    diags.push(Diagnostic::new(code, &p.id, "image of polygon word is not a polygon word"));
                }
            }
        }
        check(diags)?;
        Ok(involution)
    }
}

/// Find a polygon whose cyclic word equals `word`; returns (polygon, offset)
/// with `word[k] == sides[(k + offset) % len]`.
fn find_rotation(surface: &DissectedSurface, word: &[Side]) -> Option<(usize, usize)> {
    let n = word.len();
    for (qi, q) in surface.polygons.iter().enumerate() {
        if q.sides.len() != n {
            continue;
        }
        for off in 0..n {
            if (0..n).all(|k| word[k] == q.sides[(k + off) % n]) {
                return Some((qi, off));
            }
        }
    }
    None
}

/// Check the involution axioms; returns the fixed arcs on success.
pub fn validate_involution(surface: &DissectedSurface, involution: &SurfaceInvolution) -> Result<Vec<usize>> {
    surface.ensure_valid()?;
    let mut d = Vec::new();
    let np = surface.points.len();
    if involution.points.len() != np
        || involution.arcs.len() != surface.arcs.len()
        || involution.bsegs.len() != surface.bsegs.len()
        || involution.polygons.len() != surface.polygons.len()
    {
        return Err(Error::new(Code::IncompatibleMap, &surface.name, "involution size mismatch"));
    }
    for i in 0..np {
        if involution.points[involution.points[i]] != i {
            d.push(Diagnostic::new(Code::NotOrderTwo, &surface.points[i].id, "point map does not square to identity"));
        }
        if involution.points[i] == i {
            d.push(Diagnostic::new(Code::FixedMarkedPoint, &surface.points[i].id, "involution fixes a marked point"));
        }
    }
    for i in 0..surface.arcs.len() {
        let j = involution.arcs[i];
        if involution.arcs[j] != i || involution.arc_reversed[j] != involution.arc_reversed[i] {
            d.push(Diagnostic::new(Code::NotOrderTwo, &surface.arcs[i].id, "arc map does not square to identity"));
        }
        if j == i && !involution.arc_reversed[i] {
            d.push(Diagnostic::new(Code::UnreversedFixedArc, &surface.arcs[i].id, "fixed arc must be reversed"));
        }
    }
    for i in 0..surface.bsegs.len() {
        if involution.bsegs[involution.bsegs[i]] != i {
            d.push(Diagnostic::new(Code::NotOrderTwo, &surface.bsegs[i].id, "segment map does not square to identity"));
        }
    }
    for i in 0..surface.polygons.len() {
        if involution.polygons[i] == i {
            d.push(Diagnostic::new(Code::FixedPolygon, &surface.polygons[i].id, "involution fixes a polygon"));
        }
        if involution.polygons[involution.polygons[i]] != i {
            d.push(Diagnostic::new(Code::NotOrderTwo, &surface.polygons[i].id, "polygon map does not square to identity"));
        }
        let img: Vec<Side> = surface.polygons[i].sides.iter().map(|s| involution.map_side(*s)).collect();
        let q = &surface.polygons[involution.polygons[i]].sides;
        let n = img.len();
        if q.len() != n || (0..n).any(|k| img[k] != q[(k + involution.polygon_offset[i]) % n]) {
            d.push(Diagnostic::new(
                Code::OrientationReversed,
                &surface.polygons[i].id,
                "polygon word does not map to a counterclockwise polygon word",
            ));
        }
    }
    check(d)?;
    Ok((0..surface.arcs.len()).filter(|&i| involution.arcs[i] == i).collect())
}

// ---------------------------------------------------------------------------
// Isomorphism of dissected surfaces

/// Relabeling isomorphism between two dissected surfaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceIso {
    pub points: Vec<usize>,
    /// Arc image and whether its orientation is flipped.
    pub arcs: Vec<(usize, bool)>,
    pub bsegs: Vec<usize>,
    /// Polygon image with the slot offset.
    pub polygons: Vec<(usize, usize)>,
}

/// Find an orientation-preserving relabeling carrying `a` onto `b`.
/// Arc orientations may flip; polygon words may rotate. Both surfaces are
/// assumed valid and connected.
pub fn find_surface_iso(a: &DissectedSurface, b: &DissectedSurface) -> Option<SurfaceIso> {
    if a.points.len() != b.points.len()
        || a.arcs.len() != b.arcs.len()
        || a.bsegs.len() != b.bsegs.len()
        || a.polygons.len() != b.polygons.len()
    {
        return None;
    }
    if a.polygons.is_empty() {
        return None;
    }
    let occ_a = a.occurrences();
    let occ_b = b.occurrences();
    let len0 = a.polygons[0].sides.len();
    for q0 in 0..b.polygons.len() {
        if b.polygons[q0].sides.len() != len0 {
            continue;
        }
        for off0 in 0..len0 {
            if let Some(iso) = try_extend(a, b, &occ_a, &occ_b, q0, off0) {
                return Some(iso);
            }
        }
    }
    None
}

fn try_extend(
    a: &DissectedSurface,
    b: &DissectedSurface,
    occ_a: &[[Option<(usize, usize)>; 2]],
    occ_b: &[[Option<(usize, usize)>; 2]],
    q0: usize,
    off0: usize,
) -> Option<SurfaceIso> {
    let mut poly: Vec<Option<(usize, usize)>> = vec![None; a.polygons.len()];
    let mut poly_used = vec![false; b.polygons.len()];
    let mut arcs: Vec<Option<(usize, bool)>> = vec![None; a.arcs.len()];
    let mut arc_used = vec![false; b.arcs.len()];
    let mut bsegs: Vec<Option<usize>> = vec![None; a.bsegs.len()];
    let mut points: Vec<Option<usize>> = vec![None; a.points.len()];
    let mut queue = VecDeque::new();
    poly[0] = Some((q0, off0));
    poly_used[q0] = true;
    queue.push_back(0);
    let set_point = |points: &mut Vec<Option<usize>>, x: usize, y: usize| -> bool {
        if a.points[x].kind != b.points[y].kind {
            return false;
        }
        match points[x] {
            Some(z) => z == y,
            None => {
                points[x] = Some(y);
                true
            }
        }
    };
    while let Some(p) = queue.pop_front() {
        let (q, off) = poly[p].unwrap();
        let sa = &a.polygons[p].sides;
        let sb = &b.polygons[q].sides;
        if sa.len() != sb.len() {
            return None;
        }
        let n = sa.len();
        for k in 0..n {
            let (x, y) = (sa[k], sb[(k + off) % n]);
            match (x, y) {
                (Side::Bseg(i), Side::Bseg(j)) => {
                    match bsegs[i] {
                        Some(z) if z != j => return None,
                        _ => bsegs[i] = Some(j),
                    }
                    if !set_point(&mut points, a.bsegs[i].tail, b.bsegs[j].tail)
                        || !set_point(&mut points, a.bsegs[i].head, b.bsegs[j].head)
                    {
                        return None;
                    }
                }
                (Side::Arc { arc: i, forward: fi }, Side::Arc { arc: j, forward: fj }) => {
                    let flip = fi != fj;
                    match arcs[i] {
                        Some(z) if z != (j, flip) => return None,
                        Some(_) => {}
                        None => {
                            if arc_used[j] {
                                return None;
                            }
                            arcs[i] = Some((j, flip));
                            arc_used[j] = true;
                        }
                    }
                    if !set_point(&mut points, a.side_tail(x), b.side_tail(y))
                        || !set_point(&mut points, a.side_head(x), b.side_head(y))
                    {
                        return None;
                    }
                    // propagate to the polygon on the other side of the arc
                    let (pa, ka) = occ_a[i][if fi { 1 } else { 0 }]?;
                    let (pb, kb) = occ_b[j][if fj { 1 } else { 0 }]?;
                    let nb = b.polygons[pb].sides.len();
                    if a.polygons[pa].sides.len() != nb {
                        return None;
                    }
                    let off2 = (kb + nb - ka % nb) % nb;
                    match poly[pa] {
                        Some(z) if z != (pb, off2) => return None,
                        Some(_) => {}
                        None => {
                            if poly_used[pb] {
                                return None;
                            }
                            poly[pa] = Some((pb, off2));
                            poly_used[pb] = true;
                            queue.push_back(pa);
                        }
                    }
                }
                _ => return None,
            }
        }
    }
    let points = points.into_iter().collect::<Option<Vec<_>>>()?;
    if points.iter().collect::<BTreeSet<_>>().len() != points.len() {
        return None;
    }
    Some(SurfaceIso {
        points,
        arcs: arcs.into_iter().collect::<Option<Vec<_>>>()?,
        bsegs: bsegs.into_iter().collect::<Option<Vec<_>>>()?,
        polygons: poly.into_iter().collect::<Option<Vec<_>>>()?,
    })
}
