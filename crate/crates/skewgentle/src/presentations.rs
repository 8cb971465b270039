//! Quivers with relations: gentle pairs, skew-gentle triples, split
//! presentations, and the translation between dissections and presentations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::Scalar;
use crate::error::{check, Code, Diagnostic, Error, Result};
use crate::surface::{
    Corner, DissectedSurface, MarkedPoint, PointKind, Polygon, Side,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.id == id)
    }

    pub fn add_vertex(&mut self, id: impl Into<String>) -> usize {
        self.vertices.push(id.into());
        self.vertices.len() - 1
    }

    pub fn add_arrow(&mut self, id: impl Into<String>, source: usize, target: usize) -> usize {
        self.arrows.push(Arrow { id: id.into(), source, target });
        self.arrows.len() - 1
    }

    pub fn outgoing(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a].source == v).collect()
    }

    pub fn incoming(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a].target == v).collect()
    }

    pub fn is_loop(&self, a: usize) -> bool {
        self.arrows[a].source == self.arrows[a].target
    }

    /// Connected components of the underlying graph, as vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut stack = vec![s];
            comp[s] = c;
            let mut members = Vec::new();
            while let Some(v) = stack.pop() {
                members.push(v);
                for a in &self.arrows {
                    for (x, y) in [(a.source, a.target), (a.target, a.source)] {
                        if x == v && comp[y] == usize::MAX {
                            comp[y] = c;
                            stack.push(y);
                        }
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    fn unique_arrow_name(&self, base: &str) -> String {
        if self.arrow_index(base).is_none() {
            return base.to_string();
        }
        (2..).map(|k| format!("{base}#{k}")).find(|n| self.arrow_index(n).is_none()).unwrap()
    }
}

/// Gentle pair; a relation `(a, b)` is the composite "b after a" (written `ba`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GentlePair {
    pub quiver: Quiver,
    pub relations: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkewGentleTriple {
    pub quiver: Quiver,
    pub relations: Vec<(usize, usize)>,
    pub special: Vec<usize>,
}

/// Linear combination of paths; each path lists arrows in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(Scalar, Vec<usize>)>,
}

impl Relation {
    pub fn monomial(a: usize, b: usize) -> Relation {
        Relation { terms: vec![(Scalar::one(), vec![a, b])] }
    }

    pub fn is_homogeneous_quadratic(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.len() == 2)
    }
}

/// Generic quiver presentation used by the algebra engine and isomorphism search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    pub special: Vec<usize>,
}

impl GentlePair {
    pub fn presentation(&self) -> Presentation {
        Presentation {
            quiver: self.quiver.clone(),
            relations: self.relations.iter().map(|&(a, b)| Relation::monomial(a, b)).collect(),
            special: Vec::new(),
        }
    }

    pub fn has_relation(&self, a: usize, b: usize) -> bool {
        self.relations.contains(&(a, b))
    }
}

impl SkewGentleTriple {
    pub fn presentation(&self) -> Presentation {
        Presentation {
            quiver: self.quiver.clone(),
            relations: self.relations.iter().map(|&(a, b)| Relation::monomial(a, b)).collect(),
            special: self.special.clone(),
        }
    }
}

/// Label of a split arrow: the original arrow and the copies chosen at a
/// split source and/or target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SplitArrowLabel {
    pub base: usize,
    pub source_eps: Option<u8>,
    pub target_eps: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPresentation {
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    /// For each split vertex: (original vertex, copy index if split).
    pub vertex_origin: Vec<(usize, Option<u8>)>,
    pub arrow_origin: Vec<SplitArrowLabel>,
}

impl SplitPresentation {
    pub fn presentation(&self) -> Presentation {
        Presentation { quiver: self.quiver.clone(), relations: self.relations.clone(), special: Vec::new() }
    }

    pub fn vertex(&self, orig: usize, eps: Option<u8>) -> Option<usize> {
        self.vertex_origin.iter().position(|&o| o == (orig, eps))
    }

    pub fn arrow(&self, label: SplitArrowLabel) -> Option<usize> {
        self.arrow_origin.iter().position(|&l| l == label)
    }

    pub fn two_term_relations(&self) -> usize {
        self.relations.iter().filter(|r| r.terms.len() == 2).count()
    }
}

// ---------------------------------------------------------------------------
// Gentleness

/// Diagnostics for the gentle axioms; empty iff `(Q, I)` is a gentle pair.
pub fn check_gentle(pair: &GentlePair) -> Vec<Diagnostic> {
    let q = &pair.quiver;
    let mut d = Vec::new();
    let rel: BTreeSet<(usize, usize)> = pair.relations.iter().copied().collect();
    for &(a, b) in &pair.relations {
        if a >= q.arrows.len() || b >= q.arrows.len() || q.arrows[a].target != q.arrows[b].source {
            d.push(Diagnostic::new(Code::NotGentle, "relation", "relation is not a composable path of length 2"));
        }
    }
    if !d.is_empty() {
        return d;
    }
    for (v, name) in q.vertices.iter().enumerate() {
        let (i, o) = (q.incoming(v).len(), q.outgoing(v).len());
        if i > 2 || o > 2 {
            d.push(Diagnostic::new(Code::DegreeExceeded, name, format!("{i} incoming, {o} outgoing arrows")));
        }
    }
    for (a, arr) in q.arrows.iter().enumerate() {
        let succ = q.outgoing(arr.target);
        let in_i = succ.iter().filter(|&&b| rel.contains(&(a, b))).count();
        if in_i > 1 || succ.len() - in_i > 1 {
            d.push(Diagnostic::new(Code::SuccessorClash, &arr.id, "successor condition fails"));
        }
        let pred = q.incoming(arr.source);
        let in_i = pred.iter().filter(|&&b| rel.contains(&(b, a))).count();
        if in_i > 1 || pred.len() - in_i > 1 {
            d.push(Diagnostic::new(Code::SuccessorClash, &arr.id, "predecessor condition fails"));
        }
    }
    if !d.is_empty() {
        return d;
    }
    // composition graph a -> b when b after a is defined and not a relation
    let n = q.arrows.len();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|a| q.outgoing(q.arrows[a].target).into_iter().filter(|&b| !rel.contains(&(a, b))).collect())
        .collect();
    let mut state = vec![0u8; n];
    fn dfs(v: usize, succ: &[Vec<usize>], state: &mut [u8]) -> bool {
        state[v] = 1;
        for &w in &succ[v] {
            if state[w] == 1 || (state[w] == 0 && dfs(w, succ, state)) {
                return true;
            }
        }
        state[v] = 2;
        false
    }
    for a in 0..n {
        if state[a] == 0 && dfs(a, &succ, &mut state) {
            d.push(Diagnostic::new(Code::InfiniteDimensional, &q.arrows[a].id, "oriented cycle avoids the relations"));
            break;
        }
    }
    d
}

pub fn degenerate(triple: &SkewGentleTriple) -> GentlePair {
    let mut relations = triple.relations.clone();
    for &e in &triple.special {
        if !relations.contains(&(e, e)) {
            relations.push((e, e));
        }
    }
    GentlePair { quiver: triple.quiver.clone(), relations }
}

pub fn check_skew_gentle(triple: &SkewGentleTriple) -> Vec<Diagnostic> {
    let q = &triple.quiver;
    let mut d = Vec::new();
    for &e in &triple.special {
        if e >= q.arrows.len() || !q.is_loop(e) {
            let name = q.arrows.get(e).map(|a| a.id.clone()).unwrap_or_default();
            d.push(Diagnostic::new(Code::NotGentle, name, "special arrow is not a loop"));
        } else if triple.relations.contains(&(e, e)) {
            d.push(Diagnostic::new(Code::NotGentle, &q.arrows[e].id, "square of a special loop lies in I"));
        }
    }
    if !d.is_empty() {
        return d;
    }
    check_gentle(&degenerate(triple))
}

// ---------------------------------------------------------------------------
// Split presentation

fn split_name(base: &str, s: Option<u8>, t: Option<u8>) -> String {
    let mut n = String::new();
    if let Some(t) = t {
        n.push_str(&format!("{t}|"));
    }
    n.push_str(base);
    if let Some(s) = s {
        n.push_str(&format!("|{s}"));
    }
    n
}

/// The quiver with relations of the skew-gentle algebra: special vertices
/// split in two, arrows duplicated accordingly, relations through split
/// vertices become two-term sums.
pub fn split(triple: &SkewGentleTriple) -> Result<SplitPresentation> {
    check(check_skew_gentle(triple))?;
    let q = &triple.quiver;
    let special_vertex: BTreeSet<usize> = triple.special.iter().map(|&e| q.arrows[e].source).collect();
    let copies = |v: usize| -> Vec<Option<u8>> {
        if special_vertex.contains(&v) {
            vec![Some(0), Some(1)]
        } else {
            vec![None]
        }
    };
    let mut out = Quiver::default();
    let mut vertex_origin = Vec::new();
    for (v, name) in q.vertices.iter().enumerate() {
        for c in copies(v) {
            out.add_vertex(match c {
                Some(e) => format!("{name}_{e}"),
                None => name.clone(),
            });
            vertex_origin.push((v, c));
        }
    }
    let vid = |v: usize, c: Option<u8>| vertex_origin.iter().position(|&o| o == (v, c)).unwrap();
    let mut arrow_origin = Vec::new();
    let mut index: HashMap<SplitArrowLabel, usize> = HashMap::new();
    for (a, arr) in q.arrows.iter().enumerate() {
        if triple.special.contains(&a) {
            continue;
        }
        for t in copies(arr.target) {
            for s in copies(arr.source) {
                let label = SplitArrowLabel { base: a, source_eps: s, target_eps: t };
                let id = out.add_arrow(split_name(&arr.id, s, t), vid(arr.source, s), vid(arr.target, t));
                index.insert(label, id);
                arrow_origin.push(label);
            }
        }
    }
    let mut relations = Vec::new();
    for &(a, b) in &triple.relations {
        let mid = q.arrows[a].target;
        for t in copies(q.arrows[b].target) {
            for s in copies(q.arrows[a].source) {
                if special_vertex.contains(&mid) {
                    let terms = (0..2u8)
                        .map(|m| {
                            let x = index[&SplitArrowLabel { base: a, source_eps: s, target_eps: Some(m) }];
                            let y = index[&SplitArrowLabel { base: b, source_eps: Some(m), target_eps: t }];
                            (Scalar::one(), vec![x, y])
                        })
                        .collect();
                    relations.push(Relation { terms });
                } else {
                    let x = index[&SplitArrowLabel { base: a, source_eps: s, target_eps: None }];
                    let y = index[&SplitArrowLabel { base: b, source_eps: None, target_eps: t }];
                    relations.push(Relation::monomial(x, y));
                }
            }
        }
    }
    Ok(SplitPresentation { quiver: out, relations, vertex_origin, arrow_origin })
}

// ---------------------------------------------------------------------------
// Dissection -> presentation

/// Quiver of a dissection together with the corner each arrow comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DissectionQuiver {
    pub pair: GentlePair,
    pub arrow_corner: Vec<Corner>,
    pub arrow_point: Vec<usize>,
}

impl DissectionQuiver {
    pub fn arrow_at_corner(&self, c: Corner) -> Option<usize> {
        self.arrow_corner.iter().position(|&x| x == c)
    }
}

/// One vertex per arc, one arrow per corner between consecutive arc-ends at
/// a point, one relation per pair of consecutive corners. Orbifold points are
/// treated as punctures.
pub fn quiver_from_dissection(surface: &DissectedSurface) -> Result<DissectionQuiver> {
    let rots = surface.rotation_system()?;
    let mut q = Quiver::default();
    for a in &surface.arcs {
        q.add_vertex(a.id.clone());
    }
    let mut arrow_corner = Vec::new();
    let mut arrow_point = Vec::new();
    let mut relations = Vec::new();
    for rot in &rots {
        let r = rot.ends.len();
        let mut ids = Vec::with_capacity(rot.corners.len());
        for (i, &c) in rot.corners.iter().enumerate() {
            let (s, t) = (rot.ends[i].arc, rot.ends[(i + 1) % r].arc);
            let base = format!("{}>{}@{}", surface.arcs[s].id, surface.arcs[t].id, surface.points[rot.point].id);
            let name = q.unique_arrow_name(&base);
            ids.push(q.add_arrow(name, s, t));
            arrow_corner.push(c);
            arrow_point.push(rot.point);
        }
        let m = ids.len();
        if rot.cyclic {
            for i in 0..m {
                relations.push((ids[i], ids[(i + 1) % m]));
            }
        } else {
            for i in 0..m.saturating_sub(1) {
                relations.push((ids[i], ids[i + 1]));
            }
        }
    }
    Ok(DissectionQuiver { pair: GentlePair { quiver: q, relations }, arrow_corner, arrow_point })
}

/// Skew-gentle triple of a ✗-dissection: the loops at orbifold points become
/// special loops and their squares leave the relation set.
pub fn triple_from_x_dissection(surface: &DissectedSurface) -> Result<(SkewGentleTriple, DissectionQuiver)> {
    surface.classify_dissection()?;
    let dq = quiver_from_dissection(surface)?;
    let special: Vec<usize> = (0..dq.pair.quiver.arrows.len())
        .filter(|&a| surface.points[dq.arrow_point[a]].kind == PointKind::Orbifold)
        .collect();
    let relations = dq.pair.relations.iter().copied().filter(|&(a, b)| !(a == b && special.contains(&a))).collect();
    Ok((SkewGentleTriple { quiver: dq.pair.quiver.clone(), relations, special }, dq))
}

// ---------------------------------------------------------------------------
// Presentation -> dissection

#[derive(Debug, Clone, Copy, Default)]
struct End {
    incoming: Option<usize>,
    outgoing: Option<usize>,
}

/// Rebuild a ●-dissected surface from a gentle pair.
pub fn surface_from_gentle(pair: &GentlePair) -> Result<DissectedSurface> {
    let diags = check_gentle(pair);
    if !diags.is_empty() {
        let mut e = Error::new(Code::NotGentle, "pair", "input is not a gentle pair");
        e.diagnostics.extend(diags);
        return Err(e);
    }
    build_surface(pair, &[])
}

/// Rebuild a ✗-dissected orbifold from a skew-gentle triple.
pub fn surface_from_triple(triple: &SkewGentleTriple) -> Result<DissectedSurface> {
    let diags = check_skew_gentle(triple);
    if !diags.is_empty() {
        let mut e = Error::new(Code::NotGentle, "triple", "input is not a skew-gentle triple");
        e.diagnostics.extend(diags);
        return Err(e);
    }
    build_surface(&degenerate(triple), &triple.special)
}

fn build_surface(pair: &GentlePair, special: &[usize]) -> Result<DissectedSurface> {
    let q = &pair.quiver;
    let rel: BTreeSet<(usize, usize)> = pair.relations.iter().copied().collect();
    let fail = |v: &str| Error::new(Code::EndAssignmentFailure, v, "arc-end assignment failed");
    // assign arrows to the two ends of each vertex
    let mut ends = vec![[End::default(); 2]; q.vertices.len()];
    for v in 0..q.vertices.len() {
        let ins = q.incoming(v);
        let outs = q.outgoing(v);
        let mut slots: Vec<End> = Vec::new();
        let mut used_out = BTreeSet::new();
        let mut lone_in = Vec::new();
        for &a in &ins {
            match outs.iter().find(|&&b| rel.contains(&(a, b))) {
                Some(&b) => {
                    used_out.insert(b);
                    slots.push(End { incoming: Some(a), outgoing: Some(b) });
                }
                None => lone_in.push(a),
            }
        }
        for a in lone_in {
            slots.push(End { incoming: Some(a), outgoing: None });
        }
        for &b in &outs {
            if !used_out.contains(&b) {
                slots.push(End { incoming: None, outgoing: Some(b) });
            }
        }
        if slots.len() > 2 {
            return Err(fail(&q.vertices[v]));
        }
        while slots.len() < 2 {
            slots.push(End::default());
        }
        ends[v] = [slots[0], slots[1]];
    }
    // end (vertex, index) holding a given arrow as incoming / outgoing
    let mut in_end: HashMap<usize, (usize, usize)> = HashMap::new();
    for (v, es) in ends.iter().enumerate() {
        for (i, e) in es.iter().enumerate() {
            if let Some(a) = e.incoming {
                in_end.insert(a, (v, i));
            }
        }
    }
    // points: chains of ends linked by arrows
    let mut point_of = vec![[usize::MAX; 2]; q.vertices.len()];
    let mut points: Vec<MarkedPoint> = Vec::new();
    let mut rotations: Vec<Vec<(usize, usize)>> = Vec::new();
    for v in 0..q.vertices.len() {
        for i in 0..2 {
            if ends[v][i].incoming.is_some() || point_of[v][i] != usize::MAX {
                continue;
            }
            let p = points.len();
            let mut chain = Vec::new();
            let mut cur = Some((v, i));
            while let Some((w, j)) = cur {
                if point_of[w][j] != usize::MAX {
                    return Err(fail(&q.vertices[w]));
                }
                point_of[w][j] = p;
                chain.push((w, j));
                cur = ends[w][j].outgoing.map(|b| in_end[&b]);
            }
            points.push(MarkedPoint { id: format!("m{p}"), kind: PointKind::Boundary });
            rotations.push(chain);
        }
    }
    for v in 0..q.vertices.len() {
        for i in 0..2 {
            if point_of[v][i] != usize::MAX {
                continue;
            }
            let p = points.len();
            let mut cur = (v, i);
            let mut is_special = false;
            loop {
                point_of[cur.0][cur.1] = p;
                let b = ends[cur.0][cur.1].outgoing.ok_or_else(|| fail(&q.vertices[cur.0]))?;
                is_special |= special.contains(&b);
                cur = in_end[&b];
                if cur == (v, i) {
                    break;
                }
                if point_of[cur.0][cur.1] != usize::MAX {
                    return Err(fail(&q.vertices[cur.0]));
                }
            }
            let kind = if is_special { PointKind::Orbifold } else { PointKind::Puncture };
            let prefix = if is_special { "x" } else { "p" };
            points.push(MarkedPoint { id: format!("{prefix}{p}"), kind });
            rotations.push(Vec::new());
        }
    }
    // faces: a side runs from one end of an arc to the other
    let mut started = vec![[false; 2]; q.vertices.len()];
    let mut polygons: Vec<Polygon> = Vec::new();
    let mut bsegs = Vec::new();
    for v in 0..q.vertices.len() {
        for i in 0..2 {
            if ends[v][i].incoming.is_some() || started[v][i] {
                continue;
            }
            let mut sides = vec![Side::Bseg(bsegs.len())];
            let first_point = point_of[v][i];
            let mut cur = (v, i);
            let last_point;
            loop {
                if started[cur.0][cur.1] {
                    return Err(fail(&q.vertices[cur.0]));
                }
                started[cur.0][cur.1] = true;
                sides.push(Side::Arc { arc: cur.0, forward: cur.1 == 0 });
                let other = (cur.0, 1 - cur.1);
                match ends[other.0][other.1].outgoing {
                    Some(b) => cur = in_end[&b],
                    None => {
                        last_point = point_of[other.0][other.1];
                        break;
                    }
                }
            }
            bsegs.push((last_point, first_point));
            polygons.push(Polygon { id: format!("P{}", polygons.len()), sides });
        }
    }
    if started.iter().any(|s| !s[0] || !s[1]) {
        return Err(Error::new(Code::EndAssignmentFailure, "faces", "a face carries no boundary segment"));
    }
    let _ = rotations;
    let surface = DissectedSurface {
        name: "from_presentation".into(),
        points,
        arcs: q
            .vertices
            .iter()
            .enumerate()
            .map(|(v, name)| crate::surface::Arc { id: name.clone(), tail: point_of[v][0], head: point_of[v][1] })
            .collect(),
        bsegs: bsegs
            .iter()
            .enumerate()
            .map(|(k, &(t, h))| crate::surface::BoundarySegment { id: format!("b{k}"), tail: t, head: h })
            .collect(),
        polygons,
    };
    surface.ensure_valid().map_err(|e| {
        let mut err = Error::new(Code::EndAssignmentFailure, "surface", "reconstructed surface is invalid");
        err.diagnostics.extend(e.diagnostics);
        err
    })?;
    Ok(surface)
}

// ---------------------------------------------------------------------------
// Puzzle pieces

/// Building blocks: a linear piece with all compositions zero, a cyclic piece
/// with all compositions zero, or a single vertex carrying a special loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    Linear(usize),
    Cyclic(usize),
    Special,
}

impl Piece {
    pub fn vertex_count(self) -> usize {
        match self {
            Piece::Linear(n) | Piece::Cyclic(n) => n,
            Piece::Special => 1,
        }
    }
}

/// Glue pieces along a partial matching of piece-vertices `(piece, vertex)`.
pub fn glue_puzzle(pieces: &[Piece], matching: &[((usize, usize), (usize, usize))]) -> Result<SkewGentleTriple> {
    let offsets: Vec<usize> = pieces
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.vertex_count();
            Some(o)
        })
        .collect();
    let total: usize = pieces.iter().map(|p| p.vertex_count()).sum();
    let flat = |(p, v): (usize, usize)| -> Result<usize> {
        if p >= pieces.len() || v >= pieces[p].vertex_count() {
            return Err(Error::new(Code::UnknownId, format!("{p}.{v}"), "no such piece vertex"));
        }
        Ok(offsets[p] + v)
    };
    let mut partner = vec![usize::MAX; total];
    for &(x, y) in matching {
        let (a, b) = (flat(x)?, flat(y)?);
        if a == b || partner[a] != usize::MAX || partner[b] != usize::MAX {
            return Err(Error::new(
                Code::OvergluedVertex,
                format!("{}.{}", x.0, x.1),
                "a glued vertex may identify at most two piece-vertices",
            ));
        }
        partner[a] = b;
        partner[b] = a;
    }
    // glued vertex index of every piece-vertex
    let mut vid = vec![usize::MAX; total];
    let mut q = Quiver::default();
    for f in 0..total {
        if vid[f] != usize::MAX {
            continue;
        }
        let p = offsets.iter().rposition(|&o| o <= f).unwrap();
        let v = q.add_vertex(format!("{}.{}", p, f - offsets[p]));
        vid[f] = v;
        if partner[f] != usize::MAX {
            vid[partner[f]] = v;
        }
    }
    let mut relations = Vec::new();
    let mut special = Vec::new();
    for (p, piece) in pieces.iter().enumerate() {
        let o = offsets[p];
        match *piece {
            Piece::Linear(n) => {
                let ids: Vec<usize> =
                    (0..n.saturating_sub(1)).map(|i| q.add_arrow(format!("{p}:{i}"), vid[o + i], vid[o + i + 1])).collect();
                for w in ids.windows(2) {
                    relations.push((w[0], w[1]));
                }
            }
            Piece::Cyclic(n) => {
                let ids: Vec<usize> =
                    (0..n).map(|i| q.add_arrow(format!("{p}:{i}"), vid[o + i], vid[o + (i + 1) % n])).collect();
                for i in 0..n {
                    relations.push((ids[i], ids[(i + 1) % n]));
                }
            }
            Piece::Special => special.push(q.add_arrow(format!("{p}:e"), vid[o], vid[o])),
        }
    }
    let triple = SkewGentleTriple { quiver: q, relations, special };
    check(check_skew_gentle(&triple))?;
    Ok(triple)
}

// ---------------------------------------------------------------------------
// Deformation

/// Presentation of the deformed algebra: relations `I` together with
/// `e² − t·e` for every special loop.
pub fn deform(triple: &SkewGentleTriple, t: &Scalar) -> Presentation {
    let mut relations: Vec<Relation> = triple.relations.iter().map(|&(a, b)| Relation::monomial(a, b)).collect();
    for &e in &triple.special {
        let mut terms = vec![(Scalar::one(), vec![e, e])];
        if !t.is_zero() {
            terms.push((-t.clone(), vec![e]));
        }
        relations.push(Relation { terms });
    }
    Presentation { quiver: triple.quiver.clone(), relations, special: triple.special.clone() }
}

// ---------------------------------------------------------------------------
// Small gentle exceptions

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionReport {
    pub is_gentle_shaped: bool,
    pub case: Option<String>,
}

/// Recognise the connected triples with special loops whose algebra is still
/// gentle: one special loop at an end of a single arrow, or special loops at
/// both ends of a single arrow.
pub fn gentle_exception_check(triple: &SkewGentleTriple) -> Result<ExceptionReport> {
    let q = &triple.quiver;
    if q.components().len() != 1 {
        return Err(Error::new(Code::Disconnected, "triple", "quiver is not connected"));
    }
    let ordinary: Vec<usize> = (0..q.arrows.len()).filter(|a| !triple.special.contains(a)).collect();
    let no = ExceptionReport { is_gentle_shaped: false, case: None };
    if triple.special.is_empty() || q.vertices.len() != 2 || ordinary.len() != 1 || !triple.relations.is_empty() {
        return Ok(no);
    }
    let a = &q.arrows[ordinary[0]];
    if a.source == a.target {
        return Ok(no);
    }
    let at: BTreeSet<usize> = triple.special.iter().map(|&e| q.arrows[e].source).collect();
    let case = match (at.contains(&a.source), at.contains(&a.target), triple.special.len()) {
        (true, false, 1) => "loop_then_arrow",
        (false, true, 1) => "arrow_then_loop",
        (true, true, 2) => "loop_arrow_loop",
        _ => return Ok(no),
    };
    Ok(ExceptionReport { is_gentle_shaped: true, case: Some(case.into()) })
}

// ---------------------------------------------------------------------------
// Isomorphism of presentations

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationIso {
    pub vertices: Vec<usize>,
    pub arrows: Vec<usize>,
}

pub const DEFAULT_ISO_LIMIT: usize = 64;

type RelKey = Vec<(String, Vec<usize>)>;

fn relation_key(r: &Relation, arrow_map: &[usize]) -> RelKey {
    let mut k: RelKey = r
        .terms
        .iter()
        .map(|(c, p)| (c.to_string(), p.iter().map(|&a| arrow_map[a]).collect()))
        .collect();
    k.sort();
    k
}

/// Backtracking search for a quiver isomorphism carrying relations and
/// special loops onto each other.
pub fn iso_presentations(p1: &Presentation, p2: &Presentation, limit: usize) -> Result<Option<PresentationIso>> {
    let (q1, q2) = (&p1.quiver, &p2.quiver);
    if q1.vertices.len() > limit || q2.vertices.len() > limit {
        return Err(Error::new(Code::SizeLimit, "presentation", format!("more than {limit} vertices")));
    }
    if q1.vertices.len() != q2.vertices.len()
        || q1.arrows.len() != q2.arrows.len()
        || p1.relations.len() != p2.relations.len()
        || p1.special.len() != p2.special.len()
    {
        return Ok(None);
    }
    let n = q1.vertices.len();
    let count = |q: &Quiver| {
        let mut m: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, a) in q.arrows.iter().enumerate() {
            m.entry((a.source, a.target)).or_default().push(i);
        }
        m
    };
    let (c1, c2) = (count(q1), count(q2));
    let sig = |q: &Quiver, v: usize| (q.incoming(v).len(), q.outgoing(v).len(), q.arrows.iter().filter(|a| a.source == v && a.target == v).count());
    let s1: Vec<_> = (0..n).map(|v| sig(q1, v)).collect();
    let s2: Vec<_> = (0..n).map(|v| sig(q2, v)).collect();
    let target_rel: BTreeSet<RelKey> = {
        let id: Vec<usize> = (0..q2.arrows.len()).collect();
        p2.relations.iter().map(|r| relation_key(r, &id)).collect()
    };
    let special2: BTreeSet<usize> = p2.special.iter().copied().collect();
    // vertex order: BFS from each component for good pruning
    let mut order = Vec::new();
    for comp in q1.components() {
        order.extend(comp);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn mult(c: &BTreeMap<(usize, usize), Vec<usize>>, s: usize, t: usize) -> usize {
        c.get(&(s, t)).map_or(0, |v| v.len())
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        order: &[usize],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        ctx: &dyn Fn(&[usize]) -> Option<Vec<usize>>,
        ok: &dyn Fn(usize, usize, &[usize]) -> bool,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        if k == order.len() {
            return ctx(map).map(|arrows| (map.clone(), arrows));
        }
        let v = order[k];
        for w in 0..map.len() {
            if used[w] || !ok(v, w, map) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if let Some(r) = rec(k + 1, order, map, used, ctx, ok) {
                return Some(r);
            }
            map[v] = usize::MAX;
            used[w] = false;
        }
        None
    }

    let ok = |v: usize, w: usize, map: &[usize]| -> bool {
        if s1[v] != s2[w] {
            return false;
        }
        for u in 0..n {
            let fu = if u == v { w } else { map[u] };
            if fu == usize::MAX {
                continue;
            }
            if mult(&c1, u, v) != mult(&c2, fu, w) || mult(&c1, v, u) != mult(&c2, w, fu) {
                return false;
            }
        }
        true
    };
    let arrows_for = |vmap: &[usize]| -> Option<Vec<usize>> {
        // enumerate bijections within each parallel class
        let classes: Vec<(Vec<usize>, Vec<usize>)> = c1
            .iter()
            .map(|(&(s, t), a1)| (a1.clone(), c2.get(&(vmap[s], vmap[t])).cloned().unwrap_or_default()))
            .collect();
        let mut amap = vec![usize::MAX; q1.arrows.len()];
        fn perms(v: &[usize]) -> Vec<Vec<usize>> {
            if v.len() <= 1 {
                return vec![v.to_vec()];
            }
            let mut out = Vec::new();
            for i in 0..v.len() {
                let mut rest = v.to_vec();
                let x = rest.remove(i);
                for mut p in perms(&rest) {
                    p.insert(0, x);
                    out.push(p);
                }
            }
            out
        }
        let options: Vec<Vec<Vec<usize>>> = classes.iter().map(|(_, a2)| perms(a2)).collect();
        let mut idx = vec![0usize; classes.len()];
        loop {
            for (ci, (a1, _)) in classes.iter().enumerate() {
                for (j, &a) in a1.iter().enumerate() {
                    amap[a] = options[ci][idx[ci]][j];
                }
            }
            let rel_ok = p1.relations.iter().all(|r| target_rel.contains(&relation_key(r, &amap)));
            let sp_ok = p1.special.iter().all(|&e| special2.contains(&amap[e]));
            if rel_ok && sp_ok {
                return Some(amap);
            }
            // advance odometer
            let mut c = 0;
            loop {
                if c == idx.len() {
                    return None;
                }
                idx[c] += 1;
                if idx[c] < options[c].len() {
                    break;
                }
                idx[c] = 0;
                c += 1;
            }
        }
    };
    Ok(rec(0, &order, &mut map, &mut used, &arrows_for, &ok).map(|(vertices, arrows)| PresentationIso { vertices, arrows }))
}
