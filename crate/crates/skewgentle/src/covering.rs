//! Quotients of surfaces with an involution, the canonical branched double
//! cover of an orbifold dissection, and lifting of curves along the cover.

use serde::Serialize;

use crate::error::{Code, Diagnostic, Error, Result};
use crate::linefield::{CombinatorialCurve, Passage, SlotRef};
use crate::surface::{
    Arc, BoundarySegment, Corner, DissectedSurface, DissectionKind, MarkedPoint, PointKind, Polygon, Side,
    SurfaceInvolution, validate_involution,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sheet {
    Plus,
    Minus,
    Fixed,
}

impl Sheet {
    pub fn flip(self) -> Sheet {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
            Sheet::Fixed => Sheet::Fixed,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Sheet::Plus => "+",
            Sheet::Minus => "-",
            Sheet::Fixed => "~",
        }
    }
}

/// Image of a cover polygon slot in the quotient polygon: one slot, or the
/// two consecutive slots of a slit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlotImage {
    Single(usize),
    Slit(usize, usize),
}

impl SlotImage {
    pub fn contains(self, k: usize) -> bool {
        match self {
            SlotImage::Single(a) => a == k,
            SlotImage::Slit(a, b) => a == k || b == k,
        }
    }

    pub fn last(self) -> usize {
        match self {
            SlotImage::Single(a) | SlotImage::Slit(_, a) => a,
        }
    }
}

/// Cell-by-cell correspondence between a cover and its quotient. The `Plus`
/// sheet marks the chosen orbit representatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionData {
    pub point_map: Vec<usize>,
    pub point_sheet: Vec<Sheet>,
    pub arc_map: Vec<usize>,
    pub arc_sheet: Vec<Sheet>,
    pub bseg_map: Vec<usize>,
    pub polygon_map: Vec<usize>,
    pub polygon_sheet: Vec<Sheet>,
    pub slot_map: Vec<Vec<SlotImage>>,
    /// Orbifold points of the quotient.
    pub branch_points: Vec<usize>,
}

impl ProjectionData {
    /// Cover polygons over a quotient polygon, `Plus` first.
    pub fn preimages(&self, polygon: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.polygon_map.len()).filter(|&p| self.polygon_map[p] == polygon).collect();
        v.sort_by_key(|&p| (self.polygon_sheet[p], p));
        v
    }

    /// Cover slot of `cover_polygon` lying over quotient slot `k`.
    pub fn cover_slot(&self, cover_polygon: usize, k: usize) -> Option<usize> {
        self.slot_map[cover_polygon].iter().position(|im| im.contains(k))
    }

    /// Quotient corner under a cover corner.
    pub fn corner_image(&self, c: Corner) -> Corner {
        Corner { polygon: self.polygon_map[c.polygon], slot: self.slot_map[c.polygon][c.slot].last() }
    }

    /// Cover arcs over a quotient arc, `Plus` first.
    pub fn arc_preimages(&self, arc: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.arc_map.len()).filter(|&a| self.arc_map[a] == arc).collect();
        v.sort_by_key(|&a| (self.arc_sheet[a], a));
        v
    }
}

fn internal(subject: &str, e: Error) -> Error {
    let mut err = Error::new(Code::InternalGluing, subject, "constructed surface failed validation");
    err.diagnostics.extend(e.diagnostics);
    err
}

/// Quotient of a surface by a free-on-polygons involution: fixed arcs become
/// slits ending at new orbifold points.
pub fn quotient(surface: &DissectedSurface, involution: &SurfaceInvolution) -> Result<(DissectedSurface, ProjectionData)> {
    let fixed = validate_involution(surface, involution)?;
    let is_rep = |i: usize, img: usize| i <= img;
    // points
    let mut points = Vec::new();
    let mut qpoint = vec![usize::MAX; surface.points.len()];
    for (i, p) in surface.points.iter().enumerate() {
        if is_rep(i, involution.points[i]) {
            qpoint[i] = points.len();
            points.push(p.clone());
        }
    }
    for i in 0..surface.points.len() {
        if qpoint[i] == usize::MAX {
            qpoint[i] = qpoint[involution.points[i]];
        }
    }
    // arcs
    let mut arcs = Vec::new();
    let mut qarc = vec![usize::MAX; surface.arcs.len()];
    let mut branch_points = Vec::new();
    for (i, a) in surface.arcs.iter().enumerate() {
        if fixed.contains(&i) {
            let x = points.len();
            points.push(MarkedPoint { id: format!("x_{}", a.id), kind: PointKind::Orbifold });
            branch_points.push(x);
            qarc[i] = arcs.len();
            arcs.push(Arc { id: a.id.clone(), tail: qpoint[a.tail], head: x });
        } else if is_rep(i, involution.arcs[i]) {
            qarc[i] = arcs.len();
            arcs.push(Arc { id: a.id.clone(), tail: qpoint[a.tail], head: qpoint[a.head] });
        }
    }
    for i in 0..surface.arcs.len() {
        if qarc[i] == usize::MAX {
            qarc[i] = qarc[involution.arcs[i]];
        }
    }
    let reversed = |a: usize| !is_rep(a, involution.arcs[a]) && involution.arc_reversed[a];
    // boundary segments
    let mut bsegs = Vec::new();
    let mut qbseg = vec![usize::MAX; surface.bsegs.len()];
    for (i, b) in surface.bsegs.iter().enumerate() {
        if is_rep(i, involution.bsegs[i]) {
            qbseg[i] = bsegs.len();
            bsegs.push(BoundarySegment { id: b.id.clone(), tail: qpoint[b.tail], head: qpoint[b.head] });
        }
    }
    for i in 0..surface.bsegs.len() {
        if qbseg[i] == usize::MAX {
            qbseg[i] = qbseg[involution.bsegs[i]];
        }
    }
    // polygons
    let mut polygons = Vec::new();
    let n = surface.polygons.len();
    let mut polygon_map = vec![usize::MAX; n];
    let mut slot_map: Vec<Vec<SlotImage>> = vec![Vec::new(); n];
    for (pi, p) in surface.polygons.iter().enumerate() {
        if !is_rep(pi, involution.polygons[pi]) {
            continue;
        }
        let mut sides = Vec::new();
        let mut images = Vec::new();
        for s in &p.sides {
            match *s {
                Side::Bseg(b) => {
                    images.push(SlotImage::Single(sides.len()));
                    sides.push(Side::Bseg(qbseg[b]));
                }
                Side::Arc { arc, forward } if fixed.contains(&arc) => {
                    let k = sides.len();
                    images.push(SlotImage::Slit(k, k + 1));
                    sides.push(Side::Arc { arc: qarc[arc], forward: true });
                    sides.push(Side::Arc { arc: qarc[arc], forward: false });
                    let _ = forward;
                }
                Side::Arc { arc, forward } => {
                    images.push(SlotImage::Single(sides.len()));
                    sides.push(Side::Arc { arc: qarc[arc], forward: forward ^ reversed(arc) });
                }
            }
        }
        polygon_map[pi] = polygons.len();
        slot_map[pi] = images;
        polygons.push(Polygon { id: p.id.clone(), sides });
    }
    for pi in 0..n {
        if polygon_map[pi] != usize::MAX {
            continue;
        }
        let src = involution.polygons[pi];
        polygon_map[pi] = polygon_map[src];
        let len = surface.polygons[pi].sides.len();
        let mut images = vec![SlotImage::Single(0); len];
        for k in 0..len {
            images[(k + involution.polygon_offset[src]) % len] = slot_map[src][k];
        }
        slot_map[pi] = images;
    }
    let q = DissectedSurface { name: format!("{}/G", surface.name), points, arcs, bsegs, polygons };
    q.ensure_valid().map_err(|e| internal(&q.name, e))?;
    let class = q.classify_dissection().map_err(|e| internal(&q.name, e))?;
    if !fixed.is_empty() && class.kind != DissectionKind::X {
        return Err(Error::new(Code::InternalGluing, &q.name, "quotient is not an orbifold dissection"));
    }
    let sheet = |i: usize, img: usize| if i == img { Sheet::Fixed } else if i < img { Sheet::Plus } else { Sheet::Minus };
    let proj = ProjectionData {
        point_map: qpoint,
        point_sheet: (0..surface.points.len()).map(|i| sheet(i, involution.points[i])).collect(),
        arc_map: qarc,
        arc_sheet: (0..surface.arcs.len()).map(|i| sheet(i, involution.arcs[i])).collect(),
        bseg_map: qbseg,
        polygon_map,
        polygon_sheet: (0..n).map(|i| sheet(i, involution.polygons[i])).collect(),
        slot_map,
        branch_points,
    };
    Ok((q, proj))
}

/// The canonical branched double cover of an orbifold dissection, with its
/// sheet-swapping involution.
pub fn double_cover(q: &DissectedSurface) -> Result<(DissectedSurface, SurfaceInvolution, ProjectionData)> {
    q.classify_dissection()?;
    let orb: Vec<bool> = q.points.iter().map(|p| p.kind == PointKind::Orbifold).collect();
    let regular: Vec<usize> = (0..q.points.len()).filter(|&p| !orb[p]).collect();
    let nr = regular.len();
    let mut point_index = vec![usize::MAX; q.points.len()];
    for (i, &p) in regular.iter().enumerate() {
        point_index[p] = i;
    }
    let cpoint = |p: usize, s: Sheet| point_index[p] + if s == Sheet::Minus { nr } else { 0 };
    let mut points = Vec::with_capacity(2 * nr);
    for s in [Sheet::Plus, Sheet::Minus] {
        for &p in &regular {
            points.push(MarkedPoint { id: format!("{}{}", q.points[p].id, s.suffix()), kind: q.points[p].kind });
        }
    }
    // arcs
    let mut bullet = Vec::new();
    let mut slit = Vec::new();
    for (i, a) in q.arcs.iter().enumerate() {
        match (orb[a.tail], orb[a.head]) {
            (false, false) => bullet.push(i),
            (true, true) => return Err(Error::new(Code::XDegree, &a.id, "arc joins two orbifold points")),
            _ => slit.push(i),
        }
    }
    let nb = bullet.len();
    let mut arc_index = vec![usize::MAX; q.arcs.len()];
    for (k, &a) in bullet.iter().enumerate() {
        arc_index[a] = k;
    }
    for (k, &a) in slit.iter().enumerate() {
        arc_index[a] = 2 * nb + k;
    }
    let carc = |a: usize, s: Sheet| arc_index[a] + if s == Sheet::Minus { nb } else { 0 };
    let mut arcs = Vec::with_capacity(2 * nb + slit.len());
    for s in [Sheet::Plus, Sheet::Minus] {
        for &a in &bullet {
            let x = &q.arcs[a];
            arcs.push(Arc { id: format!("{}{}", x.id, s.suffix()), tail: cpoint(x.tail, s), head: cpoint(x.head, s) });
        }
    }
    for &a in &slit {
        let x = &q.arcs[a];
        let m = if orb[x.tail] { x.head } else { x.tail };
        arcs.push(Arc { id: format!("{}~", x.id), tail: cpoint(m, Sheet::Plus), head: cpoint(m, Sheet::Minus) });
    }
    // polygons, one per (quotient polygon, starting sheet)
    let np = q.polygons.len();
    let mut polygons = vec![Polygon { id: String::new(), sides: Vec::new() }; 2 * np];
    let mut bsegs = vec![BoundarySegment { id: String::new(), tail: 0, head: 0 }; 2 * np];
    let mut slot_map = vec![Vec::new(); 2 * np];
    let mut polygon_map = vec![0; 2 * np];
    let mut polygon_sheet = vec![Sheet::Plus; 2 * np];
    let mut bseg_map = vec![0; 2 * np];
    for (pi, p) in q.polygons.iter().enumerate() {
        let b = q.bseg_slot(pi).ok_or_else(|| Error::new(Code::InternalGluing, &p.id, "polygon without boundary segment"))?;
        let Side::Bseg(qb) = p.sides[b] else { unreachable!() };
        let len = p.sides.len();
        for (e, start) in [Sheet::Plus, Sheet::Minus].into_iter().enumerate() {
            let idx = pi + e * np;
            let mut sheet = start;
            let mut sides = vec![Side::Bseg(idx)];
            let mut images = vec![SlotImage::Single(b)];
            let mut first_tail = None;
            let mut last_head = 0;
            let mut i = 1;
            while i < len {
                let k = (b + i) % len;
                let Side::Arc { arc, forward } = p.sides[k] else {
                    return Err(Error::new(Code::InternalGluing, &p.id, "second boundary segment in polygon"));
                };
                if arc_index[arc] < 2 * nb {
                    sides.push(Side::Arc { arc: carc(arc, sheet), forward });
                    images.push(SlotImage::Single(k));
                    first_tail.get_or_insert(cpoint(q.side_tail(p.sides[k]), sheet));
                    last_head = cpoint(q.side_head(p.sides[k]), sheet);
                    i += 1;
                } else {
                    let k2 = (b + i + 1) % len;
                    if i + 1 >= len || p.sides[k2] != (Side::Arc { arc, forward: !forward }) || !orb[q.side_head(p.sides[k])] {
                        return Err(Error::new(Code::InternalGluing, &p.id, "slit occurrences are not consecutive"));
                    }
                    let m = q.side_tail(p.sides[k]);
                    sides.push(Side::Arc { arc: arc_index[arc], forward: sheet == Sheet::Plus });
                    images.push(SlotImage::Slit(k, k2));
                    first_tail.get_or_insert(cpoint(m, sheet));
                    sheet = sheet.flip();
                    last_head = cpoint(m, sheet);
                    i += 2;
                }
            }
            let tail = last_head;
            let head = first_tail.ok_or_else(|| Error::new(Code::InternalGluing, &p.id, "polygon has no arc sides"))?;
            bsegs[idx] = BoundarySegment { id: format!("{}{}", q.bsegs[qb].id, start.suffix()), tail, head };
            polygons[idx] = Polygon { id: format!("{}{}", p.id, start.suffix()), sides };
            slot_map[idx] = images;
            polygon_map[idx] = pi;
            polygon_sheet[idx] = start;
            bseg_map[idx] = qb;
        }
    }
    let cover = DissectedSurface { name: format!("{}~", q.name), points, arcs, bsegs, polygons };
    cover.ensure_valid().map_err(|e| internal(&cover.name, e))?;
    let sigma_points: Vec<usize> = (0..2 * nr).map(|i| (i + nr) % (2 * nr)).collect();
    let na = cover.arcs.len();
    let sigma_arcs: Vec<usize> = (0..na).map(|i| if i < 2 * nb { (i + nb) % (2 * nb) } else { i }).collect();
    let rev: Vec<bool> = (0..na).map(|i| i >= 2 * nb).collect();
    let involution = SurfaceInvolution::induce(&cover, sigma_points, sigma_arcs, rev).map_err(|e| internal(&cover.name, e))?;
    validate_involution(&cover, &involution).map_err(|e| internal(&cover.name, e))?;
    let mut point_map = Vec::with_capacity(2 * nr);
    let mut point_sheet = Vec::with_capacity(2 * nr);
    for s in [Sheet::Plus, Sheet::Minus] {
        for &p in &regular {
            point_map.push(p);
            point_sheet.push(s);
        }
    }
    let mut arc_map = Vec::with_capacity(na);
    let mut arc_sheet = Vec::with_capacity(na);
    for s in [Sheet::Plus, Sheet::Minus] {
        for &a in &bullet {
            arc_map.push(a);
            arc_sheet.push(s);
        }
    }
    for &a in &slit {
        arc_map.push(a);
        arc_sheet.push(Sheet::Fixed);
    }
    let proj = ProjectionData {
        point_map,
        point_sheet,
        arc_map,
        arc_sheet,
        bseg_map,
        polygon_map,
        polygon_sheet,
        slot_map,
        branch_points: (0..q.points.len()).filter(|&p| orb[p]).collect(),
    };
    Ok((cover, involution, proj))
}

/// Lift of a curve from the quotient to the cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveLift {
    pub curve: CombinatorialCurve,
    /// For closed curves: whether one turn already closes up in the cover
    /// (otherwise `curve` is the lift followed by its image under the involution).
    pub closes_after_one_turn: bool,
}

/// Lift a curve passage by passage, starting on the `Plus` preimage of its
/// first polygon.
pub fn lift_curve(
    quotient: &DissectedSurface,
    cover: &DissectedSurface,
    proj: &ProjectionData,
    curve: &CombinatorialCurve,
) -> Result<CurveLift> {
    curve.validate(quotient)?;
    let bad = |msg: &str| Error::new(Code::InternalGluing, "lift", msg.to_string());
    let first = &curve.passages[0];
    let mut poly = proj.preimages(first.polygon)[0];
    let map_slot = |poly: usize, r: SlotRef| -> Result<SlotRef> {
        match r {
            SlotRef::Green => Ok(SlotRef::Green),
            SlotRef::Slot(k) => proj.cover_slot(poly, k).map(SlotRef::Slot).ok_or_else(|| bad("slot has no preimage")),
        }
    };
    let start = (poly, map_slot(poly, first.entry)?);
    let mut out = Vec::new();
    let rounds = if curve.closed { 2 } else { 1 };
    for round in 0..rounds {
        for (i, p) in curve.passages.iter().enumerate() {
            if proj.polygon_map[poly] != p.polygon {
                return Err(bad("lift left the preimage of the quotient curve"));
            }
            let entry = map_slot(poly, p.entry)?;
            let exit = map_slot(poly, p.exit)?;
            if entry == exit && p.entry != p.exit {
                return Err(Error::new(
                    Code::CurveThroughBranch,
                    &quotient.polygons[p.polygon].id,
                    "passage winds around an orbifold point",
                ));
            }
            if i == 0 && round == 0 && (poly, entry) != start {
                return Err(bad("inconsistent start"));
            }
            out.push(Passage { polygon: poly, entry, exit, side: p.side });
            let last = i + 1 == curve.passages.len();
            if last && !curve.closed {
                break;
            }
            let SlotRef::Slot(k) = exit else { return Err(bad("closed curve reaches the boundary")) };
            let (np, ns) = cover.opposite_occurrence(poly, k).ok_or_else(|| bad("crossing has no opposite side"))?;
            poly = np;
            let next = &curve.passages[(i + 1) % curve.passages.len()];
            if map_slot(poly, next.entry)? != SlotRef::Slot(ns) {
                return Err(bad("crossing does not match the next passage"));
            }
        }
        if !curve.closed {
            break;
        }
        let here = (poly, map_slot(poly, first.entry)?);
        if here == start {
            let lift = CombinatorialCurve { closed: true, passages: out };
            return Ok(CurveLift { curve: lift, closes_after_one_turn: round == 0 });
        }
    }
    if curve.closed {
        return Err(Error::from_diagnostics(vec![Diagnostic::new(
            Code::InternalGluing,
            "lift",
            "lift does not close after two turns",
        )]));
    }
    Ok(CurveLift { curve: CombinatorialCurve { closed: false, passages: out }, closes_after_one_turn: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::fixtures;

    #[test]
    fn cover_of_one_slit_disc() {
        let q = fixtures::load(fixtures::DISC_ONE_X).surface;
        let (cover, _, proj) = double_cover(&q).unwrap();
        let t = cover.topology().unwrap();
        assert_eq!((t.genus, t.boundary_count()), (0, 1));
        assert_eq!(cover.points.len(), 8);
        assert_eq!(proj.branch_points.len(), 1);
    }
}
