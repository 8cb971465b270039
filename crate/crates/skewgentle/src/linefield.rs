//! Curves encoded as polygon passages, winding numbers for the line field of
//! a dissection, canonical boundary and puncture curves, invariant tuples,
//! the derived-equivalence deciders, dual arcs, gradings and the complexes
//! attached to graded arcs.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::algebra::PathQuotient;
use crate::covering::{double_cover, lift_curve};
use crate::error::{Code, Error, Result};
use crate::presentations::DissectionQuiver;
use crate::surface::{Corner, DissectedSurface, PointKind, Side, SurfaceInvolution};

/// Which side of a directed chord the polygon's boundary segment lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BsegSide {
    Left,
    Right,
}

impl BsegSide {
    pub fn sign(self) -> i64 {
        match self {
            BsegSide::Left => 1,
            BsegSide::Right => -1,
        }
    }

    pub fn flip(self) -> BsegSide {
        match self {
            BsegSide::Left => BsegSide::Right,
            BsegSide::Right => BsegSide::Left,
        }
    }
}

/// A polygon slot, or the green point on the polygon's boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SlotRef {
    Slot(usize),
    Green,
}

/// One traversal of a polygon from an entry side to an exit side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Passage {
    pub polygon: usize,
    pub entry: SlotRef,
    pub exit: SlotRef,
    /// Declared side; required when entry and exit coincide.
    pub side: Option<BsegSide>,
}

/// Closed curve or arc between green points, as a sequence of passages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CombinatorialCurve {
    pub closed: bool,
    pub passages: Vec<Passage>,
}

fn invalid(subject: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::new(Code::InvalidCurve, subject, msg)
}

fn position(s: &DissectedSurface, polygon: usize, r: SlotRef) -> usize {
    match r {
        SlotRef::Green => 0,
        SlotRef::Slot(k) => s.position(polygon, k),
    }
}

/// Side of the boundary segment relative to a passage: computed from the
/// polygon word when the endpoints differ, otherwise the declared flag.
pub fn passage_side(s: &DissectedSurface, p: &Passage) -> Result<BsegSide> {
    let (a, c) = (position(s, p.polygon, p.entry), position(s, p.polygon, p.exit));
    let name = &s.polygons[p.polygon].id;
    if a == c {
        return p.side.ok_or_else(|| invalid(name, "same-slot passage needs an explicit side"));
    }
    let computed = if a < c { BsegSide::Left } else { BsegSide::Right };
    match p.side {
        Some(d) if d != computed => Err(invalid(name, "declared side contradicts the polygon word")),
        _ => Ok(computed),
    }
}

impl CombinatorialCurve {
    pub fn validate(&self, s: &DissectedSurface) -> Result<()> {
        let n = self.passages.len();
        if n == 0 {
            return Err(invalid("curve", "curve has no passages"));
        }
        for (i, p) in self.passages.iter().enumerate() {
            if p.polygon >= s.polygons.len() {
                return Err(invalid("curve", "unknown polygon"));
            }
            let name = &s.polygons[p.polygon].id;
            let len = s.polygons[p.polygon].sides.len();
            for (r, is_entry) in [(p.entry, true), (p.exit, false)] {
                match r {
                    SlotRef::Slot(k) => {
                        if k >= len {
                            return Err(invalid(name, format!("slot {k} out of range")));
                        }
                        if matches!(s.side(p.polygon, k), Side::Bseg(_)) {
                            return Err(invalid(name, "curve crosses a boundary segment"));
                        }
                    }
                    SlotRef::Green => {
                        let allowed = !self.closed && ((is_entry && i == 0) || (!is_entry && i + 1 == n));
                        if !allowed {
                            return Err(invalid(name, "green point away from the ends of an open curve"));
                        }
                    }
                }
            }
            if p.entry == SlotRef::Green && p.exit == SlotRef::Green {
                return Err(invalid(name, "arc without crossings"));
            }
            passage_side(s, p)?;
        }
        if !self.closed && (self.passages[0].entry != SlotRef::Green || self.passages[n - 1].exit != SlotRef::Green) {
            return Err(invalid("curve", "open curves run between green points"));
        }
        let steps = if self.closed { n } else { n - 1 };
        for i in 0..steps {
            let (p, q) = (&self.passages[i], &self.passages[(i + 1) % n]);
            let (SlotRef::Slot(k), SlotRef::Slot(l)) = (p.exit, q.entry) else {
                return Err(invalid("curve", "consecutive passages must meet at an arc"));
            };
            if s.opposite_occurrence(p.polygon, k) != Some((q.polygon, l)) {
                return Err(invalid(
                    &s.polygons[p.polygon].id,
                    format!("passage {i} and its successor do not cross the same arc"),
                ));
            }
        }
        Ok(())
    }

    /// Same curve traversed backwards.
    pub fn reversed(&self) -> CombinatorialCurve {
        let passages = self
            .passages
            .iter()
            .rev()
            .map(|p| Passage { polygon: p.polygon, entry: p.exit, exit: p.entry, side: p.side.map(BsegSide::flip) })
            .collect();
        CombinatorialCurve { closed: self.closed, passages }
    }

    /// Arcs crossed, in order.
    pub fn crossings(&self, s: &DissectedSurface) -> Vec<usize> {
        let n = self.passages.len();
        let count = if self.closed { n } else { n.saturating_sub(1) };
        (0..count)
            .filter_map(|i| match self.passages[i].exit {
                SlotRef::Slot(k) => s.side(self.passages[i].polygon, k).arc(),
                SlotRef::Green => None,
            })
            .collect()
    }
}

/// Winding number of a closed curve: +1 per passage with the boundary
/// segment on its left, −1 per passage with it on its right.
pub fn winding(s: &DissectedSurface, curve: &CombinatorialCurve) -> Result<i64> {
    if !curve.closed {
        return Err(invalid("curve", "winding numbers are defined for closed curves"));
    }
    curve.validate(s)?;
    curve.passages.iter().map(|p| passage_side(s, p).map(BsegSide::sign)).sum()
}

/// Closed curve parallel to a boundary component, with the boundary on its left.
pub fn boundary_curve(s: &DissectedSurface, component: usize) -> Result<CombinatorialCurve> {
    let comps = s.boundary_components();
    let comp = comps.get(component).ok_or_else(|| invalid("boundary", format!("no component {component}")))?;
    let rots = s.rotation_system()?;
    let bseg_polygon = |b: usize| {
        (0..s.polygons.len()).find(|&p| s.polygons[p].sides.contains(&Side::Bseg(b))).expect("validated surface")
    };
    let mut passages = Vec::new();
    let start = comp.bsegs[0];
    let mut b = start;
    loop {
        let p = bseg_polygon(b);
        let slots = s.slots_after_bseg(p);
        let (first, last) = (slots[0], slots[slots.len() - 1]);
        passages.push(Passage {
            polygon: p,
            entry: SlotRef::Slot(first),
            exit: SlotRef::Slot(last),
            side: Some(BsegSide::Left),
        });
        let v = s.bsegs[b].tail;
        for c in rots[v].corners.iter().rev() {
            let len = s.polygons[c.polygon].sides.len();
            passages.push(Passage {
                polygon: c.polygon,
                entry: SlotRef::Slot((c.slot + 1) % len),
                exit: SlotRef::Slot(c.slot),
                side: Some(BsegSide::Right),
            });
        }
        b = s.bsegs.iter().position(|x| x.head == v).expect("validated surface");
        if b == start {
            break;
        }
    }
    Ok(CombinatorialCurve { closed: true, passages })
}

/// Loop around an interior point through the corners of its rotation.
pub fn puncture_loop(s: &DissectedSurface, point: usize) -> Result<CombinatorialCurve> {
    let pt = &s.points[point];
    if pt.kind == PointKind::Boundary {
        return Err(Error::new(Code::BoundaryPoint, &pt.id, "loops are taken around interior points"));
    }
    let rots = s.rotation_system()?;
    let rot = &rots[point];
    if rot.corners.is_empty() {
        return Err(invalid(&pt.id, "point has no incident arcs"));
    }
    let passages = rot
        .corners
        .iter()
        .rev()
        .map(|c| {
            let len = s.polygons[c.polygon].sides.len();
            Passage {
                polygon: c.polygon,
                entry: SlotRef::Slot((c.slot + 1) % len),
                exit: SlotRef::Slot(c.slot),
                side: Some(BsegSide::Right),
            }
        })
        .collect();
    Ok(CombinatorialCurve { closed: true, passages })
}

// ---------------------------------------------------------------------------
// Invariants

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Boundary,
    Puncture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct InvariantEntry {
    pub winding: i64,
    pub marked_points: usize,
    pub kind: EntryKind,
}

/// Genus together with the sorted multiset of (winding, marked points, kind).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantTuple {
    pub genus: i64,
    pub entries: Vec<InvariantEntry>,
}

impl InvariantTuple {
    pub fn boundary_windings(&self) -> Vec<i64> {
        self.entries.iter().filter(|e| e.kind == EntryKind::Boundary).map(|e| e.winding).collect()
    }
}

/// Invariant tuple; orbifold points count as punctures.
pub fn invariant_tuple(s: &DissectedSurface) -> Result<InvariantTuple> {
    let topo = s.topology()?;
    let mut entries = Vec::new();
    for (i, comp) in topo.boundary.iter().enumerate() {
        entries.push(InvariantEntry {
            winding: winding(s, &boundary_curve(s, i)?)?,
            marked_points: comp.points.len(),
            kind: EntryKind::Boundary,
        });
    }
    for (p, pt) in s.points.iter().enumerate() {
        if pt.kind != PointKind::Boundary {
            entries.push(InvariantEntry {
                winding: winding(s, &puncture_loop(s, p)?)?,
                marked_points: 0,
                kind: EntryKind::Puncture,
            });
        }
    }
    entries.sort();
    Ok(InvariantTuple { genus: topo.genus, entries })
}

/// Lift of one quotient boundary curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftSummary {
    pub component: usize,
    pub quotient_winding: i64,
    pub closes_after_one_turn: bool,
    pub lift_winding: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverInvariants {
    pub genus: i64,
    pub boundary_count: usize,
    /// Marked points per boundary component, sorted.
    pub marked_per_boundary: Vec<usize>,
    pub orbifold_points: usize,
    /// Boundary windings computed directly on the cover, sorted.
    pub windings: Vec<i64>,
    /// Boundary windings obtained from lifted quotient curves, sorted.
    pub lifted_windings: Vec<i64>,
    pub lifts: Vec<LiftSummary>,
    /// Lift windings agree with quotient windings (doubled for lifts that
    /// need two turns) and with the direct cover computation.
    pub crosscheck: bool,
    pub tuple: InvariantTuple,
}

/// Invariants of the canonical double cover of an orbifold dissection.
pub fn cover_invariant_tuple(q: &DissectedSurface) -> Result<CoverInvariants> {
    let (cover, _, proj) = double_cover(q)?;
    let tuple = invariant_tuple(&cover)?;
    let topo = cover.topology()?;
    let qtopo = q.topology()?;
    let mut lifts = Vec::new();
    let mut lifted = Vec::new();
    let mut crosscheck = true;
    for i in 0..qtopo.boundary.len() {
        let c = boundary_curve(q, i)?;
        let w = winding(q, &c)?;
        let lift = lift_curve(q, &cover, &proj, &c)?;
        let lw = winding(&cover, &lift.curve)?;
        if lift.closes_after_one_turn {
            crosscheck &= lw == w;
            lifted.extend([lw, lw]);
        } else {
            crosscheck &= lw == 2 * w;
            lifted.push(lw);
        }
        lifts.push(LiftSummary {
            component: i,
            quotient_winding: w,
            closes_after_one_turn: lift.closes_after_one_turn,
            lift_winding: lw,
        });
    }
    lifted.sort();
    let windings = tuple.boundary_windings();
    let mut sorted = windings.clone();
    sorted.sort();
    crosscheck &= sorted == lifted;
    let mut marked: Vec<usize> = topo.boundary.iter().map(|b| b.points.len()).collect();
    marked.sort();
    Ok(CoverInvariants {
        genus: topo.genus,
        boundary_count: topo.boundary.len(),
        marked_per_boundary: marked,
        orbifold_points: qtopo.orbifold_points,
        windings: sorted,
        lifted_windings: lifted,
        lifts,
        crosscheck,
        tuple,
    })
}

// ---------------------------------------------------------------------------
// Deciders

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub left: String,
    pub right: String,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecisionReport {
    pub mode: String,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub note: String,
}

fn check_row<T: std::fmt::Debug + PartialEq>(name: &str, a: T, b: T) -> Check {
    Check { name: name.into(), left: format!("{a:?}"), right: format!("{b:?}"), matches: a == b }
}

const SIGN_NOTE: &str = "windings use one global orientation convention; a simultaneous sign flip of all windings describes the same line-field class";

/// Compare invariant tuples of two orbifold dissections. Complete in genus 0.
pub fn decide_tilting_equiv(a: &DissectedSurface, b: &DissectedSurface) -> Result<DecisionReport> {
    let (ta, tb) = (a.topology()?, b.topology()?);
    let (ia, ib) = (invariant_tuple(a)?, invariant_tuple(b)?);
    let checks = vec![
        check_row("genus", ta.genus, tb.genus),
        check_row("boundary_components", ta.boundary.len(), tb.boundary.len()),
        check_row("punctures", ta.punctures, tb.punctures),
        check_row("orbifold_points", ta.orbifold_points, tb.orbifold_points),
        check_row("invariant_tuple", &ia.entries, &ib.entries),
    ];
    let all = checks.iter().all(|c| c.matches);
    let (verdict, note) = if !all {
        (Verdict::NotEquivalent, "an invariant differs".to_string())
    } else if ta.genus == 0 {
        (Verdict::Equivalent, format!("genus 0: invariants are complete; {SIGN_NOTE}"))
    } else {
        (Verdict::Inconclusive, "genus > 0: further line-field invariants are not checked".to_string())
    };
    Ok(DecisionReport { mode: "tilting".into(), verdict, checks, note })
}

/// Necessary conditions on the canonical covers; never concludes equivalence.
pub fn decide_cover_equiv(a: &DissectedSurface, b: &DissectedSurface) -> Result<DecisionReport> {
    let (ca, cb) = (cover_invariant_tuple(a)?, cover_invariant_tuple(b)?);
    let checks = vec![
        check_row("cover_genus", ca.genus, cb.genus),
        check_row("cover_boundary_components", ca.boundary_count, cb.boundary_count),
        check_row("cover_marked_points_per_boundary", &ca.marked_per_boundary, &cb.marked_per_boundary),
        check_row("orbifold_points", ca.orbifold_points, cb.orbifold_points),
        check_row("cover_windings", &ca.windings, &cb.windings),
    ];
    let verdict = if checks.iter().all(|c| c.matches) { Verdict::Inconclusive } else { Verdict::NotEquivalent };
    let note = match verdict {
        Verdict::NotEquivalent => "a necessary condition fails".to_string(),
        _ => "all necessary conditions hold; equivariant diffeomorphism is not decided".to_string(),
    };
    Ok(DecisionReport { mode: "cover".into(), verdict, checks, note })
}

// ---------------------------------------------------------------------------
// Dual arcs

/// One arc between green points for every arc of the dissection, crossing
/// only that arc.
pub fn dual_dissection(s: &DissectedSurface) -> Result<Vec<CombinatorialCurve>> {
    s.ensure_valid()?;
    let occ = s.occurrences();
    let mut out = Vec::with_capacity(s.arcs.len());
    for (a, o) in occ.iter().enumerate() {
        let (Some((p, k)), Some((q, l))) = (o[0], o[1]) else {
            return Err(invalid(&s.arcs[a].id, "arc lacks an occurrence"));
        };
        let curve = CombinatorialCurve {
            closed: false,
            passages: vec![
                Passage { polygon: p, entry: SlotRef::Green, exit: SlotRef::Slot(k), side: None },
                Passage { polygon: q, entry: SlotRef::Slot(l), exit: SlotRef::Green, side: None },
            ],
        };
        curve.validate(s)?;
        out.push(curve);
    }
    Ok(out)
}

/// Regions cut out by the canonical dual arcs, each given by the marked
/// points it contains. The dual arcs form a valid dissection exactly when
/// every region contains one point.
pub fn dual_regions(s: &DissectedSurface) -> Result<Vec<Vec<usize>>> {
    s.ensure_valid()?;
    // sector (polygon, corner slot) contains the vertex between slot and slot + 1
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (p, poly) in s.polygons.iter().enumerate() {
        for k in 0..poly.sides.len() {
            let n = ids.len();
            ids.insert((p, k), n);
        }
    }
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (p, poly) in s.polygons.iter().enumerate() {
        let len = poly.sides.len();
        for k in 0..len {
            if let Some((q, l)) = s.opposite_occurrence(p, k) {
                let lq = s.polygons[q].sides.len();
                // end of side k meets start of side l, and vice versa
                let pairs = [(ids[&(p, k)], ids[&(q, (l + lq - 1) % lq)]), (ids[&(p, (k + len - 1) % len)], ids[&(q, l)])];
                for (x, y) in pairs {
                    let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                    parent[rx] = ry;
                }
            }
        }
    }
    let mut regions: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&(p, k), &id) in &ids {
        let r = find(&mut parent, id);
        let v = s.side_head(s.side(p, k));
        let e = regions.entry(r).or_default();
        if !e.contains(&v) {
            e.push(v);
        }
    }
    Ok(regions.into_values().map(|mut v| {
        v.sort_unstable();
        v
    }).collect())
}

// ---------------------------------------------------------------------------
// Gradings

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GradingOutcome {
    /// Grades per curve, one per crossing.
    Consistent(Vec<Vec<i64>>),
    /// A cycle of constraints (curve, crossing) whose offsets do not sum to
    /// zero; `defect` is the mismatch. `(usize::MAX, 0)` denotes the anchor ground.
    Inconsistent { cycle: Vec<(usize, usize)>, defect: i64 },
}

/// Anchor fixing the grade of one crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Anchor {
    pub curve: usize,
    pub crossing: usize,
    pub value: i64,
}

/// Solve for gradings of a family of open curves: consecutive crossings
/// differ by the passage sign, and curves leaving the same green point share
/// the grade of their crossing next to it. `equalities` adds further
/// constraints (e.g. symmetric grades at orbit partners).
pub fn grading_solver(
    s: &DissectedSurface,
    curves: &[CombinatorialCurve],
    anchors: &[Anchor],
    equalities: &[((usize, usize), (usize, usize))],
) -> Result<GradingOutcome> {
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut offset_of: Vec<usize> = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        if c.closed {
            return Err(invalid(format!("curve {ci}"), "gradings are solved for open curves"));
        }
        c.validate(s)?;
        offset_of.push(nodes.len());
        for t in 0..c.passages.len() - 1 {
            nodes.push((ci, t));
        }
    }
    let ground = nodes.len();
    let node = |c: usize, t: usize| offset_of[c] + t;
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nodes.len() + 1];
    let mut add = |u: usize, v: usize, off: i64| {
        adj[u].push((v, off));
        adj[v].push((u, -off));
    };
    let mut green: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (ci, c) in curves.iter().enumerate() {
        let r = c.passages.len() - 1;
        for t in 0..r.saturating_sub(1) {
            add(node(ci, t), node(ci, t + 1), passage_side(s, &c.passages[t + 1])?.sign());
        }
        green.entry(c.passages[0].polygon).or_default().push(node(ci, 0));
        green.entry(c.passages[r].polygon).or_default().push(node(ci, r - 1));
    }
    for group in green.values() {
        for w in group.windows(2) {
            add(w[0], w[1], 0);
        }
    }
    for &((c1, t1), (c2, t2)) in equalities {
        add(node(c1, t1), node(c2, t2), 0);
    }
    for a in anchors {
        add(ground, node(a.curve, a.crossing), a.value);
    }
    let mut pot: Vec<Option<i64>> = vec![None; nodes.len() + 1];
    let mut parent: Vec<usize> = vec![usize::MAX; nodes.len() + 1];
    let mut order: Vec<usize> = vec![ground];
    order.extend(0..nodes.len());
    let label = |u: usize| if u == ground { (usize::MAX, 0) } else { nodes[u] };
    for root in order {
        if pot[root].is_some() {
            continue;
        }
        if root != ground && !anchors.is_empty() {
            return Err(Error::new(
                Code::NotConnectedToAnchor,
                format!("curve {}", nodes[root].0),
                "crossing is not linked to any anchor",
            ));
        }
        pot[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let pu = pot[u].unwrap();
            for &(v, off) in &adj[u] {
                match pot[v] {
                    None => {
                        pot[v] = Some(pu + off);
                        parent[v] = u;
                        queue.push_back(v);
                    }
                    Some(pv) if pv != pu + off => {
                        // witness: tree path u -> lca <- v closed by the edge
                        let path_to_root = |mut x: usize| {
                            let mut p = vec![x];
                            while parent[x] != usize::MAX {
                                x = parent[x];
                                p.push(x);
                            }
                            p
                        };
                        let (pu_path, pv_path) = (path_to_root(u), path_to_root(v));
                        let lca = *pu_path.iter().find(|x| pv_path.contains(x)).unwrap();
                        let mut cycle: Vec<usize> = pu_path.iter().copied().take_while(|&x| x != lca).collect();
                        cycle.push(lca);
                        let back: Vec<usize> = pv_path.iter().copied().take_while(|&x| x != lca).collect();
                        cycle.extend(back.into_iter().rev());
                        return Ok(GradingOutcome::Inconsistent {
                            cycle: cycle.into_iter().map(label).collect(),
                            defect: pu + off - pv,
                        });
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(GradingOutcome::Consistent(
        curves
            .iter()
            .enumerate()
            .map(|(ci, c)| (0..c.passages.len() - 1).map(|t| pot[node(ci, t)].unwrap()).collect())
            .collect(),
    ))
}

/// Open curve with one integer grade per crossing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedArc {
    pub curve: CombinatorialCurve,
    pub grades: Vec<i64>,
}

impl GradedArc {
    pub fn validate(&self, s: &DissectedSurface) -> Result<()> {
        self.curve.validate(s)?;
        if self.curve.closed || self.grades.len() + 1 != self.curve.passages.len() {
            return Err(invalid("graded arc", "one grade per crossing of an open curve"));
        }
        for t in 0..self.grades.len().saturating_sub(1) {
            let w = passage_side(s, &self.curve.passages[t + 1])?.sign();
            if self.grades[t + 1] - self.grades[t] != w {
                return Err(invalid("graded arc", format!("grades at crossings {t} and {} violate the winding rule", t + 1)));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Complexes

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub vertex: usize,
    pub shift: i64,
}

/// Nonzero differential entry: a path (arrows in traversal order) from the
/// vertex of summand `col` to the vertex of summand `row`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexEntry {
    pub row: usize,
    pub col: usize,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexPresentation {
    pub summands: Vec<Summand>,
    pub entries: Vec<ComplexEntry>,
}

/// Corner-arrow path inside a polygon from the arc at slot `from` to the arc
/// at slot `to`, going around the side away from the boundary segment.
fn corner_path(s: &DissectedSurface, dq: &DissectionQuiver, polygon: usize, from: usize, to: usize) -> Result<Vec<usize>> {
    let len = s.polygons[polygon].sides.len();
    let mut path = Vec::new();
    let mut k = from;
    while k != to {
        let a = dq
            .arrow_at_corner(Corner { polygon, slot: k })
            .ok_or_else(|| invalid(&s.polygons[polygon].id, "path passes the boundary segment"))?;
        path.push(a);
        k = (k + 1) % len;
    }
    Ok(path)
}

/// Complex of projectives attached to a graded arc.
pub fn build_complex(s: &DissectedSurface, dq: &DissectionQuiver, garc: &GradedArc) -> Result<ComplexPresentation> {
    garc.validate(s)?;
    let c = &garc.curve;
    let arcs = c.crossings(s);
    let summands: Vec<Summand> =
        arcs.iter().zip(&garc.grades).map(|(&vertex, &shift)| Summand { vertex, shift }).collect();
    let mut entries = Vec::new();
    for j in 0..summands.len().saturating_sub(1) {
        let p = &c.passages[j + 1];
        let (SlotRef::Slot(a), SlotRef::Slot(b)) = (p.entry, p.exit) else { unreachable!("validated") };
        if a == b {
            return Err(invalid(&s.polygons[p.polygon].id, "passage enters and leaves through the same side"));
        }
        match passage_side(s, p)? {
            BsegSide::Left => entries.push(ComplexEntry { row: j + 1, col: j, path: corner_path(s, dq, p.polygon, a, b)? }),
            BsegSide::Right => entries.push(ComplexEntry { row: j, col: j + 1, path: corner_path(s, dq, p.polygon, b, a)? }),
        }
    }
    Ok(ComplexPresentation { summands, entries })
}

/// Whether the differential squares to zero in the algebra.
pub fn verify_d2(c: &ComplexPresentation, pq: &PathQuotient) -> bool {
    let n = c.summands.len();
    for k in 0..n {
        for m in 0..n {
            let mut total = crate::algebra::Vector::new();
            for first in c.entries.iter().filter(|e| e.col == m) {
                for second in c.entries.iter().filter(|e| e.col == first.row && e.row == k) {
                    let mut v = pq.path_nf(c.summands[m].vertex, &first.path);
                    for &a in &second.path {
                        v = pq.times_arrow(&v, a);
                    }
                    crate::algebra::add_scaled(&mut total, &v, &num_traits::One::one());
                }
            }
            if !total.is_empty() {
                return false;
            }
        }
    }
    true
}

/// Image of a graded arc under the involution, keeping the grades.
pub fn graded_arc_image(s: &DissectedSurface, involution: &SurfaceInvolution, garc: &GradedArc) -> GradedArc {
    let passages = garc
        .curve
        .passages
        .iter()
        .map(|p| {
            let map = |r: SlotRef| match r {
                SlotRef::Green => SlotRef::Green,
                SlotRef::Slot(k) => SlotRef::Slot(involution.map_slot(s, p.polygon, k).1),
            };
            Passage { polygon: involution.polygons[p.polygon], entry: map(p.entry), exit: map(p.exit), side: p.side }
        })
        .collect();
    GradedArc { curve: CombinatorialCurve { closed: garc.curve.closed, passages }, grades: garc.grades.clone() }
}
