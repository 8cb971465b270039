//! ℤ₂-actions on presentations, skew group algebras, orbit-choice
//! idempotents and exact verification of the comparison maps between
//! orbifold algebras, cover algebras and their skew group algebras.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{
    add_scaled, corner, int, rank, scaled, unit_vector, verify_morphism, CornerAlgebra, GeneratorImages,
    MorphismReport, PathQuotient, Scalar, TableAlgebra, Vector,
};
use crate::covering::{double_cover, ProjectionData, Sheet};
use crate::error::{Code, Error, Result};
use crate::presentations::{
    quiver_from_dissection, split, triple_from_x_dissection, DissectionQuiver, Presentation, SplitArrowLabel,
    SplitPresentation,
};
use crate::surface::{DissectedSurface, SurfaceInvolution};

/// Order-two automorphism of a presentation: a vertex permutation and a
/// signed arrow permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraInvolution {
    pub vertex_perm: Vec<usize>,
    pub arrow_perm: Vec<usize>,
    /// +1 or −1 per arrow.
    pub arrow_sign: Vec<i64>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::new(Code::BadInvolution, "involution", msg)
}

impl AlgebraInvolution {
    pub fn identity(p: &Presentation) -> Self {
        AlgebraInvolution {
            vertex_perm: (0..p.quiver.vertices.len()).collect(),
            arrow_perm: (0..p.quiver.arrows.len()).collect(),
            arrow_sign: vec![1; p.quiver.arrows.len()],
        }
    }

    /// Checks order two, compatibility with sources and targets, and that
    /// every relation maps into the ideal (evaluated in the quotient).
    pub fn validate(&self, pq: &PathQuotient) -> Result<()> {
        let q = &pq.presentation.quiver;
        if self.vertex_perm.len() != q.vertices.len()
            || self.arrow_perm.len() != q.arrows.len()
            || self.arrow_sign.len() != q.arrows.len()
        {
            return Err(bad("size mismatch"));
        }
        for (v, &w) in self.vertex_perm.iter().enumerate() {
            if w >= q.vertices.len() || self.vertex_perm[w] != v {
                return Err(bad(format!("vertex {} is not swapped back", q.vertices[v])));
            }
        }
        for (a, &b) in self.arrow_perm.iter().enumerate() {
            if b >= q.arrows.len() || self.arrow_perm[b] != a {
                return Err(bad(format!("arrow {} is not swapped back", q.arrows[a].id)));
            }
            if !matches!(self.arrow_sign[a], 1 | -1) || self.arrow_sign[a] * self.arrow_sign[b] != 1 {
                return Err(bad(format!("arrow {} has an inconsistent sign", q.arrows[a].id)));
            }
            let (x, y) = (&q.arrows[a], &q.arrows[b]);
            if self.vertex_perm[x.source] != y.source || self.vertex_perm[x.target] != y.target {
                return Err(bad(format!("arrow {} does not map compatibly with its endpoints", x.id)));
            }
        }
        for (i, r) in pq.presentation.relations.iter().enumerate() {
            let mut value = Vector::new();
            for (c, path) in &r.terms {
                let src = self.vertex_perm[q.arrows[path[0]].source];
                let (img, sign) = self.map_path(path);
                add_scaled(&mut value, &pq.path_nf(src, &img), &(c * int(sign)));
            }
            if !value.is_empty() {
                return Err(bad(format!("relation {i} is not preserved")));
            }
        }
        Ok(())
    }

    fn map_path(&self, path: &[usize]) -> (Vec<usize>, i64) {
        let sign = path.iter().map(|&a| self.arrow_sign[a]).product();
        (path.iter().map(|&a| self.arrow_perm[a]).collect(), sign)
    }

    /// Matrix of the induced algebra automorphism on the path basis.
    pub fn action_matrix(&self, pq: &PathQuotient) -> Vec<Vector> {
        pq.basis
            .iter()
            .map(|b| {
                let (img, sign) = self.map_path(&b.arrows);
                scaled(&pq.path_nf(self.vertex_perm[b.source], &img), &int(sign))
            })
            .collect()
    }
}

/// Involution of a dissection's algebra induced by a surface involution.
pub fn induced_involution(s: &DissectedSurface, involution: &SurfaceInvolution, dq: &DissectionQuiver) -> Result<AlgebraInvolution> {
    let arrow_perm = dq
        .arrow_corner
        .iter()
        .map(|&c| dq.arrow_at_corner(involution.map_corner(s, c)).ok_or_else(|| bad("corner image carries no arrow")))
        .collect::<Result<Vec<_>>>()?;
    Ok(AlgebraInvolution {
        vertex_perm: involution.arcs.clone(),
        arrow_sign: vec![1; arrow_perm.len()],
        arrow_perm,
    })
}

/// Involution of the split presentation exchanging the two copies of each
/// split vertex and relabelling arrows accordingly.
pub fn dual_action(sp: &SplitPresentation) -> AlgebraInvolution {
    let flip = |e: Option<u8>| e.map(|x| 1 - x);
    let vertex_perm = sp.vertex_origin.iter().map(|&(v, e)| sp.vertex(v, flip(e)).expect("both copies exist")).collect();
    let arrow_perm: Vec<usize> = sp
        .arrow_origin
        .iter()
        .map(|l| {
            sp.arrow(SplitArrowLabel { base: l.base, source_eps: flip(l.source_eps), target_eps: flip(l.target_eps) })
                .expect("all copies exist")
        })
        .collect();
    AlgebraInvolution { vertex_perm, arrow_sign: vec![1; arrow_perm.len()], arrow_perm }
}

/// Skew group algebra of a ℤ₂-action: basis `x⊗1` (indices `0..n`) and
/// `x⊗σ` (indices `n..2n`).
#[derive(Debug, Clone)]
pub struct SkewGroupData {
    pub algebra: TableAlgebra,
    pub base_dim: usize,
    /// Matrix of the group action on the base algebra.
    pub action: Vec<Vector>,
}

impl SkewGroupData {
    /// `x⊗1` when `twisted` is false, `x⊗σ` otherwise.
    pub fn tensor(&self, x: &Vector, twisted: bool) -> Vector {
        let off = if twisted { self.base_dim } else { 0 };
        x.iter().map(|(k, c)| (k + off, c.clone())).collect()
    }

    /// `x⊗(1 + (−1)^eps σ)/2`.
    pub fn half(&self, x: &Vector, eps: u8) -> Vector {
        let h = Scalar::new(1.into(), 2.into());
        let mut v = scaled(&self.tensor(x, false), &h);
        add_scaled(&mut v, &self.tensor(x, true), &if eps == 0 { h } else { -h });
        v
    }

    /// Dual group action: +1 on `x⊗1`, −1 on `x⊗σ`.
    pub fn character(&self, v: &Vector) -> Vector {
        v.iter().map(|(&k, c)| (k, if k < self.base_dim { c.clone() } else { -c.clone() })).collect()
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        self.algebra.mul(x, y)
    }

    pub fn mul3(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        self.mul(&self.mul(x, y), z)
    }
}

/// Twisted product `(λ⊗g)(μ⊗h) = λ·g(μ) ⊗ gh` on a table algebra with a
/// linear involutive action.
pub fn skew_group_table(base: &TableAlgebra, action: &[Vector], sep: &str) -> TableAlgebra {
    let n = base.dim();
    let mut table = vec![vec![Vector::new(); 2 * n]; 2 * n];
    for (x, row) in table.iter_mut().enumerate() {
        let (i, gi) = (x % n, x / n);
        for (y, cell) in row.iter_mut().enumerate() {
            let (j, hj) = (y % n, y / n);
            let moved = if gi == 0 { unit_vector(j) } else { action[j].clone() };
            let prod = base.mul(&unit_vector(i), &moved);
            let off = ((gi + hj) % 2) * n;
            *cell = prod.into_iter().map(|(k, c)| (k + off, c)).collect();
        }
    }
    let labels = (0..2 * n).map(|x| format!("{}{sep}{}", base.labels[x % n], if x < n { "1" } else { "s" })).collect();
    TableAlgebra { labels, table, unit: base.unit.clone() }
}

pub fn skew_group(pq: &PathQuotient, inv: &AlgebraInvolution) -> Result<SkewGroupData> {
    inv.validate(pq)?;
    let action = inv.action_matrix(pq);
    let algebra = skew_group_table(&pq.to_table(), &action, "*");
    Ok(SkewGroupData { algebra, base_dim: pq.dim(), action })
}

/// Vertex orbits split into chosen representatives, their partners and
/// fixed vertices; arrows likewise (no arrow is fixed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitChoice {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub fixed: Vec<usize>,
    pub arrows_plus: Vec<usize>,
    pub arrows_minus: Vec<usize>,
}

impl OrbitChoice {
    /// Choice read off the sheets of a projection (vertices are arcs,
    /// arrows follow the sheet of their marked point).
    pub fn from_projection(proj: &ProjectionData, dq: &DissectionQuiver) -> OrbitChoice {
        let pick = |s: Sheet| (0..proj.arc_sheet.len()).filter(|&a| proj.arc_sheet[a] == s).collect();
        let arrows = |s: Sheet| (0..dq.arrow_point.len()).filter(|&a| proj.point_sheet[dq.arrow_point[a]] == s).collect();
        OrbitChoice {
            plus: pick(Sheet::Plus),
            minus: pick(Sheet::Minus),
            fixed: pick(Sheet::Fixed),
            arrows_plus: arrows(Sheet::Plus),
            arrows_minus: arrows(Sheet::Minus),
        }
    }

    /// Whether every representative arrow starts and ends at representative
    /// or fixed vertices.
    pub fn arrows_respect_vertices(&self, p: &Presentation) -> bool {
        self.arrows_plus.iter().all(|&a| {
            let arr = &p.quiver.arrows[a];
            [arr.source, arr.target].iter().all(|v| self.plus.contains(v) || self.fixed.contains(v))
        })
    }
}

/// `Σ e_{i+}⊗1 + Σ_{fixed} e_j⊗1`.
pub fn orbit_idempotent(choice: &OrbitChoice) -> Vector {
    let mut v = Vector::new();
    for &i in choice.plus.iter().chain(&choice.fixed) {
        v.insert(i, Scalar::one());
    }
    v
}

/// The primitive idempotents `e_{i±}⊗1` and `e_j⊗(1±σ)/2`.
pub fn primitive_idempotents(sg: &SkewGroupData, choice: &OrbitChoice) -> Vec<Vector> {
    let mut out: Vec<Vector> = choice.plus.iter().chain(&choice.minus).map(|&i| unit_vector(i)).collect();
    for &j in &choice.fixed {
        out.push(sg.half(&unit_vector(j), 0));
        out.push(sg.half(&unit_vector(j), 1));
    }
    out
}

/// Outcome of verifying an explicit map into a corner of a skew group algebra.
#[derive(Debug, Clone, Serialize)]
pub struct MapReport {
    pub source_dim: usize,
    pub corner_dim: usize,
    pub morphism: MorphismReport,
    /// Commutes with the group actions on generators (only checked for the cover map).
    pub equivariant: Option<bool>,
    /// Generator label and image, in the ambient skew group basis.
    #[serde(skip)]
    pub vertex_images: Vec<Vector>,
    #[serde(skip)]
    pub arrow_images: Vec<Vector>,
}

impl MapReport {
    pub fn is_isomorphism(&self) -> bool {
        self.morphism.is_isomorphism() && self.equivariant != Some(false)
    }
}

fn into_corner(c: &CornerAlgebra, v: &Vector, code: Code, what: &str) -> Result<Vector> {
    c.coords(v).ok_or_else(|| Error::new(code, what, "image lies outside the corner algebra"))
}

/// All data of the comparison between an orbifold algebra and the basic
/// part of a cover's skew group algebra.
#[derive(Debug, Clone)]
pub struct BasicSkewGroup {
    pub cover_quiver: DissectionQuiver,
    pub cover_algebra: PathQuotient,
    pub skew: SkewGroupData,
    pub choice: OrbitChoice,
    pub corner: CornerAlgebra,
    pub split: SplitPresentation,
    pub split_algebra: PathQuotient,
    pub corner_map: MapReport,
}

/// Build the basic corner `e·AG·e` (orbit idempotent `e`) for a cover with
/// involution and verify the explicit map from the quotient's split algebra
/// onto it.
pub fn basic_skew_group(
    cover: &DissectedSurface,
    involution: &SurfaceInvolution,
    quotient: &DissectedSurface,
    proj: &ProjectionData,
) -> Result<BasicSkewGroup> {
    let dq = quiver_from_dissection(cover)?;
    let pq = PathQuotient::new(&dq.pair.presentation())?;
    let inv = induced_involution(cover, involution, &dq)?;
    let sg = skew_group(&pq, &inv)?;
    let choice = OrbitChoice::from_projection(proj, &dq);
    let eta = orbit_idempotent(&choice);
    let corner_alg = corner(&sg.algebra, &eta)?;

    let (triple, qdq) = triple_from_x_dissection(quotient)?;
    let sp = split(&triple)?;
    let spq = PathQuotient::new(&sp.presentation())?;

    let e = |v: usize| unit_vector(v);
    let plus_lift = |qa: usize| proj.arc_preimages(qa)[0];
    let vertex_image = |(qa, eps): (usize, Option<u8>)| match eps {
        None => sg.tensor(&e(plus_lift(qa)), false),
        Some(x) => sg.half(&e(plus_lift(qa)), x),
    };
    let vertex_images: Vec<Vector> = sp.vertex_origin.iter().map(|&o| vertex_image(o)).collect();

    let mut arrow_images = Vec::new();
    for label in &sp.arrow_origin {
        let qc = qdq.arrow_corner[label.base];
        let lifts: Vec<_> = proj
            .preimages(qc.polygon)
            .into_iter()
            .filter_map(|cp| {
                let slot = (0..proj.slot_map[cp].len()).find(|&k| proj.slot_map[cp][k].last() == qc.slot)?;
                Some(crate::surface::Corner { polygon: cp, slot })
            })
            .collect();
        let plus = lifts
            .iter()
            .copied()
            .find(|c| dq.arrow_at_corner(*c).is_some_and(|a| proj.point_sheet[dq.arrow_point[a]] == Sheet::Plus))
            .ok_or_else(|| Error::new(Code::CornerMapRelationFailure, &triple.quiver.arrows[label.base].id, "arrow has no lift at a representative point"))?;
        let a_plus = dq.arrow_at_corner(plus).unwrap();
        let a_minus = inv.arrow_perm[a_plus];
        let (ap, am) = (pq.arrow_element(a_plus), pq.arrow_element(a_minus));
        let qarr = &triple.quiver.arrows[label.base];
        let sign = |eps: u8| if eps == 0 { Scalar::one() } else { -Scalar::one() };
        let img = match (label.source_eps, label.target_eps) {
            (None, None) => {
                let mut both = sg.tensor(&ap, false);
                add_scaled(&mut both, &sg.tensor(&am, false), &Scalar::one());
                let mut mid = both.clone();
                for (k, c) in &both {
                    add_scaled(&mut mid, &unit_vector(k + sg.base_dim), c);
                }
                sg.mul3(&sg.tensor(&e(plus_lift(qarr.target)), false), &mid, &sg.tensor(&e(plus_lift(qarr.source)), false))
            }
            (Some(s), None) => {
                let mut mid = sg.tensor(&ap, false);
                add_scaled(&mut mid, &sg.tensor(&am, false), &sign(s));
                sg.mul3(&sg.tensor(&e(plus_lift(qarr.target)), false), &mid, &sg.half(&e(plus_lift(qarr.source)), s))
            }
            (None, Some(t)) => {
                let mut mid = sg.tensor(&ap, false);
                add_scaled(&mut mid, &sg.tensor(&am, false), &sign(t));
                sg.mul3(&sg.half(&e(plus_lift(qarr.target)), t), &mid, &sg.tensor(&e(plus_lift(qarr.source)), false))
            }
            (Some(s), Some(t)) => sg.mul3(
                &sg.half(&e(plus_lift(qarr.target)), t),
                &sg.tensor(&ap, false),
                &sg.half(&e(plus_lift(qarr.source)), s),
            ),
        };
        arrow_images.push(img);
    }

    let code = Code::CornerMapRelationFailure;
    let images = GeneratorImages {
        vertices: vertex_images.iter().map(|v| into_corner(&corner_alg, v, code, "vertex")).collect::<Result<_>>()?,
        arrows: arrow_images.iter().map(|v| into_corner(&corner_alg, v, code, "arrow")).collect::<Result<_>>()?,
    };
    let morphism = verify_morphism(&sp.presentation(), &images, &corner_alg.algebra, Some(spq.dim()));
    if !morphism.is_homomorphism() {
        let mut err = Error::new(code, "corner_map", "generator images violate the defining relations");
        err.diagnostics[0].message.push_str(&format!(": {}", morphism.failures.join("; ")));
        return Err(err);
    }
    let corner_map = MapReport {
        source_dim: spq.dim(),
        corner_dim: corner_alg.algebra.dim(),
        morphism,
        equivariant: None,
        vertex_images,
        arrow_images,
    };
    Ok(BasicSkewGroup {
        cover_quiver: dq,
        cover_algebra: pq,
        skew: sg,
        choice,
        corner: corner_alg,
        split: sp,
        split_algebra: spq,
        corner_map,
    })
}

/// Data of the comparison between a canonical cover's algebra and the basic
/// part of the split algebra's skew group algebra.
#[derive(Debug, Clone)]
pub struct CoverMapData {
    pub cover: DissectedSurface,
    pub cover_quiver: DissectionQuiver,
    pub cover_algebra: PathQuotient,
    pub split: SplitPresentation,
    pub skew: SkewGroupData,
    pub corner: CornerAlgebra,
    pub cover_map: MapReport,
}

/// Verify the explicit map from the canonical cover's algebra onto
/// the corner of the split algebra's skew group algebra cut out by the
/// untwisted copies, including compatibility with the group actions.
pub fn verify_cover_map(quotient: &DissectedSurface) -> Result<CoverMapData> {
    let (cover, involution, proj) = double_cover(quotient)?;
    let (triple, qdq) = triple_from_x_dissection(quotient)?;
    let sp = split(&triple)?;
    let spq = PathQuotient::new(&sp.presentation())?;
    let hat = dual_action(&sp);
    let sg = skew_group(&spq, &hat)?;
    let mut eta = Vector::new();
    for (v, &(_, eps)) in sp.vertex_origin.iter().enumerate() {
        if eps != Some(1) {
            eta.insert(v, Scalar::one());
        }
    }
    let corner_alg = corner(&sg.algebra, &eta)?;

    let dq = quiver_from_dissection(&cover)?;
    let pq = PathQuotient::new(&dq.pair.presentation())?;
    let half = Scalar::new(1.into(), 2.into());
    // x⊗(1 ± g)/2 and ½(x⊗1 ± y⊗g)
    let pm = |x: &Vector, y: &Vector, sheet: Sheet, scale: bool| {
        let mut v = sg.tensor(x, false);
        let s = if sheet == Sheet::Minus { -Scalar::one() } else { Scalar::one() };
        add_scaled(&mut v, &sg.tensor(y, true), &s);
        if scale {
            v = scaled(&v, &half);
        }
        v
    };
    let vertex_images: Vec<Vector> = (0..cover.arcs.len())
        .map(|a| {
            let qa = proj.arc_map[a];
            match proj.arc_sheet[a] {
                Sheet::Fixed => sg.tensor(&unit_vector(sp.vertex(qa, Some(0)).unwrap()), false),
                s => {
                    let v = unit_vector(sp.vertex(qa, None).unwrap());
                    pm(&v, &v, s, true)
                }
            }
        })
        .collect();
    let mut arrow_images = Vec::new();
    for (a, &c) in dq.arrow_corner.iter().enumerate() {
        let base = qdq
            .arrow_at_corner(proj.corner_image(c))
            .ok_or_else(|| Error::new(Code::CoverMapRelationFailure, &dq.pair.quiver.arrows[a].id, "corner has no image arrow"))?;
        let arr = &dq.pair.quiver.arrows[a];
        let sheet = proj.point_sheet[dq.arrow_point[a]];
        let fixed = |v: usize| proj.arc_sheet[v] == Sheet::Fixed;
        let el = |s: Option<u8>, t: Option<u8>| {
            let id = sp
                .arrow(SplitArrowLabel { base, source_eps: s, target_eps: t })
                .expect("split arrow exists");
            spq.arrow_element(id)
        };
        let img = match (fixed(arr.source), fixed(arr.target)) {
            (false, false) => {
                let x = el(None, None);
                pm(&x, &x, sheet, true)
            }
            (false, true) => {
                let x = el(None, Some(0));
                pm(&x, &x, sheet, true)
            }
            (true, false) => pm(&el(Some(0), None), &el(Some(1), None), sheet, true),
            (true, true) => pm(&el(Some(0), Some(0)), &el(Some(1), Some(0)), sheet, true),
        };
        arrow_images.push(img);
    }

    let code = Code::CoverMapRelationFailure;
    let images = GeneratorImages {
        vertices: vertex_images.iter().map(|v| into_corner(&corner_alg, v, code, "vertex")).collect::<Result<_>>()?,
        arrows: arrow_images.iter().map(|v| into_corner(&corner_alg, v, code, "arrow")).collect::<Result<_>>()?,
    };
    let morphism = verify_morphism(&dq.pair.presentation(), &images, &corner_alg.algebra, Some(pq.dim()));
    if !morphism.is_homomorphism() {
        let mut err = Error::new(code, "cover_map", "generator images violate the defining relations");
        err.diagnostics[0].message.push_str(&format!(": {}", morphism.failures.join("; ")));
        return Err(err);
    }
    let inv = induced_involution(&cover, &involution, &dq)?;
    let equivariant = (0..cover.arcs.len()).all(|v| vertex_images[inv.vertex_perm[v]] == sg.character(&vertex_images[v]))
        && (0..arrow_images.len()).all(|a| arrow_images[inv.arrow_perm[a]] == sg.character(&arrow_images[a]));
    let cover_map = MapReport {
        source_dim: pq.dim(),
        corner_dim: corner_alg.algebra.dim(),
        morphism,
        equivariant: Some(equivariant),
        vertex_images,
        arrow_images,
    };
    Ok(CoverMapData { cover, cover_quiver: dq, cover_algebra: pq, split: sp, skew: sg, corner: corner_alg, cover_map })
}

/// Outcome of checking that `ΛGĜ` is isomorphic to `End_Λ(ΛG)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndomorphismReport {
    pub base_dim: usize,
    pub skew_dim: usize,
    pub double_dim: usize,
    pub multiplicative: bool,
    pub right_linear: bool,
    pub image_rank: usize,
    pub bijective: bool,
}

impl EndomorphismReport {
    pub fn passed(&self) -> bool {
        self.double_dim == 4 * self.base_dim && self.multiplicative && self.right_linear && self.bijective
    }
}

/// Map `λ⊗g⊗χ` to the endomorphism of `ΛG` given by left multiplication by
/// `λ⊗g` after twisting with the character, and check it is an isomorphism
/// onto right-`Λ`-linear endomorphisms.
pub fn verify_endomorphism_iso(pq: &PathQuotient, inv: &AlgebraInvolution) -> Result<EndomorphismReport> {
    let sg = skew_group(pq, inv)?;
    let n = sg.base_dim;
    let big = &sg.algebra;
    let diag: Vec<Vector> = (0..2 * n)
        .map(|k| {
            let v = unit_vector(k);
            if k < n {
                v
            } else {
                scaled(&v, &int(-1))
            }
        })
        .collect();
    let double = skew_group_table(big, &diag, "*");
    // endomorphism matrices: columns indexed by ΛG basis
    let endo = |k: usize| -> Vec<Vector> {
        (0..2 * n)
            .map(|m| {
                let v = big.mul(&unit_vector(k % (2 * n)), &unit_vector(m));
                if k >= 2 * n && m >= n {
                    scaled(&v, &int(-1))
                } else {
                    v
                }
            })
            .collect()
    };
    let apply = |mat: &[Vector], v: &Vector| -> Vector {
        let mut out = Vector::new();
        for (m, c) in v {
            add_scaled(&mut out, &mat[*m], c);
        }
        out
    };
    let mats: Vec<Vec<Vector>> = (0..4 * n).map(endo).collect();
    let mut multiplicative = true;
    'outer: for x in 0..4 * n {
        for y in 0..4 * n {
            let prod = &double.table[x][y];
            for m in 0..2 * n {
                let mut lhs = Vector::new();
                for (k, c) in prod {
                    add_scaled(&mut lhs, &mats[*k][m], c);
                }
                let rhs = apply(&mats[x], &mats[y][m]);
                if lhs != rhs {
                    multiplicative = false;
                    break 'outer;
                }
            }
        }
    }
    let mut right_linear = true;
    'lin: for mat in &mats {
        for y in 0..2 * n {
            for mu in 0..n {
                let r = unit_vector(mu);
                let lhs = apply(mat, &big.mul(&unit_vector(y), &r));
                let rhs = big.mul(&apply(mat, &unit_vector(y)), &r);
                if lhs != rhs {
                    right_linear = false;
                    break 'lin;
                }
            }
        }
    }
    let flat: Vec<Vector> = mats
        .iter()
        .map(|mat| {
            let mut v = Vector::new();
            for (m, col) in mat.iter().enumerate() {
                for (r, c) in col {
                    if !c.is_zero() {
                        v.insert(m * 2 * n + r, c.clone());
                    }
                }
            }
            v
        })
        .collect();
    let image_rank = rank(&flat);
    Ok(EndomorphismReport {
        base_dim: n,
        skew_dim: big.dim(),
        double_dim: double.dim(),
        multiplicative,
        right_linear,
        image_rank,
        bijective: image_rank == 4 * n,
    })
}
