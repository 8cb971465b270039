//! Exact linear algebra over the rationals, path algebras modulo relations,
//! structure-constant algebras, idempotent corners and morphism checks.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Code, Error, Result};
use crate::presentations::{Presentation, Relation};

pub type Scalar = BigRational;

/// Sparse vector: basis index -> nonzero coefficient.
pub type Vector = BTreeMap<usize, Scalar>;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn unit_vector(i: usize) -> Vector {
    let mut v = Vector::new();
    v.insert(i, Scalar::one());
    v
}

/// `v += c * w`, dropping zeros.
pub fn add_scaled(v: &mut Vector, w: &Vector, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    for (k, x) in w {
        let e = v.entry(*k).or_insert_with(Scalar::zero);
        *e += c * x;
        if e.is_zero() {
            v.remove(k);
        }
    }
}

pub fn scaled(w: &Vector, c: &Scalar) -> Vector {
    let mut v = Vector::new();
    add_scaled(&mut v, w, c);
    v
}

pub fn sum(a: &Vector, b: &Vector) -> Vector {
    let mut v = a.clone();
    add_scaled(&mut v, b, &Scalar::one());
    v
}

pub fn difference(a: &Vector, b: &Vector) -> Vector {
    let mut v = a.clone();
    add_scaled(&mut v, b, &-Scalar::one());
    v
}

/// Incrementally built row-echelon basis of a subspace. Each stored row has
/// its largest index as pivot; rows remember how they combine the inserted
/// independent generators, so coordinates can be recovered.
#[derive(Debug, Clone, Default)]
pub struct Span {
    rows: Vec<(Vector, Vector)>,
    pivots: BTreeMap<usize, usize>,
    generators: usize,
}

impl Span {
    pub fn new() -> Self {
        Span::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the rows; returns (residual, combination used).
    fn reduce_tracked(&self, v: &Vector) -> (Vector, Vector) {
        let mut v = v.clone();
        let mut combo = Vector::new();
        let mut bound: Option<usize> = None;
        loop {
            let next = v
                .iter()
                .rev()
                .filter(|(k, _)| bound.map_or(true, |b| **k < b))
                .find(|(k, _)| self.pivots.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = next else { break };
            let (row, rc) = &self.rows[self.pivots[&k]];
            let f = &c / &row[&k];
            add_scaled(&mut v, row, &-f.clone());
            add_scaled(&mut combo, rc, &f);
            bound = Some(k);
        }
        (v, combo)
    }

    pub fn reduce(&self, v: &Vector) -> Vector {
        self.reduce_tracked(v).0
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.reduce(v).is_empty()
    }

    /// Insert a vector; returns `true` when it enlarged the span. Independent
    /// insertions are numbered as generators in insertion order.
    pub fn insert(&mut self, v: &Vector) -> bool {
        let (r, combo) = self.reduce_tracked(v);
        let Some((&p, _)) = r.iter().next_back() else { return false };
        let mut c = unit_vector(self.generators);
        add_scaled(&mut c, &combo, &-Scalar::one());
        self.generators += 1;
        self.pivots.insert(p, self.rows.len());
        self.rows.push((r, c));
        true
    }

    /// Coordinates of `v` with respect to the independent generators.
    pub fn coords(&self, v: &Vector) -> Option<Vector> {
        let (r, combo) = self.reduce_tracked(v);
        r.is_empty().then_some(combo)
    }
}

pub fn rank(vectors: &[Vector]) -> usize {
    let mut s = Span::new();
    for v in vectors {
        s.insert(v);
    }
    s.rank()
}

// ---------------------------------------------------------------------------
// Path algebra modulo relations

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisPath {
    pub source: usize,
    pub target: usize,
    /// Arrows in traversal order; empty for a vertex idempotent.
    pub arrows: Vec<usize>,
}

pub const DEFAULT_MAX_PATH_LEN: usize = 64;

/// Maximum path length explored before giving up, overridable through the
/// `SKEWGENTLE_MAX_PATH_LEN` environment variable.
pub fn max_path_len() -> usize {
    std::env::var("SKEWGENTLE_MAX_PATH_LEN").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_MAX_PATH_LEN)
}

/// Finite-dimensional quotient `kQ/I` with a basis of paths and normal forms.
///
/// The basis is built degree by degree: candidates are basis paths extended
/// by one arrow, relations multiplied on the left by basis paths give linear
/// dependencies among them, and the lexicographically greatest candidate in
/// each dependency is eliminated. Relations whose terms have different
/// lengths are fine as long as the longest term leads.
#[derive(Debug, Clone)]
pub struct PathQuotient {
    pub presentation: Presentation,
    pub basis: Vec<BasisPath>,
    right: HashMap<(usize, usize), Vector>,
}

impl PathQuotient {
    pub fn new(p: &Presentation) -> Result<Self> {
        Self::with_max_len(p, max_path_len())
    }

    pub fn with_max_len(p: &Presentation, max_len: usize) -> Result<Self> {
        let q = &p.quiver;
        let mut basis: Vec<BasisPath> =
            (0..q.vertices.len()).map(|v| BasisPath { source: v, target: v, arrows: Vec::new() }).collect();
        let mut right: HashMap<(usize, usize), Vector> = HashMap::new();
        let mut level: Vec<usize> = (0..basis.len()).collect();
        let mut by_len: Vec<Vec<usize>> = vec![level.clone()];
        let term_len = |r: &Relation| r.terms.iter().map(|(_, t)| t.len()).max().unwrap_or(0);
        let mut len = 0;
        while !level.is_empty() {
            len += 1;
            if len > max_len {
                return Err(Error::new(
                    Code::NotStabilized,
                    "path algebra",
                    format!("nonzero paths of length {max_len} remain"),
                ));
            }
            let n_old = basis.len();
            // candidates sorted lexicographically so key order matches path order
            let mut cands: Vec<(Vec<usize>, usize, usize)> = Vec::new();
            for &b in &level {
                for (a, arr) in q.arrows.iter().enumerate() {
                    if arr.source == basis[b].target {
                        let mut path = basis[b].arrows.clone();
                        path.push(a);
                        cands.push((path, b, a));
                    }
                }
            }
            cands.sort();
            let cand_key: HashMap<(usize, usize), usize> =
                cands.iter().enumerate().map(|(i, (_, b, a))| ((*b, *a), n_old + i)).collect();
            let times = |v: &Vector, a: usize| -> Result<Vector> {
                let mut out = Vector::new();
                for (b, c) in v {
                    if basis[*b].target != q.arrows[a].source {
                        continue;
                    }
                    if let Some(w) = right.get(&(*b, a)) {
                        add_scaled(&mut out, w, c);
                    } else if let Some(&k) = cand_key.get(&(*b, a)) {
                        add_scaled(&mut out, &unit_vector(k), c);
                    } else {
                        return Err(Error::new(Code::NotStabilized, "path algebra", "normal form out of order"));
                    }
                }
                Ok(out)
            };
            let mut span = Span::new();
            for r in &p.relations {
                let m = term_len(r);
                if m == 0 || m > len {
                    continue;
                }
                let Some(start) = r.terms.first().and_then(|(_, t)| t.first()).map(|&a| q.arrows[a].source) else {
                    continue;
                };
                for &b in &by_len[len - m] {
                    if basis[b].target != start {
                        continue;
                    }
                    let mut value = Vector::new();
                    for (c, path) in &r.terms {
                        let mut v = unit_vector(b);
                        for &a in path {
                            v = times(&v, a)?;
                        }
                        add_scaled(&mut value, &v, c);
                    }
                    let reduced = span.reduce(&value);
                    if let Some((&top, _)) = reduced.iter().next_back() {
                        if top < n_old {
                            return Err(Error::new(
                                Code::NotStabilized,
                                "path algebra",
                                "relations force a dependency among shorter paths",
                            ));
                        }
                    }
                    span.insert(&value);
                }
            }
            let mut new_index: HashMap<usize, usize> = HashMap::new();
            let mut next_level = Vec::new();
            for (i, (path, b, _)) in cands.iter().enumerate() {
                let key = n_old + i;
                if span.contains(&unit_vector(key)) || span.pivots.contains_key(&key) {
                    continue;
                }
                let idx = basis.len();
                basis.push(BasisPath { source: basis[*b].source, target: q.arrows[*path.last().unwrap()].target, arrows: path.clone() });
                new_index.insert(key, idx);
                next_level.push(idx);
            }
            for (i, (_, b, a)) in cands.iter().enumerate() {
                let key = n_old + i;
                let nf = span.reduce(&unit_vector(key));
                let mapped: Vector = nf.into_iter().map(|(k, c)| (if k >= n_old { new_index[&k] } else { k }, c)).collect();
                right.insert((*b, *a), mapped);
            }
            by_len.push(next_level.clone());
            level = next_level;
        }
        Ok(PathQuotient { presentation: p.clone(), basis, right })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Right multiplication of an element by an arrow (follow the arrow).
    pub fn times_arrow(&self, v: &Vector, a: usize) -> Vector {
        let src = self.presentation.quiver.arrows[a].source;
        let mut out = Vector::new();
        for (b, c) in v {
            if self.basis[*b].target == src {
                if let Some(w) = self.right.get(&(*b, a)) {
                    add_scaled(&mut out, w, c);
                }
            }
        }
        out
    }

    /// Normal form of a path given as its source vertex and arrows in traversal order.
    pub fn path_nf(&self, source: usize, arrows: &[usize]) -> Vector {
        let mut v = unit_vector(source);
        for &a in arrows {
            v = self.times_arrow(&v, a);
        }
        v
    }

    pub fn arrow_element(&self, a: usize) -> Vector {
        self.path_nf(self.presentation.quiver.arrows[a].source, &[a])
    }

    pub fn vertex_element(&self, v: usize) -> Vector {
        unit_vector(v)
    }

    /// Product `x * y`: first traverse `y`, then `x`.
    pub fn mul_basis(&self, x: usize, y: usize) -> Vector {
        let (bx, by) = (&self.basis[x], &self.basis[y]);
        if by.target != bx.source {
            return Vector::new();
        }
        let mut v = unit_vector(y);
        for &a in &bx.arrows {
            v = self.times_arrow(&v, a);
        }
        v
    }

    pub fn label(&self, i: usize) -> String {
        let b = &self.basis[i];
        let q = &self.presentation.quiver;
        if b.arrows.is_empty() {
            format!("e({})", q.vertices[b.source])
        } else {
            b.arrows.iter().map(|&a| q.arrows[a].id.as_str()).collect::<Vec<_>>().join(".")
        }
    }

    pub fn to_table(&self) -> TableAlgebra {
        let n = self.dim();
        let table = (0..n).map(|i| (0..n).map(|j| self.mul_basis(i, j)).collect()).collect();
        let mut unit = Vector::new();
        for v in 0..self.presentation.quiver.vertices.len() {
            unit.insert(v, Scalar::one());
        }
        TableAlgebra { labels: (0..n).map(|i| self.label(i)).collect(), table, unit }
    }
}

// ---------------------------------------------------------------------------
// Structure-constant algebras

/// Finite-dimensional algebra given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableAlgebra {
    pub labels: Vec<String>,
    /// `table[i][j]` is the product of basis elements `i * j`.
    pub table: Vec<Vec<Vector>>,
    pub unit: Vector,
}

impl TableAlgebra {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::new();
        for (i, a) in x {
            for (j, b) in y {
                add_scaled(&mut out, &self.table[*i][*j], &(a * b));
            }
        }
        out
    }

    pub fn is_idempotent(&self, e: &Vector) -> bool {
        self.mul(e, e) == *e
    }

    /// First failing triple of basis elements, if any.
    pub fn check_associativity(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let ij = &self.table[i][j];
                for k in 0..n {
                    let left = self.mul(ij, &unit_vector(k));
                    let right = self.mul(&unit_vector(i), &self.table[j][k]);
                    if left != right {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn check_unit(&self) -> bool {
        (0..self.dim()).all(|i| {
            let b = unit_vector(i);
            self.mul(&self.unit, &b) == b && self.mul(&b, &self.unit) == b
        })
    }

    /// Dimension of the subalgebra generated (with unit) by the given elements.
    pub fn generated_dim(&self, generators: &[Vector]) -> usize {
        let mut span = Span::new();
        let mut basis: Vec<Vector> = Vec::new();
        for g in generators.iter().chain(std::iter::once(&self.unit)) {
            if span.insert(g) {
                basis.push(g.clone());
            }
        }
        let mut i = 0;
        while i < basis.len() {
            for g in generators {
                let p = self.mul(g, &basis[i]);
                if span.insert(&p) {
                    basis.push(p);
                }
            }
            i += 1;
        }
        span.rank()
    }
}

/// `e A e` for an idempotent `e`, with its embedding back into `A`.
#[derive(Debug, Clone)]
pub struct CornerAlgebra {
    pub algebra: TableAlgebra,
    /// Corner basis elements as vectors of the ambient algebra.
    pub embedding: Vec<Vector>,
    span: Span,
}

impl CornerAlgebra {
    /// Coordinates in the corner basis of an ambient element lying in the corner.
    pub fn coords(&self, v: &Vector) -> Option<Vector> {
        self.span.coords(v)
    }
}

pub fn corner(a: &TableAlgebra, e: &Vector) -> Result<CornerAlgebra> {
    if !a.is_idempotent(e) {
        return Err(Error::new(Code::NotIdempotent, "corner", "element is not idempotent"));
    }
    let mut span = Span::new();
    let mut embedding = Vec::new();
    for i in 0..a.dim() {
        let v = a.mul(&a.mul(e, &unit_vector(i)), e);
        if span.insert(&v) {
            embedding.push(v);
        }
    }
    let n = embedding.len();
    let table = (0..n)
        .map(|i| (0..n).map(|j| span.coords(&a.mul(&embedding[i], &embedding[j])).expect("closed under product")).collect())
        .collect();
    let unit = span.coords(e).expect("idempotent lies in its corner");
    let algebra = TableAlgebra { labels: (0..n).map(|i| format!("c{i}")).collect(), table, unit };
    Ok(CornerAlgebra { algebra, embedding, span })
}

// ---------------------------------------------------------------------------
// Morphisms out of a presentation

/// Images of the vertices and arrows of a presentation in a table algebra.
#[derive(Debug, Clone)]
pub struct GeneratorImages {
    pub vertices: Vec<Vector>,
    pub arrows: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    pub idempotents: bool,
    pub orthogonal: bool,
    pub unital: bool,
    pub arrows_sandwiched: bool,
    pub relations: bool,
    pub surjective: bool,
    pub source_dim: Option<usize>,
    pub target_dim: usize,
    pub failures: Vec<String>,
}

impl MorphismReport {
    pub fn is_homomorphism(&self) -> bool {
        self.idempotents && self.orthogonal && self.unital && self.arrows_sandwiched && self.relations
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_homomorphism() && self.surjective && self.source_dim == Some(self.target_dim)
    }
}

/// Image of a path (arrows in traversal order) under the generator images.
pub fn path_image(images: &GeneratorImages, target: &TableAlgebra, path: &[usize]) -> Vector {
    let mut v = target.unit.clone();
    for &a in path {
        v = target.mul(&images.arrows[a], &v);
    }
    v
}

/// Check that the assignment extends to an algebra homomorphism, and whether
/// it is surjective and (given the source dimension) bijective.
pub fn verify_morphism(
    source: &Presentation,
    images: &GeneratorImages,
    target: &TableAlgebra,
    source_dim: Option<usize>,
) -> MorphismReport {
    let q = &source.quiver;
    let mut failures = Vec::new();
    let mut idempotents = true;
    let mut orthogonal = true;
    for (v, img) in images.vertices.iter().enumerate() {
        if !target.is_idempotent(img) {
            idempotents = false;
            failures.push(format!("vertex {} does not map to an idempotent", q.vertices[v]));
        }
        for (w, other) in images.vertices.iter().enumerate() {
            if v != w && !target.mul(img, other).is_empty() {
                orthogonal = false;
                failures.push(format!("vertices {} and {} are not orthogonal", q.vertices[v], q.vertices[w]));
            }
        }
    }
    let mut total = Vector::new();
    for img in &images.vertices {
        add_scaled(&mut total, img, &Scalar::one());
    }
    let unital = total == target.unit;
    if !unital {
        failures.push("vertex images do not sum to the unit".into());
    }
    let mut arrows_sandwiched = true;
    for (a, arr) in q.arrows.iter().enumerate() {
        let img = &images.arrows[a];
        let s = target.mul(&target.mul(&images.vertices[arr.target], img), &images.vertices[arr.source]);
        if s != *img {
            arrows_sandwiched = false;
            failures.push(format!("arrow {} is not sandwiched between its vertex images", arr.id));
        }
    }
    let mut relations = true;
    for (i, r) in source.relations.iter().enumerate() {
        let mut value = Vector::new();
        for (c, path) in &r.terms {
            add_scaled(&mut value, &path_image(images, target, path), c);
        }
        if !value.is_empty() {
            relations = false;
            failures.push(format!("relation {i} does not map to zero"));
        }
    }
    let gens: Vec<Vector> = images.vertices.iter().chain(images.arrows.iter()).cloned().collect();
    let surjective = target.generated_dim(&gens) == target.dim();
    MorphismReport {
        idempotents,
        orthogonal,
        unital,
        arrows_sandwiched,
        relations,
        surjective,
        source_dim,
        target_dim: target.dim(),
        failures,
    }
}
