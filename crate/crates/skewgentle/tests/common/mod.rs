//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skewgentle::format::{fixtures, SurfaceFile};
use skewgentle::linefield::{CombinatorialCurve, SlotRef};
use skewgentle::presentations::{
    glue_puzzle, surface_from_triple, GentlePair, Piece, Presentation, Quiver, SkewGentleTriple,
};
use skewgentle::surface::{DissectedSurface, Side};

pub fn fixture(name: &str) -> SurfaceFile {
    let text = fixtures::ALL.iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("no fixture {name}")).1;
    fixtures::load(text)
}

pub fn all_fixtures() -> Vec<(&'static str, SurfaceFile)> {
    fixtures::ALL.iter().map(|(n, t)| (*n, fixtures::load(t))).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_piece(rng: &mut ChaCha8Rng, specials: bool) -> Piece {
    match rng.gen_range(0..10) {
        0..=5 => Piece::Linear(rng.gen_range(1..=4)),
        6 | 7 => Piece::Cyclic(rng.gen_range(1..=3)),
        _ if specials => Piece::Special,
        _ => Piece::Linear(rng.gen_range(2..=3)),
    }
}

fn arrow_count(p: Piece) -> usize {
    match p {
        Piece::Linear(n) => n.saturating_sub(1),
        Piece::Cyclic(n) => n,
        Piece::Special => 1,
    }
}

/// Connected skew-gentle triple glued from random pieces, at most
/// `max_arrows` arrows; special loops only when `specials`.
pub fn random_triple(rng: &mut ChaCha8Rng, max_arrows: usize, specials: bool) -> SkewGentleTriple {
    loop {
        let target = rng.gen_range(0..=max_arrows);
        let mut pieces = Vec::new();
        let mut arrows = 0;
        loop {
            let p = random_piece(rng, specials);
            if arrows + arrow_count(p) > max_arrows {
                if pieces.is_empty() {
                    pieces.push(Piece::Linear(1));
                }
                break;
            }
            arrows += arrow_count(p);
            pieces.push(p);
            if arrows >= target {
                break;
            }
        }
        // tree gluing keeps the result connected, extra pairs add cycles
        let mut free: Vec<(usize, usize)> = Vec::new();
        let mut matching = Vec::new();
        let mut ok = true;
        for (i, p) in pieces.iter().enumerate() {
            let mut mine: Vec<(usize, usize)> = (0..p.vertex_count()).map(|v| (i, v)).collect();
            mine.shuffle(rng);
            if i > 0 {
                if free.is_empty() {
                    ok = false;
                    break;
                }
                let j = rng.gen_range(0..free.len());
                matching.push((free.swap_remove(j), mine.pop().unwrap()));
            }
            free.extend(mine);
        }
        if !ok {
            continue;
        }
        free.shuffle(rng);
        while free.len() >= 2 && rng.gen_bool(0.3) {
            let (a, b) = (free.pop().unwrap(), free.pop().unwrap());
            matching.push((a, b));
        }
        if let Ok(t) = glue_puzzle(&pieces, &matching) {
            if t.quiver.components().len() == 1 {
                return t;
            }
        }
    }
}

pub fn random_gentle_pair(rng: &mut ChaCha8Rng, max_arrows: usize) -> GentlePair {
    let t = random_triple(rng, max_arrows, false);
    GentlePair { quiver: t.quiver, relations: t.relations }
}

/// Random ✗-dissection (possibly without orbifold points) rebuilt from a
/// random skew-gentle triple.
pub fn random_x_dissection(seed: u64) -> (SkewGentleTriple, DissectedSurface) {
    let mut r = rng(seed);
    loop {
        let t = random_triple(&mut r, 10, true);
        if let Ok(s) = surface_from_triple(&t) {
            return (t, s);
        }
    }
}

/// Random ✗-dissection with at least one orbifold point.
pub fn random_orbifold_dissection(seed: u64) -> (SkewGentleTriple, DissectedSurface) {
    let mut r = rng(seed);
    loop {
        let t = random_triple(&mut r, 10, true);
        if t.special.is_empty() {
            continue;
        }
        if let Ok(s) = surface_from_triple(&t) {
            return (t, s);
        }
    }
}

// ---------------------------------------------------------------------------
// Oracles

/// Number of paths (including trivial ones) avoiding the forbidden
/// consecutive pairs, by depth-first enumeration.
pub fn count_paths_avoiding(q: &Quiver, forbidden: &[(usize, usize)], cap: usize) -> usize {
    fn go(q: &Quiver, forbidden: &[(usize, usize)], last: usize, depth: usize, cap: usize) -> usize {
        assert!(depth <= cap, "path enumeration exceeded its cap");
        let v = q.arrows[last].target;
        1 + (0..q.arrows.len())
            .filter(|&b| q.arrows[b].source == v && !forbidden.contains(&(last, b)))
            .map(|b| go(q, forbidden, b, depth + 1, cap))
            .sum::<usize>()
    }
    q.vertices.len() + (0..q.arrows.len()).map(|a| go(q, forbidden, a, 1, cap)).sum::<usize>()
}

/// Exact rank by fraction-valued Gaussian elimination on dense rows.
pub fn dense_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = rows[i][c].clone() / pivot.clone();
                for k in c..cols {
                    let d = rows[rank][k].clone() * f.clone();
                    rows[i][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of `kQ/I` for homogeneous relations: for each length, count
/// paths and subtract the rank of the ideal's spanning set `p·r·q`.
pub fn graded_dim_oracle(p: &Presentation, max_len: usize) -> usize {
    let q = &p.quiver;
    let mut by_len: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for _ in 0..max_len {
        let prev = by_len.last().unwrap();
        let next: Vec<Vec<usize>> = if by_len.len() == 1 {
            (0..q.arrows.len()).map(|a| vec![a]).collect()
        } else {
            prev.iter()
                .flat_map(|path| {
                    let end = q.arrows[*path.last().unwrap()].target;
                    (0..q.arrows.len()).filter(move |&b| q.arrows[b].source == end).map(move |b| {
                        let mut x = path.clone();
                        x.push(b);
                        x
                    })
                })
                .collect()
        };
        if next.is_empty() {
            break;
        }
        by_len.push(next);
    }
    let mut total = q.vertices.len();
    for (len, paths) in by_len.iter().enumerate().skip(1) {
        let index = |x: &[usize]| paths.iter().position(|p| p == x);
        let mut rows = Vec::new();
        for r in &p.relations {
            let rl = r.terms[0].1.len();
            if rl > len {
                continue;
            }
            for pre in 0..=(len - rl) {
                // all paths of length `len` whose window [pre, pre+rl) matches a term
                let mut contexts: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
                for path in paths {
                    for (_, t) in &r.terms {
                        if path[pre..pre + rl] == t[..] {
                            let ctx = (path[..pre].to_vec(), path[pre + rl..].to_vec());
                            if !contexts.contains(&ctx) {
                                contexts.push(ctx);
                            }
                        }
                    }
                }
                for (a, b) in contexts {
                    let mut row = vec![BigRational::zero(); paths.len()];
                    let mut any = false;
                    for (c, t) in &r.terms {
                        let full: Vec<usize> = a.iter().chain(t.iter()).chain(b.iter()).copied().collect();
                        let valid = full.windows(2).all(|w| q.arrows[w[0]].target == q.arrows[w[1]].source);
                        if valid {
                            if let Some(i) = index(&full) {
                                row[i] += c.clone();
                                any = true;
                            }
                        }
                    }
                    if any {
                        rows.push(row);
                    }
                }
            }
        }
        total += paths.len() - dense_rank(rows);
    }
    total
}

/// Geometric winding number: each polygon is a half-disc with its boundary
/// segment as diameter and its other sides in order on the semicircle; the
/// line field is tangent to the concentric semicircles. Each passage is a
/// cubic Bezier leaving and entering perpendicular to the arcs; the total
/// turning of the tangent relative to the line field, in half-turns, is the
/// winding number (sign fixed so that the turn around a once-punctured
/// region counts negatively).
pub fn numeric_winding(s: &DissectedSurface, curve: &CombinatorialCurve) -> f64 {
    let mut total = 0.0;
    for p in &curve.passages {
        let poly = &s.polygons[p.polygon];
        let len = poly.sides.len();
        let b = poly.sides.iter().position(|x| matches!(x, Side::Bseg(_))).unwrap();
        let angle = |k: usize| PI * (((k + len - b) % len) as f64) / len as f64;
        let (SlotRef::Slot(a), SlotRef::Slot(c)) = (p.entry, p.exit) else { panic!("closed curves only") };
        let (ta, tc) = if a == c {
            let d = PI / (4.0 * len as f64);
            match p.side.unwrap() {
                skewgentle::linefield::BsegSide::Left => (angle(a) - d, angle(a) + d),
                skewgentle::linefield::BsegSide::Right => (angle(a) + d, angle(a) - d),
            }
        } else {
            (angle(a), angle(c))
        };
        total += bezier_turning(ta, tc);
    }
    -total / PI
}

fn bezier_turning(ta: f64, tc: f64) -> f64 {
    let a = (ta.cos(), ta.sin());
    let c = (tc.cos(), tc.sin());
    let s = 0.5;
    let p = [a, ((1.0 - s) * a.0, (1.0 - s) * a.1), ((1.0 - s) * c.0, (1.0 - s) * c.1), c];
    let n = 4000;
    let mut prev: Option<f64> = None;
    let mut acc = 0.0;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        let u = 1.0 - t;
        let pt = (
            u * u * u * p[0].0 + 3.0 * u * u * t * p[1].0 + 3.0 * u * t * t * p[2].0 + t * t * t * p[3].0,
            u * u * u * p[0].1 + 3.0 * u * u * t * p[1].1 + 3.0 * u * t * t * p[2].1 + t * t * t * p[3].1,
        );
        let d = (
            3.0 * u * u * (p[1].0 - p[0].0) + 6.0 * u * t * (p[2].0 - p[1].0) + 3.0 * t * t * (p[3].0 - p[2].0),
            3.0 * u * u * (p[1].1 - p[0].1) + 6.0 * u * t * (p[2].1 - p[1].1) + 3.0 * t * t * (p[3].1 - p[2].1),
        );
        let field = pt.1.atan2(pt.0) + PI / 2.0;
        let corner_map = d.1.atan2(d.0) - field;
        if let Some(q) = prev {
            // line field is unoriented: reduce increments modulo a half-turn
            let mut delta = corner_map - q;
            while delta > PI / 2.0 {
                delta -= PI;
            }
            while delta <= -PI / 2.0 {
                delta += PI;
            }
            acc += delta;
        }
        prev = Some(corner_map);
    }
    acc
}

pub fn one() -> BigRational {
    BigRational::one()
}
