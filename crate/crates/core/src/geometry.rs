//! Points in F_q^n and the acuteness form
//! `Δ(u, v, w) = Σ (u_i - v_i)^2 + (u_i - w_i)^2 - (v_i - w_i)^2 = 2 (u - v)·(u - w)`.
//!
//! The vertex at `u` is acute when `Δ(u, v, w)` is a nonzero square, right
//! when it is zero and obtuse otherwise.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{Elem, FieldSpec, QRClass};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<Elem>,
}

impl Point {
    pub fn new(coords: Vec<Elem>) -> Self {
        Point { coords }
    }

    /// Point with prime-subfield coordinates given by integer codes.
    pub fn from_codes(codes: &[u64]) -> Self {
        Point::new(codes.iter().map(|&c| Elem::from_code(c)).collect())
    }

    pub fn zero(n: usize) -> Self {
        Point::new(vec![Elem::ZERO; n])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn codes(&self) -> Vec<u64> {
        self.coords.iter().map(|e| e.code()).collect()
    }
}

/// Number of points of F_q^n, if it fits in a `u128`.
pub fn space_size(field: &FieldSpec, n: usize) -> Option<u128> {
    (field.q() as u128).checked_pow(n as u32)
}

/// The point at position `index` in canonical (lexicographic) order.
pub fn point_from_index(field: &FieldSpec, n: usize, mut index: u64) -> Point {
    let q = field.q();
    let mut coords = vec![Elem::ZERO; n];
    for c in coords.iter_mut().rev() {
        *c = Elem::from_code(index % q);
        index /= q;
    }
    Point::new(coords)
}

pub fn point_index(field: &FieldSpec, p: &Point) -> u64 {
    p.coords.iter().fold(0, |acc, c| acc * field.q() + c.code())
}

fn check_pair(field: &FieldSpec, a: &[Elem], b: &[Elem]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if let Some(e) = a.iter().chain(b).find(|e| !field.contains(**e)) {
        return Err(Error::FieldMismatch(format!(
            "coordinate {e} is not an element of {field}"
        )));
    }
    Ok(())
}

fn check_triple(field: &FieldSpec, u: &Point, v: &Point, w: &Point) -> Result<()> {
    check_pair(field, &u.coords, &v.coords)?;
    check_pair(field, &u.coords, &w.coords)
}

pub(crate) fn inner_raw(field: &FieldSpec, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter()
        .zip(b)
        .fold(Elem::ZERO, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// `2 (u - v)·(u - w)` without validation.
pub fn delta_raw(field: &FieldSpec, u: &[Elem], v: &[Elem], w: &[Elem]) -> Elem {
    let mut acc = Elem::ZERO;
    for i in 0..u.len() {
        let a = field.sub(u[i], v[i]);
        let b = field.sub(u[i], w[i]);
        acc = field.add(acc, field.mul(a, b));
    }
    field.add(acc, acc)
}

/// True when all three vertices of `(a, b, c)` classify as residues.
pub fn triple_acute_raw(field: &FieldSpec, a: &[Elem], b: &[Elem], c: &[Elem]) -> bool {
    field.qr_class(delta_raw(field, a, b, c)) == QRClass::Residue
        && field.qr_class(delta_raw(field, b, a, c)) == QRClass::Residue
        && field.qr_class(delta_raw(field, c, a, b)) == QRClass::Residue
}

pub fn inner(field: &FieldSpec, a: &Point, b: &Point) -> Result<Elem> {
    check_pair(field, &a.coords, &b.coords)?;
    Ok(inner_raw(field, &a.coords, &b.coords))
}

/// Δ from the coordinate-wise sum of squares.
pub fn delta_sum(field: &FieldSpec, u: &Point, v: &Point, w: &Point) -> Result<Elem> {
    check_triple(field, u, v, w)?;
    let sq = |x| field.square(x);
    Ok((0..u.dim()).fold(Elem::ZERO, |acc, i| {
        let (ui, vi, wi) = (u.coords[i], v.coords[i], w.coords[i]);
        let term = field.sub(
            field.add(sq(field.sub(ui, vi)), sq(field.sub(ui, wi))),
            sq(field.sub(vi, wi)),
        );
        field.add(acc, term)
    }))
}

/// Δ as `2 (u - v)·(u - w)`.
pub fn delta_dot(field: &FieldSpec, u: &Point, v: &Point, w: &Point) -> Result<Elem> {
    check_triple(field, u, v, w)?;
    Ok(delta_raw(field, &u.coords, &v.coords, &w.coords))
}

/// Classification of the angle at `u` in the triangle `(u, v, w)`.
pub fn vertex_class(field: &FieldSpec, u: &Point, v: &Point, w: &Point) -> Result<QRClass> {
    Ok(field.qr_class(delta_dot(field, u, v, w)?))
}

pub fn triple_is_acute(field: &FieldSpec, u: &Point, v: &Point, w: &Point) -> Result<bool> {
    check_triple(field, u, v, w)?;
    if u == v {
        return Err(Error::DegenerateTriple(0, 1));
    }
    if u == w {
        return Err(Error::DegenerateTriple(0, 2));
    }
    if v == w {
        return Err(Error::DegenerateTriple(1, 2));
    }
    Ok(triple_acute_raw(field, &u.coords, &v.coords, &w.coords))
}

/// A set of pairwise distinct points of F_q^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    field: FieldSpec,
    n: usize,
    points: Vec<Point>,
    positions: HashMap<Point, usize>,
}

impl PointSet {
    pub fn empty(field: FieldSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        Ok(PointSet {
            field,
            n,
            points: Vec::new(),
            positions: HashMap::new(),
        })
    }

    pub fn new(field: FieldSpec, n: usize, points: Vec<Point>) -> Result<Self> {
        let mut set = PointSet::empty(field, n)?;
        for p in points {
            set.insert(p)?;
        }
        Ok(set)
    }

    /// `size` distinct points drawn uniformly from F_q^n, in canonical order.
    pub fn random(field: FieldSpec, n: usize, size: usize, seed: u64) -> Result<Self> {
        let total = space_size(&field, n).unwrap_or(u128::MAX);
        if size as u128 > total {
            return Err(Error::InvalidParameter(format!(
                "cannot draw {size} distinct points from a space of {total}"
            )));
        }
        if total > usize::MAX as u128 {
            return Err(Error::SpaceTooLarge {
                size: total,
                cap: usize::MAX as u128,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, total as usize, size).into_vec();
        idx.sort_unstable();
        let pts = idx
            .into_iter()
            .map(|i| point_from_index(&field, n, i as u64))
            .collect();
        PointSet::new(field, n, pts)
    }

    pub fn insert(&mut self, point: Point) -> Result<()> {
        if point.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: point.dim(),
            });
        }
        if let Some(e) = point.coords.iter().find(|e| !self.field.contains(**e)) {
            return Err(Error::FieldMismatch(format!(
                "coordinate {e} is not an element of {}",
                self.field
            )));
        }
        if let Some(&first) = self.positions.get(&point) {
            return Err(Error::DuplicatePoint {
                first,
                second: self.points.len(),
            });
        }
        self.positions.insert(point.clone(), self.points.len());
        self.points.push(point);
        Ok(())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.positions.contains_key(p)
    }

    /// SHA-256 over the field description, dimension and point codes, in
    /// list order.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("p={};k={};", self.field.p(), self.field.k()));
        if let Some(m) = self.field.modulus() {
            h.update(format!("modulus={m:?};"));
        }
        h.update(format!("n={};", self.n));
        for p in &self.points {
            h.update(format!("{:?};", p.codes()));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcuteCheck {
    pub acute: bool,
    /// Lexicographically first violating index triple `i < j < k`.
    pub violation: Option<[usize; 3]>,
}

pub fn set_is_acute(set: &PointSet) -> AcuteCheck {
    let field = set.field();
    let pts = set.points();
    let m = pts.len();
    let violation = exec::find_first(m, |i| {
        for j in i + 1..m {
            for k in j + 1..m {
                if !triple_acute_raw(field, &pts[i].coords, &pts[j].coords, &pts[k].coords) {
                    return Some([i, j, k]);
                }
            }
        }
        None
    });
    AcuteCheck {
        acute: violation.is_none(),
        violation,
    }
}
