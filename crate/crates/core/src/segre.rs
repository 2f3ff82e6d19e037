//! The Segre variety X = S_{2,2,2}(F_q) in PG(7,q) and its local geometry:
//! the three lines through a variety point, the hyperbolic quadrics they
//! induce, the solids (leaves) those quadrics span, shamrocks, and the
//! line/plane types that the stabiliser group preserves.

use std::fmt;

use thiserror::Error;

use crate::gf::{FieldDesc, FieldElem};
use crate::linalg::{in_span, pg1_points, pg_enumerate, row_basis, ProjPoint, Vec2, Vec8};
use crate::tensor::{Direction, Tensor222};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SegreError {
    #[error("factor {0} of a Segre point must be a nonzero pair")]
    ZeroPart(usize),
}

/// A point of PG(1,q) x PG(1,q) x PG(1,q): three normalized coordinate
/// pairs. Its image under the Segre embedding is a rank-1 point of PG(7,q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SegrePoint {
    parts: [Vec2; 3],
}

impl SegrePoint {
    /// Normalizes each factor (first nonzero coordinate scaled to 1);
    /// rejects zero pairs.
    pub fn new(f: &FieldDesc, parts: [Vec2; 3]) -> Result<SegrePoint, SegreError> {
        let mut norm = parts;
        for (i, part) in norm.iter_mut().enumerate() {
            *part = normalize_pair(f, *part).ok_or(SegreError::ZeroPart(i + 1))?;
        }
        Ok(SegrePoint { parts: norm })
    }

    pub fn from_values(f: &FieldDesc, v: [u16; 6]) -> Result<SegrePoint, SegreError> {
        let mut parts = [[FieldElem::ZERO; 2]; 3];
        for i in 0..3 {
            for j in 0..2 {
                parts[i][j] = f
                    .elem(v[2 * i + j])
                    .map_err(|_| SegreError::ZeroPart(i + 1))?;
            }
        }
        SegrePoint::new(f, parts)
    }

    #[inline]
    pub fn parts(&self) -> &[Vec2; 3] {
        &self.parts
    }

    #[inline]
    pub fn part(&self, d: Direction) -> Vec2 {
        self.parts[d.index()]
    }

    /// Copy with factor `d` replaced (and normalized).
    fn with_part(&self, f: &FieldDesc, d: Direction, v: Vec2) -> SegrePoint {
        let mut parts = self.parts;
        parts[d.index()] = normalize_pair(f, v).expect("PG(1,q) points are nonzero");
        SegrePoint { parts }
    }
}

impl fmt::Display for SegrePoint {
    /// Three coordinate pairs: `(a,b; c,d; e,f)`.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            out,
            "({},{}; {},{}; {},{})",
            self.parts[0][0].value(),
            self.parts[0][1].value(),
            self.parts[1][0].value(),
            self.parts[1][1].value(),
            self.parts[2][0].value(),
            self.parts[2][1].value()
        )
    }
}

fn normalize_pair(f: &FieldDesc, v: Vec2) -> Option<Vec2> {
    if !v[0].is_zero() {
        let s = f.inv_nz(v[0]);
        Some([FieldElem::ONE, f.mul(v[1], s)])
    } else if !v[1].is_zero() {
        Some([FieldElem::ZERO, FieldElem::ONE])
    } else {
        None
    }
}

/// The Segre embedding: a_ijk = y1_i * y2_j * y3_k, as a normalized point.
pub fn segre_embed(f: &FieldDesc, y: &SegrePoint) -> ProjPoint {
    Tensor222::from_coords(embed_coords(f, y))
        .to_point(f)
        .expect("products of nonzero pairs are nonzero")
}

fn embed_coords(f: &FieldDesc, y: &SegrePoint) -> Vec8 {
    let [y1, y2, y3] = y.parts;
    let mut a = [FieldElem::ZERO; 8];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                a[4 * i + 2 * j + k] = f.mul(f.mul(y1[i], y2[j]), y3[k]);
            }
        }
    }
    a
}

/// All (q+1)^3 Segre points, factors running in the fixed PG(1,q) order
/// with the third factor fastest.
pub fn enumerate_segre_points(f: &FieldDesc) -> Vec<SegrePoint> {
    let pg1 = pg1_points(f);
    let mut out = Vec::with_capacity(pg1.len().pow(3));
    for &a in &pg1 {
        for &b in &pg1 {
            for &c in &pg1 {
                out.push(SegrePoint { parts: [a, b, c] });
            }
        }
    }
    out
}

/// The point set of the variety: exactly (q+1)^3 distinct rank-1 points, in
/// [`enumerate_segre_points`] order.
pub fn enumerate_segre(f: &FieldDesc) -> Vec<ProjPoint> {
    enumerate_segre_points(f).iter().map(|y| segre_embed(f, y)).collect()
}

/// The line L_i(y) inside X: factor `i` runs over PG(1,q), the other two
/// stay fixed. Returns its q+1 points, y among them.
pub fn line_on_variety(f: &FieldDesc, y: &SegrePoint, i: Direction) -> Vec<ProjPoint> {
    pg1_points(f)
        .iter()
        .map(|&r| segre_embed(f, &y.with_part(f, i, r)))
        .collect()
}

/// The hyperbolic quadric Q_k(y) contained in X: factor `k` stays fixed, the
/// other two run over PG(1,q). Returns its (q+1)^2 points; it contains y and
/// the two lines L_i(y), L_j(y) for {i,j,k} = {1,2,3}.
pub fn quadric(f: &FieldDesc, y: &SegrePoint, k: Direction) -> Vec<ProjPoint> {
    let pg1 = pg1_points(f);
    let [i, j] = other_directions(k);
    let mut out = Vec::with_capacity(pg1.len() * pg1.len());
    for &a in &pg1 {
        for &b in &pg1 {
            out.push(segre_embed(f, &y.with_part(f, i, a).with_part(f, j, b)));
        }
    }
    out
}

fn other_directions(k: Direction) -> [Direction; 2] {
    match k {
        Direction::D1 => [Direction::D2, Direction::D3],
        Direction::D2 => [Direction::D1, Direction::D3],
        Direction::D3 => [Direction::D1, Direction::D2],
    }
}

/// A leaf: the solid spanned by a quadric Q_k(y), stored both as a 4-row
/// basis (for the algebraic membership test) and as the sorted indices of
/// its (q^4-1)/(q-1) points (for the set test).
#[derive(Debug, Clone)]
pub struct Leaf {
    basis: [Vec8; 4],
    points: Vec<u32>,
}

impl Leaf {
    /// Sorted point indices.
    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn basis(&self) -> &[Vec8; 4] {
        &self.basis
    }

    pub fn contains_index(&self, index: u32) -> bool {
        self.points.binary_search(&index).is_ok()
    }

    /// Membership without the index set: `v` joins the span iff the span
    /// rank stays at 4.
    pub fn contains_vector(&self, f: &FieldDesc, v: &Vec8) -> bool {
        in_span(f, &self.basis, v)
    }
}

/// The solid spanned by Q_k(y), with all of its points enumerated.
pub fn leaf_span(f: &FieldDesc, y: &SegrePoint, k: Direction) -> Leaf {
    let quad: Vec<Vec8> = quadric(f, y, k).iter().map(|p| *p.coords()).collect();
    let rows = row_basis(f, &quad);
    assert_eq!(rows.len(), 4, "a quadric spans a solid");
    let basis: [Vec8; 4] = [rows[0], rows[1], rows[2], rows[3]];

    let mut points: Vec<u32> = pg_enumerate(f, 4)
        .map(|coeffs| {
            let mut v = [FieldElem::ZERO; 8];
            for (c, b) in coeffs.iter().zip(basis.iter()) {
                if c.is_zero() {
                    continue;
                }
                for i in 0..8 {
                    v[i] = f.add(v[i], f.mul(*c, b[i]));
                }
            }
            Tensor222::from_coords(v)
                .to_point(f)
                .expect("independent basis rows span nonzero combinations")
                .index()
        })
        .collect();
    points.sort_unstable();
    points.dedup();
    assert_eq!(
        points.len() as u64,
        crate::linalg::pg_point_count(f.order(), 4),
        "solid point count"
    );
    Leaf { basis, points }
}

/// The shamrock Sh(y): the union of the three leaves at y.
#[derive(Debug, Clone)]
pub struct Shamrock {
    base: SegrePoint,
    leaves: [Leaf; 3],
    union: Vec<u32>,
}

impl Shamrock {
    pub fn base(&self) -> &SegrePoint {
        &self.base
    }

    pub fn leaves(&self) -> &[Leaf; 3] {
        &self.leaves
    }

    /// Sorted indices of the union point set.
    pub fn union(&self) -> &[u32] {
        &self.union
    }

    pub fn contains_index(&self, index: u32) -> bool {
        self.union.binary_search(&index).is_ok()
    }
}

pub fn shamrock(f: &FieldDesc, y: &SegrePoint) -> Shamrock {
    let leaves = [
        leaf_span(f, y, Direction::D1),
        leaf_span(f, y, Direction::D2),
        leaf_span(f, y, Direction::D3),
    ];
    let mut union: Vec<u32> = leaves.iter().flat_map(|l| l.points.iter().copied()).collect();
    union.sort_unstable();
    union.dedup();
    Shamrock { base: *y, leaves, union }
}

/// Type triple of a line or plane spanned by variety points; canonical
/// orbit representatives sort it ascending.
pub type TypeTriple = [u8; 3];

pub fn canonical_type(mut t: TypeTriple) -> TypeTriple {
    t.sort_unstable();
    t
}

/// Type of the line through y and z: per factor, dim<y_i, z_i> in {1, 2}.
/// Equal points give (1,1,1).
pub fn line_type(f: &FieldDesc, y: &SegrePoint, z: &SegrePoint) -> TypeTriple {
    let mut t = [0u8; 3];
    for (i, slot) in t.iter_mut().enumerate() {
        *slot = if pair_dependent(f, y.parts[i], z.parts[i]) { 1 } else { 2 };
    }
    t
}

/// Type of the plane through y, z, w: per factor, the number of distinct
/// projective points among the three factor components, in {1, 2, 3}.
pub fn plane_type(_f: &FieldDesc, y: &SegrePoint, z: &SegrePoint, w: &SegrePoint) -> TypeTriple {
    let mut t = [0u8; 3];
    for (i, slot) in t.iter_mut().enumerate() {
        // Factors are normalized, so projective equality is plain equality.
        let (a, b, c) = (y.parts[i], z.parts[i], w.parts[i]);
        let mut distinct = 1u8;
        if b != a {
            distinct += 1;
        }
        if c != a && c != b {
            distinct += 1;
        }
        *slot = distinct;
    }
    t
}

fn pair_dependent(f: &FieldDesc, a: Vec2, b: Vec2) -> bool {
    f.sub(f.mul(a[0], b[1]), f.mul(a[1], b[0])).is_zero()
}
