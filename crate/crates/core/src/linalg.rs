//! Vectors and 2x2 matrices over GF(q), plus the projective-point machinery
//! for PG(7,q): normalization, rank/unrank indexing and Gaussian elimination.
//!
//! Normalization convention: the first nonzero coordinate (scanning from
//! coordinate 0) is scaled to 1. Point indices come from a mixed-radix
//! ranking of the normalized representative, so the whole-space enumeration
//! can mark visited points in a flat array with O(1) point-to-index lookup.

use std::fmt;

use thiserror::Error;

use crate::gf::{FieldDesc, FieldElem};

/// An element of one tensor factor F_q^2.
pub type Vec2 = [FieldElem; 2];

/// A raw coordinate vector of F_q^8.
pub type Vec8 = [FieldElem; 8];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("the zero vector has no projective representative")]
    ZeroVector,
    #[error("index {0} out of range: PG(7,{1}) has {2} points")]
    IndexOutOfRange(u64, u16, u64),
}

/// A 2x2 matrix over GF(q), row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2(pub [[FieldElem; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([
        [FieldElem::ONE, FieldElem::ZERO],
        [FieldElem::ZERO, FieldElem::ONE],
    ]);

    /// Builds a matrix from canonical integer encodings, row-major.
    pub fn from_values(f: &FieldDesc, v: [[u16; 2]; 2]) -> Result<Mat2, crate::gf::GfError> {
        Ok(Mat2([
            [f.elem(v[0][0])?, f.elem(v[0][1])?],
            [f.elem(v[1][0])?, f.elem(v[1][1])?],
        ]))
    }

    /// ad - bc; zero iff the matrix has rank <= 1.
    #[inline]
    pub fn det(&self, f: &FieldDesc) -> FieldElem {
        let m = &self.0;
        f.sub(f.mul(m[0][0], m[1][1]), f.mul(m[0][1], m[1][0]))
    }

    #[inline]
    pub fn is_invertible(&self, f: &FieldDesc) -> bool {
        !self.det(f).is_zero()
    }

    pub fn mul(&self, f: &FieldDesc, rhs: &Mat2) -> Mat2 {
        let mut out = [[FieldElem::ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = f.add(
                    f.mul(self.0[r][0], rhs.0[0][c]),
                    f.mul(self.0[r][1], rhs.0[1][c]),
                );
            }
        }
        Mat2(out)
    }

    /// Matrix-vector product.
    #[inline]
    pub fn apply(&self, f: &FieldDesc, v: Vec2) -> Vec2 {
        [
            f.add(f.mul(self.0[0][0], v[0]), f.mul(self.0[0][1], v[1])),
            f.add(f.mul(self.0[1][0], v[0]), f.mul(self.0[1][1], v[1])),
        ]
    }
}

/// A point of PG(7,q): the normalized representative of a 1-space of F_q^8
/// together with its rank in `[0, (q^8-1)/(q-1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    coords: Vec8,
    index: u32,
}

impl ProjPoint {
    #[inline]
    pub fn coords(&self) -> &Vec8 {
        &self.coords
    }

    #[inline]
    pub fn index(&self) -> u32 {
        self.index
    }
}

impl fmt::Display for ProjPoint {
    /// Comma-separated canonical encodings, normalized form only.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(out, ",")?;
            }
            write!(out, "{}", c.value())?;
        }
        Ok(())
    }
}

/// Number of points of PG(n-1, q): (q^n - 1)/(q - 1).
pub fn pg_point_count(q: u16, n: u32) -> u64 {
    (0..n).map(|j| (q as u64).pow(j)).sum()
}

/// Scales `v` so its first nonzero coordinate is 1. Errors on the zero vector.
pub fn normalize_in_place(f: &FieldDesc, v: &mut Vec8) -> Result<(), LinalgError> {
    let lead = v.iter().position(|c| !c.is_zero()).ok_or(LinalgError::ZeroVector)?;
    if v[lead] != FieldElem::ONE {
        let scale = f.inv_nz(v[lead]);
        for c in v.iter_mut().skip(lead) {
            *c = f.mul(*c, scale);
        }
    }
    Ok(())
}

/// The unique normalized representative of the 1-space spanned by `v`.
pub fn pg_normalize(f: &FieldDesc, v: &Vec8) -> Result<ProjPoint, LinalgError> {
    let mut coords = *v;
    normalize_in_place(f, &mut coords)?;
    let index = pg_rank(f, &coords);
    Ok(ProjPoint { coords, index })
}

/// Mixed-radix rank of a normalized vector. Points whose leading 1 sits at
/// coordinate k occupy a contiguous block of q^(7-k) indices; within the
/// block the trailing coordinates read as a base-q number.
pub fn pg_rank(f: &FieldDesc, v: &Vec8) -> u32 {
    let q = f.order() as u64;
    let lead = v
        .iter()
        .position(|c| !c.is_zero())
        .expect("pg_rank requires a nonzero vector");
    debug_assert_eq!(v[lead], FieldElem::ONE, "pg_rank requires a normalized vector");
    let mut offset = 0u64;
    for j in 0..lead {
        offset += q.pow(7 - j as u32);
    }
    let mut value = 0u64;
    for c in v.iter().skip(lead + 1) {
        value = value * q + c.value() as u64;
    }
    (offset + value) as u32
}

/// Inverse of [`pg_rank`].
pub fn pg_unrank(f: &FieldDesc, index: u32) -> Result<ProjPoint, LinalgError> {
    let q = f.order() as u64;
    let total = pg_point_count(f.order(), 8);
    if index as u64 >= total {
        return Err(LinalgError::IndexOutOfRange(index as u64, f.order(), total));
    }
    let mut rest = index as u64;
    let mut lead = 0usize;
    loop {
        let block = q.pow(7 - lead as u32);
        if rest < block {
            break;
        }
        rest -= block;
        lead += 1;
    }
    let mut coords = [FieldElem::ZERO; 8];
    coords[lead] = FieldElem::ONE;
    for i in (lead + 1..8).rev() {
        coords[i] = f.elem((rest % q) as u16).expect("digit < q");
        rest /= q;
    }
    Ok(ProjPoint { coords, index })
}

/// Normalized points of PG(n-1, q) for 1 <= n <= 8, in index order.
///
/// Yields plain coordinate vectors of length n; the PG(7,q) specific
/// [`ProjPoint`] wrapper only applies at n = 8.
pub fn pg_enumerate<'f>(
    f: &'f FieldDesc,
    n: u32,
) -> impl Iterator<Item = Vec<FieldElem>> + 'f {
    assert!((1..=8).contains(&n), "supported dimensions are 1..=8");
    let q = f.order() as u64;
    (0..pg_point_count(f.order(), n)).map(move |idx| {
        let mut rest = idx;
        let mut lead = 0usize;
        loop {
            let block = q.pow(n - 1 - lead as u32);
            if rest < block {
                break;
            }
            rest -= block;
            lead += 1;
        }
        let mut coords = vec![FieldElem::ZERO; n as usize];
        coords[lead] = FieldElem::ONE;
        for i in (lead + 1..n as usize).rev() {
            coords[i] = f.elem((rest % q) as u16).expect("digit < q");
            rest /= q;
        }
        coords
    })
}

/// The q+1 points of PG(1,q) in the fixed order `<e0>`, `<e1>`,
/// `<e0 + t e1>` for t nonzero ascending. Segre-point indexing and the
/// functional scans both rely on this order staying put.
pub fn pg1_points(f: &FieldDesc) -> Vec<Vec2> {
    let mut pts = Vec::with_capacity(f.order() as usize + 1);
    pts.push([FieldElem::ONE, FieldElem::ZERO]);
    pts.push([FieldElem::ZERO, FieldElem::ONE]);
    for t in f.nonzero_elements() {
        pts.push([FieldElem::ONE, t]);
    }
    pts
}

/// Rank of the span of the given vectors in F_q^8, by Gaussian elimination.
pub fn span_rank(f: &FieldDesc, vectors: &[Vec8]) -> usize {
    row_basis(f, vectors).len()
}

/// Row-echelon basis of the span of the given vectors. Each basis row has a
/// leading 1 strictly to the right of the previous row's.
pub fn row_basis(f: &FieldDesc, vectors: &[Vec8]) -> Vec<Vec8> {
    let mut basis: Vec<Vec8> = Vec::new();
    for v in vectors {
        let mut row = *v;
        for b in &basis {
            let lead = b.iter().position(|c| !c.is_zero()).expect("basis rows nonzero");
            if !row[lead].is_zero() {
                let factor = row[lead];
                for i in 0..8 {
                    row[i] = f.sub(row[i], f.mul(factor, b[i]));
                }
            }
        }
        if let Some(lead) = row.iter().position(|c| !c.is_zero()) {
            let scale = f.inv_nz(row[lead]);
            for c in row.iter_mut() {
                *c = f.mul(*c, scale);
            }
            basis.push(row);
            basis.sort_by_key(|r| r.iter().position(|c| !c.is_zero()));
        }
    }
    basis
}

/// True iff `v` lies in the span of the echelon `basis`.
pub fn in_span(f: &FieldDesc, basis: &[Vec8], v: &Vec8) -> bool {
    let mut row = *v;
    for b in basis {
        let lead = b.iter().position(|c| !c.is_zero()).expect("basis rows nonzero");
        if !row[lead].is_zero() {
            let factor = row[lead];
            for i in 0..8 {
                row[i] = f.sub(row[i], f.mul(factor, b[i]));
            }
        }
    }
    row.iter().all(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn fe(f: &FieldDesc, v: u16) -> FieldElem {
        f.elem(v).unwrap()
    }

    fn vec8(f: &FieldDesc, v: [u16; 8]) -> Vec8 {
        v.map(|x| fe(f, x))
    }

    #[test]
    fn normalize_scales_leading_coordinate() {
        let f = FieldDesc::new(3, 1).unwrap();
        let p = pg_normalize(&f, &vec8(&f, [0, 2, 1, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!(p.coords(), &vec8(&f, [0, 1, 2, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn normalize_fixes_normalized_input() {
        let f = FieldDesc::new(2, 1).unwrap();
        let v = vec8(&f, [1, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(pg_normalize(&f, &v).unwrap().coords(), &v);
    }

    #[test]
    fn normalize_is_projective() {
        let f = FieldDesc::new(5, 1).unwrap();
        let v = vec8(&f, [0, 2, 3, 0, 1, 4, 0, 2]);
        let mut w = v;
        for c in w.iter_mut() {
            *c = f.mul(*c, fe(&f, 3));
        }
        assert_eq!(pg_normalize(&f, &v).unwrap(), pg_normalize(&f, &w).unwrap());
    }

    #[test]
    fn normalize_rejects_zero() {
        let f = FieldDesc::new(2, 1).unwrap();
        let v = [FieldElem::ZERO; 8];
        assert_eq!(pg_normalize(&f, &v).unwrap_err(), LinalgError::ZeroVector);
    }

    #[test]
    fn point_counts() {
        assert_eq!(pg_point_count(2, 8), 255);
        assert_eq!(pg_point_count(3, 2), 4);
        assert_eq!(pg_point_count(3, 8), 3280);
        assert_eq!(pg_point_count(5, 8), 97_656);
        assert_eq!(pg_point_count(7, 8), 960_800);
    }

    #[test]
    fn enumerate_counts_and_distinctness() {
        for (q, n) in [(2u16, 8u32), (3, 2), (3, 8), (4, 4)] {
            let f = FieldDesc::with_order(q).unwrap();
            let pts: Vec<_> = pg_enumerate(&f, n).collect();
            assert_eq!(pts.len() as u64, pg_point_count(q, n));
            let mut sorted: Vec<_> = pts.iter().map(|p| p.iter().map(|c| c.value()).collect::<Vec<_>>()).collect();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), pts.len());
            for p in &pts {
                let lead = p.iter().position(|c| !c.is_zero()).unwrap();
                assert_eq!(p[lead], FieldElem::ONE);
            }
        }
    }

    #[test]
    fn enumerate_full_space_counts_up_to_q7() {
        for q in [2u16, 3, 4, 5, 7] {
            let f = FieldDesc::with_order(q).unwrap();
            assert_eq!(pg_enumerate(&f, 8).count() as u64, pg_point_count(q, 8), "q={q}");
        }
    }

    #[test]
    fn rank_unrank_roundtrip_exhaustive() {
        for q in [2u16, 3, 5] {
            let f = FieldDesc::with_order(q).unwrap();
            let total = pg_point_count(q, 8);
            let step = if q == 5 { 97 } else { 1 };
            let mut prev: Option<ProjPoint> = None;
            for idx in (0..total).step_by(step) {
                let p = pg_unrank(&f, idx as u32).unwrap();
                assert_eq!(pg_rank(&f, p.coords()) as u64, idx);
                if let Some(prev) = prev {
                    assert_ne!(prev, p);
                }
                prev = Some(p);
            }
            assert!(pg_unrank(&f, total as u32).is_err());
        }
    }

    #[test]
    fn enumerate_matches_unrank_order() {
        let f = FieldDesc::new(3, 1).unwrap();
        for (idx, coords) in pg_enumerate(&f, 8).enumerate() {
            let p = pg_unrank(&f, idx as u32).unwrap();
            assert_eq!(p.coords().as_slice(), coords.as_slice());
        }
    }

    #[test]
    fn det_examples() {
        let f = FieldDesc::new(3, 1).unwrap();
        assert_eq!(Mat2::IDENTITY.det(&f), FieldElem::ONE);
        let m = Mat2::from_values(&f, [[0, 1], [2, 0]]).unwrap();
        assert_eq!(m.det(&f), fe(&f, 1)); // -2 = 1 mod 3

        let f2 = FieldDesc::new(2, 1).unwrap();
        let m = Mat2::from_values(&f2, [[1, 1], [1, 1]]).unwrap();
        assert_eq!(m.det(&f2), FieldElem::ZERO);
    }

    #[test]
    fn det_is_multiplicative_exhaustive() {
        for q in [2u16, 3, 4] {
            let f = FieldDesc::with_order(q).unwrap();
            let mats: Vec<Mat2> = (0..q.pow(4))
                .map(|k| {
                    let d = [k % q, (k / q) % q, (k / q / q) % q, (k / q / q / q) % q];
                    Mat2::from_values(&f, [[d[0], d[1]], [d[2], d[3]]]).unwrap()
                })
                .collect();
            for a in &mats {
                for b in &mats {
                    assert_eq!(a.mul(&f, b).det(&f), f.mul(a.det(&f), b.det(&f)));
                }
            }
        }
    }

    #[test]
    fn span_rank_examples() {
        let f = FieldDesc::new(2, 1).unwrap();
        let e0 = vec8(&f, [1, 0, 0, 0, 0, 0, 0, 0]);
        let e1 = vec8(&f, [0, 1, 0, 0, 0, 0, 0, 0]);
        let sum = vec8(&f, [1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(span_rank(&f, &[e0, e1, sum]), 2);
        assert_eq!(span_rank(&f, &[]), 0);
        let basis: Vec<Vec8> = (0..8)
            .map(|i| {
                let mut v = [FieldElem::ZERO; 8];
                v[i] = FieldElem::ONE;
                v
            })
            .collect();
        assert_eq!(span_rank(&f, &basis), 8);
    }

    #[test]
    fn span_rank_invariant_under_scaling_and_permutation() {
        let f = FieldDesc::new(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let count = rng.random_range(1..=6);
            let rows: Vec<Vec8> = (0..count)
                .map(|_| {
                    let mut v = [FieldElem::ZERO; 8];
                    for c in v.iter_mut() {
                        *c = fe(&f, rng.random_range(0..5));
                    }
                    v
                })
                .collect();
            let r = span_rank(&f, &rows);

            let mut scaled = rows.clone();
            for row in scaled.iter_mut() {
                let s = fe(&f, rng.random_range(1..5));
                for c in row.iter_mut() {
                    *c = f.mul(*c, s);
                }
            }
            assert_eq!(span_rank(&f, &scaled), r);

            let mut shuffled = rows.clone();
            shuffled.shuffle(&mut rng);
            assert_eq!(span_rank(&f, &shuffled), r);
        }
    }

    #[test]
    fn in_span_agrees_with_rank_growth() {
        let f = FieldDesc::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let rows: Vec<Vec8> = (0..rng.random_range(1..=4))
                .map(|_| {
                    let mut v = [FieldElem::ZERO; 8];
                    for c in v.iter_mut() {
                        *c = fe(&f, rng.random_range(0..3));
                    }
                    v
                })
                .collect();
            let basis = row_basis(&f, &rows);
            let mut probe = [FieldElem::ZERO; 8];
            for c in probe.iter_mut() {
                *c = fe(&f, rng.random_range(0..3));
            }
            let grew = {
                let mut all = rows.clone();
                all.push(probe);
                span_rank(&f, &all) > basis.len()
            };
            assert_eq!(in_span(&f, &basis, &probe), !grew);
        }
    }

    #[test]
    fn pg1_point_order() {
        let f = FieldDesc::new(3, 1).unwrap();
        let pts = pg1_points(&f);
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], [fe(&f, 1), fe(&f, 0)]);
        assert_eq!(pts[1], [fe(&f, 0), fe(&f, 1)]);
        assert_eq!(pts[2], [fe(&f, 1), fe(&f, 1)]);
        assert_eq!(pts[3], [fe(&f, 1), fe(&f, 2)]);
    }

    #[test]
    fn display_is_comma_separated() {
        let f = FieldDesc::new(3, 1).unwrap();
        let p = pg_normalize(&f, &vec8(&f, [0, 1, 2, 0, 0, 0, 0, 1])).unwrap();
        assert_eq!(p.to_string(), "0,1,2,0,0,0,0,1");
    }
}
