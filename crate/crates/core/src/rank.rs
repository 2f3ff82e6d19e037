//! Tensor rank over GF(q): the minimal number of pure tensors summing to a
//! given tensor, which for the 2x2x2 format is at most 3.
//!
//! [`tensor_rank`] decides rank <= 2 by peeling one pure tensor (a secant
//! search over the (q+1)^3 pure representatives and q-1 scalars) and assigns
//! rank 3 by exhaustion of that test. [`rank_oracle`] is the independent
//! check: a brute-force search over pairs and triples of pure tensors with
//! all nonzero coefficient combinations, feasible for q <= 3. The two must
//! agree point for point, and the test suites enforce that they do.

use thiserror::Error;

use crate::gf::{FieldDesc, FieldElem};
use crate::linalg::pg_point_count;
use crate::segre::enumerate_segre;
use crate::tensor::{is_pure, Tensor222};

/// Rank of a 2x2x2 tensor: 0 for the zero tensor, otherwise 1, 2 or 3.
pub type RankValue = u8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RankError {
    #[error("the brute-force rank oracle is limited to q <= 3 (cost grows as (q+1)^6 q^2); got q = {0}")]
    OracleOrderTooLarge(u16),
    #[error("no decomposition into at most 3 pure tensors exists for {0}; maximal rank exceeded")]
    NoDecomposition(Tensor222),
}

/// The normalized pure tensors, one per point of the Segre variety, in
/// canonical enumeration order. Build once and share across rank queries.
pub fn pure_tensors(f: &FieldDesc) -> Vec<Tensor222> {
    enumerate_segre(f).iter().map(Tensor222::from_point).collect()
}

/// Tensor rank by secant peeling.
///
/// Rank 2 holds iff subtracting some scalar multiple of some pure tensor
/// leaves a pure (or zero) tensor; rank 3 is assigned when the search is
/// exhausted. `pure` must be the full list from [`pure_tensors`].
pub fn tensor_rank(f: &FieldDesc, pure: &[Tensor222], t: &Tensor222) -> RankValue {
    if t.is_zero() {
        return 0;
    }
    if is_pure(f, t) {
        return 1;
    }
    for s in pure {
        for lambda in f.nonzero_elements() {
            let rest = t.sub(f, &s.scale(f, lambda));
            if rest.is_zero() || is_pure(f, &rest) {
                return 2;
            }
        }
    }
    3
}

/// Independent brute-force rank: the smallest k <= 3 with t equal to a
/// combination of k pure representatives with nonzero coefficients.
pub fn rank_oracle(
    f: &FieldDesc,
    pure: &[Tensor222],
    t: &Tensor222,
) -> Result<RankValue, RankError> {
    if f.order() > 3 {
        return Err(RankError::OracleOrderTooLarge(f.order()));
    }
    if t.is_zero() {
        return Ok(0);
    }
    let nonzero: Vec<FieldElem> = f.nonzero_elements().collect();

    for s in pure {
        for &a in &nonzero {
            if s.scale(f, a) == *t {
                return Ok(1);
            }
        }
    }
    for (i, s1) in pure.iter().enumerate() {
        for &a in &nonzero {
            let u = s1.scale(f, a);
            for s2 in &pure[i + 1..] {
                for &b in &nonzero {
                    if u.add(f, &s2.scale(f, b)) == *t {
                        return Ok(2);
                    }
                }
            }
        }
    }
    for (i, s1) in pure.iter().enumerate() {
        for &a in &nonzero {
            let u = s1.scale(f, a);
            for (j, s2) in pure.iter().enumerate().skip(i + 1) {
                for &b in &nonzero {
                    let v = u.add(f, &s2.scale(f, b));
                    for s3 in &pure[j + 1..] {
                        for &c in &nonzero {
                            if v.add(f, &s3.scale(f, c)) == *t {
                                return Ok(3);
                            }
                        }
                    }
                }
            }
        }
    }
    Err(RankError::NoDecomposition(*t))
}

/// Rank of every point of PG(7,q), indexed by point index.
///
/// Pure points get rank 1 directly; rank 2 is marked by sweeping every
/// secant: each unordered pair of distinct pure points contributes the q-1
/// interior points s1 + lambda s2. Everything untouched has rank 3, the
/// maximum for this format. Agreement with the per-point [`tensor_rank`] is
/// pinned exhaustively at q = 2, 3 in the test suites.
pub fn rank_table(f: &FieldDesc, pure: &[Tensor222]) -> Vec<RankValue> {
    let n = pg_point_count(f.order(), 8) as usize;
    let mut ranks = vec![3u8; n];
    let indices: Vec<u32> = pure
        .iter()
        .map(|t| t.to_point(f).expect("pure tensors are nonzero").index())
        .collect();
    for &idx in &indices {
        ranks[idx as usize] = 1;
    }
    for (i, s1) in pure.iter().enumerate() {
        for s2 in &pure[i + 1..] {
            for lambda in f.nonzero_elements() {
                let p = s1.add(f, &s2.scale(f, lambda));
                let idx = p.to_point(f).expect("distinct projective points never cancel").index();
                let slot = &mut ranks[idx as usize];
                if *slot == 3 {
                    *slot = 2;
                }
            }
        }
    }
    ranks
}
