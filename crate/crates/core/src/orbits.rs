//! Orbits of the stabiliser group of the Segre variety on the points of
//! PG(7,q).
//!
//! The stabiliser is the collineation group induced by the wreath product
//! GL(2,q) wr S3: three GL(2,q) factors acting on the tensor legs, permuted
//! by S3. The group is never materialized; [`orbit_partition`] closes every
//! point under a fixed generator set (nine lifted GL(2,q) generators plus
//! the transposition and 3-cycle of the factors) with a breadth-first sweep
//! over the whole point space, marking visited points in an atomic bitset so
//! frontier expansion can run on several threads. Orbit ids are assigned in
//! order of least contained point index, which makes reports deterministic
//! for any thread count.
//!
//! [`classify_point`] labels a point O1..O5 from its invariants (tensor
//! rank, flattening ranks, singularity); [`verify_theorems`] cross-checks
//! that labelling against the enumerated partition point by point.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldDesc, FieldElem, DEFAULT_Q_LIMIT, MAX_ORDER};
use crate::linalg::{normalize_in_place, pg_point_count, pg_rank, pg_unrank, Mat2, ProjPoint};
use crate::rank::{pure_tensors, rank_table, tensor_rank, RankValue};
use crate::report::{OrbitReport, OrbitSummary, VerificationFlags};
use crate::tensor::{flattening_ranks, is_nonsingular, Tensor222};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitsError {
    #[error("whole-space enumeration of PG(7,{0}) ({1} points) exceeds the q <= {DEFAULT_Q_LIMIT} guard; override to proceed")]
    ResourceGuard(u16, u64),
    #[error("the zero tensor is not a projective point")]
    ZeroTensor,
    #[error("group element matrices must be invertible")]
    SingularMatrix,
}

/// A permutation of the three factor positions: position l maps to
/// `self.0[l]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Perm3(pub [u8; 3]);

impl Perm3 {
    pub const IDENTITY: Perm3 = Perm3([0, 1, 2]);
    /// The transposition (1 2).
    pub const SWAP_12: Perm3 = Perm3([1, 0, 2]);
    /// The 3-cycle (1 2 3).
    pub const CYCLE: Perm3 = Perm3([1, 2, 0]);

    #[inline]
    pub fn apply(self, pos: usize) -> usize {
        self.0[pos] as usize
    }

    /// self after other: (self * other)(l) = self(other(l)).
    pub fn compose(self, other: Perm3) -> Perm3 {
        Perm3([
            self.0[other.0[0] as usize],
            self.0[other.0[1] as usize],
            self.0[other.0[2] as usize],
        ])
    }

    pub fn inverse(self) -> Perm3 {
        let mut inv = [0u8; 3];
        for (l, &m) in self.0.iter().enumerate() {
            inv[m as usize] = l as u8;
        }
        Perm3(inv)
    }
}

/// An element of the wreath product GL(2,q) wr S3: three invertible
/// matrices and a factor permutation. Acting on a tensor permutes the
/// factors first, then applies the matrices leg by leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupElement {
    pub mats: [Mat2; 3],
    pub perm: Perm3,
}

impl GroupElement {
    pub fn identity() -> GroupElement {
        GroupElement { mats: [Mat2::IDENTITY; 3], perm: Perm3::IDENTITY }
    }

    /// Checked constructor: rejects non-invertible matrices.
    pub fn new(f: &FieldDesc, mats: [Mat2; 3], perm: Perm3) -> Result<GroupElement, OrbitsError> {
        if mats.iter().any(|m| !m.is_invertible(f)) {
            return Err(OrbitsError::SingularMatrix);
        }
        Ok(GroupElement { mats, perm })
    }

    fn from_matrix(axis: usize, m: Mat2) -> GroupElement {
        let mut mats = [Mat2::IDENTITY; 3];
        mats[axis] = m;
        GroupElement { mats, perm: Perm3::IDENTITY }
    }

    fn from_perm(perm: Perm3) -> GroupElement {
        GroupElement { mats: [Mat2::IDENTITY; 3], perm }
    }

    /// Group law matching the action: act(a.compose(b), t) = act(a, act(b, t)).
    pub fn compose(&self, f: &FieldDesc, other: &GroupElement) -> GroupElement {
        let inv = self.perm.inverse();
        let mut mats = [Mat2::IDENTITY; 3];
        for m in 0..3 {
            mats[m] = self.mats[m].mul(f, &other.mats[inv.apply(m)]);
        }
        GroupElement { mats, perm: self.perm.compose(other.perm) }
    }

    /// Applies the element: factor permutation first, then the matrix of
    /// each leg. Linear and invertible; maps pure tensors to pure tensors.
    pub fn act(&self, f: &FieldDesc, t: &Tensor222) -> Tensor222 {
        let src = t.coords();
        let mut a = [FieldElem::ZERO; 8];
        let p = self.perm.0;
        for i0 in 0..2usize {
            for i1 in 0..2usize {
                for i2 in 0..2usize {
                    let idx = [i0, i1, i2];
                    a[4 * i0 + 2 * i1 + i2] = src[4 * idx[p[0] as usize]
                        + 2 * idx[p[1] as usize]
                        + idx[p[2] as usize]];
                }
            }
        }
        for (axis, m) in self.mats.iter().enumerate() {
            if *m != Mat2::IDENTITY {
                a = apply_axis(f, &a, m, axis);
            }
        }
        Tensor222::from_coords(a)
    }
}

/// Applies a 2x2 matrix along one tensor axis (0, 1 or 2).
fn apply_axis(f: &FieldDesc, a: &[FieldElem; 8], m: &Mat2, axis: usize) -> [FieldElem; 8] {
    let stride = match axis {
        0 => 4,
        1 => 2,
        _ => 1,
    };
    let mut out = [FieldElem::ZERO; 8];
    for base in 0..8 {
        if base / stride % 2 != 0 {
            continue;
        }
        let x0 = a[base];
        let x1 = a[base + stride];
        out[base] = f.add(f.mul(m.0[0][0], x0), f.mul(m.0[0][1], x1));
        out[base + stride] = f.add(f.mul(m.0[1][0], x0), f.mul(m.0[1][1], x1));
    }
    out
}

/// A generating set of GL(2,q): the transvection [[1,1],[0,1]], the
/// dilation diag(g,1) for the fixed primitive element g, and the swap
/// [[0,1],[1,0]]. The closure is checked exhaustively against the group
/// order (q^2-1)(q^2-q) at construction; at the q = 16 cap that is 61200
/// matrices, still instant.
pub fn gl2_generators(f: &FieldDesc) -> Vec<Mat2> {
    let one = FieldElem::ONE;
    let zero = FieldElem::ZERO;
    let g = f.primitive();
    let gens = vec![
        Mat2([[one, one], [zero, one]]),
        Mat2([[g, zero], [zero, one]]),
        Mat2([[zero, one], [one, zero]]),
    ];
    let q = f.order() as u64;
    let expected = (q * q - 1) * (q * q - q);
    assert_eq!(
        gl2_closure_size(f, &gens) as u64,
        expected,
        "generator closure must be all of GL(2,{q})"
    );
    gens
}

fn gl2_closure_size(f: &FieldDesc, gens: &[Mat2]) -> usize {
    let key = |m: &Mat2| -> usize {
        let v = |r: usize, c: usize| m.0[r][c].value() as usize;
        v(0, 0) | v(0, 1) << 4 | v(1, 0) << 8 | v(1, 1) << 12
    };
    let mut seen = vec![false; 1 << 16];
    let mut stack = vec![Mat2::IDENTITY];
    seen[key(&Mat2::IDENTITY)] = true;
    let mut count = 0usize;
    while let Some(m) = stack.pop() {
        count += 1;
        for g in gens {
            let next = m.mul(f, g);
            let k = key(&next);
            if !seen[k] {
                seen[k] = true;
                stack.push(next);
            }
        }
    }
    count
}

/// The generator set used for whole-space enumeration: each GL(2,q)
/// generator lifted to each of the three factors, plus the two factor
/// permutations (1 2) and (1 2 3). Eleven elements in total.
pub fn gx_generators(f: &FieldDesc) -> Vec<GroupElement> {
    let mut gens = Vec::with_capacity(11);
    for axis in 0..3 {
        for m in gl2_generators(f) {
            gens.push(GroupElement::from_matrix(axis, m));
        }
    }
    gens.push(GroupElement::from_perm(Perm3::SWAP_12));
    gens.push(GroupElement::from_perm(Perm3::CYCLE));
    gens
}

/// Orbit labels, in the order the classification theorems list them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OrbitLabel {
    /// Rank 1: the variety itself.
    O1,
    /// Rank 2, inside some shamrock (equivalently: some flattening rank 1).
    O2,
    /// Rank 2, outside every shamrock (all flattening ranks 2).
    O3,
    /// Rank 3 and singular.
    O4,
    /// Nonsingular (necessarily rank 3).
    O5,
}

impl OrbitLabel {
    pub const ALL: [OrbitLabel; 5] =
        [OrbitLabel::O1, OrbitLabel::O2, OrbitLabel::O3, OrbitLabel::O4, OrbitLabel::O5];

    pub fn rank(self) -> RankValue {
        match self {
            OrbitLabel::O1 => 1,
            OrbitLabel::O2 | OrbitLabel::O3 => 2,
            OrbitLabel::O4 | OrbitLabel::O5 => 3,
        }
    }

    pub fn is_singular(self) -> bool {
        self != OrbitLabel::O5
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OrbitLabel::O1 => "O1",
            OrbitLabel::O2 => "O2",
            OrbitLabel::O3 => "O3",
            OrbitLabel::O4 => "O4",
            OrbitLabel::O5 => "O5",
        }
    }
}

impl std::fmt::Display for OrbitLabel {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        out.write_str(self.as_str())
    }
}

/// Invariant-based label of a single point.
///
/// Nonsingular points are O5 outright; singular points split by rank, with
/// the rank-2 class separated by the minimal flattening rank (1 exactly for
/// points lying in a leaf of some shamrock).
pub fn classify_point(
    f: &FieldDesc,
    pure: &[Tensor222],
    t: &Tensor222,
) -> Result<OrbitLabel, OrbitsError> {
    if t.is_zero() {
        return Err(OrbitsError::ZeroTensor);
    }
    if is_nonsingular(f, t) {
        return Ok(OrbitLabel::O5);
    }
    Ok(match tensor_rank(f, pure, t) {
        1 => OrbitLabel::O1,
        2 => {
            if flattening_ranks(f, t).into_iter().min() == Some(1) {
                OrbitLabel::O2
            } else {
                OrbitLabel::O3
            }
        }
        _ => OrbitLabel::O4,
    })
}

fn label_from_invariants(rank: RankValue, min_flat: u8, nonsingular: bool) -> OrbitLabel {
    if nonsingular {
        OrbitLabel::O5
    } else {
        match rank {
            1 => OrbitLabel::O1,
            2 => {
                if min_flat == 1 {
                    OrbitLabel::O2
                } else {
                    OrbitLabel::O3
                }
            }
            _ => OrbitLabel::O4,
        }
    }
}

/// Knobs for the whole-space pipelines.
#[derive(Debug, Clone, Copy)]
pub struct OrbitOptions {
    /// Worker threads for frontier expansion and per-point scans. Results
    /// are identical for every value.
    pub threads: usize,
    /// Lifts the q <= 7 guard up to the hard q <= 16 cap. Expect long
    /// runtimes and large allocations beyond the guard.
    pub allow_large: bool,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions { threads: 1, allow_large: false }
    }
}

fn guarded_point_count(f: &FieldDesc, allow_large: bool) -> Result<usize, OrbitsError> {
    let n = pg_point_count(f.order(), 8);
    if f.order() > DEFAULT_Q_LIMIT && !allow_large {
        return Err(OrbitsError::ResourceGuard(f.order(), n));
    }
    debug_assert!(f.order() <= MAX_ORDER);
    Ok(n as usize)
}

fn run_with_pool<R: Send>(threads: usize, job: impl FnOnce() -> R + Send) -> R {
    if threads <= 1 {
        job()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("worker pool")
            .install(job)
    }
}

/// Word-packed visited set shared by frontier expansion workers.
struct AtomicBitset {
    words: Vec<AtomicU64>,
}

impl AtomicBitset {
    fn new(bits: usize) -> AtomicBitset {
        AtomicBitset { words: (0..bits.div_ceil(64)).map(|_| AtomicU64::new(0)).collect() }
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.words[i / 64].load(Ordering::Relaxed) & (1 << (i % 64)) != 0
    }

    /// Returns true iff this call flipped the bit from 0 to 1.
    #[inline]
    fn try_claim(&self, i: usize) -> bool {
        let mask = 1u64 << (i % 64);
        self.words[i / 64].fetch_or(mask, Ordering::Relaxed) & mask == 0
    }
}

/// The partition of all point indices into group orbits.
#[derive(Debug, Clone)]
pub struct OrbitPartition {
    orbit_of: Vec<u32>,
    sizes: Vec<u64>,
    representatives: Vec<u32>,
}

impl OrbitPartition {
    pub fn orbit_count(&self) -> usize {
        self.sizes.len()
    }

    /// Orbit id of every point, indexed by point index. Ids are assigned in
    /// order of least contained point index.
    pub fn orbit_of(&self) -> &[u32] {
        &self.orbit_of
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// Least point index of each orbit.
    pub fn representatives(&self) -> &[u32] {
        &self.representatives
    }
}

/// Breadth-first closure of every point of PG(7,q) under the generator set.
pub fn orbit_partition(f: &FieldDesc) -> Result<OrbitPartition, OrbitsError> {
    orbit_partition_opts(f, OrbitOptions::default())
}

pub fn orbit_partition_opts(
    f: &FieldDesc,
    opts: OrbitOptions,
) -> Result<OrbitPartition, OrbitsError> {
    let n = guarded_point_count(f, opts.allow_large)?;
    let gens = gx_generators(f);
    run_with_pool(opts.threads, || {
        let visited = AtomicBitset::new(n);
        let mut orbit_of = vec![u32::MAX; n];
        let mut sizes = Vec::new();
        let mut representatives = Vec::new();

        for seed in 0..n {
            if visited.get(seed) {
                continue;
            }
            visited.try_claim(seed);
            let oid = representatives.len() as u32;
            representatives.push(seed as u32);
            orbit_of[seed] = oid;
            let mut size = 1u64;

            let seed_tensor =
                Tensor222::from_point(&pg_unrank(f, seed as u32).expect("seed in range"));
            let mut frontier = vec![seed_tensor];
            while !frontier.is_empty() {
                let discovered = expand_frontier(f, &gens, &frontier, &visited, opts.threads > 1);
                size += discovered.len() as u64;
                frontier.clear();
                frontier.reserve(discovered.len());
                for (idx, t) in discovered {
                    orbit_of[idx as usize] = oid;
                    frontier.push(t);
                }
            }
            sizes.push(size);
        }
        Ok(OrbitPartition { orbit_of, sizes, representatives })
    })
}

fn expand_frontier(
    f: &FieldDesc,
    gens: &[GroupElement],
    frontier: &[Tensor222],
    visited: &AtomicBitset,
    parallel: bool,
) -> Vec<(u32, Tensor222)> {
    let step = |t: &Tensor222, out: &mut Vec<(u32, Tensor222)>| {
        for g in gens {
            let img = g.act(f, t);
            let mut v = *img.coords();
            normalize_in_place(f, &mut v).expect("group images of points are nonzero");
            let idx = pg_rank(f, &v);
            if visited.try_claim(idx as usize) {
                out.push((idx, Tensor222::from_coords(v)));
            }
        }
    };
    if parallel && frontier.len() >= 1024 {
        frontier
            .par_chunks(1024)
            .map(|chunk| {
                let mut out = Vec::new();
                for t in chunk {
                    step(t, &mut out);
                }
                out
            })
            .reduce(Vec::new, |mut a, mut b| {
                a.append(&mut b);
                a
            })
    } else {
        let mut out = Vec::new();
        for t in frontier {
            step(t, &mut out);
        }
        out
    }
}

/// Per-point invariants over the whole space, indexed by point index.
#[derive(Debug, Clone)]
pub struct SpaceClassification {
    pub ranks: Vec<RankValue>,
    pub singular: Vec<bool>,
    pub labels: Vec<OrbitLabel>,
}

/// Computes rank, singularity and label for every point of PG(7,q).
///
/// Ranks come from the bulk secant sweep of [`rank_table`]; singularity is
/// the exhaustive contraction scan (the hyperdeterminant shortcut is never
/// trusted here). The per-point [`classify_point`] route is checked against
/// these labels exhaustively at q = 2, 3 by the test suites and on every
/// orbit representative by [`verify_theorems`].
pub fn classify_space(
    f: &FieldDesc,
    opts: OrbitOptions,
) -> Result<SpaceClassification, OrbitsError> {
    let n = guarded_point_count(f, opts.allow_large)?;
    let pure = pure_tensors(f);
    let ranks = rank_table(f, &pure);
    let per_point = |idx: usize| -> (bool, OrbitLabel) {
        let t = Tensor222::from_point(&pg_unrank(f, idx as u32).expect("index in range"));
        let nonsingular = is_nonsingular(f, &t);
        let min_flat = flattening_ranks(f, &t).into_iter().min().expect("three directions");
        let label = label_from_invariants(ranks[idx], min_flat, nonsingular);
        (!nonsingular, label)
    };
    let flags: Vec<(bool, OrbitLabel)> = run_with_pool(opts.threads, || {
        if opts.threads > 1 {
            (0..n).into_par_iter().map(per_point).collect()
        } else {
            (0..n).map(per_point).collect()
        }
    });
    let mut singular = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (s, l) in flags {
        singular.push(s);
        labels.push(l);
    }
    Ok(SpaceClassification { ranks, singular, labels })
}

/// Everything [`verify_theorems`] establishes: the report plus a witness
/// line for every failed assertion (empty when all checks hold).
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub report: OrbitReport,
    pub failures: Vec<String>,
}

impl VerifyOutcome {
    pub fn all_verified(&self) -> bool {
        let v = &self.report.verified;
        v.five_orbits && v.four_singular && v.classifier_matches && self.failures.is_empty()
    }
}

/// Enumerates the orbits, classifies every point, and cross-checks:
/// exactly five orbits; exactly four among the singular points; the label
/// partition and the orbit partition coincide point by point; rank and
/// singularity are constant on every orbit. Any violation is reported with
/// a witness point.
pub fn verify_theorems(f: &FieldDesc) -> Result<VerifyOutcome, OrbitsError> {
    verify_theorems_opts(f, OrbitOptions::default())
}

pub fn verify_theorems_opts(
    f: &FieldDesc,
    opts: OrbitOptions,
) -> Result<VerifyOutcome, OrbitsError> {
    let partition = orbit_partition_opts(f, opts)?;
    let cls = classify_space(f, opts)?;
    Ok(verify_partitioned(f, &partition, &cls))
}

/// The assertion half of [`verify_theorems`], on a partition and
/// classification already in hand.
pub fn verify_partitioned(
    f: &FieldDesc,
    partition: &OrbitPartition,
    cls: &SpaceClassification,
) -> VerifyOutcome {
    const MAX_WITNESSES: usize = 8;
    let n = cls.labels.len();
    let mut failures = Vec::new();

    let five_orbits = partition.orbit_count() == 5;
    if !five_orbits {
        failures.push(format!(
            "expected 5 orbits, found {} (representatives {:?})",
            partition.orbit_count(),
            partition.representatives()
        ));
    }

    let mut singular_orbits: Vec<u32> = (0..n)
        .filter(|&i| cls.singular[i])
        .map(|i| partition.orbit_of()[i])
        .collect();
    singular_orbits.sort_unstable();
    singular_orbits.dedup();
    let four_singular = singular_orbits.len() == 4;
    if !four_singular {
        failures.push(format!(
            "expected 4 orbits on singular points, found {}",
            singular_orbits.len()
        ));
    }

    // Label of each orbit, taken at its representative.
    let rep_labels: Vec<OrbitLabel> = partition
        .representatives()
        .iter()
        .map(|&rep| cls.labels[rep as usize])
        .collect();
    let mut classifier_matches = true;
    {
        let mut distinct = rep_labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != rep_labels.len() {
            classifier_matches = false;
            failures.push(format!(
                "orbit labels are not pairwise distinct: {rep_labels:?}"
            ));
        }
    }
    let mut mismatches = 0u64;
    for idx in 0..n {
        let oid = partition.orbit_of()[idx] as usize;
        if cls.labels[idx] != rep_labels[oid] {
            classifier_matches = false;
            mismatches += 1;
            if failures.len() < MAX_WITNESSES {
                failures.push(format!(
                    "point {} ({}) labelled {} but lies in orbit {} labelled {}",
                    idx,
                    point_coords(f, idx as u32),
                    cls.labels[idx],
                    oid,
                    rep_labels[oid]
                ));
            }
        }
        let rep = partition.representatives()[oid] as usize;
        if cls.ranks[idx] != cls.ranks[rep] || cls.singular[idx] != cls.singular[rep] {
            mismatches += 1;
            if failures.len() < MAX_WITNESSES {
                failures.push(format!(
                    "point {} ({}) has (rank, singular) = ({}, {}) but orbit {} representative has ({}, {})",
                    idx,
                    point_coords(f, idx as u32),
                    cls.ranks[idx],
                    cls.singular[idx],
                    oid,
                    cls.ranks[rep],
                    cls.singular[rep]
                ));
            }
        }
    }
    if mismatches > 0 && failures.len() >= MAX_WITNESSES {
        failures.push(format!("... {mismatches} mismatching points in total"));
    }

    // The classifier has two routes: the bulk tables above and the
    // per-point secant search. Cross-check them on each representative.
    let pure = pure_tensors(f);
    for (oid, &rep) in partition.representatives().iter().enumerate() {
        let t = Tensor222::from_point(&pg_unrank(f, rep).expect("representative in range"));
        let direct =
            classify_point(f, &pure, &t).expect("orbit representatives are nonzero");
        if direct != rep_labels[oid] {
            classifier_matches = false;
            failures.push(format!(
                "representative {} of orbit {} classifies as {} pointwise but {} in bulk",
                rep, oid, direct, rep_labels[oid]
            ));
        }
    }

    let orbits: Vec<OrbitSummary> = partition
        .representatives()
        .iter()
        .enumerate()
        .map(|(oid, &rep)| {
            let t = Tensor222::from_point(&pg_unrank(f, rep).expect("representative in range"));
            let mut flat = flattening_ranks(f, &t);
            flat.sort_unstable();
            OrbitSummary {
                label: rep_labels[oid],
                size: partition.sizes()[oid],
                representative: point_coords(f, rep),
                rank: cls.ranks[rep as usize],
                flattening_ranks: flat,
                singular: cls.singular[rep as usize],
            }
        })
        .collect();

    let report = OrbitReport {
        q: f.order(),
        points: n as u64,
        orbits,
        verified: VerificationFlags { five_orbits, four_singular, classifier_matches },
    };
    VerifyOutcome { report, failures }
}

fn point_coords(f: &FieldDesc, idx: u32) -> String {
    pg_unrank(f, idx).expect("index in range").to_string()
}

/// Unrank helper shared by the CSV writer.
pub(crate) fn point_at(f: &FieldDesc, idx: u32) -> ProjPoint {
    pg_unrank(f, idx).expect("index in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segre::enumerate_segre;
    use crate::tensor::is_pure;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn tensor(f: &FieldDesc, v: [u16; 8]) -> Tensor222 {
        Tensor222::from_values(f, v).unwrap()
    }

    fn random_element(f: &FieldDesc, rng: &mut impl Rng) -> GroupElement {
        let mut mats = [Mat2::IDENTITY; 3];
        for m in mats.iter_mut() {
            *m = loop {
                let cand = Mat2([
                    [
                        f.elem(rng.random_range(0..f.order())).unwrap(),
                        f.elem(rng.random_range(0..f.order())).unwrap(),
                    ],
                    [
                        f.elem(rng.random_range(0..f.order())).unwrap(),
                        f.elem(rng.random_range(0..f.order())).unwrap(),
                    ],
                ]);
                if cand.is_invertible(f) {
                    break cand;
                }
            };
        }
        let perms = [
            Perm3::IDENTITY,
            Perm3::SWAP_12,
            Perm3::CYCLE,
            Perm3([2, 1, 0]),
            Perm3([0, 2, 1]),
            Perm3([2, 0, 1]),
        ];
        GroupElement { mats, perm: perms[rng.random_range(0..6)] }
    }

    fn random_tensor(f: &FieldDesc, rng: &mut impl Rng) -> Tensor222 {
        let mut a = [FieldElem::ZERO; 8];
        for c in a.iter_mut() {
            *c = f.elem(rng.random_range(0..f.order())).unwrap();
        }
        Tensor222::from_coords(a)
    }

    #[test]
    fn gl2_closure_sizes() {
        for (q, expected) in [(2u16, 6usize), (3, 48), (4, 180)] {
            let f = FieldDesc::with_order(q).unwrap();
            let gens = gl2_generators(&f);
            assert_eq!(gl2_closure_size(&f, &gens), expected);
        }
    }

    #[test]
    fn identity_acts_trivially() {
        let f = FieldDesc::new(3, 1).unwrap();
        let t = tensor(&f, [1, 0, 2, 0, 0, 1, 0, 2]);
        assert_eq!(GroupElement::identity().act(&f, &t), t);
    }

    #[test]
    fn factor_swap_moves_legs() {
        let f = FieldDesc::new(2, 1).unwrap();
        // e0 (x) e1 (x) e0 at index 2; swapping factors 1 and 2 gives
        // e1 (x) e0 (x) e0 at index 4.
        let t = tensor(&f, [0, 0, 1, 0, 0, 0, 0, 0]);
        let g = GroupElement::from_perm(Perm3::SWAP_12);
        assert_eq!(g.act(&f, &t), tensor(&f, [0, 0, 0, 0, 1, 0, 0, 0]));
    }

    #[test]
    fn transvection_on_first_factor() {
        let f = FieldDesc::new(2, 1).unwrap();
        // [[1,1],[0,1]] maps e1 (x) e0 (x) e0 to (e0 + e1) (x) e0 (x) e0.
        let t = tensor(&f, [0, 0, 0, 0, 1, 0, 0, 0]);
        let m = Mat2::from_values(&f, [[1, 1], [0, 1]]).unwrap();
        let g = GroupElement::from_matrix(0, m);
        assert_eq!(g.act(&f, &t), tensor(&f, [1, 0, 0, 0, 1, 0, 0, 0]));
    }

    #[test]
    fn group_element_constructor_rejects_singular_matrices() {
        let f = FieldDesc::new(2, 1).unwrap();
        let bad = Mat2::from_values(&f, [[1, 1], [1, 1]]).unwrap();
        assert_eq!(
            GroupElement::new(&f, [bad, Mat2::IDENTITY, Mat2::IDENTITY], Perm3::IDENTITY)
                .unwrap_err(),
            OrbitsError::SingularMatrix
        );
    }

    #[test]
    fn action_respects_composition_randomized() {
        for q in [2u16, 3, 4, 5] {
            let f = FieldDesc::with_order(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(40 + q as u64);
            for _ in 0..60 {
                let a = random_element(&f, &mut rng);
                let b = random_element(&f, &mut rng);
                let t = random_tensor(&f, &mut rng);
                assert_eq!(
                    a.compose(&f, &b).act(&f, &t),
                    a.act(&f, &b.act(&f, &t)),
                    "q={q}"
                );
            }
        }
    }

    #[test]
    fn permutation_inverse_roundtrip() {
        for p in [
            Perm3::IDENTITY,
            Perm3::SWAP_12,
            Perm3::CYCLE,
            Perm3([2, 1, 0]),
            Perm3([0, 2, 1]),
            Perm3([2, 0, 1]),
        ] {
            assert_eq!(p.compose(p.inverse()), Perm3::IDENTITY);
            assert_eq!(p.inverse().compose(p), Perm3::IDENTITY);
        }
    }

    #[test]
    fn generators_preserve_the_variety() {
        for q in [2u16, 3, 5] {
            let f = FieldDesc::with_order(q).unwrap();
            let gens = gx_generators(&f);
            assert_eq!(gens.len(), 11);
            for p in enumerate_segre(&f) {
                let t = Tensor222::from_point(&p);
                for g in &gens {
                    assert!(is_pure(&f, &g.act(&f, &t)), "q={q}");
                }
            }
        }
    }

    #[test]
    fn orbit_partition_q2_has_five_orbits() {
        let f = FieldDesc::new(2, 1).unwrap();
        let part = orbit_partition(&f).unwrap();
        assert_eq!(part.orbit_count(), 5);
        assert_eq!(part.sizes().iter().sum::<u64>(), 255);
        assert!(part.orbit_of().iter().all(|&o| o < 5));
        // Ids are assigned by least contained point index.
        let mut firsts = vec![u32::MAX; part.orbit_count()];
        for (idx, &oid) in part.orbit_of().iter().enumerate() {
            if firsts[oid as usize] == u32::MAX {
                firsts[oid as usize] = idx as u32;
            }
        }
        assert_eq!(firsts, part.representatives());
        assert!(firsts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn orbit_partition_matches_across_thread_counts() {
        let f = FieldDesc::new(3, 1).unwrap();
        let seq = orbit_partition_opts(&f, OrbitOptions { threads: 1, allow_large: false }).unwrap();
        let par = orbit_partition_opts(&f, OrbitOptions { threads: 4, allow_large: false }).unwrap();
        assert_eq!(seq.orbit_of(), par.orbit_of());
        assert_eq!(seq.sizes(), par.sizes());
        assert_eq!(seq.representatives(), par.representatives());
    }

    #[test]
    fn resource_guard_rejects_large_q() {
        let f = FieldDesc::with_order(11).unwrap();
        assert!(matches!(
            orbit_partition(&f).unwrap_err(),
            OrbitsError::ResourceGuard(11, _)
        ));
        assert!(matches!(
            classify_space(&f, OrbitOptions::default()).unwrap_err(),
            OrbitsError::ResourceGuard(11, _)
        ));
    }

    #[test]
    fn classify_point_examples() {
        let f = FieldDesc::new(2, 1).unwrap();
        let pure = pure_tensors(&f);
        assert_eq!(
            classify_point(&f, &pure, &tensor(&f, [1, 0, 0, 0, 0, 0, 0, 0])).unwrap(),
            OrbitLabel::O1
        );
        // (e0 (x) e0 + e1 (x) e1) (x) e0: rank 2 with a direction of
        // flattening rank 1, so it lies in a shamrock.
        assert_eq!(
            classify_point(&f, &pure, &tensor(&f, [1, 0, 0, 0, 0, 0, 1, 0])).unwrap(),
            OrbitLabel::O2
        );
        assert_eq!(
            classify_point(&f, &pure, &tensor(&f, [1, 0, 0, 0, 0, 0, 0, 1])).unwrap(),
            OrbitLabel::O3
        );
        // e0 (x) e0 (x) e0 + e0 (x) e1 (x) e1 + e1 (x) e1 (x) e0: rank 3,
        // singular (the first-direction determinant form is x^2).
        assert_eq!(
            classify_point(&f, &pure, &tensor(&f, [1, 0, 0, 1, 0, 0, 1, 0])).unwrap(),
            OrbitLabel::O4
        );
        assert_eq!(
            classify_point(&f, &pure, &tensor(&f, [1, 0, 0, 1, 0, 1, 1, 1])).unwrap(),
            OrbitLabel::O5
        );
        assert_eq!(
            classify_point(&f, &pure, &Tensor222::ZERO).unwrap_err(),
            OrbitsError::ZeroTensor
        );
    }

    #[test]
    fn classify_space_agrees_with_classify_point_exhaustive_q2() {
        let f = FieldDesc::new(2, 1).unwrap();
        let pure = pure_tensors(&f);
        let cls = classify_space(&f, OrbitOptions::default()).unwrap();
        for idx in 0..cls.labels.len() {
            let t = Tensor222::from_point(&pg_unrank(&f, idx as u32).unwrap());
            assert_eq!(cls.labels[idx], classify_point(&f, &pure, &t).unwrap(), "idx={idx}");
        }
    }

    #[test]
    fn verify_q2_all_flags() {
        let f = FieldDesc::new(2, 1).unwrap();
        let outcome = verify_theorems(&f).unwrap();
        assert!(outcome.all_verified(), "failures: {:?}", outcome.failures);
        assert_eq!(outcome.report.orbits.len(), 5);
        assert_eq!(outcome.report.points, 255);
        let labels: Vec<OrbitLabel> = outcome.report.orbits.iter().map(|o| o.label).collect();
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, OrbitLabel::ALL.to_vec());
    }
}
