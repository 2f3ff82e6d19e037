//! Machine-readable orbit reports.
//!
//! The JSON body is canonical: fixed key order, no timestamps, no
//! environment data, so identical inputs produce byte-identical files and
//! golden-file diffs stay clean. Timing and thread-count chatter belongs to
//! the human-oriented text output, never here.

use std::io;

use serde::{Deserialize, Serialize};

use crate::gf::FieldDesc;
use crate::linalg::pg_point_count;
use crate::orbits::{point_at, OrbitLabel, OrbitPartition, SpaceClassification};

/// One orbit: label, size and the invariants of its least-index point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub label: OrbitLabel,
    pub size: u64,
    /// Normalized coordinates of the least-index point, comma separated.
    pub representative: String,
    pub rank: u8,
    /// Sorted multiset of the three flattening ranks.
    pub flattening_ranks: [u8; 3],
    pub singular: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationFlags {
    /// Exactly five orbits on all points.
    pub five_orbits: bool,
    /// Exactly four orbits on the singular points.
    pub four_singular: bool,
    /// The invariant labels and the enumerated orbits induce the same
    /// partition, as a label-to-orbit bijection.
    pub classifier_matches: bool,
}

/// The per-field classification table with its verification flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub q: u16,
    pub points: u64,
    pub orbits: Vec<OrbitSummary>,
    pub verified: VerificationFlags,
}

impl OrbitReport {
    /// The canonical byte representation: pretty JSON in declaration order
    /// with a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<OrbitReport> {
        serde_json::from_str(s)
    }
}

/// Writes the whole-space table, one row per point:
/// `index,coords,rank,singular,label,orbit_id`. Rows run in index order;
/// the coords field is the comma-separated normalized representative.
pub fn write_space_csv<W: io::Write>(
    out: W,
    f: &FieldDesc,
    cls: &SpaceClassification,
    partition: &OrbitPartition,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "coords", "rank", "singular", "label", "orbit_id"])?;
    let n = pg_point_count(f.order(), 8) as u32;
    for idx in 0..n {
        let i = idx as usize;
        w.write_record([
            idx.to_string(),
            point_at(f, idx).to_string(),
            cls.ranks[i].to_string(),
            cls.singular[i].to_string(),
            cls.labels[i].to_string(),
            partition.orbit_of()[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
