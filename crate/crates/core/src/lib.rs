//! Exact computation with the Segre variety `S_{2,2,2}(F_q)` in `PG(7,q)`.
//!
//! The crate classifies every point of `PG(7,q)` under the stabiliser group
//! of the Segre variety product of three projective lines, and cross-checks
//! an invariant-based classifier (tensor rank, flattening ranks, singularity)
//! against exhaustive orbit enumeration by the group generators.
//!
//! Module map:
//!
//! - [`gf`] — table-backed arithmetic in GF(p^e), q <= 16
//! - [`linalg`] — vectors, 2x2 matrices, projective points of PG(7,q) with
//!   rank/unrank indexing, Gaussian elimination
//! - [`tensor`] — the 2x2x2 tensor: contractions, flattening ranks, purity,
//!   the nonsingularity scan and the Cayley hyperdeterminant
//! - [`segre`] — the Segre embedding, lines, quadrics, leaves and shamrocks,
//!   line and plane types
//! - [`rank`] — tensor rank via secant search, with an independent
//!   brute-force oracle for small q
//! - [`orbits`] — group generators, orbit enumeration over all of PG(7,q),
//!   the point classifier and the verification pipeline
//! - [`report`] — canonical JSON / CSV serialization of orbit reports

pub mod gf;
pub mod linalg;
pub mod orbits;
pub mod rank;
pub mod report;
pub mod segre;
pub mod tensor;

pub use gf::{FieldDesc, FieldElem};
pub use linalg::{Mat2, ProjPoint, Vec2};
pub use orbits::{GroupElement, OrbitLabel, OrbitPartition};
pub use report::OrbitReport;
pub use segre::SegrePoint;
pub use tensor::{Direction, Tensor222};
