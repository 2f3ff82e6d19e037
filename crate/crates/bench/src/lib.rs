//! Fixtures shared by the criterion benches.

use segre_orbits::gf::FieldDesc;
use segre_orbits::linalg::{pg_point_count, pg_unrank};
use segre_orbits::tensor::Tensor222;

pub fn field(q: u16) -> FieldDesc {
    FieldDesc::with_order(q).expect("supported order")
}

/// A deterministic spread of `count` points across PG(7,q).
pub fn sample_tensors(f: &FieldDesc, count: usize) -> Vec<Tensor222> {
    let n = pg_point_count(f.order(), 8);
    let step = (n / count as u64).max(1);
    (0..count as u64)
        .map(|i| {
            let idx = (i * step % n) as u32;
            Tensor222::from_point(&pg_unrank(f, idx).expect("index in range"))
        })
        .collect()
}
