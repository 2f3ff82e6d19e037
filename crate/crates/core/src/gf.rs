//! Arithmetic in small finite fields GF(p^e), q = p^e <= 16.
//!
//! Elements are encoded as canonical integers in `[0, q)`: the coefficients
//! of the polynomial representative read in base p, constant term first.
//! Multiplication, inversion and powers run on log/antilog tables built once
//! at construction; addition uses a q*q table. The whole-space enumeration in
//! [`crate::orbits`] performs on the order of 10^8 field multiplications at
//! q = 5, so every operation here is a table lookup.
//!
//! The reducing modulus is chosen deterministically (the lexicographically
//! smallest monic irreducible of degree e, coefficients compared constant
//! term first), which keeps element encodings and downstream golden files
//! stable across runs and machines.

use thiserror::Error;

/// Largest supported field order. Tables stay tiny and point indices fit u32.
pub const MAX_ORDER: u16 = 16;

/// Largest order for whole-space commands without an explicit override;
/// PG(7,7) already has 960_800 points.
pub const DEFAULT_Q_LIMIT: u16 = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u16),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u16),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("value {0} is not a canonical element encoding for GF({1})")]
    OutOfRange(u16, u16),
}

/// Element of a [`FieldDesc`], encoded as the canonical integer in `[0, q)`.
///
/// `0` and `1` encode the additive and multiplicative identities. Elements
/// carry no reference to their field; mixing fields is a caller bug.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElem(u8);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A fully tabulated finite field GF(p^e).
///
/// Immutable after construction and safe to share across worker threads;
/// all operations are pure lookups.
#[derive(Debug, Clone)]
pub struct FieldDesc {
    p: u16,
    e: u32,
    q: u16,
    /// Coefficients of the monic irreducible modulus, constant term first,
    /// length e + 1 (leading coefficient 1).
    modulus: Vec<u8>,
    /// Canonical encoding of the primitive element used for the log tables.
    primitive: u8,
    /// exp[i] = g^i for i in [0, 2(q-1)); doubled so `log a + log b` indexes
    /// without a modular reduction.
    exp: Vec<u8>,
    /// log[a] for a != 0; log[0] is unused.
    log: Vec<u8>,
    /// Row-major q*q addition table.
    add: Vec<u8>,
    neg: Vec<u8>,
    /// inv[a] for a != 0; inv[0] is unused.
    inv: Vec<u8>,
}

impl FieldDesc {
    /// Builds GF(p^e). Rejects non-prime p, zero degree and p^e > 16.
    pub fn new(p: u16, e: u32) -> Result<FieldDesc, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if e == 0 {
            return Err(GfError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(e).ok_or(GfError::OrderTooLarge(u64::MAX))?;
        if q > MAX_ORDER as u64 {
            return Err(GfError::OrderTooLarge(q));
        }
        let q = q as u16;

        let modulus = smallest_irreducible(p, e);
        let poly = PolyField { p, e: e as usize, modulus: &modulus };

        // Smallest primitive element; for q = 2 that is the element 1.
        let primitive = (1..q)
            .map(|v| v as u8)
            .find(|&g| poly.order(g) == (q - 1) as u32)
            .expect("GF(q)* is cyclic");

        let mut exp = vec![0u8; 2 * (q as usize - 1)];
        let mut log = vec![0u8; q as usize];
        let mut x = 1u8;
        for i in 0..(q as usize - 1) {
            exp[i] = x;
            exp[i + q as usize - 1] = x;
            log[x as usize] = i as u8;
            x = poly.mul(x, primitive);
        }
        debug_assert_eq!(x, 1, "primitive element order mismatch");

        let mut add = vec![0u8; q as usize * q as usize];
        for a in 0..q {
            for b in 0..q {
                add[a as usize * q as usize + b as usize] = poly.add(a as u8, b as u8);
            }
        }
        let neg: Vec<u8> = (0..q).map(|a| poly.neg(a as u8)).collect();

        let mut inv = vec![0u8; q as usize];
        for a in 1..q as usize {
            inv[a] = exp[q as usize - 1 - log[a] as usize];
        }

        let f = FieldDesc { p, e, q, modulus, primitive, exp, log, add, neg, inv };

        // Multiplicative table consistency: a * a^-1 = 1 for every nonzero a.
        for a in f.nonzero_elements() {
            assert_eq!(f.mul(a, FieldElem(f.inv[a.0 as usize])), FieldElem::ONE);
        }
        Ok(f)
    }

    /// Builds GF(q) from its order, factoring q = p^e. Rejects non prime powers.
    pub fn with_order(q: u16) -> Result<FieldDesc, GfError> {
        if q > MAX_ORDER {
            return Err(GfError::OrderTooLarge(q as u64));
        }
        if q < 2 {
            return Err(GfError::NotPrimePower(q));
        }
        let p = (2..=q).find(|&d| q % d == 0).expect("q >= 2 has a prime divisor");
        let mut e = 0u32;
        let mut rest = q;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if rest != 1 {
            return Err(GfError::NotPrimePower(q));
        }
        FieldDesc::new(p, e)
    }

    #[inline]
    pub fn p(&self) -> u16 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    /// Field order q = p^e.
    #[inline]
    pub fn order(&self) -> u16 {
        self.q
    }

    /// Coefficients of the reducing modulus, constant term first, monic.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    /// The fixed primitive element backing the log tables.
    #[inline]
    pub fn primitive(&self) -> FieldElem {
        FieldElem(self.primitive)
    }

    /// Checked construction of an element from its canonical encoding.
    pub fn elem(&self, value: u16) -> Result<FieldElem, GfError> {
        if value < self.q {
            Ok(FieldElem(value as u8))
        } else {
            Err(GfError::OutOfRange(value, self.q))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q).map(|v| FieldElem(v as u8))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (1..self.q).map(|v| FieldElem(v as u8))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            FieldElem::ZERO
        } else {
            FieldElem(self.exp[self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize])
        }
    }

    /// Multiplicative inverse; zero is a reported error, not a value.
    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, GfError> {
        if a.0 == 0 {
            Err(GfError::ZeroInverse)
        } else {
            Ok(FieldElem(self.inv[a.0 as usize]))
        }
    }

    /// Inverse of a known-nonzero element (pivots, leading coordinates).
    #[inline]
    pub(crate) fn inv_nz(&self, a: FieldElem) -> FieldElem {
        debug_assert!(a.0 != 0);
        FieldElem(self.inv[a.0 as usize])
    }

    /// a^n with the convention 0^0 = 1.
    pub fn pow(&self, a: FieldElem, n: u64) -> FieldElem {
        if n == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let ord = (self.q - 1) as u64;
        let k = (self.log[a.0 as usize] as u64 * (n % ord)) % ord;
        FieldElem(self.exp[k as usize])
    }

    /// True iff some x satisfies x^2 = a.
    ///
    /// In characteristic 2 squaring is bijective, so every element is a
    /// square. For odd q the Euler criterion applies: a = 0 or
    /// a^((q-1)/2) = 1, i.e. the discrete log of a is even.
    pub fn is_square(&self, a: FieldElem) -> bool {
        if self.p == 2 || a.0 == 0 {
            true
        } else {
            self.log[a.0 as usize] % 2 == 0
        }
    }
}

/// Construction-time polynomial arithmetic over GF(p), coefficient vectors
/// in base-p digit form. Only used to bootstrap the tables.
struct PolyField<'a> {
    p: u16,
    e: usize,
    modulus: &'a [u8],
}

impl PolyField<'_> {
    fn digits(&self, v: u8) -> Vec<u8> {
        let mut d = vec![0u8; self.e];
        let mut v = v as u16;
        for slot in d.iter_mut() {
            *slot = (v % self.p) as u8;
            v /= self.p;
        }
        d
    }

    fn value(&self, d: &[u8]) -> u8 {
        let mut v = 0u16;
        for &c in d.iter().rev() {
            v = v * self.p + c as u16;
        }
        v as u8
    }

    fn add(&self, a: u8, b: u8) -> u8 {
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u8> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| ((x as u16 + y as u16) % self.p) as u8)
            .collect();
        self.value(&sum)
    }

    fn neg(&self, a: u8) -> u8 {
        let d: Vec<u8> = self
            .digits(a)
            .iter()
            .map(|&x| ((self.p - x as u16) % self.p) as u8)
            .collect();
        self.value(&d)
    }

    fn mul(&self, a: u8, b: u8) -> u8 {
        let (da, db) = (self.digits(a), self.digits(b));
        // Schoolbook product, then reduce by the monic modulus.
        let mut prod = vec![0u16; 2 * self.e];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u16 * y as u16) % self.p;
            }
        }
        for i in (self.e..2 * self.e).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (k, &m) in self.modulus.iter().enumerate().take(self.e) {
                let idx = i - self.e + k;
                prod[idx] = (prod[idx] + c * (self.p - m as u16)) % self.p;
            }
        }
        let d: Vec<u8> = prod[..self.e].iter().map(|&x| x as u8).collect();
        self.value(&d)
    }

    fn order(&self, a: u8) -> u32 {
        debug_assert!(a != 0);
        let mut x = a;
        let mut n = 1;
        while x != 1 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }
}

fn is_prime(n: u16) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Lexicographically smallest monic irreducible of degree e over GF(p),
/// coefficients compared constant term first. Returned constant-first with
/// the leading 1 appended.
fn smallest_irreducible(p: u16, e: u32) -> Vec<u8> {
    let e = e as usize;
    let total = (p as u64).pow(e as u32);
    for k in 0..total {
        // The constant coefficient is the most significant digit of k, so
        // ascending k scans candidates in lexicographic order.
        let mut coeffs = vec![0u8; e + 1];
        coeffs[e] = 1;
        let mut rest = k;
        for i in (0..e).rev() {
            coeffs[i] = (rest % p as u64) as u8;
            rest /= p as u64;
        }
        if is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)")
}

/// Exhaustive trial division by every monic polynomial of degree
/// 1..=deg/2. Adequate for deg <= 4.
fn is_irreducible(p: u16, poly: &[u8]) -> bool {
    let deg = poly.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for k in 0..count {
            let mut div = vec![0u8; d + 1];
            div[d] = 1;
            let mut rest = k;
            for c in div.iter_mut().take(d) {
                *c = (rest % p as u64) as u8;
                rest /= p as u64;
            }
            if poly_divides(p, &div, poly) {
                return false;
            }
        }
    }
    true
}

/// True iff monic `div` divides `poly` over GF(p).
fn poly_divides(p: u16, div: &[u8], poly: &[u8]) -> bool {
    let mut rem: Vec<u16> = poly.iter().map(|&c| c as u16).collect();
    let dd = div.len() - 1;
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        rem[i] = 0;
        for (k, &m) in div.iter().enumerate().take(dd) {
            rem[i - dd + k] = (rem[i - dd + k] + c * (p - m as u16)) % p;
        }
    }
    rem.iter().all(|&c| c == 0)
}
