//! Exact arithmetic in GF(p^k).
//!
//! Elements are stored as their index in the canonical element order: the
//! coefficient tuple `(c0, c1, ..., c(k-1))` of the polynomial representative
//! is read as a base-`p` integer with `c0` least significant. For prime fields
//! the index is simply the residue. Every canonicalization in the crate breaks
//! ties with this order.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Default bound on the field order.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 16;

/// Fields up to this order get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    BadDegree(u32),
    #[error("field order {p}^{k} exceeds the size cap {cap}")]
    CapExceeded { p: u64, k: u32, cap: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields: GF({left}) and GF({right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("invalid element literal {literal:?} for GF({q})")]
    Parse { literal: String, q: u32 },
    #[error("unit orbit requested for the zero element")]
    ZeroOrbit,
}

/// A field element, identified by its index in the canonical order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Raw constructor. The caller guarantees `index < q` for the field in use.
    pub const fn from_index(index: u32) -> Self {
        FieldElement(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    p: u32,
    k: u32,
    q: u32,
    /// Low coefficients `c0..c(k-1)` of the monic modulus; empty for prime fields.
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// A finite field GF(p^k). Cheap to clone; equality compares (p, k), which
/// determines the modulus because modulus selection is deterministic.
#[derive(Clone)]
pub struct FieldSpec(Arc<Tables>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.k == other.0.k
    }
}

impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.k.hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.k)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.k)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    /// GF(p^k) under the default size cap.
    pub fn new(p: u64, k: u32) -> Result<Self, GfError> {
        Self::with_cap(p, k, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u64, k: u32, cap: u64) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if k < 1 {
            return Err(GfError::BadDegree(k));
        }
        let mut q: u64 = 1;
        for _ in 0..k {
            q = q.saturating_mul(p);
            if q > cap {
                return Err(GfError::CapExceeded { p, k, cap });
            }
        }
        if q > u32::MAX as u64 / 2 {
            return Err(GfError::CapExceeded { p, k, cap });
        }
        Ok(FieldSpec(Arc::new(Tables::build(p as u32, k, q as u32))))
    }

    /// Field of order `q`, factoring `q = p^k`.
    pub fn from_order(q: u64) -> Result<Self, GfError> {
        Self::from_order_with_cap(q, DEFAULT_FIELD_CAP)
    }

    pub fn from_order_with_cap(q: u64, cap: u64) -> Result<Self, GfError> {
        if q < 2 {
            return Err(GfError::NotPrimePower(q));
        }
        let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
        let mut rest = q;
        let mut k = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        if rest != 1 {
            return Err(GfError::NotPrimePower(q));
        }
        Self::with_cap(p, k, cap)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Monic modulus as coefficients `c0..ck` (including the leading 1);
    /// `None` for prime fields.
    pub fn modulus(&self) -> Option<Vec<u32>> {
        if self.0.k == 1 {
            None
        } else {
            let mut m = self.0.modulus.clone();
            m.push(1);
            Some(m)
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Checked conversion from a canonical index.
    pub fn element(&self, index: u32) -> Option<FieldElement> {
        (index < self.0.q).then_some(FieldElement(index))
    }

    /// The image of an integer under `Z -> GF(q)`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.0.q).map(FieldElement)
    }

    pub fn units(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (1..self.0.q).map(FieldElement)
    }

    /// Coefficient tuple `(c0, ..., c(k-1))`.
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        let p = self.0.p;
        let mut v = a.0;
        (0..self.0.k)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    fn element_from_coefficients(&self, coeffs: &[u32]) -> FieldElement {
        let p = self.0.p;
        FieldElement(coeffs.iter().rev().fold(0, |acc, &c| acc * p + c))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let t = &self.0;
        if !t.add.is_empty() {
            return FieldElement(t.add[(a.0 * t.q + b.0) as usize]);
        }
        if t.k == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= t.p { s - t.p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0, 1);
        for _ in 0..t.k {
            out += ((x % t.p + y % t.p) % t.p) * place;
            x /= t.p;
            y /= t.p;
            place *= t.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let t = &self.0;
        if !t.mul.is_empty() {
            return FieldElement(t.mul[(a.0 * t.q + b.0) as usize]);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        if t.k == 1 {
            return FieldElement(((a.0 as u64 * b.0 as u64) % t.p as u64) as u32);
        }
        let order = t.q - 1;
        let e = t.log[a.0 as usize] + t.log[b.0 as usize];
        FieldElement(t.exp[(if e >= order { e - order } else { e }) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        if a.0 == 0 {
            return Err(GfError::ZeroInverse);
        }
        let t = &self.0;
        let order = t.q - 1;
        let l = t.log[a.0 as usize];
        Ok(FieldElement(t.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let t = &self.0;
        let order = (t.q - 1) as u64;
        let l = t.log[a.0 as usize] as u64;
        FieldElement(t.exp[((l * (e % order)) % order) as usize])
    }

    /// Power with a signed exponent; negative exponents need a unit base.
    pub fn pow_signed(&self, a: FieldElement, e: i64) -> Result<FieldElement, GfError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// A fixed generator of the multiplicative group (smallest index with full order).
    pub fn primitive_element(&self) -> FieldElement {
        FieldElement(self.0.exp[1 % self.0.exp.len()])
    }

    /// `{c * m^exponent : m != 0}`.
    pub fn unit_orbit(&self, c: FieldElement, exponent: u64) -> Result<BTreeSet<FieldElement>, GfError> {
        if c.is_zero() {
            return Err(GfError::ZeroOrbit);
        }
        Ok(self.units().map(|m| self.mul(c, self.pow(m, exponent))).collect())
    }

    /// Textual encoding: decimal residue for prime fields, `[c0,c1,...]` otherwise.
    pub fn format(&self, a: FieldElement) -> String {
        if self.0.k == 1 {
            a.0.to_string()
        } else {
            let parts: Vec<String> = self.coefficients(a).iter().map(|c| c.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }

    pub fn parse(&self, literal: &str) -> Result<FieldElement, GfError> {
        let err = || GfError::Parse { literal: literal.to_string(), q: self.0.q };
        let s = literal.trim();
        if self.0.k == 1 {
            let v: u32 = s.parse().map_err(|_| err())?;
            return self.element(v).ok_or_else(err);
        }
        let inner = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(err)?;
        let coeffs: Vec<u32> = inner
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| err()))
            .collect::<Result<_, _>>()?;
        if coeffs.len() != self.0.k as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(err());
        }
        Ok(self.element_from_coefficients(&coeffs))
    }

    /// Bind an element to this field for checked arithmetic.
    pub fn value(&self, a: FieldElement) -> FieldValue {
        FieldValue { field: self.clone(), elem: a }
    }
}

/// An element bound to its field; arithmetic rejects operands from different fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldValue {
    pub field: FieldSpec,
    pub elem: FieldElement,
}

impl FieldValue {
    fn same_field(&self, other: &FieldValue) -> Result<(), GfError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GfError::FieldMismatch { left: self.field.q(), right: other.field.q() })
        }
    }

    pub fn try_add(&self, other: &FieldValue) -> Result<FieldValue, GfError> {
        self.same_field(other)?;
        Ok(self.field.value(self.field.add(self.elem, other.elem)))
    }

    pub fn try_mul(&self, other: &FieldValue) -> Result<FieldValue, GfError> {
        self.same_field(other)?;
        Ok(self.field.value(self.field.mul(self.elem, other.elem)))
    }

    pub fn try_div(&self, other: &FieldValue) -> Result<FieldValue, GfError> {
        self.same_field(other)?;
        Ok(self.field.value(self.field.div(self.elem, other.elem)?))
    }

    pub fn neg(&self) -> FieldValue {
        self.field.value(self.field.neg(self.elem))
    }

    pub fn inv(&self) -> Result<FieldValue, GfError> {
        Ok(self.field.value(self.field.inv(self.elem)?))
    }
}

// Dense polynomials over GF(p), coefficient index = degree. Used only while
// building the tables.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = poly_trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &bc) in b.iter().enumerate() {
            let idx = dr - db + i;
            r[idx] = ((r[idx] as u64 + (p - factor) as u64 * bc as u64) % p as u64) as u32;
        }
        r = poly_trim(r);
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Monic polynomial of degree `deg` whose low coefficients are the base-p digits of `index`.
fn monic_from_index(index: u64, deg: u32, p: u32) -> Vec<u32> {
    let mut v = index;
    let mut coeffs: Vec<u32> = (0..deg)
        .map(|_| {
            let c = (v % p as u64) as u32;
            v /= p as u64;
            c
        })
        .collect();
    coeffs.push(1);
    coeffs
}

/// Exhaustive factor test: no monic divisor of degree 1..=deg/2.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = (poly.len() - 1) as u32;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d);
        for idx in 0..count {
            let divisor = monic_from_index(idx, d, p);
            if poly_rem(poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Tables {
    fn build(p: u32, k: u32, q: u32) -> Tables {
        let modulus_full = if k == 1 {
            Vec::new()
        } else {
            let count = (p as u64).pow(k);
            (0..count)
                .map(|idx| monic_from_index(idx, k, p))
                .find(|m| is_irreducible(m, p))
                .expect("an irreducible polynomial of every degree exists")
        };
        let digits = |mut v: u32| -> Vec<u32> {
            (0..k)
                .map(|_| {
                    let c = v % p;
                    v /= p;
                    c
                })
                .collect()
        };
        let undigits = |c: &[u32]| -> u32 { c.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let slow_mul = |a: u32, b: u32| -> u32 {
            if k == 1 {
                return ((a as u64 * b as u64) % p as u64) as u32;
            }
            let (da, db) = (digits(a), digits(b));
            let mut prod = vec![0u32; 2 * k as usize - 1];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                }
            }
            let mut r = poly_rem(&prod, &modulus_full, p);
            r.resize(k as usize, 0);
            undigits(&r)
        };

        let neg: Vec<u32> = (0..q)
            .map(|a| undigits(&digits(a).iter().map(|&c| (p - c) % p).collect::<Vec<_>>()))
            .collect();

        // discrete log tables from the smallest primitive element
        let order = q - 1;
        let mut exp = vec![1u32; order.max(1) as usize];
        let mut log = vec![0u32; q as usize];
        if order > 1 {
            for g in 2..q {
                let mut x = 1u32;
                let mut ok = true;
                for i in 0..order {
                    if i > 0 && x == 1 {
                        ok = false;
                        break;
                    }
                    exp[i as usize] = x;
                    x = slow_mul(x, g);
                }
                if ok && x == 1 {
                    break;
                }
            }
            for (i, &e) in exp.iter().enumerate() {
                log[e as usize] = i as u32;
            }
        }

        let mut tables = Tables {
            p,
            k,
            q,
            modulus: modulus_full.iter().take(k as usize).copied().filter(|_| k > 1).collect(),
            add: Vec::new(),
            mul: Vec::new(),
            neg,
            exp,
            log,
        };
        if q <= TABLE_LIMIT {
            let mut add = vec![0u32; (q * q) as usize];
            let mut mul = vec![0u32; (q * q) as usize];
            for a in 0..q {
                let da = digits(a);
                for b in 0..q {
                    let db = digits(b);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    add[(a * q + b) as usize] = undigits(&s);
                    mul[(a * q + b) as usize] = if a == 0 || b == 0 {
                        0
                    } else {
                        let e = (tables.log[a as usize] + tables.log[b as usize]) % order;
                        tables.exp[e as usize]
                    };
                }
            }
            tables.add = add;
            tables.mul = mul;
        }
        tables
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldSpec::new(4, 1).unwrap_err(), GfError::NotPrime(4));
        assert_eq!(FieldSpec::new(7, 0).unwrap_err(), GfError::BadDegree(0));
        assert!(matches!(FieldSpec::new(2, 17), Err(GfError::CapExceeded { .. })));
        assert!(matches!(FieldSpec::from_order(6), Err(GfError::NotPrimePower(6))));
        assert!(FieldSpec::new(7, 1).unwrap().modulus().is_none());
    }

    #[test]
    fn gf4_modulus_is_first_irreducible() {
        // x^2, x^2+1 and x^2+x all have roots in GF(2)
        let f = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f.modulus(), Some(vec![1, 1, 1]));
        let x = f.element(2).unwrap();
        assert_eq!(f.mul(x, x), f.element(3).unwrap());
        assert_eq!(f.format(f.element(3).unwrap()), "[1,1]");
    }

    #[test]
    fn prime_field_examples() {
        let f = gf(7);
        assert_eq!(f.add(f.from_int(3), f.from_int(5)), f.from_int(1));
        assert_eq!(f.inv(f.from_int(4)).unwrap(), f.from_int(2));
        assert_eq!(f.inv(f.zero()), Err(GfError::ZeroInverse));
        assert_eq!(f.pow_signed(f.from_int(3), -1).unwrap(), f.from_int(5));
    }

    #[test]
    fn element_order() {
        let idx = |f: &FieldSpec| f.elements().map(|e| f.format(e)).collect::<Vec<_>>();
        assert_eq!(idx(&gf(2)), ["0", "1"]);
        assert_eq!(idx(&gf(3)), ["0", "1", "2"]);
        assert_eq!(idx(&gf(4)), ["[0,0]", "[1,0]", "[0,1]", "[1,1]"]);
    }

    #[test]
    fn unit_orbits() {
        let set = |f: &FieldSpec, c, e| -> Vec<u32> {
            f.unit_orbit(f.from_int(c), e).unwrap().into_iter().map(|x| x.index()).collect()
        };
        assert_eq!(set(&gf(7), 1, 2), [1, 2, 4]);
        assert_eq!(set(&gf(5), 1, 3), [1, 2, 3, 4]);
        assert_eq!(set(&gf(2), 1, 2), [1]);
        assert_eq!(gf(5).unit_orbit(FieldElement::ZERO, 2), Err(GfError::ZeroOrbit));
    }

    #[test]
    fn unit_orbits_partition_units() {
        for q in [3, 4, 5, 7, 8, 9, 13] {
            let f = gf(q);
            for e in [2, 3] {
                let mut seen = BTreeSet::new();
                for c in f.units() {
                    let orbit = f.unit_orbit(c, e).unwrap();
                    assert!(orbit.contains(&c));
                    let first = *orbit.iter().next().unwrap();
                    if seen.insert(first) {
                        continue;
                    }
                    // any two orbits are equal or disjoint
                    let other = f.unit_orbit(first, e).unwrap();
                    assert_eq!(orbit, other);
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16] {
            let f = gf(q);
            assert_eq!(f.elements().count(), q as usize);
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                    assert_eq!(f.pow(a, q - 1), f.one());
                }
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        for q in [5, 9] {
            let f = gf(q);
            for a in f.elements() {
                assert_eq!(f.parse(&f.format(a)).unwrap(), a);
            }
        }
        let f = gf(5);
        assert!(f.parse("5").is_err());
        assert!(f.parse("x").is_err());
        assert!(gf(4).parse("[1,2]").is_err());
    }

    #[test]
    fn cross_field_values_rejected() {
        let (a, b) = (gf(5), gf(7));
        let x = a.value(a.one());
        let y = b.value(b.one());
        assert_eq!(x.try_add(&y), Err(GfError::FieldMismatch { left: 5, right: 7 }));
        assert_eq!(x.try_mul(&x).unwrap().elem, a.one());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn large_field_axioms(a in 0u32..65536, b in 0u32..65536, c in 0u32..65536) {
                let f = FieldSpec::new(2, 16).unwrap();
                let (a, b, c) = (FieldElement(a), FieldElement(b), FieldElement(c));
                prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                if !a.is_zero() {
                    prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
            }

            #[test]
            fn gf3_pow7_axioms(a in 0u32..2187, b in 0u32..2187) {
                let f = FieldSpec::new(3, 7).unwrap();
                let (a, b) = (FieldElement(a), FieldElement(b));
                prop_assert_eq!(f.sub(f.add(a, b), b), a);
                prop_assert_eq!(f.pow(f.mul(a, b), 5), f.mul(f.pow(a, 5), f.pow(b, 5)));
            }
        }
    }
}
