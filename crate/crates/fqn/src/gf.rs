//! Exact arithmetic in F_q, q = p^r with p an odd prime and q >= 5.
//!
//! Elements are coefficient vectors in the polynomial basis of a monic
//! irreducible modulus (a single residue when r = 1). All operations are
//! pure functions on a shared [`FieldCtx`].

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("field order {0} is below the supported minimum of 5")]
    FieldTooSmall(u64),
    #[error("field order p^r does not fit in 64 bits")]
    FieldTooLarge,
    #[error("modulus is reducible over F_{0}: divisible by {1}")]
    ReducibleModulus(u64, String),
    #[error("element does not belong to this field (expected {expected} coefficients below {p})")]
    MixedFields { expected: usize, p: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero element has no multiplicative order")]
    ZeroHasNoOrder,
}

/// An element of F_q: `r` coefficients in `[0, p)`, little-endian in the
/// polynomial basis. Equality is coefficient-wise; elements are always
/// kept canonical. Ordering questions go through `FieldCtx::index_of`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            write!(f, "{}", self.coeffs[0])
        } else {
            write!(f, "[")?;
            for (i, c) in self.coeffs.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "]")
        }
    }
}

// Elements serialize as a bare integer for r = 1 and as a coefficient
// list for r > 1.
impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.coeffs.len() == 1 {
            serializer.serialize_u64(self.coeffs[0])
        } else {
            let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
            for c in &self.coeffs {
                seq.serialize_element(c)?;
            }
            seq.end()
        }
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ElemVisitor;
        impl<'de> Visitor<'de> for ElemVisitor {
            type Value = FieldElement;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a list of coefficients")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<FieldElement, E> {
                Ok(FieldElement { coeffs: vec![v] })
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<FieldElement, E> {
                if v < 0 {
                    return Err(E::custom("negative element in serialized form"));
                }
                Ok(FieldElement { coeffs: vec![v as u64] })
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<FieldElement, A::Error> {
                let mut coeffs = Vec::new();
                while let Some(c) = seq.next_element::<u64>()? {
                    coeffs.push(c);
                }
                Ok(FieldElement { coeffs })
            }
        }
        deserializer.deserialize_any(ElemVisitor)
    }
}

/// A finite field F_q, q = p^r. Immutable after construction and safely
/// shareable; every operation is a pure function of its inputs.
/// Deserialization rebuilds through the validating constructor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldCtx {
    p: u64,
    r: usize,
    q: u64,
    /// Monic irreducible of degree r over F_p, little-endian, length r + 1.
    /// Empty when r = 1.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    modulus: Vec<u64>,
}

impl<'de> Deserialize<'de> for FieldCtx {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: u64,
            r: usize,
            #[serde(default)]
            modulus: Vec<i64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let ctx = if raw.modulus.is_empty() {
            FieldCtx::new(raw.p, raw.r)
        } else {
            FieldCtx::with_modulus(raw.p, raw.r, &raw.modulus)
        };
        ctx.map_err(de::Error::custom)
    }
}

impl FieldCtx {
    /// Builds F_{p^r} with a deterministic modulus: the monic irreducible of
    /// degree r whose non-leading coefficient vector, read as a base-p
    /// integer, is smallest.
    pub fn new(p: u64, r: usize) -> Result<Self, GfError> {
        Self::build(p, r, None)
    }

    /// Builds F_{p^r} with an explicit modulus (little-endian coefficients,
    /// degree r, monic after reduction mod p).
    pub fn with_modulus(p: u64, r: usize, modulus: &[i64]) -> Result<Self, GfError> {
        Self::build(p, r, Some(modulus))
    }

    fn build(p: u64, r: usize, modulus: Option<&[i64]>) -> Result<Self, GfError> {
        if p.is_multiple_of(2) {
            return Err(GfError::EvenCharacteristic);
        }
        if !is_prime(p) {
            return Err(GfError::NonPrimeCharacteristic(p));
        }
        if r == 0 {
            return Err(GfError::FieldTooSmall(1));
        }
        if r > 40 {
            // 3^41 already exceeds 64 bits
            return Err(GfError::FieldTooLarge);
        }
        let q = p.checked_pow(r as u32).ok_or(GfError::FieldTooLarge)?;
        if q < 5 {
            return Err(GfError::FieldTooSmall(q));
        }
        let modulus = if r == 1 {
            Vec::new()
        } else {
            match modulus {
                Some(m) => {
                    let mut m: Vec<u64> = m.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
                    while m.last() == Some(&0) {
                        m.pop();
                    }
                    if m.len() != r + 1 || m[r] != 1 {
                        return Err(GfError::ReducibleModulus(p, "not monic of degree r".into()));
                    }
                    if let Some(divisor) = find_monic_divisor(&m, p) {
                        return Err(GfError::ReducibleModulus(p, poly_string(&divisor)));
                    }
                    m
                }
                None => default_modulus(p, r),
            }
        };
        Ok(FieldCtx { p, r, q, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.r] }
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// The integer constant `v`, reduced mod p and embedded in the prime
    /// subfield. Negative inputs reduce to their canonical representative.
    pub fn element(&self, v: i64) -> FieldElement {
        let mut coeffs = vec![0; self.r];
        coeffs[0] = v.rem_euclid(self.p as i64) as u64;
        FieldElement { coeffs }
    }

    /// Element from explicit coefficients (little-endian); shorter inputs are
    /// zero-padded, and every coefficient is reduced mod p.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FieldElement, GfError> {
        if coeffs.len() > self.r {
            return Err(GfError::MixedFields { expected: self.r, p: self.p });
        }
        let mut out = vec![0; self.r];
        for (i, &c) in coeffs.iter().enumerate() {
            out[i] = c.rem_euclid(self.p as i64) as u64;
        }
        Ok(FieldElement { coeffs: out })
    }

    /// Decodes the canonical index `k` (base-p digits, little-endian).
    pub fn from_index(&self, k: u64) -> FieldElement {
        debug_assert!(k < self.q);
        let mut coeffs = vec![0; self.r];
        let mut k = k;
        for c in coeffs.iter_mut() {
            *c = k % self.p;
            k /= self.p;
        }
        FieldElement { coeffs }
    }

    /// Canonical index in `[0, q)`; inverse of [`from_index`](Self::from_index).
    pub fn index_of(&self, x: &FieldElement) -> u64 {
        let mut k = 0;
        for &c in x.coeffs.iter().rev() {
            k = k * self.p + c;
        }
        k
    }

    /// Checks that an element structurally belongs to this field.
    pub fn check(&self, x: &FieldElement) -> Result<(), GfError> {
        if x.coeffs.len() != self.r || x.coeffs.iter().any(|&c| c >= self.p) {
            return Err(GfError::MixedFields { expected: self.r, p: self.p });
        }
        Ok(())
    }

    /// All q elements in index order (coefficient-lexicographic).
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |k| self.from_index(k))
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        debug_assert!(self.check(x).is_ok() && self.check(y).is_ok());
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(&a, &b)| (a + b) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        debug_assert!(self.check(x).is_ok() && self.check(y).is_ok());
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(&a, &b)| (a + self.p - b) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        let coeffs = x.coeffs.iter().map(|&a| (self.p - a) % self.p).collect();
        FieldElement { coeffs }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        debug_assert!(self.check(x).is_ok() && self.check(y).is_ok());
        if self.r == 1 {
            return FieldElement { coeffs: vec![x.coeffs[0] * y.coeffs[0] % self.p] };
        }
        // Convolution then reduction mod the modulus.
        let mut prod = vec![0u64; 2 * self.r - 1];
        for (i, &a) in x.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % self.p;
            }
        }
        for k in (self.r..prod.len()).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            prod[k] = 0;
            // x^k = -(modulus minus leading term) * x^{k-r}
            for j in 0..self.r {
                let m = self.modulus[j];
                if m == 0 {
                    continue;
                }
                let idx = k - self.r + j;
                prod[idx] = (prod[idx] + self.p * self.p - top * m) % self.p;
            }
        }
        prod.truncate(self.r);
        FieldElement { coeffs: prod }
    }

    pub fn pow(&self, x: &FieldElement, e: u64) -> FieldElement {
        let mut base = x.clone();
        let mut acc = self.one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// The (q-2)-power map. Total: agrees with the multiplicative inverse on
    /// F_q* and sends 0 to 0. Implemented as square-and-multiply on q-2, not
    /// via extended gcd; agreement with [`inv`](Self::inv) is a tested fact.
    pub fn pow_qm2(&self, x: &FieldElement) -> FieldElement {
        self.pow(x, self.q - 2)
    }

    /// Multiplicative inverse; errors on zero, unlike [`pow_qm2`](Self::pow_qm2).
    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, GfError> {
        if x.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        Ok(self.pow_qm2(x))
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, GfError> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// Multiplicative order: the smallest t >= 1 with x^t = 1. Computed by
    /// factoring q-1 and descending through divisors.
    pub fn order(&self, x: &FieldElement) -> Result<u64, GfError> {
        if x.is_zero() {
            return Err(GfError::ZeroHasNoOrder);
        }
        let mut t = self.q - 1;
        for (f, _) in factorize(self.q - 1) {
            while t.is_multiple_of(f) && self.pow(x, t / f) == self.one() {
                t /= f;
            }
        }
        Ok(t)
    }
}

/// Trial-division primality; q is desk-scale throughout.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization (prime, exponent) by trial division.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn poly_string(poly: &[u64]) -> String {
    let names: Vec<String> = poly.iter().map(|c| c.to_string()).collect();
    format!("[{}]", names.join(","))
}

/// Remainder of `a` divided by monic `m`, coefficients mod p.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut rem: Vec<u64> = a.to_vec();
    let dm = m.len() - 1;
    while rem.len() > dm {
        let lead = *rem.last().unwrap();
        let k = rem.len() - 1;
        if lead != 0 {
            for (j, &mj) in m.iter().take(dm).enumerate() {
                let idx = k - dm + j;
                rem[idx] = (rem[idx] + p * p - lead * mj) % p;
            }
        }
        rem.pop();
    }
    rem
}

/// Looks for a monic divisor of degree 1..=deg/2 by trial division.
/// Returns the first divisor found, None when irreducible.
fn find_monic_divisor(m: &[u64], p: u64) -> Option<Vec<u64>> {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for k in 0..count {
            let mut cand = vec![0u64; d + 1];
            let mut kk = k;
            for c in cand.iter_mut().take(d) {
                *c = kk % p;
                kk /= p;
            }
            cand[d] = 1;
            let rem = poly_rem(m, &cand, p);
            if rem.iter().all(|&c| c == 0) {
                return Some(cand);
            }
        }
    }
    None
}

/// The monic irreducible of degree r over F_p whose non-leading coefficient
/// vector, read as a little-endian base-p integer, is smallest.
fn default_modulus(p: u64, r: usize) -> Vec<u64> {
    let count = p.pow(r as u32);
    for k in 0..count {
        let mut cand = vec![0u64; r + 1];
        let mut kk = k;
        for c in cand.iter_mut().take(r) {
            *c = kk % p;
            kk /= p;
        }
        cand[r] = 1;
        if find_monic_divisor(&cand, p).is_none() {
            return cand;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f13() -> FieldCtx {
        FieldCtx::new(13, 1).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert_eq!(FieldCtx::new(2, 3).unwrap_err(), GfError::EvenCharacteristic);
        assert_eq!(FieldCtx::new(4, 1).unwrap_err(), GfError::EvenCharacteristic);
        assert_eq!(FieldCtx::new(9, 1).unwrap_err(), GfError::NonPrimeCharacteristic(9));
        assert_eq!(FieldCtx::new(3, 1).unwrap_err(), GfError::FieldTooSmall(3));
        assert!(matches!(
            FieldCtx::with_modulus(5, 2, &[1, 0, 1]).unwrap_err(),
            GfError::ReducibleModulus(..)
        ));
    }

    #[test]
    fn default_modulus_is_deterministic() {
        // Smallest monic irreducible over F_5 of degree 2 is x^2 + 2.
        let f25 = FieldCtx::new(5, 2).unwrap();
        assert_eq!(f25.modulus(), &[2, 0, 1]);
        let f9 = FieldCtx::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn integer_constants_reduce_mod_p() {
        let f = f13();
        assert_eq!(f.element(14), f.element(1));
        assert_eq!(f.element(-1), f.element(12));
    }

    #[test]
    fn arithmetic_golden_values() {
        let f = f13();
        // 7 * 2 = 1 and 12 * 9 + 7 = 11 in F_13.
        assert_eq!(f.mul(&f.element(7), &f.element(2)), f.one());
        let t = f.add(&f.mul(&f.element(12), &f.element(9)), &f.element(7));
        assert_eq!(t, f.element(11));
        let x = f.element(6);
        assert_eq!(f.add(&x, &f.zero()), x);
    }

    #[test]
    fn pow_qm2_is_total_inverse() {
        let f = f13();
        assert_eq!(f.pow_qm2(&f.zero()), f.zero());
        assert_eq!(f.pow_qm2(&f.element(4)), f.element(10));
        assert_eq!(f.pow_qm2(&f.element(9)), f.element(3));
    }

    #[test]
    fn inv_and_div_golden_values() {
        let f = f13();
        assert_eq!(f.inv(&f.one()).unwrap(), f.one());
        assert_eq!(f.inv(&f.zero()).unwrap_err(), GfError::DivisionByZero);
        assert_eq!(f.div(&f.element(11), &f.element(2)).unwrap(), f.element(12));
        assert_eq!(f.div(&f.element(4), &f.element(2)).unwrap(), f.element(2));
    }

    #[test]
    fn multiplicative_orders() {
        let f = f13();
        assert_eq!(f.order(&f.one()).unwrap(), 1);
        assert_eq!(f.order(&f.element(3)).unwrap(), 3);
        assert_eq!(f.order(&f.element(5)).unwrap(), 4);
        assert_eq!(f.order(&f.zero()).unwrap_err(), GfError::ZeroHasNoOrder);
    }

    #[test]
    fn element_enumeration() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let all: Vec<u64> = f5.elements().map(|x| f5.index_of(&x)).collect();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);

        let f25 = FieldCtx::new(5, 2).unwrap();
        let all: Vec<FieldElement> = f25.elements().collect();
        assert_eq!(all.len(), 25);
        assert!(all.iter().all(|x| x.coeffs().len() == 2));
        // pairwise distinct
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert_ne!(all[i], all[j]);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_q() {
        for ctx in [
            FieldCtx::new(5, 1).unwrap(),
            FieldCtx::new(3, 2).unwrap(),
            FieldCtx::new(13, 1).unwrap(),
            FieldCtx::new(5, 2).unwrap(),
            FieldCtx::new(3, 3).unwrap(),
            FieldCtx::new(41, 1).unwrap(),
            FieldCtx::new(7, 2).unwrap(),
        ] {
            let elems: Vec<FieldElement> = ctx.elements().collect();
            for x in &elems {
                // Fermat: x^q = x, and pow_qm2(x) * x is 1 or 0.
                assert_eq!(ctx.pow(x, ctx.q()), *x);
                let prod = ctx.mul(&ctx.pow_qm2(x), x);
                if x.is_zero() {
                    assert!(prod.is_zero());
                } else {
                    assert_eq!(prod, ctx.one());
                    assert!((ctx.q() - 1) % ctx.order(x).unwrap() == 0);
                }
            }
            // distributivity on a grid of triples
            for (i, x) in elems.iter().enumerate() {
                let y = &elems[(i * 7 + 3) % elems.len()];
                let z = &elems[(i * 5 + 1) % elems.len()];
                let lhs = ctx.mul(&ctx.add(x, y), z);
                let rhs = ctx.add(&ctx.mul(x, z), &ctx.mul(y, z));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn serde_roundtrip() {
        let f25 = FieldCtx::new(5, 2).unwrap();
        let x = f25.from_coeffs(&[3, 4]).unwrap();
        let js = serde_json::to_string(&x).unwrap();
        assert_eq!(js, "[3,4]");
        let back: FieldElement = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);

        let f = f13();
        let y = f.element(7);
        assert_eq!(serde_json::to_string(&y).unwrap(), "7");
        let ctx_js = serde_json::to_string(&f25).unwrap();
        let ctx_back: FieldCtx = serde_json::from_str(&ctx_js).unwrap();
        assert_eq!(ctx_back, f25);
    }
}
