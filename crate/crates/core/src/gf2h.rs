//! Arithmetic in GF(2^h) for 1 <= h <= 5.
//!
//! Elements are stored as `u8` bit vectors (coefficients of the residue
//! polynomial, bit `i` = coefficient of `x^i`). All hot-path arithmetic goes
//! through a [`Gf2h`] context holding precomputed tables; [`FieldElement`]
//! bundles a value with its field for the checked public API.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed moduli, indexed by `h - 1`. Bit `i` is the coefficient of `x^i`.
const MODULI: [u32; 5] = [
    0b10,     // x
    0b111,    // x^2 + x + 1
    0b1011,   // x^3 + x + 1
    0b10011,  // x^4 + x + 1
    0b100101, // x^5 + x^2 + 1
];

pub const MAX_H: u32 = 5;

/// A finite field GF(2^h) with a fixed modulus and precomputed tables.
pub struct Gf2h {
    h: u32,
    modulus: u32,
    q: usize,
    mul: Vec<u8>,
    inv: Vec<u8>,
    sqrt: Vec<u8>,
    trace: Vec<u8>,
}

impl fmt::Debug for Gf2h {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#b}", self.h, self.modulus)
    }
}

impl PartialEq for Gf2h {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h && self.modulus == other.modulus
    }
}
impl Eq for Gf2h {}

/// Serialized form of a field: `{h, modulus}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub h: u32,
    pub modulus: u32,
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

/// Remainder of `a` modulo `m` as polynomials over GF(2).
fn poly_rem(mut a: u32, m: u32) -> u32 {
    let dm = poly_degree(m);
    while a != 0 && poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

fn is_irreducible(m: u32) -> bool {
    let d = poly_degree(m);
    if d < 1 {
        return false;
    }
    // any factorization has a factor of degree <= d/2
    (2u32..(1 << (d / 2 + 1))).all(|f| poly_degree(f) > d / 2 || poly_rem(m, f) != 0)
}

fn clmul_reduce(a: u8, b: u8, modulus: u32) -> u8 {
    let mut acc = 0u32;
    for i in 0..8 {
        if (b >> i) & 1 == 1 {
            acc ^= (a as u32) << i;
        }
    }
    poly_rem(acc, modulus) as u8
}

impl Gf2h {
    /// Builds GF(2^h) from the fixed modulus table.
    pub fn new(h: u32) -> Result<Self> {
        if h == 0 || h > MAX_H {
            return Err(Error::Usage(format!("unsupported extension degree h = {h}")));
        }
        let modulus = MODULI[(h - 1) as usize];
        if !is_irreducible(modulus) {
            return Err(Error::Consistency(format!("modulus {modulus:#b} is reducible")));
        }
        let q = 1usize << h;
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                mul[a * q + b] = clmul_reduce(a as u8, b as u8, modulus);
            }
        }
        let mut inv = vec![0u8; q];
        for a in 1..q {
            inv[a] = (1..q)
                .find(|&b| mul[a * q + b] == 1)
                .ok_or_else(|| Error::Consistency(format!("{a} has no inverse")))?
                as u8;
        }
        let mut sqrt = vec![0u8; q];
        for a in 0..q {
            sqrt[mul[a * q + a] as usize] = a as u8;
        }
        let mut trace = vec![0u8; q];
        for a in 0..q {
            let mut t = 0u8;
            let mut x = a as u8;
            for _ in 0..h {
                t ^= x;
                x = mul[x as usize * q + x as usize];
            }
            trace[a] = t;
        }
        Ok(Self { h, modulus, q, mul, inv, sqrt, trace })
    }

    /// Shared instance of GF(2^h).
    pub fn get(h: u32) -> Result<&'static Gf2h> {
        static FIELDS: OnceLock<Vec<Gf2h>> = OnceLock::new();
        if h == 0 || h > MAX_H {
            return Err(Error::Usage(format!("unsupported extension degree h = {h}")));
        }
        let fields = FIELDS.get_or_init(|| {
            (1..=MAX_H)
                .map(|h| Gf2h::new(h).expect("fixed moduli are irreducible"))
                .collect()
        });
        Ok(&fields[(h - 1) as usize])
    }

    /// Shared instance of the field with `q` elements.
    pub fn with_order(q: usize) -> Result<&'static Gf2h> {
        if !q.is_power_of_two() || q < 2 {
            return Err(Error::Usage(format!("q = {q} is not a power of two >= 2")));
        }
        Self::get(q.trailing_zeros())
    }

    pub fn from_spec(spec: FieldSpec) -> Result<&'static Gf2h> {
        let f = Self::get(spec.h)?;
        if f.modulus != spec.modulus {
            return Err(Error::Usage(format!(
                "modulus {:#b} does not match the fixed modulus {:#b} for h = {}",
                spec.modulus, f.modulus, spec.h
            )));
        }
        Ok(f)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { h: self.h, modulus: self.modulus }
    }

    #[inline]
    pub fn h(&self) -> u32 {
        self.h
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// All elements in increasing bit order.
    pub fn elements(&self) -> impl Iterator<Item = u8> + Clone {
        (0..self.q).map(|a| a as u8)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = u8> + Clone {
        (1..self.q).map(|a| a as u8)
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn square(&self, a: u8) -> u8 {
        self.mul(a, a)
    }

    pub fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(self.inv[a as usize])
    }

    /// Inverse of an element the caller knows to be nonzero.
    #[inline]
    pub(crate) fn inv_nz(&self, a: u8) -> u8 {
        debug_assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    #[inline]
    pub fn div(&self, a: u8, b: u8) -> Result<u8> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^k`; for nonzero `a` the exponent is reduced modulo `q - 1`.
    pub fn pow(&self, a: u8, k: u64) -> u8 {
        if a == 0 {
            return if k == 0 { 1 } else { 0 };
        }
        let mut e = k % (self.q as u64 - 1);
        let mut base = a;
        let mut acc = 1u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    /// Absolute trace to GF(2); returns 0 or 1.
    #[inline]
    pub fn trace(&self, a: u8) -> u8 {
        self.trace[a as usize]
    }

    /// The unique square root, `a^(2^(h-1))`.
    #[inline]
    pub fn sqrt(&self, a: u8) -> u8 {
        self.sqrt[a as usize]
    }

    /// `a^(2^k)`.
    pub fn frobenius(&self, a: u8, k: u32) -> u8 {
        (0..k % self.h).fold(a, |x, _| self.square(x))
    }

    /// Smallest `b` with `b^2 + b = delta`, or `None` when `Tr(delta) = 1`.
    pub fn artin_schreier_root(&self, delta: u8) -> Option<u8> {
        if self.trace(delta) == 1 {
            return None;
        }
        self.elements().find(|&b| self.square(b) ^ b == delta)
    }

    /// Smallest element of trace 1.
    pub fn pick_delta_trace_one(&self) -> u8 {
        self.elements()
            .find(|&d| self.trace(d) == 1)
            .expect("trace is onto GF(2)")
    }

    /// Smallest nonzero `w` with `X^2 + wX + 1` irreducible over this field.
    pub fn pick_omega_irreducible(&self) -> u8 {
        self.nonzero()
            .find(|&w| self.elements().all(|x| self.square(x) ^ self.mul(w, x) ^ 1 != 0))
            .expect("an irreducible X^2 + wX + 1 exists for every even q")
    }

    /// Checked element constructor.
    pub fn element(&'static self, bits: u8) -> Result<FieldElement> {
        if bits as usize >= self.q {
            return Err(Error::Usage(format!("{bits:#x} is not an element of GF({})", self.q)));
        }
        Ok(FieldElement { bits, field: self })
    }

    /// Parses a lowercase or uppercase hex element.
    pub fn parse_hex(&self, s: &str) -> Result<u8> {
        let v = u8::from_str_radix(s.trim(), 16)
            .map_err(|e| Error::Usage(format!("bad field element {s:?}: {e}")))?;
        if v as usize >= self.q {
            return Err(Error::Usage(format!("{s} is not an element of GF({})", self.q)));
        }
        Ok(v)
    }
}

pub fn hex(a: u8) -> String {
    format!("{a:x}")
}

/// A field value tagged with its field. Operations on elements from
/// different fields are usage errors.
#[derive(Clone, Copy)]
pub struct FieldElement {
    bits: u8,
    field: &'static Gf2h,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}@GF({})", self.bits, self.field.q)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && self.field == other.field
    }
}
impl Eq for FieldElement {}

impl FieldElement {
    pub fn bits(self) -> u8 {
        self.bits
    }

    pub fn field(self) -> &'static Gf2h {
        self.field
    }

    fn same_field(self, other: Self) -> Result<&'static Gf2h> {
        if self.field != other.field {
            return Err(Error::Usage(format!(
                "mixed fields GF({}) and GF({})",
                self.field.q, other.field.q
            )));
        }
        Ok(self.field)
    }

    fn wrap(self, bits: u8) -> Self {
        Self { bits, field: self.field }
    }

    pub fn try_add(self, other: Self) -> Result<Self> {
        let f = self.same_field(other)?;
        Ok(self.wrap(f.add(self.bits, other.bits)))
    }

    pub fn try_mul(self, other: Self) -> Result<Self> {
        let f = self.same_field(other)?;
        Ok(self.wrap(f.mul(self.bits, other.bits)))
    }

    pub fn inv(self) -> Result<Self> {
        Ok(self.wrap(self.field.inv(self.bits)?))
    }

    pub fn pow(self, k: u64) -> Self {
        self.wrap(self.field.pow(self.bits, k))
    }

    pub fn trace(self) -> Self {
        self.wrap(self.field.trace(self.bits))
    }

    pub fn sqrt(self) -> Self {
        self.wrap(self.field.sqrt(self.bits))
    }

    pub fn frobenius(self, k: u32) -> Self {
        self.wrap(self.field.frobenius(self.bits, k))
    }

    pub fn artin_schreier_root(self) -> Option<Self> {
        self.field.artin_schreier_root(self.bits).map(|b| self.wrap(b))
    }

    pub fn to_hex(self) -> String {
        hex(self.bits)
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;

    /// Panics on mixed fields; use [`FieldElement::try_add`] to handle that case.
    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs).expect("mixed-field addition")
    }
}

impl std::ops::Mul for FieldElement {
    type Output = FieldElement;

    /// Panics on mixed fields; use [`FieldElement::try_mul`] to handle that case.
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(rhs).expect("mixed-field multiplication")
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

/// Serde helpers for raw `u8` elements written as hex strings.
pub mod hex_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u8, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::hex(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u8, D::Error> {
        let s = String::deserialize(d)?;
        u8::from_str_radix(&s, 16).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[u8], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&super::super::hex(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| u8::from_str_radix(s, 16).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
