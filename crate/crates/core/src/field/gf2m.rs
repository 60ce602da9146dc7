//! Arithmetic in F_{2^t} with a self-dual basis over F_2.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BitVector, FieldError};

pub const MAX_T: u32 = 12;

/// Field description: modulus, log tables, trace table and a self-dual basis.
///
/// Elements are plain `u32` values in the polynomial basis (bit `i` is the coefficient of
/// `x^i`). The bulk helpers on this type work on raw values; [`FieldElement`] wraps a value
/// together with its spec for the checked API.
#[derive(Clone)]
pub struct FieldSpec {
    t: u32,
    poly: u32,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u8>,
    basis: Vec<u32>,
    kappa: Vec<u32>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t && self.poly == other.poly && self.basis == other.basis
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("t", &self.t)
            .field("poly", &self.poly_bitstring())
            .field("basis", &self.basis)
            .finish()
    }
}

fn poly_degree(p: u32) -> u32 {
    31 - p.leading_zeros()
}

fn poly_mod(mut a: u32, m: u32) -> u32 {
    let dm = poly_degree(m);
    while a != 0 && poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg/2.
pub fn is_irreducible(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let deg = poly_degree(p);
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for q in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_mod(p, q) == 0 {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest irreducible polynomial of degree `t`.
pub fn smallest_irreducible(t: u32) -> u32 {
    ((1u32 << t)..(1u32 << (t + 1)))
        .find(|&p| is_irreducible(p))
        .expect("irreducible polynomials exist in every degree")
}

fn slow_mul(a: u32, b: u32, poly: u32, t: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> t & 1 == 1 {
            a ^= poly;
        }
    }
    acc
}

impl FieldSpec {
    /// Builds F_{2^t} with the smallest irreducible modulus and the lexicographically first
    /// self-dual basis.
    pub fn new(t: u32) -> Result<Self, FieldError> {
        if t == 0 || t > MAX_T {
            return Err(FieldError::UnsupportedDegree(t));
        }
        let mut spec = Self::tables(t, smallest_irreducible(t))?;
        spec.basis = spec.search_self_dual_basis();
        spec.build_kappa();
        Ok(spec)
    }

    fn tables(t: u32, poly: u32) -> Result<Self, FieldError> {
        if poly_degree(poly) != t || !is_irreducible(poly) {
            return Err(FieldError::NotIrreducible(poly));
        }
        let q = 1u32 << t;
        let order = q - 1;
        // the smallest modulus is not always primitive, so search for a generator
        let generator = (1..q)
            .find(|&g| {
                let mut x = 1u32;
                for k in 1..=order {
                    x = slow_mul(x, g, poly, t);
                    if x == 1 {
                        return k == order;
                    }
                }
                false
            })
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for k in 0..order {
            exp[k as usize] = x;
            exp[(k + order) as usize] = x;
            log[x as usize] = k;
            x = slow_mul(x, generator, poly, t);
        }
        let mut spec = FieldSpec {
            t,
            poly,
            generator,
            exp,
            log,
            trace: Vec::new(),
            basis: Vec::new(),
            kappa: Vec::new(),
        };
        spec.trace = (0..q)
            .map(|a| {
                let mut s = 0;
                let mut p = a;
                for _ in 0..t {
                    s ^= p;
                    p = spec.mul(p, p);
                }
                debug_assert!(s <= 1, "trace must land in F_2");
                s as u8
            })
            .collect();
        Ok(spec)
    }

    fn search_self_dual_basis(&self) -> Vec<u32> {
        fn dfs(spec: &FieldSpec, chosen: &mut Vec<u32>) -> bool {
            if chosen.len() == spec.t as usize {
                return true;
            }
            let start = chosen.last().map_or(1, |&b| b + 1);
            for b in start..spec.size() {
                if spec.trace(b) == 1 && chosen.iter().all(|&c| spec.trace(spec.mul(b, c)) == 0) {
                    chosen.push(b);
                    if dfs(spec, chosen) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        let mut chosen = Vec::with_capacity(self.t as usize);
        assert!(dfs(self, &mut chosen), "no self-dual basis found for t={}", self.t);
        chosen
    }

    fn build_kappa(&mut self) {
        self.kappa = (0..self.size())
            .map(|a| {
                self.basis
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| u32::from(self.trace(self.mul(a, b))) << i)
                    .sum()
            })
            .collect();
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// Field size q = 2^t.
    pub fn size(&self) -> u32 {
        1 << self.t
    }

    /// Modulus as an integer whose bit `i` is the coefficient of `x^i`.
    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Modulus coefficients, highest degree first.
    pub fn poly_bitstring(&self) -> String {
        (0..=self.t).rev().map(|i| if self.poly >> i & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let order = self.size() - 1;
        Some(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = u64::from(self.size() - 1);
        let k = (u64::from(self.log[a as usize]) * (e % order)) % order;
        self.exp[k as usize]
    }

    #[inline]
    pub fn trace(&self, a: u32) -> u8 {
        self.trace[a as usize]
    }

    /// Coordinates of `a` in the self-dual basis, packed into the low `t` bits.
    #[inline]
    pub fn kappa_bits(&self, a: u32) -> u32 {
        self.kappa[a as usize]
    }

    pub fn kappa_inv_bits(&self, v: u32) -> u32 {
        self.basis
            .iter()
            .enumerate()
            .filter(|(i, _)| v >> i & 1 == 1)
            .fold(0, |acc, (_, &b)| acc ^ b)
    }

    pub fn element(self: &Arc<Self>, value: u32) -> Result<FieldElement, FieldError> {
        if value >= self.size() {
            return Err(FieldError::OutOfRange { value, size: self.size() });
        }
        Ok(FieldElement { spec: Arc::clone(self), value })
    }

    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size()).map(move |v| FieldElement { spec: Arc::clone(self), value: v })
    }

    /// Gram matrix of the stored basis under the trace form.
    pub fn gram(&self) -> Vec<Vec<u8>> {
        self.basis
            .iter()
            .map(|&bi| self.basis.iter().map(|&bj| self.trace(self.mul(bi, bj))).collect())
            .collect()
    }
}

/// Builds the field spec for F_{2^t} (smallest irreducible modulus, first self-dual basis).
pub fn find_self_dual_basis(t: u32) -> Result<Arc<FieldSpec>, FieldError> {
    FieldSpec::new(t).map(Arc::new)
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    t: u32,
    poly: String,
    basis: Vec<u32>,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldSpecRepr { t: self.t, poly: self.poly_bitstring(), basis: self.basis.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = FieldSpecRepr::deserialize(d)?;
        if repr.t == 0 || repr.t > MAX_T {
            return Err(D::Error::custom(FieldError::UnsupportedDegree(repr.t)));
        }
        if repr.poly.len() != repr.t as usize + 1 {
            return Err(D::Error::custom("poly must have t+1 coefficients"));
        }
        let poly = u32::from_str_radix(&repr.poly, 2).map_err(D::Error::custom)?;
        let mut spec = FieldSpec::tables(repr.t, poly).map_err(D::Error::custom)?;
        if repr.basis.len() != repr.t as usize || repr.basis.iter().any(|&b| b >= spec.size()) {
            return Err(D::Error::custom("basis must list t field elements"));
        }
        spec.basis = repr.basis;
        let gram = spec.gram();
        let identity =
            gram.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, &g)| g == u8::from(i == j)));
        if !identity {
            return Err(D::Error::custom(FieldError::NotSelfDual));
        }
        spec.build_kappa();
        Ok(spec)
    }
}

/// A value of F_{2^t} tied to its field.
#[derive(Clone)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    value: u32,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &FieldElement) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.spec, &other.spec) || *self.spec == *other.spec {
            Ok(())
        } else {
            Err(FieldError::SpecMismatch)
        }
    }

    fn with(&self, value: u32) -> FieldElement {
        FieldElement { spec: Arc::clone(&self.spec), value }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(self.with(self.value ^ other.value))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(self.with(self.spec.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        self.spec.inv(self.value).map(|v| self.with(v)).ok_or(FieldError::DivisionByZero)
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.with(self.spec.pow(self.value, e))
    }

    pub fn trace(&self) -> u8 {
        self.spec.trace(self.value)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.same_field(other).is_ok()
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})[{:#x}]", self.spec.t, self.value)
    }
}

pub fn field_mul(a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
    a.mul(b)
}

pub fn field_trace(a: &FieldElement) -> u8 {
    a.trace()
}

/// κ(a)_i = tr(a·b_i) for the self-dual basis (b_i).
pub fn kappa(a: &FieldElement) -> BitVector {
    BitVector::from_u64(a.spec.t as usize, u64::from(a.spec.kappa_bits(a.value)))
}

pub fn kappa_inv(spec: &Arc<FieldSpec>, v: &BitVector) -> Result<FieldElement, FieldError> {
    if v.len() != spec.t as usize {
        return Err(FieldError::LengthMismatch { expected: spec.t as usize, found: v.len() });
    }
    Ok(FieldElement { spec: Arc::clone(spec), value: spec.kappa_inv_bits(v.to_u64() as u32) })
}
