//! Arithmetic in F_p and F_{p^m}.
//!
//! An element of F_{p^m} is a residue class of polynomials over F_p modulo a
//! monic irreducible polynomial of degree m. Elements are stored packed as the
//! integer `c_0 + c_1 p + ... + c_{m-1} p^{m-1}` of their little-endian
//! coefficient vector, so equality and ordering are coefficient-wise and the
//! prime subfield occupies the indices `0..p`.
//!
//! Multiplication and inversion go through discrete log tables built once at
//! construction. All tables are O(q), which the desk-scale cap keeps small.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

const NONE: u32 = u32::MAX;

/// Serializable description of a field: `{"p": 5, "m": 1}` or
/// `{"p": 2, "m": 3, "modulus": [1, 0, 1, 1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

/// An element of a finite field, packed as described in the module docs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a packed index without checking it against a field; use
    /// [`Field::element`] for a checked conversion.
    pub fn from_index(index: u32) -> FieldElement {
        FieldElement(index)
    }

    /// The packed integer representation.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct FieldData {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, little-endian, length m + 1 (empty for prime fields).
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// One square root of each element, or NONE.
    sqrt: Vec<u32>,
    /// Characteristic 2 only: one z with z^2 + z = e, or NONE.
    artin_schreier: Vec<u32>,
}

/// A finite field F_q with q = p^m. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    data: Arc<FieldData>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.data.q)?;
        if self.data.m > 1 {
            write!(f, " mod {:?}", self.data.modulus)?;
        }
        Ok(())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
            || (self.data.p == other.data.p && self.data.m == other.data.m && self.data.modulus == other.data.modulus)
    }
}

impl Eq for Field {}

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

/// True when `q` is p^m for a prime p and m ≥ 1.
pub fn is_prime_power(q: u64) -> bool {
    q >= 2 && prime_factors(q).len() == 1
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Polynomial remainder over F_p; both operands little-endian, `b` monic.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    let p64 = p as u64;
    while r.len() > db {
        let lead = *r.last().unwrap() % p64;
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                let sub = lead * c as u64 % p64;
                r[shift + i] = (r[shift + i] + p64 - sub) % p64;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| (c % p64) as u32).collect()
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                g.push((t % p as u64) as u32);
                t /= p as u64;
            }
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn unpack(mut idx: u32, p: u32, m: u32) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let c = idx % p;
            idx /= p;
            c
        })
        .collect()
}

fn pack(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

/// Multiplication by polynomial product and reduction, used only to seed
/// the log tables.
fn slow_mul(a: u32, b: u32, p: u32, m: u32, modulus: &[u32]) -> u32 {
    if m == 1 {
        return ((a as u64 * b as u64) % p as u64) as u32;
    }
    let ca = unpack(a, p, m);
    let cb = unpack(b, p, m);
    let mut prod = vec![0u64; 2 * m as usize - 1];
    for (i, &x) in ca.iter().enumerate() {
        for (j, &y) in cb.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    let mut r = poly_rem(&prod, modulus, p);
    r.resize(m as usize, 0);
    pack(&r, p)
}

fn slow_pow(mut base: u32, mut e: u64, p: u32, m: u32, modulus: &[u32]) -> u32 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = slow_mul(acc, base, p, m, modulus);
        }
        base = slow_mul(base, base, p, m, modulus);
        e >>= 1;
    }
    acc
}

impl Field {
    /// Builds F_{p^m}. When `modulus` is `None` and m > 1 the
    /// lexicographically smallest monic irreducible of degree m is used.
    pub fn new(p: u32, m: u32, modulus: Option<&[u32]>) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NonPrimeP(p as u64));
        }
        if m == 0 {
            return Err(Error::DegreeMismatch("extension degree must be at least 1".into()));
        }
        let q = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or_else(|| Error::CapExceeded(format!("field order {p}^{m} exceeds 2^20")))?;
        let q = q as u32;

        let modulus = match (m, modulus) {
            (1, None) => Vec::new(),
            (1, Some(f)) => {
                // Only an empty list or a monic linear polynomial makes sense here.
                if !(f.is_empty() || (f.len() == 2 && f[1] == 1 && f[0] < p)) {
                    return Err(Error::DegreeMismatch(format!(
                        "prime field takes no modulus, got {f:?}"
                    )));
                }
                Vec::new()
            }
            (_, Some(f)) => {
                if f.len() != m as usize + 1 {
                    return Err(Error::DegreeMismatch(format!(
                        "expected {} coefficients, got {}",
                        m + 1,
                        f.len()
                    )));
                }
                if f[m as usize] != 1 {
                    return Err(Error::DegreeMismatch("modulus must be monic".into()));
                }
                if f.iter().any(|&c| c >= p) {
                    return Err(Error::DegreeMismatch(format!("coefficients must lie in [0, {p})")));
                }
                if !is_irreducible(f, p) {
                    return Err(Error::ReducibleModulus(p));
                }
                f.to_vec()
            }
            (_, None) => Self::smallest_irreducible(p, m),
        };
        Ok(Self::build(p, m, q, modulus))
    }

    /// Shorthand for the prime field F_p.
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1, None)
    }

    /// F_q with the default modulus, where q must be a prime power.
    pub fn of_order(q: u32) -> Result<Field> {
        let factors = prime_factors(q as u64);
        if factors.len() != 1 {
            return Err(Error::ParameterOutOfRange(format!("{q} is not a prime power")));
        }
        let p = factors[0] as u32;
        let mut m = 0;
        let mut t = q;
        while t > 1 {
            t /= p;
            m += 1;
        }
        Field::new(p, m, None)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Field> {
        Field::new(spec.p, spec.m, spec.modulus.as_deref())
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.data.p,
            m: self.data.m,
            modulus: (self.data.m > 1).then(|| self.data.modulus.clone()),
        }
    }

    fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
        let count = (p as u64).pow(m);
        for idx in 0..count {
            let mut f = unpack(idx as u32, p, m);
            f.push(1);
            if is_irreducible(&f, p) {
                return f;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    fn build(p: u32, m: u32, q: u32, modulus: Vec<u32>) -> Field {
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&r| slow_pow(g, order / r, p, m, &modulus) != 1))
            .unwrap_or(1);

        let mut exp = vec![0u32; q as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for i in 0..(q - 1) {
            exp[i as usize] = cur;
            log[cur as usize] = i;
            cur = slow_mul(cur, generator, p, m, &modulus);
        }

        let mut field = Field {
            data: Arc::new(FieldData {
                p,
                m,
                q,
                modulus,
                exp,
                log,
                sqrt: Vec::new(),
                artin_schreier: Vec::new(),
            }),
        };

        let mut sqrt = vec![NONE; q as usize];
        let mut artin_schreier = vec![NONE; if p == 2 { q as usize } else { 0 }];
        for y in field.elements() {
            let sq = field.mul(y, y);
            if sqrt[sq.0 as usize] == NONE {
                sqrt[sq.0 as usize] = y.0;
            }
            if p == 2 {
                let e = field.add(sq, y);
                if artin_schreier[e.0 as usize] == NONE {
                    artin_schreier[e.0 as usize] = y.0;
                }
            }
        }
        let data = Arc::get_mut(&mut field.data).expect("field not yet shared");
        data.sqrt = sqrt;
        data.artin_schreier = artin_schreier;
        field
    }

    pub fn characteristic(&self) -> u32 {
        self.data.p
    }

    pub fn degree(&self) -> u32 {
        self.data.m
    }

    pub fn order(&self) -> u32 {
        self.data.q
    }

    /// Monic modulus (little-endian); empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.data.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.data.q).map(FieldElement)
    }

    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.data.q {
            Ok(FieldElement(index))
        } else {
            Err(Error::ParameterOutOfRange(format!(
                "element index {index} outside F_{}",
                self.data.q
            )))
        }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        let (p, m) = (self.data.p, self.data.m);
        if coeffs.len() > m as usize {
            return Err(Error::DegreeMismatch(format!(
                "element has {} coefficients, field degree is {m}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= p) {
            return Err(Error::ParameterOutOfRange(format!("coefficients must lie in [0, {p})")));
        }
        Ok(FieldElement(pack(coeffs, p)))
    }

    /// Little-endian coefficient vector of length m.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        unpack(a.0, self.data.p, self.data.m)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.data.p as i64) as u32)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let d = &*self.data;
        if d.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if d.m == 1 {
            return FieldElement((a.0 + b.0) % d.p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0, 1);
        while x > 0 || y > 0 {
            out += ((x % d.p + y % d.p) % d.p) * place;
            x /= d.p;
            y /= d.p;
            place *= d.p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let d = &*self.data;
        if d.p == 2 {
            return a;
        }
        if d.m == 1 {
            return FieldElement((d.p - a.0) % d.p);
        }
        let (mut x, mut out, mut place) = (a.0, 0, 1);
        while x > 0 {
            out += ((d.p - x % d.p) % d.p) * place;
            x /= d.p;
            place *= d.p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let d = &*self.data;
        let e = (d.log[a.0 as usize] as u64 + d.log[b.0 as usize] as u64) % (d.q as u64 - 1);
        FieldElement(d.exp[e as usize])
    }

    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let d = &*self.data;
        let l = d.log[a.0 as usize];
        Ok(FieldElement(d.exp[((d.q - 1 - l) % (d.q - 1)) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let d = &*self.data;
        let l = (d.log[a.0 as usize] as u128 * e as u128 % (d.q as u128 - 1)) as usize;
        FieldElement(d.exp[l])
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: FieldElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let n = self.data.q as u64 - 1;
        let mut ord = n;
        for r in prime_factors(n) {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == FieldElement::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// All y with y^2 = a.
    pub fn sqrt_set(&self, a: FieldElement) -> Vec<FieldElement> {
        let r = self.data.sqrt[a.0 as usize];
        if r == NONE {
            return Vec::new();
        }
        let r = FieldElement(r);
        let s = self.neg(r);
        if s == r {
            vec![r]
        } else {
            vec![r.min(s), r.max(s)]
        }
    }

    /// All y with y^2 + c y = d, in increasing order.
    pub fn solve_quadratic(&self, c: FieldElement, d: FieldElement) -> Vec<FieldElement> {
        if self.data.p != 2 {
            // y = (-c ± sqrt(c^2 + 4d)) / 2
            let disc = self.add(self.square(c), self.mul(self.from_int(4), d));
            let half = self
                .inv(self.from_int(2))
                .expect("2 is invertible in odd characteristic");
            let mut ys: Vec<_> = self
                .sqrt_set(disc)
                .into_iter()
                .map(|r| self.mul(self.sub(r, c), half))
                .collect();
            ys.sort();
            return ys;
        }
        if c.is_zero() {
            return self.sqrt_set(d);
        }
        // y = c z with z^2 + z = d / c^2.
        let c2inv = self.inv(self.square(c)).expect("c is nonzero");
        let e = self.mul(d, c2inv);
        let z = self.data.artin_schreier[e.0 as usize];
        if z == NONE {
            return Vec::new();
        }
        let z = FieldElement(z);
        let mut ys = vec![self.mul(c, z), self.mul(c, self.add(z, FieldElement::ONE))];
        ys.sort();
        ys
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers_below_thirty() {
        let got: Vec<u64> = (0..30).filter(|&q| is_prime_power(q)).collect();
        assert_eq!(got, [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]);
    }

    #[test]
    fn prime_field_inverse() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.inv(f.from_int(2)).unwrap(), f.from_int(3));
        assert_eq!(f.inv(FieldElement::ZERO), Err(Error::ZeroInverse));
    }

    #[test]
    fn f4_generator_squares_to_g_plus_one() {
        let f = Field::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let g = f.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f.mul(g, g), f.add(g, FieldElement::ONE));
    }

    #[test]
    fn f8_modulus_validation() {
        assert!(Field::new(2, 3, Some(&[1, 0, 1, 1])).is_ok());
        assert_eq!(
            Field::new(2, 3, Some(&[0, 0, 1, 1])).unwrap_err(),
            Error::ReducibleModulus(2)
        );
        let f = Field::new(2, 3, None).unwrap();
        for a in f.elements().skip(1) {
            assert_eq!(f.mul(f.inv(a).unwrap(), a), FieldElement::ONE);
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1, None).unwrap_err(), Error::NonPrimeP(4));
        assert!(matches!(Field::new(2, 3, Some(&[1, 1])), Err(Error::DegreeMismatch(_))));
        assert!(matches!(
            Field::new(2, 3, Some(&[1, 1, 0, 2])),
            Err(Error::DegreeMismatch(_))
        ));
        assert!(matches!(Field::new(2, 21, None), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn default_moduli() {
        assert_eq!(Field::new(2, 2, None).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(2, 3, None).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(Field::new(2, 4, None).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(Field::new(3, 2, None).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn square_roots() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.sqrt_set(FieldElement::ZERO), vec![FieldElement::ZERO]);
        assert_eq!(f.sqrt_set(f.from_int(4)), vec![f.from_int(2), f.from_int(3)]);
        assert!(f.sqrt_set(f.from_int(3)).is_empty());
    }

    #[test]
    fn quadratic_solutions_match_exhaustive_search() {
        for q in [2u32, 3, 4, 5, 8, 9, 16] {
            let f = Field::of_order(q).unwrap();
            for c in f.elements() {
                for d in f.elements() {
                    let brute: Vec<_> = f.elements().filter(|&y| f.add(f.square(y), f.mul(c, y)) == d).collect();
                    assert_eq!(f.solve_quadratic(c, d), brute, "q={q} c={c} d={d}");
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64] {
            let f = Field::of_order(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.pow(a, q as u64), a, "Frobenius in F_{q}");
                if !a.is_zero() {
                    assert_eq!((q as u64 - 1) % f.mult_order(a).unwrap(), 0);
                }
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
            }
            if q > 16 {
                continue;
            }
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn table_multiplication_matches_polynomial_product() {
        let f = Field::new(3, 3, None).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                let slow = slow_mul(a.0, b.0, 3, 3, f.modulus());
                assert_eq!(f.mul(a, b).0, slow);
            }
        }
    }

    #[test]
    fn coefficient_round_trip() {
        let f = Field::new(3, 2, None).unwrap();
        for a in f.elements() {
            assert_eq!(f.from_coeffs(&f.coeffs(a)).unwrap(), a);
        }
    }
}
