//! Distinct-coordinate sieving over conjugacy classes of S_k.
//!
//! For a symmetric set X ⊆ D^k and a symmetric function f, the sum of f over
//! tuples with pairwise distinct coordinates equals
//! `Σ_{τ ∈ C_k} sign(τ) C(τ) F_τ`, where C_k is the set of cycle types,
//! C(τ) the size of the class and F_τ the sum of f over tuples that are
//! constant on every cycle of τ.

mod check;

pub use check::{run_sieve_check, SieveCheckReport};

use std::ops::{Add, Neg};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::binomial::{binom, factorial, falling, from_biguint, rational};
use crate::error::{Error, Result};

/// Largest k accepted by [`partitions`] (p(20) = 627).
pub const MAX_SIEVE_K: usize = 20;

/// Cycle type (c1, ..., ck): c_i cycles of length i, with Σ i c_i = k.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermType {
    c: Vec<usize>,
}

impl PermType {
    pub fn new(c: Vec<usize>) -> Result<PermType> {
        let k = c.len();
        let weight: usize = c.iter().enumerate().map(|(i, &ci)| (i + 1) * ci).sum();
        if k == 0 || weight != k {
            return Err(Error::InvalidType(format!("{c:?} has weight {weight}, expected {k}")));
        }
        Ok(PermType { c })
    }

    pub fn k(&self) -> usize {
        self.c.len()
    }

    /// Multiplicity of cycles of length `len` (1-based).
    pub fn count(&self, len: usize) -> usize {
        self.c.get(len.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.c
    }

    /// l(τ): number of cycles, fixed points included.
    pub fn cycles(&self) -> usize {
        self.c.iter().sum()
    }

    /// Cycle lengths in decreasing order.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.cycles());
        for len in (1..=self.k()).rev() {
            out.extend(std::iter::repeat_n(len, self.count(len)));
        }
        out
    }

    /// (-1)^{k - l(τ)}.
    pub fn sign(&self) -> i32 {
        if (self.k() - self.cycles()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }
}

/// Number of permutations of the given type: k! / Π i^{c_i} c_i!.
pub fn perm_type_count(t: &PermType) -> BigUint {
    let denom = t.c.iter().enumerate().fold(BigUint::one(), |acc, (i, &ci)| {
        acc * BigUint::from(i + 1).pow(ci as u32) * factorial(ci as u64)
    });
    factorial(t.k() as u64) / denom
}

/// All cycle types of S_k, i.e. the partitions of k, starting with the
/// single k-cycle and ending with the identity.
pub fn partitions(k: usize) -> Result<Vec<PermType>> {
    if k == 0 || k > MAX_SIEVE_K {
        return Err(Error::ParameterOutOfRange(format!("k = {k} outside 1..={MAX_SIEVE_K}")));
    }
    fn rec(rest: usize, max_part: usize, c: &mut Vec<usize>, out: &mut Vec<PermType>) {
        if rest == 0 {
            out.push(PermType { c: c.clone() });
            return;
        }
        for part in (1..=max_part.min(rest)).rev() {
            c[part - 1] += 1;
            rec(rest - part, part, c, out);
            c[part - 1] -= 1;
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut vec![0; k], &mut out);
    Ok(out)
}

/// Values the sieve can accumulate: a commutative group with integer scaling.
pub trait SieveValue: Clone + Zero + Add<Output = Self> + Neg<Output = Self> {
    fn scale(&self, c: &BigUint) -> Self;
}

impl SieveValue for BigInt {
    fn scale(&self, c: &BigUint) -> Self {
        self * BigInt::from(c.clone())
    }
}

impl SieveValue for BigRational {
    fn scale(&self, c: &BigUint) -> Self {
        self * from_biguint(c)
    }
}

impl SieveValue for f64 {
    fn scale(&self, c: &BigUint) -> Self {
        self * c.to_string().parse::<f64>().unwrap_or(f64::INFINITY)
    }
}

impl SieveValue for Complex<f64> {
    fn scale(&self, c: &BigUint) -> Self {
        self * c.to_string().parse::<f64>().unwrap_or(f64::INFINITY)
    }
}

impl SieveValue for Complex<BigInt> {
    fn scale(&self, c: &BigUint) -> Self {
        let c = BigInt::from(c.clone());
        Complex::new(&self.re * &c, &self.im * &c)
    }
}

impl SieveValue for Complex<BigRational> {
    fn scale(&self, c: &BigUint) -> Self {
        let c = from_biguint(c);
        Complex::new(&self.re * &c, &self.im * &c)
    }
}

/// `Σ_{τ ∈ C_k} sign(τ) C(τ) F_τ` with F_τ supplied per cycle type.
pub fn sieve_distinct_sum<T, E, F>(k: usize, mut tau_sum: F) -> std::result::Result<T, E>
where
    T: SieveValue,
    E: From<Error>,
    F: FnMut(&PermType) -> std::result::Result<T, E>,
{
    let mut total = T::zero();
    for t in partitions(k)? {
        let term = tau_sum(&t)?.scale(&perm_type_count(&t));
        total = if t.is_positive() { total + term } else { total + (-term) };
    }
    Ok(total)
}

/// C_k(q, ..., q) = Σ_types N(c) q^{Σ c_i}, which equals q(q+1)...(q+k-1).
pub fn gen_poly_uniform(k: usize, q: &BigRational) -> Result<BigRational> {
    let value = partitions(k)?.iter().fold(BigRational::zero(), |acc, t| {
        acc + from_biguint(&perm_type_count(t)) * num_traits::pow(q.clone(), t.cycles())
    });
    debug_assert_eq!(value, falling(&(q + rational(k as i64 - 1)), k as u64));
    Ok(value)
}

fn check_mixed_args(k: usize, d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::ParameterOutOfRange(format!("d = {d} must be at least 2")));
    }
    if k == 0 || k > MAX_SIEVE_K {
        return Err(Error::ParameterOutOfRange(format!("k = {k} outside 1..={MAX_SIEVE_K}")));
    }
    Ok(())
}

/// C_k with t_i = q when d | i and t_i = s otherwise, by the closed form
/// `k! Σ_{i=0}^{⌊k/d⌋} C((q-s)/d + i - 1, i) C(s + k - d i - 1, k - d i)`.
pub fn gen_poly_mixed(k: usize, d: usize, q: &BigRational, s: &BigRational) -> Result<BigRational> {
    check_mixed_args(k, d)?;
    let r = (q - s) / rational(d as i64);
    let sum = (0..=k / d).fold(BigRational::zero(), |acc, i| {
        let rest = (k - d * i) as i64;
        acc + binom(&(&r + rational(i as i64 - 1)), i as u64) * binom(&(s + rational(rest - 1)), rest as u64)
    });
    Ok(sum * from_biguint(&factorial(k as u64)))
}

/// The same quantity by direct expansion over cycle types.
pub fn gen_poly_mixed_expansion(k: usize, d: usize, q: &BigRational, s: &BigRational) -> Result<BigRational> {
    check_mixed_args(k, d)?;
    Ok(partitions(k)?.iter().fold(BigRational::zero(), |acc, t| {
        let mut term = from_biguint(&perm_type_count(t));
        for len in 1..=k {
            let base = if len % d == 0 { q } else { s };
            term *= num_traits::pow(base.clone(), t.count(len));
        }
        acc + term
    }))
}

/// `k! C(s + k + (q - s)/d - 1, k)`, the majorant stated for
/// [`gen_poly_mixed`] when q ≥ s ≥ 0. It does not hold everywhere on that
/// range: with s = 0 and 0 < q < d it can fall below the exact value.
pub fn gen_poly_mixed_bound(k: usize, d: usize, q: &BigRational, s: &BigRational) -> Result<BigRational> {
    check_mixed_args(k, d)?;
    let top = s + rational(k as i64) + (q - s) / rational(d as i64) - BigRational::one();
    Ok(binom(&top, k as u64) * from_biguint(&factorial(k as u64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::ratio;

    fn ty(c: &[usize]) -> PermType {
        PermType::new(c.to_vec()).unwrap()
    }

    #[test]
    fn type_counts() {
        assert_eq!(perm_type_count(&ty(&[3, 0, 0])), BigUint::from(1u32));
        assert_eq!(perm_type_count(&ty(&[1, 1, 0])), BigUint::from(3u32));
        assert_eq!(perm_type_count(&ty(&[0, 2, 0, 0])), BigUint::from(3u32));
        assert!(matches!(PermType::new(vec![1, 1]), Err(Error::InvalidType(_))));
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions(1).unwrap(), vec![ty(&[1])]);
        assert_eq!(partitions(4).unwrap().len(), 5);
        assert_eq!(partitions(20).unwrap().len(), 627);
        assert!(partitions(21).is_err());
        for k in 1..=10 {
            let total: BigUint = partitions(k).unwrap().iter().map(perm_type_count).sum();
            assert_eq!(total, factorial(k as u64));
        }
    }

    #[test]
    fn sieve_with_constant_f_gives_falling_factorial() {
        for k in 1..=8usize {
            for n in 0..=12i64 {
                let f: Result<BigInt> =
                    sieve_distinct_sum(k, |t: &PermType| Ok(BigInt::from(n).pow(t.cycles() as u32)));
                let expected = (0..k as i64).fold(BigInt::one(), |acc, i| acc * (n - i));
                assert_eq!(f.unwrap(), expected, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn sieve_k1_is_identity_term() {
        let v: Result<BigInt> = sieve_distinct_sum(1, |_| Ok(BigInt::from(17)));
        assert_eq!(v.unwrap(), BigInt::from(17));
    }

    #[test]
    fn uniform_generating_function() {
        assert_eq!(gen_poly_uniform(3, &rational(2)).unwrap(), rational(24));
        assert_eq!(gen_poly_uniform(1, &ratio(7, 3)).unwrap(), ratio(7, 3));
        assert_eq!(gen_poly_uniform(5, &rational(1)).unwrap(), rational(120));
    }

    #[test]
    fn mixed_generating_function_examples() {
        let (q, s) = (rational(4), rational(2));
        assert_eq!(gen_poly_mixed(2, 2, &q, &s).unwrap(), rational(8));
        assert_eq!(gen_poly_mixed_expansion(2, 2, &q, &s).unwrap(), rational(8));
        assert_eq!(gen_poly_mixed(3, 2, &rational(0), &rational(0)).unwrap(), rational(0));
        for k in 1..=8 {
            let q = ratio(7, 2);
            assert_eq!(gen_poly_mixed(k, 3, &q, &q).unwrap(), gen_poly_uniform(k, &q).unwrap());
        }
        assert!(gen_poly_mixed(3, 1, &q, &s).is_err());
    }

    #[test]
    fn mixed_bound_counterexample() {
        // k = 2, d = 2, q = 1, s = 0: the expansion is q = 1 while the
        // majorant is 2 C(3/2, 2) = 3/4.
        let (q, s) = (rational(1), rational(0));
        assert_eq!(gen_poly_mixed(2, 2, &q, &s).unwrap(), rational(1));
        assert_eq!(gen_poly_mixed_bound(2, 2, &q, &s).unwrap(), ratio(3, 4));
    }
}
