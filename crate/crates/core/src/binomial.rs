//! Exact factorials, falling factorials and generalized binomials.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// C(n, k) for integers, zero when k > n.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// C(n, k) as f64, for cheap size estimates.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// (x)_k = x (x - 1) ... (x - k + 1).
pub fn falling(x: &BigRational, k: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut term = x.clone();
    for _ in 0..k {
        acc *= &term;
        term -= BigRational::one();
    }
    acc
}

/// C(x, k) = (x)_k / k! for rational x.
pub fn binom(x: &BigRational, k: u64) -> BigRational {
    falling(x, k) / BigRational::from_integer(BigInt::from(factorial(k)))
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_biguint(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// `"num/den"` in lowest terms (`"n/1"` for integers).
pub fn ratio_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_binomials() {
        assert_eq!(binomial(7, 3), BigUint::from(35u32));
        assert_eq!(binomial(3, 7), BigUint::zero());
        assert_eq!(binomial(66, 33).to_string(), "7219428434016265740");
        assert_eq!(factorial(6), BigUint::from(720u32));
    }

    #[test]
    fn generalized_binomials() {
        // C(k - 1, k) = 0.
        for k in 1..10 {
            assert!(binom(&rational(k as i64 - 1), k).is_zero());
        }
        // C(-1, k) = (-1)^k.
        assert_eq!(binom(&rational(-1), 3), rational(-1));
        // C(5/2, 2) = (5/2)(3/2)/2 = 15/8.
        assert_eq!(binom(&ratio(5, 2), 2), ratio(15, 8));
        assert_eq!(ratio_string(&ratio(30, 16)), "15/8");
    }

    #[test]
    fn vandermonde() {
        for a in 0..=30u64 {
            for b in 0..=30u64 {
                for k in [0u64, 1, 5, 17, 30] {
                    let lhs: BigUint = (0..=k).map(|i| binomial(a, i) * binomial(b, k - i)).sum();
                    assert_eq!(lhs, binomial(a + b, k));
                }
            }
        }
    }
}
