//! Randomized comparison of the sieve against direct enumeration.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{partitions, sieve_distinct_sum, PermType};
use crate::chars::{char_value, CharIndex};
use crate::error::Result;
use crate::group::AbelianGroup;

const MAX_CHECK_K: usize = 6;
const MAX_SUBSET: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct SieveCheckReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: usize,
    pub failures: Vec<String>,
    /// Largest |direct - sieve| seen in floating-point character checks.
    pub max_float_error: f64,
}

impl SieveCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Calls `visit` on every k-tuple over `d` with pairwise distinct entries.
fn for_each_injective(d: &[usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(d: &[usize], k: usize, used: &mut [bool], cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in 0..d.len() {
            if !used[i] {
                used[i] = true;
                cur.push(d[i]);
                rec(d, k, used, cur, visit);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(d, k, &mut vec![false; d.len()], &mut Vec::with_capacity(k), visit);
}

/// Calls `visit` on every k-tuple over `d` that is constant on each cycle of
/// a fixed permutation of type `t`.
fn for_each_fixed_tuple(d: &[usize], t: &PermType, visit: &mut impl FnMut(&[usize])) {
    let lengths = t.cycle_lengths();
    let mut digits = vec![0usize; lengths.len()];
    let mut tuple = Vec::with_capacity(t.k());
    if d.is_empty() {
        return;
    }
    loop {
        tuple.clear();
        for (&len, &digit) in lengths.iter().zip(&digits) {
            tuple.extend(std::iter::repeat_n(d[digit], len));
        }
        visit(&tuple);
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return;
            }
            digits[pos] += 1;
            if digits[pos] < d.len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

fn direct_sum<T: Clone + Zero>(d: &[usize], k: usize, f: impl Fn(&[usize]) -> T) -> T {
    let mut acc = T::zero();
    for_each_injective(d, k, &mut |x| acc = acc.clone() + f(x));
    acc
}

fn fixed_sum<T: Clone + Zero>(d: &[usize], t: &PermType, f: &impl Fn(&[usize]) -> T) -> T {
    let mut acc = T::zero();
    for_each_fixed_tuple(d, t, &mut |x| acc = acc.clone() + f(x));
    acc
}

fn random_group(rng: &mut ChaCha8Rng) -> AbelianGroup {
    let n1 = rng.gen_range(1..=12usize);
    let divisors: Vec<usize> = (1..=n1).filter(|d| n1 % d == 0 && n1 * d <= 48).collect();
    let n2 = *divisors.choose(rng).unwrap_or(&1);
    AbelianGroup::new(n1, n2).expect("n2 divides n1")
}

/// i^e for the exact value of a character of order dividing 4.
fn gaussian_char(group: &AbelianGroup, chi: CharIndex, element: usize) -> Complex<BigInt> {
    let (n1, n2) = (group.n1(), group.n2());
    let (a, b) = group.coords(element);
    let num = ((chi.u * a) % n1) * n2 + ((chi.v * b) % n2) * n1;
    let e = (4 * num / (n1 * n2)) % 4;
    let (re, im) = [(1, 0), (0, 1), (-1, 0), (0, -1)][e];
    Complex::new(BigInt::from(re), BigInt::from(im))
}

/// Compares the sieve with direct enumeration on random instances: integer
/// symmetric functions, rational and character products, and exact Gaussian
/// integer characters. Every F_τ is computed by enumerating tuples fixed by τ,
/// and for product functions also by power sums.
pub fn run_sieve_check(k_max: usize, trials: usize, seed: u64) -> Result<SieveCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SieveCheckReport {
        seed,
        trials,
        checks: 0,
        failures: Vec::new(),
        max_float_error: 0.0,
    };
    let k_max = k_max.clamp(1, MAX_CHECK_K);
    for trial in 0..trials {
        let group = random_group(&mut rng);
        let mut elements: Vec<usize> = group.elements().collect();
        elements.shuffle(&mut rng);
        let m = rng.gen_range(1..=elements.len().min(MAX_SUBSET));
        let d = &elements[..m];
        let k = rng.gen_range(1..=k_max);
        let tag = format!(
            "trial {trial}: G = Z/{} x Z/{}, |D| = {m}, k = {k}",
            group.n1(),
            group.n2()
        );
        let fail = |what: &str, report: &mut SieveCheckReport| {
            report.failures.push(format!("{tag}: {what}"));
        };

        // Integer symmetric function that is not a product.
        let weight: Vec<i64> = (0..group.order()).map(|_| rng.gen_range(-5..=5)).collect();
        let f_int = |x: &[usize]| {
            let s: i64 = x.iter().map(|&e| weight[e]).sum();
            let p: i64 = x.iter().map(|&e| weight[e]).product();
            BigInt::from(s * s - 3 * s + p)
        };
        let direct = direct_sum(d, k, f_int);
        let sieved: BigInt = sieve_distinct_sum(k, |t| Ok::<_, crate::Error>(fixed_sum(d, t, &f_int)))?;
        report.checks += 1;
        if direct != sieved {
            fail(&format!("integer sum {direct} != {sieved}"), &mut report);
        }

        // Rational product with power-sum closed form for F_τ.
        let r: Vec<BigRational> = (0..group.order())
            .map(|_| BigRational::new(rng.gen_range(-6..=6).into(), rng.gen_range(1..=4).into()))
            .collect();
        let f_rat = |x: &[usize]| x.iter().fold(BigRational::one(), |acc, &e| acc * &r[e]);
        let power_sum = |i: usize| -> BigRational { d.iter().map(|&e| num_traits::pow(r[e].clone(), i)).sum() };
        let direct = direct_sum(d, k, f_rat);
        let by_enum: BigRational = sieve_distinct_sum(k, |t| Ok::<_, crate::Error>(fixed_sum(d, t, &f_rat)))?;
        let by_power: BigRational = sieve_distinct_sum(k, |t| {
            Ok::<_, crate::Error>((1..=k).fold(BigRational::one(), |acc, i| {
                acc * num_traits::pow(power_sum(i), t.count(i))
            }))
        })?;
        report.checks += 2;
        if direct != by_enum || direct != by_power {
            fail(&format!("rational sum {direct} vs {by_enum} / {by_power}"), &mut report);
        }

        // Floating-point character product.
        let chi = CharIndex::new(&group, rng.gen_range(0..group.n1()), rng.gen_range(0..group.n2()));
        let f_chi = |x: &[usize]| {
            x.iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &e| acc * char_value(&group, chi, e))
        };
        let char_sum = |i: usize| -> Complex64 {
            let chi_i = CharIndex::new(&group, (i * chi.u) % group.n1(), (i * chi.v) % group.n2());
            d.iter().map(|&e| char_value(&group, chi_i, e)).sum()
        };
        let direct = direct_sum(d, k, f_chi);
        let sieved: Complex64 = sieve_distinct_sum(k, |t| {
            Ok::<_, crate::Error>((1..=k).fold(Complex64::new(1.0, 0.0), |acc, i| {
                acc * char_sum(i).powu(t.count(i) as u32)
            }))
        })?;
        let err = (direct - sieved).norm();
        report.max_float_error = report.max_float_error.max(err);
        report.checks += 1;
        let scale = (m as f64).powi(k as i32).max(1.0);
        if err > 1e-9 * scale {
            fail(&format!("character sum error {err:e}"), &mut report);
        }

        // Exact Gaussian integers for characters of order dividing 4.
        let quartic: Vec<CharIndex> = (0..group.n1())
            .flat_map(|u| (0..group.n2()).map(move |v| (u, v)))
            .filter(|&(u, v)| (4 * u) % group.n1() == 0 && (4 * v) % group.n2() == 0)
            .map(|(u, v)| CharIndex::new(&group, u, v))
            .collect();
        let chi4 = *quartic.choose(&mut rng).unwrap_or(&CharIndex::TRIVIAL);
        let f_gauss = |x: &[usize]| {
            x.iter().fold(Complex::new(BigInt::one(), BigInt::zero()), |acc, &e| {
                acc * gaussian_char(&group, chi4, e)
            })
        };
        let direct = direct_sum(d, k, f_gauss);
        let sieved: Complex<BigInt> = sieve_distinct_sum(k, |t| Ok::<_, crate::Error>(fixed_sum(d, t, &f_gauss)))?;
        report.checks += 1;
        if direct != sieved {
            fail(&format!("gaussian sum {direct} != {sieved}"), &mut report);
        }
    }
    // The class sizes must sum to k! for every k checked.
    for k in 1..=k_max {
        let total: num_bigint::BigUint = partitions(k)?.iter().map(super::perm_type_count).sum();
        report.checks += 1;
        if total != crate::binomial::factorial(k as u64) {
            report.failures.push(format!("class sizes of S_{k} sum to {total}"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_tuples_of_transposition() {
        let t = PermType::new(vec![1, 1, 0]).unwrap();
        let mut seen = Vec::new();
        for_each_fixed_tuple(&[3, 5], &t, &mut |x| seen.push(x.to_vec()));
        assert_eq!(seen, vec![vec![3, 3, 3], vec![5, 5, 3], vec![3, 3, 5], vec![5, 5, 5]]);
    }

    #[test]
    fn injective_tuple_count() {
        let mut n = 0;
        for_each_injective(&[0, 1, 2, 3, 4], 3, &mut |_| n += 1);
        assert_eq!(n, 60);
    }

    #[test]
    fn random_instances_agree() {
        let report = run_sieve_check(5, 40, 7).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.max_float_error < 1e-9);
    }
}
