//! Additive characters of G ≅ Z/n1 × Z/n2 and character sums over subsets.
//!
//! The character with index (u, v) sends the element with coordinates (a, b)
//! to `exp(2πi (u a / n1 + v b / n2))`. Index (0, 0) is the trivial
//! character. Characters are stored at position `u * n2 + v`, mirroring the
//! element indexing of [`AbelianGroup`].

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::ec::{GroupStructure, Point};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CharIndex {
    pub u: usize,
    pub v: usize,
}

impl CharIndex {
    pub const TRIVIAL: CharIndex = CharIndex { u: 0, v: 0 };

    pub fn new(group: &AbelianGroup, u: usize, v: usize) -> CharIndex {
        CharIndex {
            u: u % group.n1(),
            v: v % group.n2(),
        }
    }

    pub fn from_position(group: &AbelianGroup, pos: usize) -> CharIndex {
        let (u, v) = group.coords(pos);
        CharIndex { u, v }
    }

    pub fn position(&self, group: &AbelianGroup) -> usize {
        group.index(self.u, self.v)
    }

    /// lcm(n1 / gcd(u, n1), n2 / gcd(v, n2)).
    pub fn order(&self, group: &AbelianGroup) -> usize {
        group.element_order(self.position(group))
    }

    pub fn is_trivial(&self) -> bool {
        self.u == 0 && self.v == 0
    }
}

fn unit(num: usize, den: usize) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (num % den) as f64 / den as f64)
}

/// χ evaluated at the element with the given group index.
pub fn char_value(group: &AbelianGroup, chi: CharIndex, element: usize) -> Complex64 {
    let (a, b) = group.coords(element);
    let (n1, n2) = (group.n1(), group.n2());
    // u a / n1 + v b / n2 = ((u a mod n1) n2 + (v b mod n2) n1) / (n1 n2)
    let phase = (chi.u * a % n1) * n2 + (chi.v * b % n2) * n1;
    unit(phase % (n1 * n2), n1 * n2)
}

pub fn char_eval(gs: &GroupStructure, chi: CharIndex, p: &Point) -> Result<Complex64> {
    let idx = gs.index_of(p)?;
    Ok(char_value(gs.group(), chi, idx))
}

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

impl CompensatedSum {
    fn add_part(sum: &mut f64, comp: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }

    fn add(&mut self, z: Complex64) {
        Self::add_part(&mut self.re, &mut self.re_c, z.re);
        Self::add_part(&mut self.im, &mut self.im_c, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

/// All character sums `s_χ(D) = Σ_{a ∈ D} χ(a)` together with
/// `Φ(D) = max_{χ ≠ χ0} |s_χ(D)|`.
#[derive(Debug, Clone, Serialize)]
pub struct CharSumProfile {
    /// Indexed by character position `u * n2 + v`.
    pub sums: Vec<Complex64>,
    pub phi: f64,
    /// Nontrivial character attaining Φ, if any exist.
    pub argmax: Option<CharIndex>,
    /// Absolute error allowance on each sum: `1e-9 · |D|`.
    pub tolerance: f64,
    pub size: usize,
}

impl CharSumProfile {
    pub fn sum(&self, group: &AbelianGroup, chi: CharIndex) -> Complex64 {
        self.sums[chi.position(group)]
    }

    /// Φ(D) + tolerance, the value the bound evaluation consumes.
    pub fn phi_upper(&self) -> f64 {
        self.phi + self.tolerance
    }
}

fn check_subset(group: &AbelianGroup, subset: &[usize]) -> Result<()> {
    let mut seen = vec![false; group.order()];
    for &x in subset {
        if x >= group.order() {
            return Err(Error::UnknownPoint);
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(Error::DuplicateElement);
        }
    }
    Ok(())
}

fn finish(group: &AbelianGroup, sums: Vec<Complex64>, size: usize) -> CharSumProfile {
    let mut phi = 0.0;
    let mut argmax = None;
    for (pos, s) in sums.iter().enumerate().skip(1) {
        let m = s.norm();
        if argmax.is_none() || m > phi {
            phi = m;
            argmax = Some(CharIndex::from_position(group, pos));
        }
    }
    CharSumProfile {
        sums,
        phi,
        argmax,
        tolerance: 1e-9 * size as f64,
        size,
    }
}

/// Character sums by a row-column DFT of the coordinate indicator of D:
/// first along Z/n1, then along Z/n2. Cost O(N (n1 + n2)).
pub fn char_sum_profile(group: &AbelianGroup, subset: &[usize]) -> Result<CharSumProfile> {
    check_subset(group, subset)?;
    let (n1, n2) = (group.n1(), group.n2());
    let mut indicator = vec![false; group.order()];
    for &x in subset {
        indicator[x] = true;
    }
    let roots1: Vec<Complex64> = (0..n1).map(|j| unit(j, n1)).collect();
    let roots2: Vec<Complex64> = (0..n2).map(|j| unit(j, n2)).collect();

    // partial[u * n2 + b] = Σ_a [ (a, b) ∈ D ] ω1^{u a}
    let mut partial = vec![Complex64::new(0.0, 0.0); group.order()];
    for b in 0..n2 {
        for u in 0..n1 {
            let mut acc = CompensatedSum::default();
            for a in 0..n1 {
                if indicator[a * n2 + b] {
                    acc.add(roots1[u * a % n1]);
                }
            }
            partial[u * n2 + b] = acc.value();
        }
    }
    let mut sums = vec![Complex64::new(0.0, 0.0); group.order()];
    for u in 0..n1 {
        for v in 0..n2 {
            let mut acc = CompensatedSum::default();
            for b in 0..n2 {
                acc.add(partial[u * n2 + b] * roots2[v * b % n2]);
            }
            sums[u * n2 + v] = acc.value();
        }
    }
    // The trivial character sums to |D| exactly.
    sums[0] = Complex64::new(subset.len() as f64, 0.0);
    Ok(finish(group, sums, subset.len()))
}

/// Direct O(N |D|) evaluation, kept as an oracle for the DFT path.
pub fn char_sum_profile_naive(group: &AbelianGroup, subset: &[usize]) -> Result<CharSumProfile> {
    check_subset(group, subset)?;
    let sums = group
        .elements()
        .map(|pos| {
            let chi = CharIndex::from_position(group, pos);
            let mut acc = CompensatedSum::default();
            for &x in subset {
                acc.add(char_value(group, chi, x));
            }
            acc.value()
        })
        .collect();
    Ok(finish(group, sums, subset.len()))
}

/// Point-level entry: profile of a set of curve points.
pub fn char_sum_profile_points(gs: &GroupStructure, subset: &[Point]) -> Result<CharSumProfile> {
    char_sum_profile(gs.group(), &gs.indices_of(subset)?)
}

/// Number of characters of order exactly d.
pub fn count_chars_order_eq(group: &AbelianGroup, d: usize) -> usize {
    if d == 0 || !group.exponent().is_multiple_of(d) {
        return 0;
    }
    let count = group.elements().filter(|&pos| group.element_order(pos) == d).count();
    assert!(d == 1 || count < d * d, "φ({d}) = {count} exceeds d^2 - 1");
    count
}

/// |S|: characters of order greater than k.
pub fn count_chars_order_gt(group: &AbelianGroup, k: usize) -> usize {
    let small: usize = (1..=k.min(group.exponent()))
        .filter(|d| group.exponent().is_multiple_of(*d))
        .map(|d| count_chars_order_eq(group, d))
        .sum();
    group.order() - small
}

/// Number of characters of order exactly d, by the closed form
/// Σ_{e | d} μ(d/e) · gcd(e, n1) · gcd(e, n2).
pub fn chars_of_order_formula(group: &AbelianGroup, d: usize) -> i64 {
    let mobius = |mut n: usize| -> i64 {
        let mut sign = 1;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                sign = -sign;
            }
            p += 1;
        }
        if n > 1 {
            sign = -sign;
        }
        sign
    };
    (1..=d)
        .filter(|e| d.is_multiple_of(*e))
        .map(|e| mobius(d / e) * (e.gcd(&group.n1()) * e.gcd(&group.n2())) as i64)
        .sum()
}
