//! Exact evaluation of the character-sum bound on |N(k, b, D) - C(n, k)/|G||
//! and the positivity certificate it yields.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::binomial::{binom, binomial, from_biguint, ratio_string, rational};
use crate::chars::{count_chars_order_eq, count_chars_order_gt, CharSumProfile};
use crate::ec::GroupStructure;
use crate::error::{Error, Result};
use crate::group::AbelianGroup;

fn as_ratio<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(x))
}

/// Contribution of the characters of order exactly d, 2 < d ≤ k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisorTerm {
    pub d: usize,
    pub phi_d: usize,
    #[serde(serialize_with = "as_ratio")]
    pub value: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub group_order: usize,
    pub n: usize,
    pub k: usize,
    /// Φ(D) as measured, before the tolerance is added.
    pub phi: f64,
    #[serde(serialize_with = "as_ratio")]
    pub phi_used: BigRational,
    /// |S|, the number of characters of order greater than k.
    pub s_count: usize,
    #[serde(serialize_with = "as_ratio")]
    pub main_term: BigRational,
    #[serde(serialize_with = "as_ratio")]
    pub term_s: BigRational,
    #[serde(serialize_with = "as_ratio")]
    pub term_d2: BigRational,
    /// The raw order-2 binomial was negative and has been replaced by 0.
    pub term_d2_clamped: bool,
    pub terms_d: Vec<DivisorTerm>,
    #[serde(serialize_with = "as_ratio")]
    pub rhs_total: BigRational,
    pub certified_positive: bool,
}

/// The single-binomial majorant `C(M, k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MBound {
    #[serde(serialize_with = "as_ratio")]
    pub m: BigRational,
    pub k: usize,
    /// Smallest divisor of |G| above 2, when it is at most k.
    pub d: Option<usize>,
    #[serde(serialize_with = "as_ratio")]
    pub bound: BigRational,
}

fn check_args(group: &AbelianGroup, profile: &CharSumProfile, n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n || n > group.order() {
        return Err(Error::ParameterOutOfRange(format!(
            "need 1 <= k <= n <= |G|, got k = {k}, n = {n}, |G| = {}",
            group.order()
        )));
    }
    if profile.size != n {
        return Err(Error::ParameterOutOfRange(format!(
            "profile was computed for |D| = {}, not n = {n}",
            profile.size
        )));
    }
    Ok(())
}

fn phi_used(profile: &CharSumProfile) -> Result<BigRational> {
    BigRational::from_f64(profile.phi_upper())
        .ok_or_else(|| Error::ParameterOutOfRange(format!("Φ = {} is not finite", profile.phi)))
}

/// Evaluates every term of the bound exactly for a subset of size n with the
/// given character-sum profile.
pub fn eval_bound_group(group: &AbelianGroup, profile: &CharSumProfile, n: usize, k: usize) -> Result<BoundReport> {
    check_args(group, profile, n, k)?;
    let order = rational(group.order() as i64);
    let phi = phi_used(profile)?;
    let kk = k as u64;
    let shift = rational(k as i64 - 1);
    let n_phi = rational(n as i64) + &phi;

    let main_term = from_biguint(&binomial(n as u64, kk)) / &order;
    let s_count = count_chars_order_gt(group, k);
    let term_s = rational(s_count as i64) * binom(&(&phi + &shift), kk) / &order;

    let raw_d2 = binom(&(&n_phi / rational(2)), kk) / &order;
    let term_d2_clamped = raw_d2.is_negative();
    if term_d2_clamped {
        log::debug!("order-2 term {} clamped to 0 (n = {n}, k = {k})", ratio_string(&raw_d2));
    }
    let term_d2 = if term_d2_clamped { BigRational::zero() } else { raw_d2 };

    let terms_d: Vec<DivisorTerm> = (3..=k.min(group.n1()))
        .filter(|d| group.n1().is_multiple_of(*d))
        .map(|d| {
            let phi_d = count_chars_order_eq(group, d);
            let top = &n_phi / rational(d as i64) + &shift;
            DivisorTerm {
                d,
                phi_d,
                value: rational(phi_d as i64) * binom(&top, kk) / &order,
            }
        })
        .collect();

    let rhs_total = terms_d.iter().fold(&term_s + &term_d2, |acc, t| acc + &t.value);
    let certified_positive = main_term > rhs_total;
    Ok(BoundReport {
        group_order: group.order(),
        n,
        k,
        phi: profile.phi,
        phi_used: phi,
        s_count,
        main_term,
        term_s,
        term_d2,
        term_d2_clamped,
        terms_d,
        rhs_total,
        certified_positive,
    })
}

pub fn eval_bound(gs: &GroupStructure, profile: &CharSumProfile, n: usize, k: usize) -> Result<BoundReport> {
    eval_bound_group(gs.group(), profile, n, k)
}

/// `M = max{Φ̂ + k - 1, (n + Φ̂)/2, (n + Φ̂)/d + k - 1}` with d the smallest
/// divisor of |G| exceeding 2; the last argument is dropped when d > k.
pub fn eval_m_bound_group(group: &AbelianGroup, profile: &CharSumProfile, n: usize, k: usize) -> Result<MBound> {
    check_args(group, profile, n, k)?;
    let phi = phi_used(profile)?;
    let shift = rational(k as i64 - 1);
    let n_phi = rational(n as i64) + &phi;
    let mut m = std::cmp::max(&phi + &shift, &n_phi / rational(2));
    let d = (3..=group.order())
        .find(|d| group.order().is_multiple_of(*d))
        .filter(|&d| d <= k);
    if let Some(d) = d {
        m = m.max(&n_phi / rational(d as i64) + &shift);
    }
    let bound = binom(&m, k as u64);
    Ok(MBound { m, k, d, bound })
}

pub fn eval_m_bound(gs: &GroupStructure, profile: &CharSumProfile, n: usize, k: usize) -> Result<MBound> {
    eval_m_bound_group(gs.group(), profile, n, k)
}

/// True when the main term strictly exceeds the error bound, which forces
/// N(k, b, D) > 0 for every b.
pub fn certify_positive_group(group: &AbelianGroup, profile: &CharSumProfile, n: usize, k: usize) -> Result<bool> {
    Ok(eval_bound_group(group, profile, n, k)?.certified_positive)
}

pub fn certify_positive(gs: &GroupStructure, profile: &CharSumProfile, n: usize, k: usize) -> Result<bool> {
    certify_positive_group(gs.group(), profile, n, k)
}

/// Certificate for k or for n - k, whichever is smaller.
///
/// Complementation inside D maps k-subsets summing to b onto (n-k)-subsets
/// summing to σ(D) - b, so positivity for every b transfers between the two.
pub fn certify_positive_symmetric(group: &AbelianGroup, profile: &CharSumProfile, n: usize, k: usize) -> Result<bool> {
    if k == n {
        return certify_positive_group(group, profile, n, k);
    }
    certify_positive_group(group, profile, n, k.min(n - k))
}
