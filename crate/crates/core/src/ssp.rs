//! Exact counts N(j, b, D) of j-subsets of D with group sum b.

use std::ops::AddAssign;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::binomial::binomial;
use crate::ec::{GroupStructure, Point};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;

/// Largest number of subsets [`brute_force_count`] will enumerate.
pub const BRUTE_FORCE_CAP: u64 = 10_000_000;

/// `N(j, g, D)` for 0 ≤ j ≤ k and every group index g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    group: AbelianGroup,
    n: usize,
    k: usize,
    rows: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// |D|.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn count(&self, j: usize, b: usize) -> &BigUint {
        &self.rows[j][b]
    }

    /// Counts for subsets of size j, indexed by group element.
    pub fn row(&self, j: usize) -> &[BigUint] {
        &self.rows[j]
    }

    pub fn min_count(&self, j: usize) -> &BigUint {
        self.rows[j].iter().min().expect("group is nonempty")
    }

    pub fn count_at(&self, gs: &GroupStructure, j: usize, b: &Point) -> Result<&BigUint> {
        Ok(self.count(j, gs.index_of(b)?))
    }
}

/// Counter types for the DP inner loop.
pub trait Count: Clone + Zero + One + for<'a> AddAssign<&'a Self> {
    fn into_biguint(self) -> BigUint;
}

impl Count for u64 {
    fn into_biguint(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Count for u128 {
    fn into_biguint(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Count for BigUint {
    fn into_biguint(self) -> BigUint {
        self
    }
}

pub(crate) fn validate_subset(group: &AbelianGroup, subset: &[usize]) -> Result<()> {
    let mut seen = vec![false; group.order()];
    for &e in subset {
        if e >= group.order() {
            return Err(Error::UnknownPoint);
        }
        if std::mem::replace(&mut seen[e], true) {
            return Err(Error::DuplicateElement);
        }
    }
    Ok(())
}

/// Translation tables `g ↦ g + e` for each element of the subset.
pub(crate) fn shift_tables(group: &AbelianGroup, subset: &[usize]) -> Vec<Vec<u32>> {
    subset
        .iter()
        .map(|&e| group.elements().map(|g| group.add(g, e) as u32).collect())
        .collect()
}

/// The in-place recurrence on a flat `(k+1) × |G|` table, processing each
/// element once and walking j downwards so every subset is counted once.
pub fn subset_sum_rows<T: Count>(group: &AbelianGroup, subset: &[usize], k: usize) -> Vec<T> {
    let order = group.order();
    let mut dp = vec![T::zero(); (k + 1) * order];
    dp[group.zero()] = T::one();
    for (processed, shift) in shift_tables(group, subset).iter().enumerate() {
        for j in (1..=k.min(processed + 1)).rev() {
            let (lower, upper) = dp.split_at_mut(j * order);
            let src = &lower[(j - 1) * order..];
            let dst = &mut upper[..order];
            for (g, value) in src.iter().enumerate() {
                if !value.is_zero() {
                    dst[shift[g] as usize] += value;
                }
            }
        }
    }
    dp
}

fn rows_to_table<T: Count>(group: &AbelianGroup, n: usize, k: usize, flat: Vec<T>) -> CountTable {
    let order = group.order();
    let mut rows = Vec::with_capacity(k + 1);
    let mut it = flat.into_iter();
    for _ in 0..=k {
        rows.push(it.by_ref().take(order).map(Count::into_biguint).collect());
    }
    CountTable {
        group: *group,
        n,
        k,
        rows,
    }
}

/// Full table of N(j, b, D) over the abstract group, D given by indices.
///
/// Counters are machine words whenever every C(|D|, j), j ≤ k, fits.
pub fn count_subset_sums_indices(group: &AbelianGroup, subset: &[usize], k: usize) -> Result<CountTable> {
    validate_subset(group, subset)?;
    let n = subset.len();
    if k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let peak = binomial(n as u64, (n / 2).min(k) as u64);
    let table = if peak <= BigUint::from(u64::MAX) {
        rows_to_table(group, n, k, subset_sum_rows::<u64>(group, subset, k))
    } else if peak <= BigUint::from(u128::MAX) {
        rows_to_table(group, n, k, subset_sum_rows::<u128>(group, subset, k))
    } else {
        rows_to_table(group, n, k, subset_sum_rows::<BigUint>(group, subset, k))
    };
    Ok(table)
}

/// Full table of N(j, b, D) for a point set D on the curve.
pub fn count_subset_sums(gs: &GroupStructure, subset: &[Point], k: usize) -> Result<CountTable> {
    if k == 0 || k > subset.len() {
        return Err(Error::KOutOfRange { k, n: subset.len() });
    }
    count_subset_sums_indices(gs.group(), &gs.indices_of(subset)?, k)
}

/// N(k, b, D) by enumerating every k-subset.
pub fn brute_force_count_indices(group: &AbelianGroup, subset: &[usize], k: usize, b: usize) -> Result<BigUint> {
    validate_subset(group, subset)?;
    let n = subset.len();
    if k > n {
        return Ok(BigUint::zero());
    }
    let total = binomial(n as u64, k as u64);
    if total > BigUint::from(BRUTE_FORCE_CAP) {
        return Err(Error::TooLarge(format!("C({n}, {k}) = {total} subsets")));
    }
    let mut hits = 0u64;
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        if group.sum(pick.iter().map(|&i| subset[i])) == b {
            hits += 1;
        }
        // Advance to the next k-combination in lexicographic order.
        let Some(pos) = (0..k).rev().find(|&i| pick[i] < n - k + i) else {
            break;
        };
        pick[pos] += 1;
        for i in pos + 1..k {
            pick[i] = pick[i - 1] + 1;
        }
    }
    Ok(BigUint::from(hits))
}

pub fn brute_force_count(gs: &GroupStructure, subset: &[Point], k: usize, b: &Point) -> Result<BigUint> {
    brute_force_count_indices(gs.group(), &gs.indices_of(subset)?, k, gs.index_of(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::Curve;
    use crate::ff::Field;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f5_curve() -> GroupStructure {
        let f = Field::prime(5).unwrap();
        let c = Curve::short(f.clone(), f.from_int(1), f.from_int(1)).unwrap();
        GroupStructure::new(&c).unwrap()
    }

    #[test]
    fn pairs_in_z5() {
        let g = AbelianGroup::cyclic(5);
        let all: Vec<usize> = g.elements().collect();
        let t = count_subset_sums_indices(&g, &all, 2).unwrap();
        assert_eq!(t.count(2, 0), &BigUint::from(2u32));
        for j in 0..=2 {
            let s: BigUint = t.row(j).iter().sum();
            assert_eq!(s, binomial(5, j as u64));
        }
    }

    #[test]
    fn singletons_and_empty_set() {
        let g = AbelianGroup::new(6, 2).unwrap();
        let d = [1, 4, 7, 11];
        let t = count_subset_sums_indices(&g, &d, 1).unwrap();
        for b in g.elements() {
            let expected = u32::from(d.contains(&b));
            assert_eq!(t.count(1, b), &BigUint::from(expected));
            assert_eq!(t.count(0, b), &BigUint::from(u32::from(b == g.zero())));
        }
        assert_eq!(brute_force_count_indices(&g, &d, 0, g.zero()).unwrap(), BigUint::one());
        let full = g.sum(d.iter().copied());
        assert_eq!(brute_force_count_indices(&g, &d, 4, full).unwrap(), BigUint::one());
    }

    #[test]
    fn errors() {
        let g = AbelianGroup::cyclic(5);
        assert!(matches!(
            count_subset_sums_indices(&g, &[1, 1], 1),
            Err(Error::DuplicateElement)
        ));
        assert!(matches!(
            count_subset_sums_indices(&g, &[1, 2], 3),
            Err(Error::KOutOfRange { .. })
        ));
        let big = AbelianGroup::cyclic(100);
        let all: Vec<usize> = big.elements().collect();
        assert!(matches!(
            brute_force_count_indices(&big, &all, 10, 0),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn all_points_of_the_f5_curve() {
        let gs = f5_curve();
        let pts = gs.sorted_points();
        let t = count_subset_sums(&gs, &pts, 4).unwrap();
        for b in &pts {
            assert_eq!(
                t.count_at(&gs, 4, b).unwrap(),
                &brute_force_count(&gs, &pts, 4, b).unwrap()
            );
        }
    }

    #[test]
    fn wide_counters_agree() {
        let g = AbelianGroup::new(10, 10).unwrap();
        let all: Vec<usize> = g.elements().collect();
        let narrow = count_subset_sums_indices(&g, &all, 12).unwrap();
        let wide = rows_to_table(&g, 100, 12, subset_sum_rows::<BigUint>(&g, &all, 12));
        assert_eq!(narrow, wide);
        // C(140, 70) exceeds u128.
        let h = AbelianGroup::cyclic(150);
        let d: Vec<usize> = (0..140).collect();
        let t = count_subset_sums_indices(&h, &d, 70).unwrap();
        let s: BigUint = t.row(70).iter().sum();
        assert_eq!(s, binomial(140, 70));
    }

    #[test]
    fn random_instances_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n1 = rng.gen_range(1..=20);
            let n2 = *[1, 2].choose(&mut rng).unwrap();
            let g = AbelianGroup::new(n1 * n2, n2).unwrap();
            let mut elems: Vec<usize> = g.elements().collect();
            elems.shuffle(&mut rng);
            elems.truncate(rng.gen_range(1..=elems.len().min(14)));
            let k = rng.gen_range(1..=elems.len().min(5));
            let t = count_subset_sums_indices(&g, &elems, k).unwrap();
            for b in g.elements() {
                assert_eq!(t.count(k, b), &brute_force_count_indices(&g, &elems, k, b).unwrap());
            }
        }
    }

    fn instance() -> impl Strategy<Value = (AbelianGroup, Vec<usize>, usize, usize)> {
        (1usize..=12, 1usize..=3)
            .prop_map(|(n1, n2)| AbelianGroup::new(n1 * n2, n2).unwrap())
            .prop_flat_map(|g| {
                let order = g.order();
                (
                    Just(g),
                    proptest::sample::subsequence((0..order).collect::<Vec<_>>(), 1..=order.min(16)),
                    0..order,
                )
            })
            .prop_flat_map(|(g, d, t)| {
                let n = d.len();
                (Just(g), Just(d), 0..=n, Just(t))
            })
    }

    proptest! {
        #[test]
        fn row_sums_are_binomials((g, d, k, _t) in instance()) {
            let table = count_subset_sums_indices(&g, &d, k).unwrap();
            for j in 0..=k {
                let s: BigUint = table.row(j).iter().sum();
                prop_assert_eq!(s, binomial(d.len() as u64, j as u64));
            }
        }

        #[test]
        fn translation_shifts_sums((g, d, k, t) in instance()) {
            let moved: Vec<usize> = d.iter().map(|&x| g.add(x, t)).collect();
            let base = count_subset_sums_indices(&g, &d, k).unwrap();
            let shifted = count_subset_sums_indices(&g, &moved, k).unwrap();
            let kt = g.scalar(k, t);
            for b in g.elements() {
                prop_assert_eq!(shifted.count(k, g.add(b, kt)), base.count(k, b));
            }
        }

        #[test]
        fn complement_identity((g, d, k, _t) in instance()) {
            let n = d.len();
            let table = count_subset_sums_indices(&g, &d, n).unwrap();
            let sigma = g.sum(d.iter().copied());
            for b in g.elements() {
                prop_assert_eq!(table.count(k, b), table.count(n - k, g.sub(sigma, b)));
            }
        }
    }
}
