//! Parameter sweeps over curves, evaluation sets and dimensions.

use std::collections::HashSet;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::binomial::binomial_f64;
use crate::bound::certify_positive_symmetric;
use crate::chars::char_sum_profile;
use crate::ec::{reduced_curves, GroupStructure};
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::group::AbelianGroup;
use crate::ssp::{count_subset_sums_indices, shift_tables};

/// Largest field order a scan accepts.
pub const MAX_SCAN_Q: u32 = 1024;
/// Largest number of subsets the exhaustive check enumerates per group.
pub const MAX_EXHAUSTIVE_SUBSETS: f64 = 1e8;

/// How the code length n is chosen from q and |G|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NPolicy {
    /// n = q + 2.
    QPlus2,
    /// n = ⌈R·|G|⌉, capped at |G| - 2.
    Ratio(f64),
}

impl NPolicy {
    /// Length for a curve with `order` points, or `None` when O and a divisor
    /// point no longer fit outside D.
    pub fn length(&self, q: u32, order: usize) -> Option<usize> {
        let n = match *self {
            NPolicy::QPlus2 => q as usize + 2,
            NPolicy::Ratio(r) => ((r * order as f64).ceil() as usize).min(order.saturating_sub(2)),
        };
        (n >= 2 && n + 2 <= order).then_some(n)
    }
}

impl FromStr for NPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<NPolicy> {
        let s = s.trim();
        if s == "q+2" {
            return Ok(NPolicy::QPlus2);
        }
        if let Some(r) = s.strip_prefix("ratio:") {
            let r: f64 = r
                .parse()
                .map_err(|_| Error::ParameterOutOfRange(format!("bad ratio {r:?}")))?;
            if r > 0.0 && r <= 1.0 {
                return Ok(NPolicy::Ratio(r));
            }
            return Err(Error::ParameterOutOfRange(format!("ratio {r} outside (0, 1]")));
        }
        Err(Error::ParameterOutOfRange(format!("unknown n-policy {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub q_values: Vec<u32>,
    pub n_policy: NPolicy,
    /// Inclusive dimension range; defaults to 1 and n - 1.
    pub k_min: Option<usize>,
    pub k_max: Option<usize>,
    /// Curves per field; `None` takes every class.
    pub curves_per_q: Option<usize>,
    pub subsets_per_curve: usize,
    pub seed: u64,
}

impl ScanConfig {
    pub fn new(q_values: Vec<u32>, n_policy: NPolicy, seed: u64) -> ScanConfig {
        ScanConfig {
            q_values,
            n_policy,
            k_min: None,
            k_max: None,
            curves_per_q: None,
            subsets_per_curve: 1,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub q: u32,
    pub curve_id: String,
    #[serde(rename = "N_points")]
    pub n_points: usize,
    pub n1: usize,
    pub n2: usize,
    pub n: usize,
    pub k: usize,
    /// min_b N(k, b, D), as a decimal string.
    #[serde(rename = "minN")]
    pub min_n: String,
    pub certified: bool,
    /// Worst minimum distance over divisor points outside D.
    pub d: usize,
    pub is_mds: bool,
    pub wall_ms: u64,
}

/// Smallest k0 such that N(k, b, D) > 0 for every b and k0 ≤ k ≤ n - k0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdPoint {
    pub q: u32,
    pub curve_id: String,
    pub n: usize,
    pub ratio: f64,
    pub k_star: usize,
}

/// `k* ≈ c ln q`, least squares through the origin on the per-q maxima.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdFit {
    pub per_q: Vec<(u32, usize)>,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub thresholds: Vec<ThresholdPoint>,
    pub fit: Option<ThresholdFit>,
    pub curves_scanned: usize,
}

/// Reduced curves over `field` with at least `min_order` points, one per
/// (j-invariant, group structure) pair. With `limit`, the reduced list is
/// shuffled by `seed` and the first `limit` new pairs are kept; otherwise
/// every pair is returned in coefficient order.
pub fn select_curves(field: &Field, min_order: usize, limit: Option<usize>, seed: u64) -> Result<Vec<GroupStructure>> {
    let mut curves = reduced_curves(field);
    if limit.is_some() {
        curves.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in curves {
        if limit.is_some_and(|l| out.len() >= l) {
            break;
        }
        if c.count_points()? < min_order {
            continue;
        }
        let gs = GroupStructure::new(&c)?;
        if seen.insert((c.j_invariant(), gs.n1(), gs.n2())) {
            out.push(gs);
        }
    }
    Ok(out)
}

struct Task {
    q: u32,
    gs: GroupStructure,
    n: usize,
    stream: u64,
}

fn k_range(config: &ScanConfig, n: usize) -> (usize, usize) {
    let lo = config.k_min.unwrap_or(1).max(1);
    let hi = config.k_max.unwrap_or(n - 1).min(n - 1);
    (lo, hi)
}

fn run_task(config: &ScanConfig, task: &Task) -> Result<(Vec<ScanRow>, ThresholdPoint)> {
    let start = Instant::now();
    let group = task.gs.group();
    let n = task.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(task.stream);
    let mut pool: Vec<usize> = group.elements().filter(|&g| g != group.zero()).collect();
    pool.shuffle(&mut rng);
    let mut subset = pool[..n].to_vec();
    subset.sort_unstable();

    let (lo, hi) = k_range(config, n);
    let table = count_subset_sums_indices(group, &subset, hi.max(n / 2))?;
    let profile = char_sum_profile(group, &subset)?;
    let in_d: HashSet<usize> = subset.iter().copied().collect();
    let outside: Vec<usize> = group.elements().filter(|g| !in_d.contains(g)).collect();

    let k_star = (1..=n / 2)
        .rev()
        .find(|&k| table.min_count(k).is_zero())
        .map_or(1, |k| k + 1);
    let curve = task.gs.curve();
    let mut rows = Vec::new();
    for k in lo..=hi {
        let min_n = table.min_count(k);
        let certified = certify_positive_symmetric(group, &profile, n, k)?;
        let mds = outside.iter().any(|&p| table.count(k, p).is_zero());
        rows.push(ScanRow {
            q: task.q,
            curve_id: curve.id(),
            n_points: group.order(),
            n1: group.n1(),
            n2: group.n2(),
            n,
            k,
            min_n: min_n.to_string(),
            certified,
            d: if mds { n - k + 1 } else { n - k },
            is_mds: mds,
            wall_ms: 0,
        });
    }
    let wall_ms = start.elapsed().as_millis() as u64;
    for r in &mut rows {
        r.wall_ms = wall_ms;
    }
    let threshold = ThresholdPoint {
        q: task.q,
        curve_id: curve.id(),
        n,
        ratio: n as f64 / group.order() as f64,
        k_star,
    };
    Ok((rows, threshold))
}

/// Least-squares slope of k* against ln q through the origin, using the
/// largest k* seen for each q.
pub fn fit_threshold(points: &[ThresholdPoint]) -> Option<ThresholdFit> {
    let mut per_q: Vec<(u32, usize)> = Vec::new();
    for p in points {
        match per_q.iter_mut().find(|(q, _)| *q == p.q) {
            Some(entry) => entry.1 = entry.1.max(p.k_star),
            None => per_q.push((p.q, p.k_star)),
        }
    }
    per_q.sort_unstable();
    let (num, den) = per_q
        .iter()
        .filter(|(q, _)| *q > 1)
        .fold((0.0, 0.0), |(num, den), &(q, k)| {
            let l = (q as f64).ln();
            (num + k as f64 * l, den + l * l)
        });
    (den > 0.0).then(|| ThresholdFit { per_q, c: num / den })
}

/// Samples (curve, D) pairs per the config, counts subset sums for every k in
/// range and records minimum counts, bound certificates and the worst
/// minimum distance over divisor points outside D. Runs on the current rayon
/// pool; output order does not depend on scheduling.
pub fn scan_region(config: &ScanConfig) -> Result<ScanReport> {
    let mut tasks = Vec::new();
    for &q in &config.q_values {
        if q > MAX_SCAN_Q {
            return Err(Error::CapExceeded(format!("q = {q} exceeds {MAX_SCAN_Q}")));
        }
        let field = Field::of_order(q)?;
        let min_order = match config.n_policy {
            NPolicy::QPlus2 => q as usize + 4,
            NPolicy::Ratio(_) => 4,
        };
        let curves = select_curves(&field, min_order, config.curves_per_q, config.seed ^ q as u64)?;
        for gs in curves {
            let Some(n) = config.n_policy.length(q, gs.order()) else {
                continue;
            };
            for _ in 0..config.subsets_per_curve {
                let stream = tasks.len() as u64;
                tasks.push(Task {
                    q,
                    gs: gs.clone(),
                    n,
                    stream,
                });
            }
        }
    }
    let curves_scanned = tasks.len() / config.subsets_per_curve.max(1);
    let results: Vec<(Vec<ScanRow>, ThresholdPoint)> =
        tasks.par_iter().map(|t| run_task(config, t)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut thresholds = Vec::new();
    for (r, t) in results {
        rows.extend(r);
        thresholds.push(t);
    }
    let fit = fit_threshold(&thresholds);
    Ok(ScanReport {
        rows,
        thresholds,
        fit,
        curves_scanned,
    })
}

/// A divisor point P, dimension k and evaluation set D with N(k, P, D) = 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MdsWitness {
    pub k: usize,
    pub p: usize,
    pub subset: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupMdsCheck {
    pub n1: usize,
    pub n2: usize,
    pub n: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub subsets: u64,
    /// Number of (D, k, P) triples giving an MDS code.
    pub mds_instances: u64,
    pub witness: Option<MdsWitness>,
}

impl GroupMdsCheck {
    fn merge(mut self, other: GroupMdsCheck) -> GroupMdsCheck {
        self.subsets += other.subsets;
        self.mds_instances += other.mds_instances;
        self.witness = self.witness.or(other.witness);
        self
    }
}

/// Every D ⊆ G \ {0} with |D| = n, every k in range and every P ∉ D:
/// counts the triples with N(k, P, D) = 0.
///
/// Subsets are enumerated depth-first with one DP table per depth, so
/// prefixes share their counts.
pub fn exhaustive_mds_check(group: &AbelianGroup, n: usize, k_min: usize, k_max: usize) -> Result<GroupMdsCheck> {
    let pool: Vec<usize> = group.elements().filter(|&g| g != group.zero()).collect();
    if n > pool.len() || k_min == 0 || k_min > k_max || k_max >= n {
        return Err(Error::ParameterOutOfRange(format!(
            "n = {n}, k in [{k_min}, {k_max}] for |G| = {}",
            group.order()
        )));
    }
    let total = binomial_f64(pool.len() as u64, n as u64);
    if total > MAX_EXHAUSTIVE_SUBSETS {
        return Err(Error::CapExceeded(format!("{total:.3e} subsets of size {n}")));
    }
    let shifts = shift_tables(group, &pool);
    let empty = GroupMdsCheck {
        n1: group.n1(),
        n2: group.n2(),
        n,
        k_min,
        k_max,
        subsets: 0,
        mds_instances: 0,
        witness: None,
    };
    let firsts: Vec<usize> = (0..=pool.len() - n).collect();
    let result = firsts
        .par_iter()
        .map(|&first| {
            let mut walker = Walker::new(group, &pool, &shifts, n, k_min, k_max);
            walker.push(first);
            walker.descend(first + 1);
            walker.result
        })
        .reduce(|| empty.clone(), GroupMdsCheck::merge);
    Ok(GroupMdsCheck {
        n1: group.n1(),
        n2: group.n2(),
        n,
        k_min,
        k_max,
        ..result
    })
}

struct Walker<'a> {
    order: usize,
    pool: &'a [usize],
    shifts: &'a [Vec<u32>],
    n: usize,
    k_min: usize,
    k_max: usize,
    stack: Vec<Vec<u64>>,
    chosen: Vec<usize>,
    in_d: Vec<bool>,
    result: GroupMdsCheck,
}

impl<'a> Walker<'a> {
    fn new(
        group: &AbelianGroup,
        pool: &'a [usize],
        shifts: &'a [Vec<u32>],
        n: usize,
        k_min: usize,
        k_max: usize,
    ) -> Walker<'a> {
        let order = group.order();
        let mut base = vec![0u64; (k_max + 1) * order];
        base[group.zero()] = 1;
        Walker {
            order,
            pool,
            shifts,
            n,
            k_min,
            k_max,
            stack: vec![base],
            chosen: Vec::with_capacity(n),
            in_d: vec![false; order],
            result: GroupMdsCheck {
                n1: 0,
                n2: 0,
                n,
                k_min,
                k_max,
                subsets: 0,
                mds_instances: 0,
                witness: None,
            },
        }
    }

    fn push(&mut self, idx: usize) {
        let order = self.order;
        let prev = self.stack.last().expect("base table");
        let mut next = prev.clone();
        let shift = &self.shifts[idx];
        let depth = self.chosen.len();
        for j in (1..=self.k_max.min(depth + 1)).rev() {
            let src = &prev[(j - 1) * order..j * order];
            let dst = &mut next[j * order..(j + 1) * order];
            for (g, &v) in src.iter().enumerate() {
                if v != 0 {
                    dst[shift[g] as usize] += v;
                }
            }
        }
        self.stack.push(next);
        self.chosen.push(idx);
        self.in_d[self.pool[idx]] = true;
    }

    fn pop(&mut self) {
        let idx = self.chosen.pop().expect("nonempty");
        self.in_d[self.pool[idx]] = false;
        self.stack.pop();
    }

    fn descend(&mut self, from: usize) {
        if self.chosen.len() == self.n {
            self.leaf();
            return;
        }
        let need = self.n - self.chosen.len();
        for idx in from..=self.pool.len() - need {
            self.push(idx);
            self.descend(idx + 1);
            self.pop();
        }
    }

    fn leaf(&mut self) {
        self.result.subsets += 1;
        let table = self.stack.last().expect("leaf table");
        for k in self.k_min..=self.k_max {
            let row = &table[k * self.order..(k + 1) * self.order];
            for (p, &count) in row.iter().enumerate() {
                if !self.in_d[p] && count == 0 {
                    self.result.mds_instances += 1;
                    if self.result.witness.is_none() {
                        let subset = self.chosen.iter().map(|&i| self.pool[i]).collect();
                        self.result.witness = Some(MdsWitness { k, p, subset });
                    }
                }
            }
        }
    }
}

/// Distinct point groups among curves over `field` with at least
/// `min_order` points.
pub fn distinct_groups(field: &Field, min_order: usize) -> Result<Vec<AbelianGroup>> {
    let mut seen = Vec::new();
    for c in reduced_curves(field) {
        if c.count_points()? < min_order {
            continue;
        }
        let g = *GroupStructure::new(&c)?.group();
        if !seen.contains(&g) {
            seen.push(g);
        }
    }
    seen.sort_by_key(|g| (g.order(), g.n2()));
    Ok(seen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_code, is_mds, EvaluationSet};
    use crate::ssp::count_subset_sums_indices;

    #[test]
    fn n_policy_parsing() {
        assert_eq!("q+2".parse::<NPolicy>().unwrap(), NPolicy::QPlus2);
        assert_eq!("ratio:0.75".parse::<NPolicy>().unwrap(), NPolicy::Ratio(0.75));
        assert!("ratio:2".parse::<NPolicy>().is_err());
        assert!("half".parse::<NPolicy>().is_err());
        assert_eq!(NPolicy::QPlus2.length(5, 8), None);
        assert_eq!(NPolicy::QPlus2.length(5, 9), Some(7));
        assert_eq!(NPolicy::Ratio(1.0).length(5, 10), Some(8));
    }

    #[test]
    fn scan_is_deterministic_and_consistent() {
        let mut config = ScanConfig::new(vec![7, 8], NPolicy::Ratio(0.8), 42);
        config.subsets_per_curve = 2;
        let a = scan_region(&config).unwrap();
        let b = scan_region(&config).unwrap();
        let strip = |r: &ScanReport| {
            r.rows
                .iter()
                .map(|row| ScanRow {
                    wall_ms: 0,
                    ..row.clone()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert!(!a.rows.is_empty());
        for row in &a.rows {
            assert!(row.d + row.k == row.n || row.d + row.k == row.n + 1);
            if row.certified {
                assert_ne!(row.min_n, "0");
            }
        }
    }

    #[test]
    fn scan_rows_agree_with_code_construction() {
        let mut config = ScanConfig::new(vec![5], NPolicy::Ratio(0.6), 9);
        config.curves_per_q = Some(3);
        let report = scan_region(&config).unwrap();
        // Rebuild the row's worst case from codes for one curve.
        let row = &report.rows[0];
        let field = Field::of_order(5).unwrap();
        let gs = select_curves(&field, 4, Some(3), 9 ^ 5)
            .unwrap()
            .into_iter()
            .find(|gs| gs.curve().id() == row.curve_id)
            .unwrap();
        let n = row.n;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        rng.set_stream(0);
        let mut pool: Vec<usize> = gs.group().elements().filter(|&g| g != 0).collect();
        pool.shuffle(&mut rng);
        let mut subset = pool[..n].to_vec();
        subset.sort_unstable();
        let pts: Vec<_> = subset.iter().map(|&i| gs.point(i)).collect();
        let mut any_mds = false;
        for p in gs.group().elements().filter(|g| !subset.contains(g)) {
            let p = gs.point(p);
            let d = EvaluationSet::new(gs.curve(), pts.clone(), &p).unwrap();
            let code = build_code(gs.curve(), &d, row.k, &p).unwrap();
            any_mds |= is_mds(&gs, &code).unwrap();
        }
        assert_eq!(any_mds, row.is_mds);
    }

    #[test]
    fn exhaustive_check_matches_direct_enumeration() {
        let g = AbelianGroup::new(6, 2).unwrap();
        let check = exhaustive_mds_check(&g, 6, 2, 4).unwrap();
        assert_eq!(check.subsets, 462);
        let pool: Vec<usize> = (1..12).collect();
        let mut expected = 0u64;
        for mask in 0u32..(1 << 11) {
            if mask.count_ones() != 6 {
                continue;
            }
            let d: Vec<usize> = (0..11).filter(|i| mask >> i & 1 == 1).map(|i| pool[i]).collect();
            let t = count_subset_sums_indices(&g, &d, 4).unwrap();
            for k in 2..=4 {
                expected += (0..12).filter(|p| !d.contains(p) && t.count(k, *p).is_zero()).count() as u64;
            }
        }
        assert_eq!(check.mds_instances, expected);
        assert_eq!(check.witness.is_some(), expected > 0);
    }

    #[test]
    fn threshold_fit_through_origin() {
        let pts: Vec<ThresholdPoint> = [(8u32, 4usize), (16, 5), (16, 6)]
            .iter()
            .map(|&(q, k_star)| ThresholdPoint {
                q,
                curve_id: String::new(),
                n: 0,
                ratio: 0.0,
                k_star,
            })
            .collect();
        let fit = fit_threshold(&pts).unwrap();
        assert_eq!(fit.per_q, vec![(8, 4), (16, 6)]);
        let (l8, l16) = (8f64.ln(), 16f64.ln());
        let c = (4.0 * l8 + 6.0 * l16) / (l8 * l8 + l16 * l16);
        assert!((fit.c - c).abs() < 1e-12);
    }
}
