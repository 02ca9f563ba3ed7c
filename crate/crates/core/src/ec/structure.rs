use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use super::{Curve, Point};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;

/// Which branch of the classification of point groups of elliptic curves
/// over F_q (Waterhouse, Rück) a computed group falls into. `t` is the trace
/// q + 1 - N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StructureCase {
    /// p does not divide t, t^2 <= 4q, n2 | gcd(n1, q - 1).
    Ordinary,
    /// q square, t = ±2√q, G ≅ (Z/(√q ∓ 1))^2.
    SquareFull,
    /// q square, p ≢ 1 (mod 3), t = ±√q, cyclic.
    SquareHalf,
    /// q nonsquare, p ∈ {2, 3}, t = ±√(pq), cyclic.
    NonsquareSmallChar,
    /// t = 0 and G cyclic, with q nonsquare or p ≢ 1 (mod 4).
    TraceZeroCyclic,
    /// q nonsquare, q ≡ 3 (mod 4), t = 0, G ≅ Z/((q+1)/2) × Z/2.
    TraceZeroSplit,
    /// Matches none of the above.
    Unclassified,
}

impl StructureCase {
    pub fn label(&self) -> &'static str {
        match self {
            StructureCase::Ordinary => "i",
            StructureCase::SquareFull => "ii",
            StructureCase::SquareHalf => "iii",
            StructureCase::NonsquareSmallChar => "iv",
            StructureCase::TraceZeroCyclic => "v",
            StructureCase::TraceZeroSplit => "vi",
            StructureCase::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for StructureCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    (r.checked_mul(r) == Some(n)).then_some(r)
}

/// Classifies a group Z/n1 × Z/n2 of order N = n1 n2 as the point group of a
/// curve over F_q with q = p^e.
pub fn classify_structure(p: u64, e: u32, n1: u64, n2: u64) -> StructureCase {
    let q = p.pow(e);
    let order = n1 * n2;
    let t = q as i128 + 1 - order as i128;
    let cyclic = n2 == 1;
    let square = e.is_multiple_of(2);
    let sqrt_q = exact_sqrt(q).map(|r| r as i128);

    if t.rem_euclid(p as i128) != 0 && t * t <= 4 * q as i128 {
        if n1.is_multiple_of(n2) && (q - 1).is_multiple_of(n2) {
            return StructureCase::Ordinary;
        }
        return StructureCase::Unclassified;
    }
    if let (true, Some(s)) = (square, sqrt_q) {
        if t.abs() == 2 * s {
            let a = if t > 0 { s - 1 } else { s + 1 };
            return if n1 as i128 == a && n2 as i128 == a {
                StructureCase::SquareFull
            } else {
                StructureCase::Unclassified
            };
        }
        if t.abs() == s && p % 3 != 1 && cyclic {
            return StructureCase::SquareHalf;
        }
    }
    if !square && (p == 2 || p == 3) {
        if let Some(s) = exact_sqrt(p * q) {
            if t.abs() == s as i128 && cyclic {
                return StructureCase::NonsquareSmallChar;
            }
        }
    }
    if t == 0 {
        if cyclic && (!square || p % 4 != 1) {
            return StructureCase::TraceZeroCyclic;
        }
        if !square && q % 4 == 3 && n2 == 2 && n1 == q.div_ceil(2) {
            return StructureCase::TraceZeroSplit;
        }
    }
    StructureCase::Unclassified
}

/// The point group decomposed as Z/n1 × Z/n2, with the discrete-log
/// coordinates of every point relative to the basis (g1, g2).
#[derive(Debug, Clone)]
pub struct GroupStructure {
    curve: Curve,
    group: AbelianGroup,
    g1: Point,
    g2: Point,
    /// Point with coordinates (a, b) sits at `group.index(a, b)`.
    points: Vec<Point>,
    index: HashMap<Point, usize>,
    case: StructureCase,
}

impl GroupStructure {
    pub fn new(curve: &Curve) -> Result<GroupStructure> {
        let pts = curve.points()?;
        let order = pts.len();
        let divisors: Vec<usize> = (1..=order).filter(|d| order % d == 0).collect();
        let point_order = |p: &Point| -> usize {
            *divisors
                .iter()
                .find(|&&d| curve.scalar_mul_unchecked(d as i64, p).is_infinity())
                .expect("N annihilates every point")
        };

        let mut n1 = 1;
        let mut g1 = Point::Infinity;
        for p in &pts {
            let o = point_order(p);
            if o > n1 {
                n1 = o;
                g1 = *p;
            }
        }
        // In a finite abelian group the maximal element order is the exponent.
        let n2 = order / n1;
        if n1 % n2 != 0 {
            return Err(Error::DecompositionFailure(format!(
                "n2 = {n2} does not divide n1 = {n1}"
            )));
        }

        let multiples = |g: &Point, n: usize| -> Vec<Point> {
            let mut out = Vec::with_capacity(n);
            let mut cur = Point::Infinity;
            for _ in 0..n {
                out.push(cur);
                cur = curve.add_unchecked(&cur, g);
            }
            out
        };
        let along_g1 = multiples(&g1, n1);
        let group = AbelianGroup::new(n1, n2)?;

        let try_basis = |g2: &Point| -> Option<(Vec<Point>, HashMap<Point, usize>)> {
            let along_g2 = multiples(g2, n2);
            let mut table = vec![Point::Infinity; order];
            let mut index = HashMap::with_capacity(order);
            for (a, pa) in along_g1.iter().enumerate() {
                for (b, pb) in along_g2.iter().enumerate() {
                    let p = curve.add_unchecked(pa, pb);
                    let i = group.index(a, b);
                    if index.insert(p, i).is_some() {
                        return None;
                    }
                    table[i] = p;
                }
            }
            Some((table, index))
        };

        let found = if n2 == 1 {
            try_basis(&Point::Infinity).map(|t| (Point::Infinity, t))
        } else {
            pts.iter()
                .filter(|p| !p.is_infinity() && curve.scalar_mul_unchecked(n2 as i64, p).is_infinity())
                .find_map(|g2| try_basis(g2).map(|t| (*g2, t)))
        };
        let (g2, (points, index)) = found
            .ok_or_else(|| Error::DecompositionFailure(format!("no complement to <g1> in a group of order {order}")))?;

        let field = curve.field();
        let case = classify_structure(field.characteristic() as u64, field.degree(), n1 as u64, n2 as u64);
        if case == StructureCase::Unclassified {
            log::warn!(
                "curve {} over F_{}: Z/{n1} x Z/{n2} matches no structure case",
                curve.id(),
                field.order()
            );
        }

        Ok(GroupStructure {
            curve: curve.clone(),
            group,
            g1,
            g2,
            points,
            index,
            case,
        })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn n1(&self) -> usize {
        self.group.n1()
    }

    pub fn n2(&self) -> usize {
        self.group.n2()
    }

    pub fn generators(&self) -> (Point, Point) {
        (self.g1, self.g2)
    }

    pub fn case(&self) -> StructureCase {
        self.case
    }

    /// Trace of Frobenius t = q + 1 - N.
    pub fn trace(&self) -> i64 {
        self.curve.field().order() as i64 + 1 - self.order() as i64
    }

    /// Points ordered by group index, so `points()[0]` is O.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Points in (x, y) order with O first.
    pub fn sorted_points(&self) -> Vec<Point> {
        let mut v = self.points.clone();
        v.sort();
        v
    }

    pub fn point(&self, index: usize) -> Point {
        self.points[index]
    }

    pub fn index_of(&self, p: &Point) -> Result<usize> {
        self.index.get(p).copied().ok_or(Error::UnknownPoint)
    }

    pub fn coords_of(&self, p: &Point) -> Result<(usize, usize)> {
        Ok(self.group.coords(self.index_of(p)?))
    }

    pub fn indices_of(&self, pts: &[Point]) -> Result<Vec<usize>> {
        pts.iter().map(|p| self.index_of(p)).collect()
    }

    /// Every point except those listed.
    pub fn complement(&self, exclude: &[Point]) -> Result<Vec<Point>> {
        for p in exclude {
            self.index_of(p)?;
        }
        Ok(self
            .sorted_points()
            .into_iter()
            .filter(|p| !exclude.contains(p))
            .collect())
    }

    pub fn gcd_n1_q_minus_1(&self) -> usize {
        self.n1().gcd(&(self.curve.field().order() as usize - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::{all_curves, reduced_curves};
    use crate::ff::Field;

    #[test]
    fn f5_curve_is_cyclic_of_order_nine() {
        let f = Field::prime(5).unwrap();
        let c = Curve::short(f.clone(), f.from_int(1), f.from_int(1)).unwrap();
        let gs = c.group_structure().unwrap();
        assert_eq!((gs.order(), gs.n1(), gs.n2()), (9, 9, 1));
        assert_eq!(gs.case(), StructureCase::Ordinary);
        let (g1, _) = gs.generators();
        assert_eq!(c.scalar_mul(9, &g1).unwrap(), Point::Infinity);
        assert_ne!(c.scalar_mul(3, &g1).unwrap(), Point::Infinity);
    }

    #[test]
    fn coordinates_reproduce_points() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Field::of_order(q).unwrap();
            for c in reduced_curves(&f) {
                let gs = c.group_structure().unwrap();
                let (g1, g2) = gs.generators();
                for (i, p) in gs.points().iter().enumerate() {
                    let (a, b) = gs.group().coords(i);
                    let rebuilt = c
                        .add(
                            &c.scalar_mul(a as i64, &g1).unwrap(),
                            &c.scalar_mul(b as i64, &g2).unwrap(),
                        )
                        .unwrap();
                    assert_eq!(&rebuilt, p);
                    assert_eq!(gs.index_of(p).unwrap(), i);
                }
                assert_ne!(gs.case(), StructureCase::Unclassified, "q={q} curve {}", c.id());
                assert_eq!(gs.order() % gs.n1(), 0);
                assert_eq!(gs.gcd_n1_q_minus_1() % gs.n2(), 0);
            }
        }
    }

    #[test]
    fn prime_order_groups_are_cyclic() {
        let f = Field::prime(7).unwrap();
        for c in all_curves(&f).take(400) {
            let gs = c.group_structure().unwrap();
            if crate::ff::is_prime(gs.order() as u64) {
                assert_eq!(gs.n2(), 1);
            }
        }
    }

    #[test]
    fn full_two_torsion_over_f9_or_smaller() {
        // Some curve over a small field has a non-cyclic group; its n2 must
        // divide q - 1.
        let mut seen = false;
        for q in [3u32, 5, 7, 9, 11, 13] {
            let f = Field::of_order(q).unwrap();
            for c in reduced_curves(&f) {
                let gs = c.group_structure().unwrap();
                if gs.n2() > 1 {
                    seen = true;
                    assert_eq!((q as usize - 1) % gs.n2(), 0);
                }
            }
        }
        assert!(seen);
    }

    #[test]
    fn classification_examples() {
        // q = 5, N = 9: t = -3, ordinary, cyclic.
        assert_eq!(classify_structure(5, 1, 9, 1), StructureCase::Ordinary);
        // (Z/3)^2 needs 3 | q - 1, impossible over F_5.
        assert_eq!(classify_structure(5, 1, 3, 3), StructureCase::Unclassified);
        // y^2 + y = x^3 over F_4 has t = -4 = -2√4: (Z/3)^2.
        assert_eq!(classify_structure(2, 2, 3, 3), StructureCase::SquareFull);
        // q = 3, t = 0: cyclic of order 4 or Z/2 x Z/2.
        assert_eq!(classify_structure(3, 1, 4, 1), StructureCase::TraceZeroCyclic);
        assert_eq!(classify_structure(3, 1, 2, 2), StructureCase::TraceZeroSplit);
    }
}
