//! Elliptic curves in general Weierstrass form
//! `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over a finite field.

mod structure;

pub use structure::{classify_structure, GroupStructure, StructureCase};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement, FieldSpec};

/// A rational point. `Infinity` is the group zero O and sorts first, affine
/// points follow in (x, y) order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Point {
    Infinity,
    Affine { x: FieldElement, y: FieldElement },
}

impl Point {
    pub fn affine(x: FieldElement, y: FieldElement) -> Point {
        Point::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<FieldElement> {
        match *self {
            Point::Affine { x, .. } => Some(x),
            Point::Infinity => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine { x, y } => write!(f, "{x},{y}"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Point, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Point {
    type Err = Error;

    /// Parses `O` or `x,y` with packed element indices.
    fn from_str(s: &str) -> Result<Point> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("o") || s.eq_ignore_ascii_case("inf") {
            return Ok(Point::Infinity);
        }
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::ParameterOutOfRange(format!("bad point {s:?}")))
        };
        match s.split_once(',') {
            Some((x, y)) => Ok(Point::Affine {
                x: FieldElement::from_index(parse(x)?),
                y: FieldElement::from_index(parse(y)?),
            }),
            None => Err(Error::ParameterOutOfRange(format!("bad point {s:?}"))),
        }
    }
}

/// A field element in JSON: a coefficient list, or a bare packed integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRepr {
    Coeffs(Vec<u32>),
    Packed(u32),
}

/// `{"field": {...}, "a": [a1, a2, a3, a4, a6]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub field: FieldSpec,
    pub a: [ElementRepr; 5],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    field: Field,
    a: [FieldElement; 5],
}

impl Curve {
    /// Coefficients are `[a1, a2, a3, a4, a6]`.
    pub fn new(field: Field, a: [FieldElement; 5]) -> Result<Curve> {
        if a.iter().any(|c| c.index() >= field.order()) {
            return Err(Error::FieldMismatch);
        }
        let curve = Curve { field, a };
        if curve.discriminant().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(curve)
    }

    /// `y^2 = x^3 + a4 x + a6`.
    pub fn short(field: Field, a4: FieldElement, a6: FieldElement) -> Result<Curve> {
        let z = FieldElement::ZERO;
        Curve::new(field, [z, z, z, a4, a6])
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Curve> {
        let field = Field::from_spec(&spec.field)?;
        let mut a = [FieldElement::ZERO; 5];
        for (slot, repr) in a.iter_mut().zip(&spec.a) {
            *slot = match repr {
                ElementRepr::Coeffs(c) => field.from_coeffs(c)?,
                ElementRepr::Packed(i) => field.element(*i)?,
            };
        }
        Curve::new(field, a)
    }

    pub fn spec(&self) -> CurveSpec {
        CurveSpec {
            field: self.field.spec(),
            a: self.a.map(|c| ElementRepr::Coeffs(self.field.coeffs(c))),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coefficients(&self) -> [FieldElement; 5] {
        self.a
    }

    /// Short identifier `a1-a2-a3-a4-a6` over packed indices.
    pub fn id(&self) -> String {
        self.a.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("-")
    }

    /// Discriminant of the general Weierstrass form.
    pub fn discriminant(&self) -> FieldElement {
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let k = |n: i64| f.from_int(n);
        let b2 = f.add(f.square(a1), f.mul(k(4), a2));
        let b4 = f.add(f.mul(k(2), a4), f.mul(a1, a3));
        let b6 = f.add(f.square(a3), f.mul(k(4), a6));
        // b8 = a1^2 a6 + 4 a2 a6 - a1 a3 a4 + a2 a3^2 - a4^2
        let b8 = [
            f.mul(f.square(a1), a6),
            f.mul(k(4), f.mul(a2, a6)),
            f.neg(f.mul(a1, f.mul(a3, a4))),
            f.mul(a2, f.square(a3)),
            f.neg(f.square(a4)),
        ]
        .into_iter()
        .fold(FieldElement::ZERO, |acc, t| f.add(acc, t));
        // -b2^2 b8 - 8 b4^3 - 27 b6^2 + 9 b2 b4 b6
        [
            f.neg(f.mul(f.square(b2), b8)),
            f.mul(k(-8), f.pow(b4, 3)),
            f.mul(k(-27), f.square(b6)),
            f.mul(k(9), f.mul(b2, f.mul(b4, b6))),
        ]
        .into_iter()
        .fold(FieldElement::ZERO, |acc, t| f.add(acc, t))
    }

    /// `j = c4^3 / Δ` with `c4 = b2^2 - 24 b4`.
    pub fn j_invariant(&self) -> FieldElement {
        let f = &self.field;
        let [a1, a2, a3, a4, _] = self.a;
        let b2 = f.add(f.square(a1), f.mul(f.from_int(4), a2));
        let b4 = f.add(f.mul(f.from_int(2), a4), f.mul(a1, a3));
        let c4 = f.sub(f.square(b2), f.mul(f.from_int(24), b4));
        f.div(f.pow(c4, 3), self.discriminant()).expect("nonsingular curve")
    }

    /// `(a1 x + a3, x^3 + a2 x^2 + a4 x + a6)`: the curve at abscissa x reads
    /// `y^2 + c y = d`.
    fn fiber(&self, x: FieldElement) -> (FieldElement, FieldElement) {
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let c = f.add(f.mul(a1, x), a3);
        let d = f.add(f.mul(f.add(f.mul(f.add(x, a2), x), a4), x), a6);
        (c, d)
    }

    pub fn contains(&self, p: &Point) -> bool {
        match *p {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                let q = self.field.order();
                if x.index() >= q || y.index() >= q {
                    return false;
                }
                let (c, d) = self.fiber(x);
                let f = &self.field;
                f.add(f.square(y), f.mul(c, y)) == d
            }
        }
    }

    fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    pub fn neg(&self, p: &Point) -> Result<Point> {
        self.check(p)?;
        Ok(self.neg_unchecked(p))
    }

    fn neg_unchecked(&self, p: &Point) -> Point {
        match *p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => {
                let (c, _) = self.fiber(x);
                let f = &self.field;
                Point::Affine {
                    x,
                    y: f.neg(f.add(y, c)),
                }
            }
        }
    }

    pub fn add(&self, p: &Point, q: &Point) -> Result<Point> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    /// Chord-tangent addition.
    pub(crate) fn add_unchecked(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (*p, *q) {
            (Point::Infinity, r) | (r, Point::Infinity) => return r,
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let (lambda, nu) = if x1 != x2 {
            let dx = f.inv(f.sub(x2, x1)).expect("distinct abscissae");
            let lambda = f.mul(f.sub(y2, y1), dx);
            let nu = f.mul(f.sub(f.mul(y1, x2), f.mul(y2, x1)), dx);
            (lambda, nu)
        } else {
            // Same abscissa: either Q = -P or Q = P.
            let denom = f.add(f.add(f.mul(f.from_int(2), y1), f.mul(a1, x1)), a3);
            if y1 != y2 || denom.is_zero() {
                return Point::Infinity;
            }
            let dinv = f.inv(denom).expect("nonzero tangent denominator");
            let num_l = [
                f.mul(f.from_int(3), f.square(x1)),
                f.mul(f.mul(f.from_int(2), a2), x1),
                a4,
                f.neg(f.mul(a1, y1)),
            ]
            .into_iter()
            .fold(FieldElement::ZERO, |acc, t| f.add(acc, t));
            let num_n = [
                f.neg(f.pow(x1, 3)),
                f.mul(a4, x1),
                f.mul(f.from_int(2), a6),
                f.neg(f.mul(a3, y1)),
            ]
            .into_iter()
            .fold(FieldElement::ZERO, |acc, t| f.add(acc, t));
            (f.mul(num_l, dinv), f.mul(num_n, dinv))
        };
        let x3 = f.sub(f.sub(f.sub(f.add(f.square(lambda), f.mul(a1, lambda)), a2), x1), x2);
        let y3 = f.sub(f.sub(f.neg(f.mul(f.add(lambda, a1), x3)), nu), a3);
        Point::Affine { x: x3, y: y3 }
    }

    pub fn sub(&self, p: &Point, q: &Point) -> Result<Point> {
        let nq = self.neg(q)?;
        self.add(p, &nq)
    }

    /// n·P by double-and-add; negative n uses -P.
    pub fn scalar_mul(&self, n: i64, p: &Point) -> Result<Point> {
        self.check(p)?;
        Ok(self.scalar_mul_unchecked(n, p))
    }

    pub(crate) fn scalar_mul_unchecked(&self, n: i64, p: &Point) -> Point {
        let mut base = if n < 0 { self.neg_unchecked(p) } else { *p };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            base = self.add_unchecked(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Point>>(&self, points: I) -> Result<Point> {
        points.into_iter().try_fold(Point::Infinity, |acc, p| self.add(&acc, p))
    }

    /// Partial derivatives of `F(x, y) = y^2 + a1 xy + a3 y - (x^3 + a2 x^2 + a4 x + a6)`.
    pub(crate) fn gradient(&self, x: FieldElement, y: FieldElement) -> (FieldElement, FieldElement) {
        let f = &self.field;
        let [a1, a2, _, a4, _] = self.a;
        let fx = f.sub(
            f.mul(a1, y),
            f.add(
                f.add(f.mul(f.from_int(3), f.square(x)), f.mul(f.mul(f.from_int(2), a2), x)),
                a4,
            ),
        );
        let fy = f.add(f.add(f.mul(f.from_int(2), y), f.mul(a1, x)), self.a[2]);
        (fx, fy)
    }

    /// All rational points, O first and affine points in (x, y) order. The
    /// count is checked against the Hasse bound.
    pub fn points(&self) -> Result<Vec<Point>> {
        let mut pts = vec![Point::Infinity];
        for x in self.field.elements() {
            let (c, d) = self.fiber(x);
            pts.extend(
                self.field
                    .solve_quadratic(c, d)
                    .into_iter()
                    .map(|y| Point::Affine { x, y }),
            );
        }
        let q = self.field.order() as u64;
        let n = pts.len() as u64;
        if !satisfies_hasse(q, n) {
            return Err(Error::HasseViolation { q, points: n });
        }
        Ok(pts)
    }

    pub fn count_points(&self) -> Result<usize> {
        Ok(self.points()?.len())
    }

    pub fn group_structure(&self) -> Result<GroupStructure> {
        GroupStructure::new(self)
    }
}

/// `|N - q - 1| <= 2 sqrt(q)`, compared in integers as `(N - q - 1)^2 <= 4q`.
pub fn satisfies_hasse(q: u64, n: u64) -> bool {
    let t = n as i128 - q as i128 - 1;
    t * t <= 4 * q as i128
}

/// Every nonsingular coefficient tuple over `field` (q^5 candidates).
pub fn all_curves(field: &Field) -> impl Iterator<Item = Curve> + '_ {
    let q = field.order() as u64;
    (0..q.pow(5)).filter_map(move |mut idx| {
        let mut a = [FieldElement::ZERO; 5];
        for slot in a.iter_mut() {
            *slot = field.element((idx % q) as u32).expect("index below q");
            idx /= q;
        }
        Curve::new(field.clone(), a).ok()
    })
}

/// Curves in reduced Weierstrass form. Every curve over the field is
/// isomorphic to at least one of these, and isomorphic curves have
/// isomorphic point groups.
///
/// - p > 3: `y^2 = x^3 + a4 x + a6`
/// - p = 3: `y^2 = x^3 + a2 x^2 + a6` and `y^2 = x^3 + a4 x + a6`
/// - p = 2: `y^2 + xy = x^3 + a2 x^2 + a6` and `y^2 + a3 y = x^3 + a4 x + a6`
pub fn reduced_curves(field: &Field) -> Vec<Curve> {
    let z = FieldElement::ZERO;
    let els: Vec<_> = field.elements().collect();
    let mut tuples = Vec::new();
    for &u in &els {
        for &v in &els {
            match field.characteristic() {
                2 => {
                    tuples.push([FieldElement::ONE, u, z, z, v]);
                    if !u.is_zero() {
                        for &w in &els {
                            tuples.push([z, z, u, v, w]);
                        }
                    }
                }
                3 => {
                    tuples.push([z, u, z, z, v]);
                    tuples.push([z, z, z, u, v]);
                }
                _ => tuples.push([z, z, z, u, v]),
            }
        }
    }
    tuples.sort();
    tuples.dedup();
    tuples
        .into_iter()
        .filter_map(|a| Curve::new(field.clone(), a).ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5_curve() -> Curve {
        let f = Field::prime(5).unwrap();
        Curve::short(f.clone(), f.from_int(1), f.from_int(1)).unwrap()
    }

    #[test]
    fn singular_and_nonsingular() {
        let f = Field::prime(5).unwrap();
        let z = FieldElement::ZERO;
        assert_eq!(Curve::short(f.clone(), z, z).unwrap_err(), Error::SingularCurve);
        assert!(Curve::short(f, FieldElement::ONE, FieldElement::ONE).is_ok());
        let f2 = Field::prime(2).unwrap();
        assert!(Curve::new(f2, [z, z, FieldElement::ONE, z, z]).is_ok());
    }

    #[test]
    fn f5_curve_has_nine_points() {
        let c = f5_curve();
        let pts = c.points().unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], Point::Infinity);
        for p in &pts {
            assert!(c.contains(p));
        }
        let p = Point::affine(FieldElement::ZERO, FieldElement::ONE);
        assert_eq!(c.scalar_mul(9, &p).unwrap(), Point::Infinity);
    }

    #[test]
    fn j_invariants() {
        let f = Field::prime(5).unwrap();
        // y^2 = x^3 + x: j = 1728 = 3 mod 5; y^2 = x^3 + 1: j = 0.
        let z = FieldElement::ZERO;
        let o = FieldElement::ONE;
        assert_eq!(Curve::short(f.clone(), o, z).unwrap().j_invariant(), f.from_int(1728));
        assert_eq!(Curve::short(f, z, o).unwrap().j_invariant(), z);
        let f2 = Field::prime(2).unwrap();
        assert_eq!(Curve::new(f2, [z, z, o, z, z]).unwrap().j_invariant(), z);
    }

    #[test]
    fn supersingular_char2_curve() {
        let f = Field::prime(2).unwrap();
        let z = FieldElement::ZERO;
        let c = Curve::new(f, [z, z, FieldElement::ONE, z, z]).unwrap();
        assert_eq!(c.points().unwrap().len(), 3);
    }

    #[test]
    fn identity_and_inverse() {
        let c = f5_curve();
        for p in c.points().unwrap() {
            assert_eq!(c.add(&p, &Point::Infinity).unwrap(), p);
            let np = c.neg(&p).unwrap();
            assert_eq!(c.add(&p, &np).unwrap(), Point::Infinity);
        }
    }

    #[test]
    fn off_curve_points_rejected() {
        let c = f5_curve();
        let bad = Point::affine(FieldElement::ZERO, FieldElement::ZERO);
        assert_eq!(c.add(&bad, &Point::Infinity).unwrap_err(), Error::PointNotOnCurve);
    }

    #[test]
    fn group_law_exhaustive_small() {
        for q in [2u32, 3, 4, 5, 7, 8, 9] {
            let f = Field::of_order(q).unwrap();
            for c in reduced_curves(&f) {
                let pts = c.points().unwrap();
                if pts.len() > 30 {
                    continue;
                }
                for p in &pts {
                    for r in &pts {
                        let s = c.add(p, r).unwrap();
                        assert!(c.contains(&s));
                        assert_eq!(s, c.add(r, p).unwrap());
                        for t in &pts {
                            let lhs = c.add(&s, t).unwrap();
                            let rhs = c.add(p, &c.add(r, t).unwrap()).unwrap();
                            assert_eq!(lhs, rhs, "associativity over F_{q} on {}", c.id());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn point_parsing() {
        assert_eq!("O".parse::<Point>().unwrap(), Point::Infinity);
        let p: Point = "0,1".parse().unwrap();
        assert_eq!(p, Point::affine(FieldElement::ZERO, FieldElement::ONE));
        assert!("7".parse::<Point>().is_err());
    }

    #[test]
    fn curve_json_round_trip() {
        let c = f5_curve();
        let json = serde_json::to_string(&c.spec()).unwrap();
        let back: CurveSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(Curve::from_spec(&back).unwrap(), c);
        let packed: CurveSpec = serde_json::from_str(r#"{"field":{"p":5,"m":1},"a":[0,0,0,1,1]}"#).unwrap();
        assert_eq!(Curve::from_spec(&packed).unwrap(), c);
    }
}
