//! Functional codes C_L(D, (k-1)O + P) on elliptic curves and their
//! minimum distance.

use std::fmt;

use serde::Serialize;

use crate::ec::{Curve, GroupStructure, Point};
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};
use crate::ssp::count_subset_sums;

/// Largest q^k for which [`min_distance_bruteforce`] enumerates messages.
pub const BRUTE_FORCE_MESSAGES: u64 = 1_000_000;

/// `coeff · x^x_pow · y^y_pow` with `y_pow ∈ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Term {
    pub coeff: FieldElement,
    pub x_pow: u32,
    pub y_pow: u32,
}

/// `h(x, y) / (x - x_P)`, or just `h` when there is no pole point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RrFunction {
    pub numerator: Vec<Term>,
    pub pole: Option<Point>,
}

/// Monomial with pole order `o` at O: `x^{o/2}` for even o,
/// `y x^{(o-3)/2}` for odd o.
fn monomial(o: u32) -> Term {
    let (x_pow, y_pow) = if o.is_multiple_of(2) {
        (o / 2, 0)
    } else {
        ((o - 3) / 2, 1)
    };
    Term {
        coeff: FieldElement::ONE,
        x_pow,
        y_pow,
    }
}

/// Monomials spanning L(m O), by increasing pole order.
fn monomials(m: u32) -> Vec<Term> {
    std::iter::once(0).chain(2..=m).map(monomial).collect()
}

fn eval_terms(f: &Field, terms: &[Term], x: FieldElement, y: FieldElement) -> FieldElement {
    terms.iter().fold(FieldElement::ZERO, |acc, t| {
        let mut v = f.mul(t.coeff, f.pow(x, t.x_pow as u64));
        if t.y_pow == 1 {
            v = f.mul(v, y);
        }
        f.add(acc, v)
    })
}

/// (∂h/∂x, ∂h/∂y) at (x, y).
fn eval_partials(f: &Field, terms: &[Term], x: FieldElement, y: FieldElement) -> (FieldElement, FieldElement) {
    let mut hx = FieldElement::ZERO;
    let mut hy = FieldElement::ZERO;
    for t in terms {
        let xp = f.pow(x, t.x_pow as u64);
        if t.y_pow == 1 {
            hy = f.add(hy, f.mul(t.coeff, xp));
        }
        if t.x_pow > 0 {
            let mut d = f.mul(f.mul(t.coeff, f.from_int(t.x_pow as i64)), f.pow(x, t.x_pow as u64 - 1));
            if t.y_pow == 1 {
                d = f.mul(d, y);
            }
            hx = f.add(hx, d);
        }
    }
    (hx, hy)
}

impl RrFunction {
    /// Order of the pole at O.
    pub fn pole_order_at_infinity(&self) -> u32 {
        let top = self
            .numerator
            .iter()
            .map(|t| 2 * t.x_pow + 3 * t.y_pow)
            .max()
            .unwrap_or(0);
        if self.pole.is_some() {
            top.saturating_sub(2)
        } else {
            top
        }
    }

    /// Value at an affine point other than the pole point.
    ///
    /// At the second zero P' of `x - x_P` the numerator vanishes too, and the
    /// value is the derivative of h along the curve with respect to the
    /// uniformizer `x - x_P'`.
    pub fn eval(&self, curve: &Curve, q: &Point) -> Result<FieldElement> {
        let f = curve.field();
        let Point::Affine { x, y } = *q else {
            return Err(Error::PoleAtPoint);
        };
        let h = eval_terms(f, &self.numerator, x, y);
        let Some(pole) = self.pole else {
            return Ok(h);
        };
        if *q == pole {
            return Err(Error::PoleAtPoint);
        }
        let u = f.sub(x, pole.x().expect("pole point is affine"));
        if !u.is_zero() {
            return f.div(h, u);
        }
        if !h.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        let (fx, fy) = curve.gradient(x, y);
        let (hx, hy) = eval_partials(f, &self.numerator, x, y);
        // dy/dx = -F_x / F_y; F_y vanishes only at 2-torsion points.
        let dy = f.neg(f.div(fx, fy)?);
        Ok(f.add(hx, f.mul(hy, dy)))
    }
}

impl fmt::Display for RrFunction {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .numerator
            .iter()
            .filter(|t| !t.coeff.is_zero())
            .map(|t| {
                let mut parts = vec![];
                if t.coeff != FieldElement::ONE || (t.x_pow == 0 && t.y_pow == 0) {
                    parts.push(t.coeff.to_string());
                }
                match t.x_pow {
                    0 => {}
                    1 => parts.push("x".into()),
                    e => parts.push(format!("x^{e}")),
                }
                if t.y_pow == 1 {
                    parts.push("y".into());
                }
                parts.join("*")
            })
            .collect();
        let numer = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        match self.pole {
            Some(Point::Affine { x, .. }) if x.is_zero() => write!(out, "({numer}) / x"),
            Some(Point::Affine { x, .. }) => write!(out, "({numer}) / (x - {x})"),
            _ => write!(out, "{numer}"),
        }
    }
}

/// A basis of L((k-1)O + P).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RrBasis {
    pub k: usize,
    pub divisor_point: Point,
    pub functions: Vec<RrFunction>,
}

/// Basis of L((k-1)O + P).
///
/// For P = O this is the span of x^i y^j with 2i + 3j ≤ k. Otherwise the
/// functions are h/u with u = x - x_P and h running over a basis of the
/// subspace of L((k+1)O) vanishing at the other zero of u (at P itself when
/// P is 2-torsion).
pub fn rr_basis(curve: &Curve, k: usize, p: &Point) -> Result<RrBasis> {
    if k == 0 {
        return Err(Error::UnsupportedK);
    }
    if !curve.contains(p) {
        return Err(Error::PointNotOnCurve);
    }
    let f = curve.field();
    let functions = match *p {
        Point::Infinity => monomials(k as u32)
            .into_iter()
            .map(|t| RrFunction {
                numerator: vec![t],
                pole: None,
            })
            .collect(),
        Point::Affine { .. } => {
            let Point::Affine { x: xq, y: yq } = curve.neg(p)? else {
                unreachable!("negation of an affine point is affine");
            };
            monomials(k as u32 + 1)
                .into_iter()
                .skip(1)
                .map(|m| {
                    let c = eval_terms(f, &[m], xq, yq);
                    let shift = Term {
                        coeff: f.neg(c),
                        x_pow: 0,
                        y_pow: 0,
                    };
                    RrFunction {
                        numerator: vec![m, shift],
                        pole: Some(*p),
                    }
                })
                .collect()
        }
    };
    let basis = RrBasis {
        k,
        divisor_point: *p,
        functions,
    };
    verify_basis(curve, &basis)?;
    Ok(basis)
}

/// Every function must be finite at every rational point outside {O, P}, and
/// the pole orders at O must be distinct.
fn verify_basis(curve: &Curve, basis: &RrBasis) -> Result<()> {
    let mut orders: Vec<u32> = basis.functions.iter().map(RrFunction::pole_order_at_infinity).collect();
    orders.sort_unstable();
    orders.dedup();
    if orders.len() != basis.k || basis.functions.len() != basis.k {
        return Err(Error::DegenerateBasis);
    }
    for q in curve.points()? {
        if q.is_infinity() || q == basis.divisor_point {
            continue;
        }
        for func in &basis.functions {
            func.eval(curve, &q).map_err(|_| Error::DegenerateBasis)?;
        }
    }
    Ok(())
}

/// Distinct rational points avoiding O and the divisor point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvaluationSet {
    points: Vec<Point>,
}

impl EvaluationSet {
    pub fn new(curve: &Curve, points: Vec<Point>, divisor_point: &Point) -> Result<EvaluationSet> {
        let mut seen = std::collections::HashSet::new();
        for q in &points {
            if !curve.contains(q) {
                return Err(Error::PointNotOnCurve);
            }
            if q.is_infinity() || q == divisor_point {
                return Err(Error::DivisorPointInD);
            }
            if !seen.insert(*q) {
                return Err(Error::DuplicateElement);
            }
        }
        Ok(EvaluationSet { points })
    }

    /// Every rational point except O, the divisor point and `exclude`, in
    /// sorted order.
    pub fn all_except(gs: &GroupStructure, divisor_point: &Point, exclude: &[Point]) -> Result<EvaluationSet> {
        let mut skip = vec![Point::Infinity, *divisor_point];
        skip.extend_from_slice(exclude);
        let points = gs.complement(&skip)?;
        EvaluationSet::new(gs.curve(), points, divisor_point)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct EcagCode {
    curve: Curve,
    eval_set: EvaluationSet,
    k: usize,
    divisor_point: Point,
    basis: RrBasis,
    gen_matrix: Vec<Vec<FieldElement>>,
}

impl EcagCode {
    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn eval_set(&self) -> &EvaluationSet {
        &self.eval_set
    }

    pub fn n(&self) -> usize {
        self.eval_set.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn divisor_point(&self) -> Point {
        self.divisor_point
    }

    pub fn basis(&self) -> &RrBasis {
        &self.basis
    }

    pub fn gen_matrix(&self) -> &[Vec<FieldElement>] {
        &self.gen_matrix
    }

    /// `message · G`.
    pub fn encode(&self, message: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if message.len() != self.k {
            return Err(Error::ParameterOutOfRange(format!(
                "message has length {}, expected {}",
                message.len(),
                self.k
            )));
        }
        let f = self.curve.field();
        let mut word = vec![FieldElement::ZERO; self.n()];
        for (m, row) in message.iter().zip(&self.gen_matrix) {
            if m.is_zero() {
                continue;
            }
            for (w, &g) in word.iter_mut().zip(row) {
                *w = f.add(*w, f.mul(*m, g));
            }
        }
        Ok(word)
    }
}

/// Rank over F_q by Gaussian elimination.
pub fn rank(field: &Field, matrix: &[Vec<FieldElement>]) -> usize {
    let mut m: Vec<Vec<FieldElement>> = matrix.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        let inv = field.inv(m[r][c]).expect("pivot is nonzero");
        for v in &mut m[r][c..] {
            *v = field.mul(*v, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c];
                for (v, &pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *v = field.sub(*v, field.mul(factor, pv));
                }
            }
        }
        r += 1;
    }
    r
}

/// Evaluates a basis of L((k-1)O + P) on D.
pub fn build_code(curve: &Curve, eval_set: &EvaluationSet, k: usize, p: &Point) -> Result<EcagCode> {
    let n = eval_set.len();
    if k == 0 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    if eval_set.points().iter().any(|q| q == p || q.is_infinity()) {
        return Err(Error::DivisorPointInD);
    }
    let basis = rr_basis(curve, k, p)?;
    let gen_matrix = basis
        .functions
        .iter()
        .map(|func| {
            eval_set
                .points()
                .iter()
                .map(|q| func.eval(curve, q))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let r = rank(curve.field(), &gen_matrix);
    if r < k {
        return Err(Error::RankDeficient { rank: r, k });
    }
    Ok(EcagCode {
        curve: curve.clone(),
        eval_set: eval_set.clone(),
        k,
        divisor_point: *p,
        basis,
        gen_matrix,
    })
}

fn check_dichotomy(code: &EcagCode, d: usize) -> Result<usize> {
    let (n, k) = (code.n(), code.k());
    if d + k < n || d + k > n + 1 {
        return Err(Error::InvariantViolation(format!(
            "d = {d} outside [n-k, n-k+1] for n = {n}, k = {k}"
        )));
    }
    Ok(d)
}

/// Minimum weight over all nonzero codewords, one message per projective
/// class (first nonzero coordinate equal to 1).
pub fn min_distance_bruteforce(code: &EcagCode) -> Result<usize> {
    let f = code.curve.field();
    let q = f.order() as u64;
    let k = code.k;
    if (q as f64).powi(k as i32) > BRUTE_FORCE_MESSAGES as f64 {
        return Err(Error::TooLarge(format!("{q}^{k} messages")));
    }
    let elements: Vec<FieldElement> = f.elements().collect();
    let rows = &code.gen_matrix;
    let mut best = code.n();
    for lead in 0..k {
        let mut word = rows[lead].clone();
        let mut digits = vec![0usize; k - lead - 1];
        loop {
            best = best.min(word.iter().filter(|w| !w.is_zero()).count());
            // Odometer over the free coordinates, updating the word by the
            // change in each digit.
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    break;
                }
                let row = &rows[lead + 1 + pos];
                let old = elements[digits[pos]];
                digits[pos] = (digits[pos] + 1) % elements.len();
                let delta = f.sub(elements[digits[pos]], old);
                for (w, &g) in word.iter_mut().zip(row) {
                    *w = f.add(*w, f.mul(delta, g));
                }
                if digits[pos] != 0 {
                    break;
                }
                pos += 1;
            }
            if pos == digits.len() {
                break;
            }
        }
    }
    check_dichotomy(code, best)
}

/// d = n - k exactly when some k points of D sum to P, else n - k + 1.
pub fn min_distance_ssp(gs: &GroupStructure, code: &EcagCode) -> Result<usize> {
    let (n, k) = (code.n(), code.k());
    let table = count_subset_sums(gs, code.eval_set.points(), k)?;
    let hits = table.count_at(gs, k, &code.divisor_point)?;
    Ok(if num_traits::Zero::is_zero(hits) {
        n - k + 1
    } else {
        n - k
    })
}

pub fn is_mds(gs: &GroupStructure, code: &EcagCode) -> Result<bool> {
    Ok(min_distance_ssp(gs, code)? == code.n() - code.k() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::reduced_curves;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f5() -> (Curve, GroupStructure) {
        let f = Field::prime(5).unwrap();
        let c = Curve::short(f.clone(), f.from_int(1), f.from_int(1)).unwrap();
        let gs = GroupStructure::new(&c).unwrap();
        (c, gs)
    }

    #[test]
    fn basis_at_infinity() {
        let (c, _) = f5();
        let b = rr_basis(&c, 3, &Point::Infinity).unwrap();
        let shown: Vec<String> = b.functions.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["1", "x", "y"]);
        assert_eq!(rr_basis(&c, 1, &Point::Infinity).unwrap().functions.len(), 1);
        assert!(matches!(rr_basis(&c, 0, &Point::Infinity), Err(Error::UnsupportedK)));
    }

    #[test]
    fn affine_basis_starts_with_constant() {
        let (c, gs) = f5();
        for p in gs.sorted_points().into_iter().skip(1) {
            let b = rr_basis(&c, 2, &p).unwrap();
            assert_eq!(b.functions.len(), 2);
            let one = &b.functions[0];
            let orders: Vec<u32> = b.functions.iter().map(RrFunction::pole_order_at_infinity).collect();
            assert_eq!(orders, [0, 1]);
            for q in gs.sorted_points().into_iter().skip(1).filter(|q| *q != p) {
                assert_eq!(one.eval(&c, &q).unwrap(), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn repetition_code() {
        let (c, gs) = f5();
        let p = gs.sorted_points()[1];
        let d = EvaluationSet::all_except(&gs, &p, &[]).unwrap();
        let code = build_code(&c, &d, 1, &p).unwrap();
        assert_eq!(code.encode(&[FieldElement::ONE]).unwrap(), vec![FieldElement::ONE; 7]);
        assert_eq!(min_distance_bruteforce(&code).unwrap(), 7);
    }

    #[test]
    fn seven_three_code_over_f5() {
        let (c, gs) = f5();
        for p in gs.sorted_points() {
            let d = EvaluationSet::all_except(&gs, &p, &[]).unwrap();
            if d.len() < 4 {
                continue;
            }
            let code = build_code(&c, &d, 3, &p).unwrap();
            let brute = min_distance_bruteforce(&code).unwrap();
            assert!(brute == 4 || brute == 5);
            assert_eq!(brute, min_distance_ssp(&gs, &code).unwrap(), "P = {p}");
        }
    }

    #[test]
    fn divisor_point_in_d_is_rejected() {
        let (c, gs) = f5();
        let p = gs.sorted_points()[1];
        assert!(matches!(
            EvaluationSet::new(&c, vec![p], &p),
            Err(Error::DivisorPointInD)
        ));
        assert!(matches!(
            EvaluationSet::new(&c, vec![Point::Infinity], &p),
            Err(Error::DivisorPointInD)
        ));
    }

    #[test]
    fn criterion_matches_enumeration_on_small_fields() {
        for q in [2u32, 3, 4, 5, 7, 8] {
            let field = Field::of_order(q).unwrap();
            for c in reduced_curves(&field) {
                let gs = GroupStructure::new(&c).unwrap();
                for p in gs.sorted_points() {
                    let d = EvaluationSet::all_except(&gs, &p, &[]).unwrap();
                    for k in 1..d.len() {
                        if (q as f64).powi(k as i32) > 2e4 {
                            break;
                        }
                        let code = build_code(&c, &d, k, &p).unwrap();
                        assert_eq!(
                            min_distance_bruteforce(&code).unwrap(),
                            min_distance_ssp(&gs, &code).unwrap(),
                            "q = {q}, curve {}, P = {p}, k = {k}",
                            c.id()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_codewords_respect_the_weight_bound() {
        let field = Field::of_order(9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for c in reduced_curves(&field).into_iter().take(6) {
            let gs = GroupStructure::new(&c).unwrap();
            let p = *gs.sorted_points().last().unwrap();
            let d = EvaluationSet::all_except(&gs, &p, &[]).unwrap();
            let k = d.len() / 2;
            let code = build_code(&c, &d, k, &p).unwrap();
            for _ in 0..200 {
                let msg: Vec<FieldElement> = (0..k).map(|_| field.element(rng.gen_range(0..9)).unwrap()).collect();
                if msg.iter().all(|m| m.is_zero()) {
                    continue;
                }
                let w = code.encode(&msg).unwrap().iter().filter(|x| !x.is_zero()).count();
                assert!(w >= d.len() - k);
            }
        }
    }

    #[test]
    fn two_torsion_divisor_point_in_characteristic_two() {
        // y^2 + xy = x^3 + 1 over F_4 has (0, 1) of order 2.
        let field = Field::of_order(4).unwrap();
        let o = FieldElement::ONE;
        let z = FieldElement::ZERO;
        let c = Curve::new(field.clone(), [o, z, z, z, o]).unwrap();
        let gs = GroupStructure::new(&c).unwrap();
        let p = Point::affine(z, o);
        assert_eq!(c.neg(&p).unwrap(), p);
        let d = EvaluationSet::all_except(&gs, &p, &[]).unwrap();
        for k in 1..d.len() {
            let code = build_code(&c, &d, k, &p).unwrap();
            assert_eq!(
                min_distance_bruteforce(&code).unwrap(),
                min_distance_ssp(&gs, &code).unwrap()
            );
        }
    }

    #[test]
    fn rank_of_small_matrices() {
        let f = Field::prime(3).unwrap();
        let e = |i: i64| f.from_int(i);
        assert_eq!(rank(&f, &[vec![e(1), e(2)], vec![e(2), e(1)]]), 1);
        assert_eq!(rank(&f, &[vec![e(1), e(0)], vec![e(0), e(1)]]), 2);
        assert_eq!(rank(&f, &[]), 0);
    }
}
