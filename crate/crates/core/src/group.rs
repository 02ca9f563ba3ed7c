//! The abstract group Z/n1 × Z/n2.
//!
//! Elements are indexed `a * n2 + b` for coordinates `(a, b)`, so the zero
//! element has index 0 and group addition is integer arithmetic on indices.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    n1: usize,
    n2: usize,
}

impl AbelianGroup {
    /// Z/n1 × Z/n2 with n2 dividing n1.
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 || !n1.is_multiple_of(n2) {
            return Err(Error::ParameterOutOfRange(format!(
                "Z/{n1} x Z/{n2} is not in invariant-factor form"
            )));
        }
        Ok(AbelianGroup { n1, n2 })
    }

    pub fn cyclic(n: usize) -> Self {
        AbelianGroup { n1: n.max(1), n2: 1 }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn order(&self) -> usize {
        self.n1 * self.n2
    }

    /// The exponent, lcm of all element orders.
    pub fn exponent(&self) -> usize {
        self.n1
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        (a % self.n1) * self.n2 + b % self.n2
    }

    pub fn coords(&self, i: usize) -> (usize, usize) {
        (i / self.n2, i % self.n2)
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        let (a1, b1) = self.coords(i);
        let (a2, b2) = self.coords(j);
        self.index(a1 + a2, b1 + b2)
    }

    pub fn neg(&self, i: usize) -> usize {
        let (a, b) = self.coords(i);
        self.index(self.n1 - a, self.n2 - b)
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        self.add(i, self.neg(j))
    }

    pub fn scalar(&self, k: usize, i: usize) -> usize {
        let (a, b) = self.coords(i);
        self.index(
            ((a as u128 * k as u128) % self.n1 as u128) as usize,
            ((b as u128 * k as u128) % self.n2 as u128) as usize,
        )
    }

    pub fn element_order(&self, i: usize) -> usize {
        let (a, b) = self.coords(i);
        (self.n1 / a.gcd(&self.n1)).lcm(&(self.n2 / b.gcd(&self.n2)))
    }

    pub fn sum<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(0, |acc, x| self.add(acc, x))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_invariant_factor_form() {
        assert!(AbelianGroup::new(4, 3).is_err());
        assert!(AbelianGroup::new(6, 2).is_ok());
    }

    #[test]
    fn group_axioms_small() {
        for (n1, n2) in [(1, 1), (9, 1), (2, 2), (6, 3), (12, 2)] {
            let g = AbelianGroup::new(n1, n2).unwrap();
            for x in g.elements() {
                assert_eq!(g.add(x, g.neg(x)), 0);
                assert_eq!(g.add(x, 0), x);
                assert_eq!(g.scalar(g.element_order(x), x), 0);
                assert_eq!(g.exponent() % g.element_order(x), 0);
                for y in g.elements() {
                    assert_eq!(g.add(x, y), g.add(y, x));
                }
            }
        }
    }
}
