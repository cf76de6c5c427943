//! Virtual torus characters: sparse Laurent polynomials over `Z[t1^±, t2^±, t3^±]`
//! and their specializations at an integer weight triple.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Exponent = [i64; 3];

/// Sparse Laurent polynomial in three variables with integer coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct LaurentZ3 {
    terms: BTreeMap<Exponent, BigInt>,
}

impl LaurentZ3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(exp: Exponent, coeff: impl Into<BigInt>) -> Self {
        let mut out = Self::zero();
        out.add_term(exp, coeff.into());
        out
    }

    pub fn one() -> Self {
        Self::monomial([0, 0, 0], 1)
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, C)>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c.into());
        }
        out
    }

    pub fn add_term(&mut self, exp: Exponent, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &Exponent) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter()
    }

    /// Sum of all coefficients (the virtual rank).
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Multiplication by the monomial `t^shift`.
    pub fn shift(&self, shift: Exponent) -> Self {
        LaurentZ3 {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([e[0] + shift[0], e[1] + shift[1], e[2] + shift[2]], c.clone()))
                .collect(),
        }
    }

    /// `t -> t^-1` in every variable.
    pub fn invert(&self) -> Self {
        LaurentZ3 {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([-e[0], -e[1], -e[2]], c.clone()))
                .collect(),
        }
    }

    /// Collects terms by the weight `s.k`.
    pub fn specialize(&self, s: WeightTriple) -> WeightChar {
        let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (k, c) in &self.terms {
            *acc.entry(s.dot(k)).or_default() += c;
        }
        WeightChar::from_pairs(
            acc.into_iter()
                .map(|(w, v)| (w, v.to_i64().expect("weight multiplicity exceeds i64"))),
        )
    }
}

impl fmt::Debug for LaurentZ3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl Add for &LaurentZ3 {
    type Output = LaurentZ3;
    fn add(self, rhs: &LaurentZ3) -> LaurentZ3 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentZ3 {
    type Output = LaurentZ3;
    fn sub(self, rhs: &LaurentZ3) -> LaurentZ3 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &LaurentZ3 {
    type Output = LaurentZ3;
    fn neg(self) -> LaurentZ3 {
        LaurentZ3 {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Mul for &LaurentZ3 {
    type Output = LaurentZ3;
    fn mul(self, rhs: &LaurentZ3) -> LaurentZ3 {
        let mut out = LaurentZ3::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ca * cb);
            }
        }
        out
    }
}

/// Coordinate weights `(s1, s2, s3)` of a one-dimensional torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightTriple(pub [i64; 3]);

impl WeightTriple {
    pub fn new(s1: i64, s2: i64, s3: i64) -> Self {
        WeightTriple([s1, s2, s3])
    }

    pub fn dot(&self, k: &Exponent) -> i64 {
        self.0[0] * k[0] + self.0[1] * k[1] + self.0[2] * k[2]
    }

    /// Every entry even and `s1 + s2 + s3 = 2 mod 4`.
    pub fn is_admissible(&self) -> bool {
        self.0.iter().all(|s| s % 2 == 0) && self.0.iter().sum::<i64>().rem_euclid(4) == 2
    }

    pub fn negate(&self) -> Self {
        WeightTriple([-self.0[0], -self.0[1], -self.0[2]])
    }

    pub fn permute(&self, perm: [usize; 3]) -> Self {
        WeightTriple([self.0[perm[0]], self.0[perm[1]], self.0[perm[2]]])
    }
}

impl fmt::Display for WeightTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// A character of the one-dimensional torus: weight `w` with multiplicity `v_w`.
/// Zero multiplicities are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightChar {
    weights: BTreeMap<i64, i64>,
}

impl WeightChar {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (i64, i64)>>(pairs: I) -> Self {
        let mut out = Self::empty();
        for (w, v) in pairs {
            out.add(w, v);
        }
        out
    }

    pub fn add(&mut self, weight: i64, mult: i64) {
        if mult == 0 {
            return;
        }
        let slot = self.weights.entry(weight).or_insert(0);
        *slot += mult;
        if *slot == 0 {
            self.weights.remove(&weight);
        }
    }

    pub fn multiplicity(&self, weight: i64) -> i64 {
        self.weights.get(&weight).copied().unwrap_or(0)
    }

    /// Virtual rank `sum v_w`.
    pub fn rank(&self) -> i64 {
        self.weights.values().sum()
    }

    /// A surviving entry sits at weight 0.
    pub fn has_zero_weight(&self) -> bool {
        self.weights.contains_key(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.weights.iter().map(|(&w, &v)| (w, v))
    }

    /// Direct sum of virtual representations.
    pub fn union(&self, other: &WeightChar) -> WeightChar {
        let mut out = self.clone();
        for (w, v) in other.iter() {
            out.add(w, v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_operations() {
        let one_plus_t1 = LaurentZ3::from_terms([([0, 0, 0], 1), ([1, 0, 0], 1)]);
        let one_minus_t1 = LaurentZ3::from_terms([([0, 0, 0], 1), ([1, 0, 0], -1)]);
        let prod = &one_plus_t1 * &one_minus_t1;
        assert_eq!(prod, LaurentZ3::from_terms([([0, 0, 0], 1), ([2, 0, 0], -1)]));
        assert!((&prod - &prod).is_zero());
        assert_eq!(&prod + &(-&prod), LaurentZ3::zero());
        assert_eq!(one_plus_t1.shift([-1, 0, 2]).coeff(&[0, 0, 2]), BigInt::from(1));
        assert_eq!(one_plus_t1.invert().coeff(&[-1, 0, 0]), BigInt::from(1));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let l = LaurentZ3::from_terms([([1, 2, 3], 2), ([1, 2, 3], -2)]);
        assert!(l.is_zero());
        let c = WeightChar::from_pairs([(4, 1), (4, -1), (6, 2)]);
        assert_eq!(c.len(), 1);
        assert_eq!(c.rank(), 2);
    }

    #[test]
    fn specialization_collects_weights() {
        let l = LaurentZ3::from_terms([([0, 0, 0], 1), ([1, 0, 0], 1)]);
        let c = l.specialize(WeightTriple::new(-2, -6, -10));
        assert_eq!(c, WeightChar::from_pairs([(0, 1), (-2, 1)]));
        assert!(c.has_zero_weight());
        assert!(LaurentZ3::zero().specialize(WeightTriple::new(1, 2, 3)).is_empty());
        // t1 - t2 cancels at s1 = s2.
        let d = LaurentZ3::from_terms([([1, 0, 0], 1), ([0, 1, 0], -1)]);
        assert!(d.specialize(WeightTriple::new(4, 4, 2)).is_empty());
    }

    #[test]
    fn admissibility() {
        assert!(WeightTriple::new(-2, -6, -10).is_admissible());
        assert!(WeightTriple::new(2, 2, -2).is_admissible());
        assert!(!WeightTriple::new(2, 2, 4).is_admissible());
        assert!(!WeightTriple::new(1, 3, 5).is_admissible());
    }
}
