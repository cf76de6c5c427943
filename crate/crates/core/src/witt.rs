//! Localized Witt-valued Euler classes, read through the signature
//! `W(R) = Z` so that every value is an exact rational.

use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::character::WeightChar;
use crate::series::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WittError {
    #[error("character has a surviving entry at weight 0")]
    ZeroWeight,
    #[error("character has nonzero virtual rank {0}")]
    NonzeroRank(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn pow(self, e: i64) -> Sign {
        match self {
            Sign::Plus => Sign::Plus,
            Sign::Minus => Sign::from_parity(e.rem_euclid(2) == 1),
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self != rhs)
    }
}

/// `+1` for `m = 1, 2 mod 4`, `-1` for `m = 0, 3 mod 4`.
pub fn epsilon(m: i64) -> Result<Sign, WittError> {
    if m == 0 {
        return Err(WittError::ZeroWeight);
    }
    Ok(match m.rem_euclid(4) {
        1 | 2 => Sign::Plus,
        _ => Sign::Minus,
    })
}

fn check(c: &WeightChar) -> Result<(), WittError> {
    if c.has_zero_weight() {
        return Err(WittError::ZeroWeight);
    }
    match c.rank() {
        0 => Ok(()),
        r => Err(WittError::NonzeroRank(r)),
    }
}

/// `prod_w (factor(w))^(-v_w)`, numerator and denominator accumulated
/// separately and reduced once.
fn weighted_product(c: &WeightChar, factor: impl Fn(i64) -> BigInt) -> Rational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (w, v) in c.iter() {
        let f = factor(w);
        let e = u32::try_from(v.unsigned_abs()).expect("multiplicity exceeds u32");
        if v < 0 {
            num *= num_traits::pow(f, e as usize);
        } else {
            den *= num_traits::pow(f, e as usize);
        }
    }
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    Rational::new(num, den)
}

/// `prod_w (eps(w) w)^(-v_w)`: the localized ratio `e(Ext^2)/e(Ext^1)` for a
/// rank-zero character without weight-0 entries.
pub fn euler_ratio(c: &WeightChar) -> Result<Rational, WittError> {
    check(c)?;
    Ok(weighted_product(c, |w| {
        let eps = epsilon(w).expect("nonzero weight");
        BigInt::from(eps.value() * w)
    }))
}

/// `prod_w w^(-v_w)`, the classical (sign-free) ratio.
pub fn plain_euler_ratio(c: &WeightChar) -> Result<Rational, WittError> {
    check(c)?;
    Ok(weighted_product(c, BigInt::from))
}

/// `prod_w eps(w)^(v_w)`.
pub fn sign_product(c: &WeightChar) -> Result<Sign, WittError> {
    c.iter()
        .try_fold(Sign::Plus, |acc, (w, v)| Ok(acc * epsilon(w)?.pow(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn epsilon_values() {
        assert_eq!(epsilon(2), Ok(Sign::Plus));
        assert_eq!(epsilon(4), Ok(Sign::Minus));
        assert_eq!(epsilon(-2), Ok(Sign::Plus));
        assert_eq!(epsilon(1), Ok(Sign::Plus));
        assert_eq!(epsilon(3), Ok(Sign::Minus));
        assert_eq!(epsilon(-1), Ok(Sign::Minus));
        assert_eq!(epsilon(0), Err(WittError::ZeroWeight));
    }

    #[test]
    fn epsilon_on_serre_dual_weights() {
        // For even w and s1 + s2 + s3 = 2 mod 4, w and -w - (s1 + s2 + s3)
        // differ by 2 mod 4, so their signs are opposite.
        for w in (-40..=40).filter(|w| w % 2 == 0 && *w != 0) {
            for total in [-18, -6, 2, 6, 14] {
                let dual = -w - total;
                if dual != 0 {
                    assert_eq!(epsilon(w).unwrap() * epsilon(dual).unwrap(), Sign::Minus, "w={w}");
                }
            }
            assert_eq!(epsilon(w).unwrap() * epsilon(-w).unwrap(), Sign::Plus, "w={w}");
            if w != -4 {
                assert_eq!(epsilon(w), epsilon(w + 4));
            }
        }
    }

    #[test]
    fn euler_ratio_examples() {
        let c = WeightChar::from_pairs([(2, 3), (4, -3)]);
        assert_eq!(euler_ratio(&c), Ok(r(-8, 1)));
        let single_box = WeightChar::from_pairs([(2, 1), (6, 1), (10, 1), (8, -1), (12, -1), (16, -1)]);
        assert_eq!(euler_ratio(&single_box), Ok(r(-64, 5)));
        assert_eq!(plain_euler_ratio(&single_box), Ok(r(64, 5)));
        assert_eq!(euler_ratio(&WeightChar::empty()), Ok(r(1, 1)));
    }

    #[test]
    fn euler_ratio_errors() {
        let zero = WeightChar::from_pairs([(0, 1), (2, -1)]);
        assert_eq!(euler_ratio(&zero), Err(WittError::ZeroWeight));
        let ranked = WeightChar::from_pairs([(2, 1)]);
        assert_eq!(euler_ratio(&ranked), Err(WittError::NonzeroRank(1)));
        assert_eq!(sign_product(&zero), Err(WittError::ZeroWeight));
    }

    #[test]
    fn sign_product_examples() {
        let single_box = WeightChar::from_pairs([(2, 1), (6, 1), (10, 1), (8, -1), (12, -1), (16, -1)]);
        assert_eq!(sign_product(&single_box), Ok(Sign::Minus));
        assert_eq!(sign_product(&WeightChar::empty()), Ok(Sign::Plus));
    }

    #[test]
    fn euler_ratio_is_multiplicative() {
        let a = WeightChar::from_pairs([(2, 2), (6, -1), (-10, -1)]);
        let b = WeightChar::from_pairs([(4, 1), (-3, -1), (7, 1), (9, -1)]);
        let ab = a.union(&b);
        assert_eq!(
            euler_ratio(&ab).unwrap(),
            euler_ratio(&a).unwrap() * euler_ratio(&b).unwrap()
        );
    }
}
