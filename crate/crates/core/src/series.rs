//! Truncated formal power series in one variable `q` over exact rationals.
//!
//! Every series carries its truncation order explicitly. Binary operations
//! require equal orders; callers truncate first.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number used for every coefficient and invariant.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("constant term must be {expected}, found {found}")]
    ConstantTerm { expected: i64, found: String },
}

/// `q -> q^2`, `q -> -q` and `q -> -q^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substitution {
    Square,
    Negate,
    NegSquare,
}

/// A power series `c_0 + c_1 q + ... + c_order q^order`, known modulo `q^(order+1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// Builds a series from coefficients `c_0..c_order`. An empty vector is
    /// treated as the zero series of order 0.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        PowerSeries { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    /// The series `q` truncated at `order` (zero when `order == 0`).
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `q^n`; zero beyond the truncation order is NOT implied,
    /// so callers must stay within `0..=order`.
    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(
            order <= self.order(),
            "cannot truncate order {} series to larger order {order}",
            self.order()
        );
        PowerSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    fn check_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        Ok(PowerSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        Ok(PowerSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let order = self.order();
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=order - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(PowerSeries { coeffs: out })
    }

    fn require_constant(&self, expected: i64) -> Result<(), SeriesError> {
        if self.coeffs[0] != Rational::from_integer(expected.into()) {
            return Err(SeriesError::ConstantTerm {
                expected,
                found: format_rational(&self.coeffs[0]),
            });
        }
        Ok(())
    }

    /// Formal logarithm of a series with constant term 1.
    ///
    /// Uses `g' = f'/f`, i.e. `n g_n = n f_n - sum_{k=1}^{n-1} k g_k f_{n-k}`,
    /// which equals the truncated `sum (-1)^(k+1) u^k / k` with `u = f - 1`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        self.require_constant(1)?;
        let order = self.order();
        let f = &self.coeffs;
        let mut g = vec![Rational::zero(); order + 1];
        for n in 1..=order {
            let mut acc = f[n].clone() * BigInt::from(n);
            for k in 1..n {
                if !g[k].is_zero() && !f[n - k].is_zero() {
                    acc -= &g[k] * &f[n - k] * BigInt::from(k);
                }
            }
            g[n] = acc / BigInt::from(n);
        }
        Ok(PowerSeries { coeffs: g })
    }

    /// Formal exponential of a series with constant term 0.
    ///
    /// `f' = g' f` gives `n f_n = sum_{k=1}^{n} k g_k f_{n-k}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        self.require_constant(0)?;
        let order = self.order();
        let g = &self.coeffs;
        let mut f = vec![Rational::zero(); order + 1];
        f[0] = Rational::one();
        for n in 1..=order {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !g[k].is_zero() && !f[n - k].is_zero() {
                    acc += &g[k] * &f[n - k] * BigInt::from(k);
                }
            }
            f[n] = acc / BigInt::from(n);
        }
        Ok(PowerSeries { coeffs: f })
    }

    /// `self^e = exp(e log self)` for a series with constant term 1.
    pub fn pow(&self, e: &Rational) -> Result<Self, SeriesError> {
        self.require_constant(1)?;
        if e.is_zero() {
            return Ok(Self::one(self.order()));
        }
        self.log()?.scale(e).exp()
    }

    /// Applies a variable substitution and truncates (or zero-pads) to `order`.
    pub fn substitute(&self, mode: Substitution, order: usize) -> Self {
        let mut out = vec![Rational::zero(); order + 1];
        for (n, c) in self.coeffs.iter().enumerate() {
            let (target, negate) = match mode {
                Substitution::Square => (2 * n, false),
                Substitution::Negate => (n, n % 2 == 1),
                Substitution::NegSquare => (2 * n, n % 2 == 1),
            };
            if target > order {
                break;
            }
            out[target] = if negate { -c.clone() } else { c.clone() };
        }
        // Coefficients past 2*self.order() under a squaring map are unknown.
        let known = match mode {
            Substitution::Negate => self.order(),
            Substitution::Square | Substitution::NegSquare => 2 * self.order() + 1,
        };
        assert!(
            order <= known,
            "substitution result order {order} exceeds known precision {known}"
        );
        PowerSeries { coeffs: out }
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let abs = format_rational(&c.abs());
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match n {
                0 => write!(f, "{abs}")?,
                1 => write!(f, "{abs} q")?,
                _ => write!(f, "{abs} q^{n}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

/// MacMahon's function `prod_{n>=1} (1 - q^n)^(-n)`, the generating series of
/// 3D partitions, truncated at `order`.
pub fn macmahon(order: usize) -> PowerSeries {
    // Integer arithmetic: each factor 1/(1-q^n) is a strided prefix sum.
    let mut c = vec![BigInt::zero(); order + 1];
    c[0] = BigInt::one();
    for n in 1..=order {
        for _ in 0..n {
            for k in n..=order {
                let prev = c[k - n].clone();
                c[k] += prev;
            }
        }
    }
    PowerSeries {
        coeffs: c.into_iter().map(Rational::from_integer).collect(),
    }
}

/// Canonical text form: `"n"` for integers, `"num/den"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"n"` or `"num/den"` (denominator nonzero).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
    }
}

/// Series rendered as an ordered list of canonical rational strings.
pub fn series_to_strings(s: &PowerSeries) -> Vec<String> {
    s.coeffs().iter().map(format_rational).collect()
}
