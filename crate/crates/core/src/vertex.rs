//! Partition and trace characters of monomial ideals, and the equivariant
//! vertex measures built from them.
//!
//! Characters are computed once per partition in lattice form, where the
//! monomial `t1^k1 t2^k2 t3^k3` stands for `t^(s.k)`, and specialized at each
//! weight triple afterwards. Net multiplicities enter the Euler ratios; any
//! lattice term landing on weight 0 makes the weights degenerate.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::character::{LaurentZ3, WeightChar, WeightTriple};
use crate::partitions::{enumerate_partitions_up_to, Partition3D};
use crate::series::{PowerSeries, Rational};
use crate::witt::{euler_ratio, plain_euler_ratio, WittError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VertexError {
    #[error("weights {weights} are not admissible (need even entries with sum = 2 mod 4)")]
    Inadmissible { weights: WeightTriple },
    #[error("quadratic vertex measure needs an even truncation order, got {0}")]
    OddOrder(usize),
    #[error("weights {weights} are degenerate: partition {partition:?} of colength {colength} has a weight-0 term")]
    DegenerateWeights {
        weights: WeightTriple,
        colength: usize,
        partition: Partition3D,
    },
    #[error("gamma undefined at {0}: a coordinate weight vanishes")]
    ZeroCoordinateWeight(WeightTriple),
}

/// `(1 - t1)(1 - t2)`
fn one_minus_t1_t2() -> LaurentZ3 {
    LaurentZ3::from_terms([([0, 0, 0], 1), ([1, 0, 0], -1), ([0, 1, 0], -1), ([1, 1, 0], 1)])
}

/// `Q(t) = sum over boxes k of t^k`.
pub fn q_lattice(p: &Partition3D) -> LaurentZ3 {
    LaurentZ3::from_terms(p.boxes().iter().map(|b| ([b[0] as i64, b[1] as i64, b[2] as i64], 1)))
}

/// Character of `Ext^1 - Ext^2`:
/// `V = Q - Qbar/(t1 t2 t3) + Q Qbar (1-t1)(1-t2)(1-t3)/(t1 t2 t3)`.
pub fn trace_lattice(p: &Partition3D) -> LaurentZ3 {
    let q = q_lattice(p);
    let qbar = q.invert();
    let qq = &q * &qbar;
    let one_minus_t3 = LaurentZ3::from_terms([([0, 0, 0], 1), ([0, 0, 1], -1)]);
    let cube = &(&one_minus_t1_t2() * &one_minus_t3) * &qq;
    &(&q - &qbar.shift([-1, -1, -1])) + &cube.shift([-1, -1, -1])
}

/// `V+ = Q - Q Qbar (1-t1)(1-t2)/(t1 t2)`.
pub fn split_plus(p: &Partition3D) -> LaurentZ3 {
    let q = q_lattice(p);
    let qq = &q * &q.invert();
    &q - &(&qq * &one_minus_t1_t2()).shift([-1, -1, 0])
}

/// `V- = -Qbar/(t1 t2 t3) + Q Qbar (1-t1)(1-t2)/(t1 t2 t3)`.
pub fn split_minus(p: &Partition3D) -> LaurentZ3 {
    let q = q_lattice(p);
    let qbar = q.invert();
    let qq = &q * &qbar;
    &(&qq * &one_minus_t1_t2()).shift([-1, -1, -1]) - &qbar.shift([-1, -1, -1])
}

/// Insert-once concurrent memo of lattice traces keyed by partition.
#[derive(Default)]
pub struct TraceCache {
    map: RwLock<HashMap<Partition3D, Arc<LaurentZ3>>>,
}

impl TraceCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide cache shared by the vertex-measure functions.
    pub fn global() -> &'static TraceCache {
        static CACHE: OnceLock<TraceCache> = OnceLock::new();
        CACHE.get_or_init(TraceCache::new)
    }

    pub fn trace(&self, p: &Partition3D) -> Arc<LaurentZ3> {
        if let Some(v) = self.map.read().unwrap().get(p) {
            return Arc::clone(v);
        }
        // Computed outside the lock; a racing duplicate is discarded.
        let v = Arc::new(trace_lattice(p));
        let mut map = self.map.write().unwrap();
        Arc::clone(map.entry(p.clone()).or_insert(v))
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Specialized trace of `p` at `s`.
pub fn specialized_trace(p: &Partition3D, s: WeightTriple) -> WeightChar {
    TraceCache::global().trace(p).specialize(s)
}

/// Which Euler ratio a measure sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    /// `prod (eps(w) w)^(-v_w)`
    Signed,
    /// `prod w^(-v_w)`
    Plain,
}

/// Euler ratio of one partition at weights `s`.
///
/// Any lattice term of the trace landing on weight 0 is degenerate, even when
/// such terms cancel in net multiplicity: their ratio is `0/0` and its limit
/// depends on the direction of approach.
pub fn partition_ratio(p: &Partition3D, s: WeightTriple, kind: RatioKind) -> Result<Rational, VertexError> {
    let trace = TraceCache::global().trace(p);
    if trace.terms().any(|(k, _)| s.dot(k) == 0) {
        return Err(VertexError::DegenerateWeights {
            weights: s,
            colength: p.size(),
            partition: p.clone(),
        });
    }
    let c = trace.specialize(s);
    let r = match kind {
        RatioKind::Signed => euler_ratio(&c),
        RatioKind::Plain => plain_euler_ratio(&c),
    };
    r.map_err(|e| match e {
        WittError::ZeroWeight => VertexError::DegenerateWeights {
            weights: s,
            colength: p.size(),
            partition: p.clone(),
        },
        WittError::NonzeroRank(r) => unreachable!("trace of {p:?} has rank {r}"),
    })
}

/// `sum_{|P| = l} ratio(P)` for `l = 0..=max_colength`.
fn level_sums(s: WeightTriple, max_colength: usize, kind: RatioKind) -> Result<Vec<Rational>, VertexError> {
    let levels = enumerate_partitions_up_to(max_colength);
    let mut sums = vec![Rational::one()];
    for level in levels.iter().skip(1) {
        let sum = level
            .par_iter()
            .map(|p| partition_ratio(p, s, kind))
            .try_reduce(Rational::zero, |a, b| Ok(a + b))?;
        sums.push(sum);
    }
    Ok(sums)
}

fn check_quadratic(s: WeightTriple, max_order: usize) -> Result<(), VertexError> {
    if !s.is_admissible() {
        return Err(VertexError::Inadmissible { weights: s });
    }
    if max_order % 2 == 1 {
        return Err(VertexError::OddOrder(max_order));
    }
    Ok(())
}

/// Quadratic equivariant vertex measure
/// `W(s, q) = 1 + sum_l q^(2l) sum_{|P| = l} prod_w (eps(w) w)^(-v_w(P))`.
pub fn vertex_measure_quadratic(s: WeightTriple, max_order: usize) -> Result<PowerSeries, VertexError> {
    check_quadratic(s, max_order)?;
    let sums = level_sums(s, max_order / 2, RatioKind::Signed)?;
    let mut coeffs = vec![Rational::zero(); max_order + 1];
    for (l, c) in sums.into_iter().enumerate() {
        coeffs[2 * l] = c;
    }
    Ok(PowerSeries::from_coeffs(coeffs))
}

/// The same measure with the sign pulled out of each term:
/// `1 + sum_l (-q^2)^l sum_{|P| = l} prod_w w^(-v_w(P))`.
pub fn vertex_measure_quadratic_sign_extracted(s: WeightTriple, max_order: usize) -> Result<PowerSeries, VertexError> {
    check_quadratic(s, max_order)?;
    let sums = level_sums(s, max_order / 2, RatioKind::Plain)?;
    let mut coeffs = vec![Rational::zero(); max_order + 1];
    for (l, c) in sums.into_iter().enumerate() {
        coeffs[2 * l] = if l % 2 == 1 { -c } else { c };
    }
    Ok(PowerSeries::from_coeffs(coeffs))
}

/// Classical vertex measure `W'(s, q) = 1 + sum_l q^l sum_{|P| = l} prod_w w^(-v_w(P))`.
/// No parity condition on `s`.
pub fn vertex_measure_classical(s: WeightTriple, max_order: usize) -> Result<PowerSeries, VertexError> {
    Ok(PowerSeries::from_coeffs(level_sums(s, max_order, RatioKind::Plain)?))
}

/// `gamma(s) = (s1+s2)(s1+s3)(s2+s3) / (s1 s2 s3)`.
pub fn gamma(s: WeightTriple) -> Result<Rational, VertexError> {
    let [a, b, c] = s.0;
    if a == 0 || b == 0 || c == 0 {
        return Err(VertexError::ZeroCoordinateWeight(s));
    }
    let num = num_bigint::BigInt::from(a + b) * (a + c) * (b + c);
    let den = num_bigint::BigInt::from(a) * b * c;
    Ok(Rational::new(num, den))
}
