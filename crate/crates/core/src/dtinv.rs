//! Localized equivariant quadratic DT series of an oriented toric threefold.
//!
//! An embedding `t -> (t^a, t^b, t^c)` with odd `a, b, c` turns each cone's
//! weight matrix `S` into coordinate weights `(a, b, c) . S`. Fixed points
//! come in pairs `{k, -k}` with opposite weights, and the series is the
//! product over one representative per pair of the quadratic vertex measure.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::character::WeightTriple;
use crate::fan::{sigma_orbits, weight_matrices, Fan, FanError};
use crate::partitions::{enumerate_partitions_up_to, Partition3D};
use crate::series::{macmahon, PowerSeries, Rational, SeriesError, Substitution};
use crate::vertex::{gamma, partition_ratio, vertex_measure_quadratic, RatioKind, VertexError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DtError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("invalid embedding ({a}, {b}, {c}): {reason}")]
    InvalidParams {
        a: i64,
        b: i64,
        c: i64,
        reason: &'static str,
    },
    #[error(
        "degenerate weights at cone {cone} (weights {weights}): partition {partition:?} of colength {colength} \
         has a weight-0 term; reselect weights with a larger colength bound"
    )]
    DegenerateWeights {
        cone: usize,
        weights: WeightTriple,
        colength: usize,
        partition: Partition3D,
    },
    #[error("no generic weights with entries up to {bound} for colength {max_colength}")]
    SearchExhausted { bound: i64, max_colength: usize },
    #[error("coordinate weight or pairwise weight sum vanishes at cone {cone} (weights {weights})")]
    VanishingWeight { cone: usize, weights: WeightTriple },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// An element of `((Z/4)^x)^3 / {+-1}`, stored with first entry 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TauClass(pub [u8; 3]);

impl TauClass {
    pub const ALL: [TauClass; 4] = [
        TauClass([1, 1, 1]),
        TauClass([1, 1, 3]),
        TauClass([1, 3, 1]),
        TauClass([1, 3, 3]),
    ];

    /// Class of an odd triple.
    pub fn of(a: i64, b: i64, c: i64) -> TauClass {
        let m = [a, b, c].map(|x| x.rem_euclid(4) as u8);
        if m[0] == 1 {
            TauClass(m)
        } else {
            TauClass(m.map(|x| (4 - x) % 4))
        }
    }

    /// Parses `"1,3,3"` style text; the triple is normalized modulo sign.
    pub fn parse(text: &str) -> Option<TauClass> {
        let parts: Vec<i64> = text.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
        match parts.as_slice() {
            [a, b, c] if [a, b, c].iter().all(|x| x.rem_euclid(2) == 1) => Some(TauClass::of(*a, *b, *c)),
            _ => None,
        }
    }
}

impl fmt::Display for TauClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

/// Odd, positive, coprime `(a, b, c)` defining `t -> (t^a, t^b, t^c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EmbeddingParams {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl EmbeddingParams {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self, DtError> {
        let invalid = |reason| DtError::InvalidParams { a, b, c, reason };
        if a <= 0 || b <= 0 || c <= 0 {
            return Err(invalid("entries must be positive"));
        }
        if a % 2 == 0 || b % 2 == 0 || c % 2 == 0 {
            return Err(invalid("entries must be odd"));
        }
        if a.gcd(&b).gcd(&c) != 1 {
            return Err(invalid("entries must generate the unit ideal"));
        }
        Ok(EmbeddingParams { a, b, c })
    }

    pub fn tau_class(&self) -> TauClass {
        TauClass::of(self.a, self.b, self.c)
    }

    fn as_array(&self) -> [i64; 3] {
        [self.a, self.b, self.c]
    }
}

impl fmt::Display for EmbeddingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// `s^k = (a, b, c) . S^k` for every maximal cone, in cone order.
pub fn cone_weights(f: &Fan, p: EmbeddingParams) -> Result<Vec<WeightTriple>, DtError> {
    let v = p.as_array();
    Ok(weight_matrices(f)?
        .iter()
        .map(|s| WeightTriple(std::array::from_fn(|j| (0..3).map(|i| v[i] * s[i][j]).sum())))
        .collect())
}

/// Representative cones and their weights.
fn representative_weights(f: &Fan, p: EmbeddingParams) -> Result<Vec<(usize, WeightTriple)>, DtError> {
    let weights = cone_weights(f, p)?;
    Ok(sigma_orbits(f)?
        .into_iter()
        .map(|(rep, _)| (rep, weights[rep]))
        .collect())
}

fn lift_vertex_error(cone: usize, e: VertexError) -> DtError {
    match e {
        VertexError::DegenerateWeights {
            weights,
            colength,
            partition,
        } => DtError::DegenerateWeights {
            cone,
            weights,
            colength,
            partition,
        },
        VertexError::ZeroCoordinateWeight(weights) => DtError::VanishingWeight { cone, weights },
        other => DtError::Invariant(format!("cone {cone}: {other}")),
    }
}

fn check_coordinate_weights(cone: usize, s: WeightTriple) -> Result<(), DtError> {
    let [x, y, z] = s.0;
    if x == 0 || y == 0 || z == 0 {
        return Err(DtError::VanishingWeight { cone, weights: s });
    }
    // Pairwise sums are weights of the single-box character.
    if x + y == 0 || x + z == 0 || y + z == 0 {
        return Err(DtError::DegenerateWeights {
            cone,
            weights: s,
            colength: 1,
            partition: Partition3D::new(vec![[0, 0, 0]]).expect("single box"),
        });
    }
    Ok(())
}

/// Certifies that `p` is generic up to colength `max_colength`: every
/// coordinate weight is nonzero, and at each representative cone no
/// partition with at most `max_colength` boxes has a weight-0 term.
pub fn certify_weights(f: &Fan, p: EmbeddingParams, max_colength: usize) -> Result<(), DtError> {
    let reps = representative_weights(f, p)?;
    for &(cone, s) in &reps {
        check_coordinate_weights(cone, s)?;
    }
    let levels = enumerate_partitions_up_to(max_colength);
    for &(cone, s) in &reps {
        levels[1..]
            .par_iter()
            .flatten()
            .try_for_each(|part| partition_ratio(part, s, RatioKind::Plain).map(|_| ()))
            .map_err(|e| lift_vertex_error(cone, e))?;
    }
    Ok(())
}

/// Default largest entry tried by [`select_weights`].
pub const DEFAULT_SEARCH_BOUND: i64 = 99;

/// Smallest generic embedding: odd entries by increasing `max(a, b, c)`, then
/// lexicographically, coprimality and `tau` filtered before certification.
pub fn select_weights(
    f: &Fan,
    max_colength: usize,
    tau: Option<TauClass>,
    bound: i64,
) -> Result<EmbeddingParams, DtError> {
    // Orientation failures surface before the search starts.
    weight_matrices(f)?;
    let mut m = 1;
    while m <= bound {
        for a in (1..=m).step_by(2) {
            for b in (1..=m).step_by(2) {
                for c in (1..=m).step_by(2) {
                    if a.max(b).max(c) != m {
                        continue;
                    }
                    let Ok(p) = EmbeddingParams::new(a, b, c) else {
                        continue;
                    };
                    if tau.is_some_and(|t| t != p.tau_class()) {
                        continue;
                    }
                    match certify_weights(f, p, max_colength) {
                        Ok(()) => return Ok(p),
                        Err(DtError::DegenerateWeights { .. } | DtError::VanishingWeight { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        m += 2;
    }
    Err(DtError::SearchExhausted { bound, max_colength })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeWeight {
    pub cone: usize,
    pub weights: WeightTriple,
    pub representative: bool,
}

/// Result of a quadratic DT computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtReport {
    pub series: PowerSeries,
    /// Coefficient of `q^2`; the series equals `M(q^2)^exponent`.
    pub exponent: Rational,
    /// Bott residue of `deg c3(T_X (x) K_X)`, equal to `2 * exponent`.
    pub bott_c3: Rational,
    pub params: EmbeddingParams,
    pub cone_weights: Vec<ConeWeight>,
}

fn per_cone_measures(reps: &[(usize, WeightTriple)], order: usize) -> Result<Vec<PowerSeries>, DtError> {
    reps.par_iter()
        .map(|&(cone, s)| vertex_measure_quadratic(s, order).map_err(|e| lift_vertex_error(cone, e)))
        .collect()
}

/// `prod over orbit representatives of W(s^k, q)` through `q^max_order`,
/// checked against `M(q^2)^{c}` with `c` its own `q^2` coefficient and
/// against the Bott residue.
pub fn quadratic_dt_series(f: &Fan, p: EmbeddingParams, max_order: usize) -> Result<DtReport, DtError> {
    let weights = cone_weights(f, p)?;
    let orbits = sigma_orbits(f)?;
    let reps: Vec<(usize, WeightTriple)> = orbits.iter().map(|&(r, _)| (r, weights[r])).collect();
    for &(cone, s) in &reps {
        check_coordinate_weights(cone, s)?;
    }
    let even = max_order - max_order % 2;
    let measures = per_cone_measures(&reps, even)?;
    let product = measures.iter().try_fold(PowerSeries::one(even), |acc, w| acc.mul(w))?;
    // The next coefficient sits at an odd power and vanishes.
    let mut coeffs = product.into_coeffs();
    coeffs.resize(max_order + 1, Rational::zero());
    let series = PowerSeries::from_coeffs(coeffs);

    for (n, c) in series.coeffs().iter().enumerate() {
        if n % 2 == 1 && !c.is_zero() {
            return Err(DtError::Invariant(format!("odd coefficient q^{n} is {c}")));
        }
    }

    let exponent = if max_order >= 2 {
        series.coeff(2).clone()
    } else {
        // Without q^2 the exponent comes from the weights directly.
        -reps
            .iter()
            .map(|&(cone, s)| gamma(s).map_err(|e| lift_vertex_error(cone, e)))
            .sum::<Result<Rational, _>>()?
    };
    let shape = macmahon(max_order / 2)
        .pow(&exponent)?
        .substitute(Substitution::Square, max_order);
    if shape != series {
        return Err(DtError::Invariant(format!(
            "series {series} differs from M(q^2)^({exponent})"
        )));
    }

    let bott_c3 = bott_residue_from_weights(&weights)?;
    if bott_c3 != &exponent * Rational::from_integer(2.into()) {
        return Err(DtError::Invariant(format!(
            "Bott residue {bott_c3} is not twice the q^2 coefficient {exponent}"
        )));
    }

    let rep_set: Vec<usize> = reps.iter().map(|r| r.0).collect();
    Ok(DtReport {
        series,
        exponent,
        bott_c3,
        params: p,
        cone_weights: weights
            .iter()
            .enumerate()
            .map(|(cone, &w)| ConeWeight {
                cone,
                weights: w,
                representative: rep_set.contains(&cone),
            })
            .collect(),
    })
}

fn bott_residue_from_weights(weights: &[WeightTriple]) -> Result<Rational, DtError> {
    let mut total = Rational::zero();
    for (cone, &s) in weights.iter().enumerate() {
        check_coordinate_weights(cone, s)?;
        total -= gamma(s).map_err(|e| lift_vertex_error(cone, e))?;
    }
    if !total.is_integer() || total.numer().is_odd() {
        return Err(DtError::Invariant(format!(
            "Bott residue {total} is not an even integer"
        )));
    }
    Ok(total)
}

/// `deg c3(T_X (x) K_X) = -sum_k (s1+s2)(s1+s3)(s2+s3) / (s1 s2 s3)` over
/// every maximal cone.
pub fn bott_residue_c3(f: &Fan, p: EmbeddingParams) -> Result<Rational, DtError> {
    bott_residue_from_weights(&cone_weights(f, p)?)
}

/// `M(-q)^{deg c3(T_X (x) K_X)}` through `q^max_order`.
pub fn classical_dt_series(f: &Fan, p: EmbeddingParams, max_order: usize) -> Result<PowerSeries, DtError> {
    let c3 = bott_residue_c3(f, p)?;
    Ok(macmahon(max_order)
        .pow(&c3)?
        .substitute(Substitution::Negate, max_order))
}

/// Direct fixed-point sum for the `q^n` coefficient.
///
/// For odd `n` there are no fixed ideals. For `n = 2m`, every assignment of a
/// partition to each orbit representative with `m` boxes in total contributes
/// the product of its Euler ratios. Tuples are enumerated one by one; this
/// path shares only the per-partition ratio with the series product.
pub fn localization_oracle(f: &Fan, p: EmbeddingParams, n: usize) -> Result<Rational, DtError> {
    let reps = representative_weights(f, p)?;
    if n % 2 == 1 {
        return Ok(Rational::zero());
    }
    let m = n / 2;
    let levels = enumerate_partitions_up_to(m);
    // ratios[i][size] = Euler ratio of each partition of that size at rep i
    let ratios: Vec<Vec<Vec<Rational>>> = reps
        .iter()
        .map(|&(cone, s)| {
            levels
                .iter()
                .map(|level| {
                    level
                        .iter()
                        .map(|part| partition_ratio(part, s, RatioKind::Signed))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| lift_vertex_error(cone, e))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    // The first representative's partition choice is spread over workers.
    let first: Vec<(usize, &Rational)> = (0..=m)
        .flat_map(|size| ratios[0][size].iter().map(move |r| (size, r)))
        .collect();
    let total = first
        .par_iter()
        .map(|&(size, r)| r * tuple_sum(&ratios[1..], m - size))
        .reduce(Rational::zero, |a, b| a + b);
    Ok(total)
}

/// Sum over every tuple of partitions, one per remaining representative,
/// with exactly `remaining` boxes in total.
fn tuple_sum(ratios: &[Vec<Vec<Rational>>], remaining: usize) -> Rational {
    match ratios.split_first() {
        None => {
            if remaining == 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
        Some((head, tail)) => {
            let mut total = Rational::zero();
            for (size, level) in head.iter().enumerate().take(remaining + 1) {
                for r in level {
                    total += r * tuple_sum(tail, remaining - size);
                }
            }
            total
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauEntry {
    pub tau: TauClass,
    pub params: EmbeddingParams,
    pub series: PowerSeries,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauReport {
    pub entries: Vec<TauEntry>,
    pub all_equal: bool,
}

/// Computes the series once per class in `((Z/4)^x)^3 / {+-1}`, each with the
/// smallest certified embedding in that class.
pub fn tau_independence_check(f: &Fan, max_order: usize) -> Result<TauReport, DtError> {
    let mut entries = Vec::new();
    for tau in TauClass::ALL {
        let params = select_weights(f, max_order / 2, Some(tau), DEFAULT_SEARCH_BOUND)?;
        let report = quadratic_dt_series(f, params, max_order)?;
        entries.push(TauEntry {
            tau,
            params,
            series: report.series,
        });
    }
    let all_equal = entries.windows(2).all(|w| w[0].series == w[1].series);
    Ok(TauReport { entries, all_equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::star_subdivide;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn params_validation() {
        assert!(EmbeddingParams::new(1, 3, 5).is_ok());
        assert!(EmbeddingParams::new(2, 3, 5).is_err());
        assert!(EmbeddingParams::new(-1, 3, 5).is_err());
        assert!(EmbeddingParams::new(3, 9, 15).is_err());
    }

    #[test]
    fn tau_classes() {
        assert_eq!(TauClass::of(1, 3, 5), TauClass([1, 3, 1]));
        assert_eq!(TauClass::of(3, 3, 5), TauClass([1, 1, 3]));
        assert_eq!(TauClass::parse("3, 1, 1"), Some(TauClass([1, 3, 3])));
        assert_eq!(TauClass::parse("2,1,1"), None);
        let mut seen: Vec<_> = (1..16)
            .step_by(2)
            .flat_map(|a| {
                (1..16)
                    .step_by(2)
                    .flat_map(move |b| (1..16).step_by(2).map(move |c| TauClass::of(a, b, c)))
            })
            .collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen, TauClass::ALL.to_vec());
    }

    #[test]
    fn octant_weights() {
        let f = Fan::octants();
        let p = EmbeddingParams::new(1, 3, 5).unwrap();
        let w = cone_weights(&f, p).unwrap();
        assert_eq!(w[0], WeightTriple::new(-2, -6, -10));
        assert_eq!(w[7], WeightTriple::new(2, 6, 10));
        // Octant (0,1,0) has generators e1, -e2, e3.
        // Octant (0,1,0): rays ordered e1, e3, -e2.
        assert_eq!(w[2], WeightTriple::new(-2, -10, 6));
        for s in &w {
            assert!(s.is_admissible());
        }
    }

    #[test]
    fn degenerate_selection() {
        let f = Fan::octants();
        let p = EmbeddingParams::new(1, 1, 1).unwrap();
        assert!(matches!(
            certify_weights(&f, p, 1),
            Err(DtError::VanishingWeight { .. } | DtError::DegenerateWeights { .. })
        ));
        let small = EmbeddingParams::new(1, 3, 5).unwrap();
        assert!(certify_weights(&f, small, 2).is_ok());
        assert!(matches!(
            certify_weights(&f, small, 3),
            Err(DtError::DegenerateWeights { colength: 3, .. })
        ));
        let chosen = select_weights(&f, 3, None, DEFAULT_SEARCH_BOUND).unwrap();
        assert_eq!(chosen, EmbeddingParams::new(1, 7, 11).unwrap());
        let classed = select_weights(&f, 2, Some(TauClass([1, 3, 3])), DEFAULT_SEARCH_BOUND).unwrap();
        assert_eq!(classed.tau_class(), TauClass([1, 3, 3]));
    }

    #[test]
    fn octant_series() {
        let f = Fan::octants();
        let p = select_weights(&f, 4, None, DEFAULT_SEARCH_BOUND).unwrap();
        let report = quadratic_dt_series(&f, p, 8).unwrap();
        assert_eq!(
            report.series,
            PowerSeries::from_integers(&[1, 0, -8, 0, 12, 0, 48, 0, -98])
        );
        assert_eq!(report.exponent, r(-8));
        assert_eq!(report.bott_c3, r(-16));
    }

    #[test]
    fn odd_truncation_order_is_padded() {
        let f = Fan::octants();
        let p = EmbeddingParams::new(1, 3, 5).unwrap();
        let report = quadratic_dt_series(&f, p, 3).unwrap();
        assert_eq!(report.series, PowerSeries::from_integers(&[1, 0, -8, 0]));
    }

    #[test]
    fn oracle_small_cases() {
        let f = Fan::octants();
        let p = EmbeddingParams::new(1, 3, 5).unwrap();
        assert_eq!(localization_oracle(&f, p, 3).unwrap(), r(0));
        assert_eq!(localization_oracle(&f, p, 2).unwrap(), r(-8));
        assert_eq!(localization_oracle(&f, p, 0).unwrap(), r(1));
    }

    #[test]
    fn classical_series_first_term() {
        let f = Fan::octants();
        let p = EmbeddingParams::new(1, 3, 5).unwrap();
        let s = classical_dt_series(&f, p, 2).unwrap();
        assert_eq!(*s.coeff(0), r(1));
        assert_eq!(*s.coeff(1), r(16));
    }

    #[test]
    fn blowup_residue() {
        let g = star_subdivide(&Fan::octants(), 0).unwrap();
        let p = select_weights(&g, 1, None, DEFAULT_SEARCH_BOUND).unwrap();
        // c3 - c1 c2 = 12 - 24.
        assert_eq!(bott_residue_c3(&g, p).unwrap(), r(-12));
    }
}
