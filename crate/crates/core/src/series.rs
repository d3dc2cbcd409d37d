//! Normalized power series `g(z) = sum_{k>=2} a_k z^k` on the unit disk.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logmag::LogComplex;

/// First stored Taylor index; `a_0 = a_1 = 0` are structurally absent.
pub const FIRST_INDEX: usize = 2;

pub(crate) fn check_disk(zeta: Complex64) -> Result<()> {
    if !(zeta.re.is_finite() && zeta.im.is_finite()) {
        return Err(Error::NonFinite("disk point"));
    }
    if zeta.norm_sqr() >= 1.0 {
        return Err(Error::OutsideDisk {
            re: zeta.re,
            im: zeta.im,
        });
    }
    Ok(())
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// What is known about the coefficients beyond the stored ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// The series is a polynomial; nothing follows the last stored term.
    Polynomial,
    /// `sum_{k>M} k |a_k| <= bound`.
    Bounded(f64),
    /// Non-polynomial source with no usable bound.
    Unknown,
}

/// A weighted coefficient sum, or the marker that it is not known to be finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoeffSum {
    Finite(f64),
    NotFinite,
}

impl CoeffSum {
    pub fn value(self) -> Option<f64> {
        match self {
            CoeffSum::Finite(v) => Some(v),
            CoeffSum::NotFinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, CoeffSum::Finite(_))
    }
}

/// Taylor data `a_2, ..., a_M` of a disk function with `g(0) = g'(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    coeffs: Vec<Complex64>,
    tail: Tail,
}

impl CoefficientSeries {
    pub fn new(coeffs: Vec<Complex64>, tail: Tail) -> Result<Self> {
        if coeffs
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite("series coefficient"));
        }
        if let Tail::Bounded(b) = tail {
            if !(b.is_finite() && b >= 0.0) {
                return Err(Error::Domain {
                    what: "tail_bound",
                    value: b,
                    range: "[0, inf)",
                });
            }
        }
        Ok(CoefficientSeries { coeffs, tail })
    }

    /// Polynomial with coefficients `a_2, a_3, ...`.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(coeffs, Tail::Polynomial)
    }

    pub fn zero() -> Self {
        CoefficientSeries {
            coeffs: Vec::new(),
            tail: Tail::Polynomial,
        }
    }

    /// `g(z) = a2 z^2`.
    pub fn monomial(a2: Complex64) -> Result<Self> {
        Self::polynomial(vec![a2])
    }

    /// Build from real coefficients `a_k = coeff(k)` for `k = 2..=degree`.
    pub fn from_fn(degree: usize, tail: Tail, coeff: impl Fn(usize) -> Complex64) -> Result<Self> {
        let coeffs = (FIRST_INDEX..=degree).map(coeff).collect();
        Self::new(coeffs, tail)
    }

    /// Stored coefficients; element `j` is `a_{j+2}`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// `a_k`, zero for indices that are not stored.
    pub fn coeff(&self, k: usize) -> Complex64 {
        if k < FIRST_INDEX {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs
            .get(k - FIRST_INDEX)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Highest stored index `M` (1 for the empty series).
    pub fn degree(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn is_zero(&self) -> bool {
        self.tail == Tail::Polynomial && self.coeffs.iter().all(|c| c.norm_sqr() == 0.0)
    }

    /// `sum_{k=2}^{M} a_k z^k` by nested multiplication.
    pub fn eval(&self, zeta: Complex64) -> Result<Complex64> {
        check_disk(zeta)?;
        Ok(self.eval_unchecked(zeta))
    }

    pub(crate) fn eval_unchecked(&self, zeta: Complex64) -> Complex64 {
        let inner = self
            .coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * zeta + a);
        inner * zeta * zeta
    }

    /// `sum_{k=2}^{M} k a_k z^{k-1}`.
    pub fn deriv_eval(&self, zeta: Complex64) -> Result<Complex64> {
        check_disk(zeta)?;
        Ok(self.deriv_unchecked(zeta))
    }

    pub(crate) fn deriv_unchecked(&self, zeta: Complex64) -> Complex64 {
        let inner = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (j, &a)| {
                acc * zeta + a * (j + FIRST_INDEX) as f64
            });
        inner * zeta
    }

    /// Bound on `|g(z) - eval(z)|` from the stored tail bound.
    pub fn truncation_error_bound(&self, zeta: Complex64) -> CoeffSum {
        match self.tail {
            Tail::Polynomial => CoeffSum::Finite(0.0),
            Tail::Bounded(b) => CoeffSum::Finite(b * zeta.norm().powi(self.degree() as i32 + 1)),
            Tail::Unknown => CoeffSum::NotFinite,
        }
    }

    fn weighted_sum(&self, from: usize, weight: impl Fn(usize) -> f64) -> CoeffSum {
        let tail = match self.tail {
            Tail::Polynomial => 0.0,
            Tail::Bounded(b) => b,
            Tail::Unknown => return CoeffSum::NotFinite,
        };
        // smallest terms first
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| (j + FIRST_INDEX, a))
            .filter(|(k, _)| *k >= from)
            .rev()
            .map(|(k, a)| weight(k) * a.norm());
        CoeffSum::Finite(compensated_sum(std::iter::once(tail).chain(terms)))
    }

    /// `sum k |a_k|` including the tail bound.
    pub fn s1(&self) -> CoeffSum {
        self.weighted_sum(FIRST_INDEX, |k| k as f64)
    }

    /// `sum (k-1) |a_k|`; the tail bound on `sum k|a_k|` also bounds this tail.
    pub fn s2(&self) -> CoeffSum {
        self.weighted_sum(FIRST_INDEX, |k| (k - 1) as f64)
    }

    /// `sum_{k>n} k |a_k|`, with the tail bound added for every `n`
    /// (past the stored degree it is the only information left).
    pub fn tail_sum(&self, n: usize) -> CoeffSum {
        self.weighted_sum(n + 1, |k| k as f64)
    }

    /// Coefficients `a_2..a_m`, as a polynomial.
    pub fn truncated(&self, m: usize) -> Self {
        let keep = m.saturating_sub(1).min(self.coeffs.len());
        CoefficientSeries {
            coeffs: self.coeffs[..keep].to_vec(),
            tail: Tail::Polynomial,
        }
    }

    /// Coefficients `a_k` for `k > n` only, keeping the tail information.
    pub fn tail_part(&self, n: usize) -> Self {
        let mut coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                if j + FIRST_INDEX > n {
                    a
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        while coeffs.last().is_some_and(|c| c.norm_sqr() == 0.0) {
            coeffs.pop();
        }
        CoefficientSeries {
            coeffs,
            tail: self.tail,
        }
    }

    pub fn to_spec(&self) -> SeriesSpec {
        SeriesSpec {
            start: FIRST_INDEX,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            tail_bound: match self.tail {
                Tail::Bounded(b) => Some(b),
                _ => None,
            },
        }
    }
}

/// On-disk form of a series: `{"start": 2, "coeffs": [[re, im], ...], "tail_bound": b}`.
///
/// A missing `tail_bound` means the series is a polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub start: usize,
    pub coeffs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
}

impl SeriesSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e)))
    }

    pub fn load(path: &Path) -> Result<CoefficientSeries> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
        Self::parse(&text)
            .and_then(|s| s.into_series())
            .map_err(|e| match e {
                Error::Parse(msg) => Error::Parse(format!("{}: {}", path.display(), msg)),
                other => other,
            })
    }

    pub fn into_series(self) -> Result<CoefficientSeries> {
        if self.start != FIRST_INDEX {
            return Err(Error::Parse(format!(
                "start must be {}, found {}",
                FIRST_INDEX, self.start
            )));
        }
        let coeffs = self
            .coeffs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        let tail = match self.tail_bound {
            Some(b) => Tail::Bounded(b),
            None => Tail::Polynomial,
        };
        CoefficientSeries::new(coeffs, tail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("series spec serializes")
    }
}

/// `Re(u_1 conj(v_1) + u_2 conj(v_2))`, conjugating the second argument.
pub fn re_inner(u: [Complex64; 2], v: [Complex64; 2]) -> f64 {
    (u[0] * v[0].conj() + u[1] * v[1].conj()).re
}

/// A holomorphic `g` on the unit disk with `g(0) = g'(0) = 0`.
///
/// The log-domain evaluators are primary; plain evaluation refuses once the
/// modulus exceeds `e^700`.
pub trait DiskFunction: fmt::Debug + Send + Sync {
    fn value_log(&self, zeta: Complex64) -> Result<LogComplex>;

    fn deriv_log(&self, zeta: Complex64) -> Result<LogComplex>;

    fn value(&self, zeta: Complex64) -> Result<Complex64> {
        self.value_log(zeta)?.to_complex()
    }

    fn deriv(&self, zeta: Complex64) -> Result<Complex64> {
        self.deriv_log(zeta)?.to_complex()
    }

    /// `ln |g(zeta)|`, `-inf` where `g` vanishes.
    fn log_abs(&self, zeta: Complex64) -> Result<f64> {
        Ok(self.value_log(zeta)?.log_abs)
    }

    fn coefficients(&self) -> Option<&CoefficientSeries> {
        None
    }

    /// Short human-readable description used in report digests.
    fn describe(&self) -> String;
}

/// A disk function given by its (truncated) Taylor series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFunction {
    series: CoefficientSeries,
}

impl SeriesFunction {
    pub fn new(series: CoefficientSeries) -> Self {
        SeriesFunction { series }
    }

    pub fn series(&self) -> &CoefficientSeries {
        &self.series
    }
}

impl DiskFunction for SeriesFunction {
    fn value_log(&self, zeta: Complex64) -> Result<LogComplex> {
        Ok(LogComplex::from_complex(self.series.eval(zeta)?))
    }

    fn deriv_log(&self, zeta: Complex64) -> Result<LogComplex> {
        Ok(LogComplex::from_complex(self.series.deriv_eval(zeta)?))
    }

    fn value(&self, zeta: Complex64) -> Result<Complex64> {
        self.series.eval(zeta)
    }

    fn deriv(&self, zeta: Complex64) -> Result<Complex64> {
        self.series.deriv_eval(zeta)
    }

    fn coefficients(&self) -> Option<&CoefficientSeries> {
        Some(&self.series)
    }

    fn describe(&self) -> String {
        let tail = match self.series.tail {
            Tail::Polynomial => "poly".to_string(),
            Tail::Bounded(b) => format!("tail<={:.3e}", b),
            Tail::Unknown => "tail=?".to_string(),
        };
        format!("series(M={},{})", self.series.degree(), tail)
    }
}

/// A point `(z1, z2)` of the open unit ball in C^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallPoint {
    z1: Complex64,
    z2: Complex64,
}

impl BallPoint {
    pub fn new(z1: Complex64, z2: Complex64) -> Result<Self> {
        if ![z1.re, z1.im, z2.re, z2.im].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("ball point"));
        }
        let norm_sqr = z1.norm_sqr() + z2.norm_sqr();
        if norm_sqr >= 1.0 {
            return Err(Error::OutsideBall { norm_sqr });
        }
        Ok(BallPoint { z1, z2 })
    }

    pub fn origin() -> Self {
        BallPoint {
            z1: Complex64::new(0.0, 0.0),
            z2: Complex64::new(0.0, 0.0),
        }
    }

    pub fn z1(&self) -> Complex64 {
        self.z1
    }

    pub fn z2(&self) -> Complex64 {
        self.z2
    }

    pub fn as_pair(&self) -> [Complex64; 2] {
        [self.z1, self.z2]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

#[cfg(test)]
pub(crate) use tests::half_powers;

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `a_k = 2^-k` for `k = 2..=40` with the exact tail `sum_{k>40} k 2^-k = 42 / 2^40`.
    pub(crate) fn half_powers() -> CoefficientSeries {
        CoefficientSeries::from_fn(40, Tail::Bounded(42.0 / 2f64.powi(40)), |k| {
            c(0.5f64.powi(k as i32), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn eval_matches_geometric_closed_form() {
        let s = half_powers();
        let z = c(0.5, 0.0);
        let closed = z * z / (c(4.0, 0.0) - z * 2.0);
        assert!((s.eval(z).unwrap() - closed).norm() < 1e-10);
        assert!((s.eval(z).unwrap().re - 0.083_333_333_333).abs() < 1e-10);
        let w = c(-0.3, 0.6);
        let closed_w = w * w / (c(4.0, 0.0) - w * 2.0);
        // truncation error at |w| = 0.67 is below 2^-40
        assert!((s.eval(w).unwrap() - closed_w).norm() < 1e-12);
    }

    #[test]
    fn eval_trivial_cases() {
        assert_eq!(half_powers().eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let sq = CoefficientSeries::monomial(c(1.0, 0.0)).unwrap();
        let v = sq.eval(c(0.3, 0.4)).unwrap();
        assert!((v - c(-0.07, 0.24)).norm() < 1e-15);
        assert!(matches!(
            sq.eval(c(1.0, 0.0)),
            Err(Error::OutsideDisk { .. })
        ));
        assert!(matches!(
            sq.deriv_eval(c(0.0, -1.2)),
            Err(Error::OutsideDisk { .. })
        ));
    }

    #[test]
    fn derivative_matches_closed_form() {
        let sq = CoefficientSeries::monomial(c(1.0, 0.0)).unwrap();
        assert_eq!(sq.deriv_eval(c(0.5, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(half_powers().deriv_eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        // d/dz z^2/(4-2z) = (8z - 2z^2) / (4-2z)^2
        let z = c(0.5, 0.0);
        let closed = (z * 8.0 - z * z * 2.0) / ((c(4.0, 0.0) - z * 2.0) * (c(4.0, 0.0) - z * 2.0));
        let d = half_powers().deriv_eval(z).unwrap();
        assert!((d - closed).norm() < 1e-9);
        assert!((d.re - 0.388_888_888_89).abs() < 1e-9);
    }

    #[test]
    fn coefficient_sums() {
        let s = half_powers();
        assert!((s.s1().value().unwrap() - 1.5).abs() < 1e-15);
        assert!((s.s2().value().unwrap() - 1.0).abs() < 1e-11);
        let sq = CoefficientSeries::monomial(c(1.0, 0.0)).unwrap();
        assert_eq!(sq.s1(), CoeffSum::Finite(2.0));
        assert_eq!(sq.s2(), CoeffSum::Finite(1.0));
        assert_eq!(CoefficientSeries::zero().s1(), CoeffSum::Finite(0.0));
        let sharp = 3.0 * 3f64.sqrt() / 2.0;
        let s = CoefficientSeries::monomial(c(sharp, 0.0)).unwrap();
        assert!((s.s2().value().unwrap() - 2.598_076_211).abs() < 1e-9);
        let unknown = CoefficientSeries::new(vec![c(1.0, 0.0)], Tail::Unknown).unwrap();
        assert_eq!(unknown.s1(), CoeffSum::NotFinite);
        assert_eq!(unknown.s2(), CoeffSum::NotFinite);
    }

    #[test]
    fn tail_sums() {
        let s = half_powers();
        assert_eq!(s.tail_sum(2), CoeffSum::Finite(1.0));
        assert_eq!(s.tail_sum(1), CoeffSum::Finite(1.5));
        let p = CoefficientSeries::polynomial(vec![c(1.0, 0.0), c(0.0, 2.0)]).unwrap();
        assert_eq!(p.tail_sum(3), CoeffSum::Finite(0.0));
        assert_eq!(p.tail_sum(10), CoeffSum::Finite(0.0));
        assert_eq!(p.tail_sum(2), CoeffSum::Finite(6.0));
    }

    #[test]
    fn re_inner_examples() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert_eq!(re_inner([one, zero], [one, zero]), 1.0);
        assert_eq!(re_inner([c(0.0, 1.0), zero], [one, zero]), 0.0);
        assert_eq!(
            re_inner([c(1.0, 1.0), c(2.0, 0.0)], [one, c(0.0, 1.0)]),
            1.0
        );
    }

    #[test]
    fn truncated_and_tail_partition_coefficients() {
        let s = half_powers();
        let head = s.truncated(5);
        let tail = s.tail_part(5);
        for k in 2..=41 {
            assert_eq!(head.coeff(k) + tail.coeff(k), s.coeff(k));
            assert!(head.coeff(k).norm() == 0.0 || tail.coeff(k).norm() == 0.0);
        }
        assert_eq!(head.tail(), Tail::Polynomial);
        assert_eq!(tail.tail(), s.tail());
        assert_eq!(
            s.truncated(100),
            CoefficientSeries::new(s.coeffs().to_vec(), Tail::Polynomial).unwrap()
        );
    }

    #[test]
    fn spec_file_parsing() {
        let spec = SeriesSpec::parse(
            r#"{"start": 2, "coeffs": [[1.0, 0.0], [0.0, -0.5]], "tail_bound": 0.25}"#,
        )
        .unwrap();
        let s = spec.clone().into_series().unwrap();
        assert_eq!(s.coeff(3), c(0.0, -0.5));
        assert_eq!(s.tail(), Tail::Bounded(0.25));
        assert_eq!(SeriesSpec::parse(&spec.to_json()).unwrap(), spec);

        let bad = SeriesSpec::parse(r#"{"start": 1, "coeffs": []}"#).unwrap();
        assert!(matches!(bad.into_series(), Err(Error::Parse(_))));
        let neg = SeriesSpec::parse(r#"{"start": 2, "coeffs": [], "tail_bound": -1}"#).unwrap();
        assert!(matches!(neg.into_series(), Err(Error::Domain { .. })));
        match SeriesSpec::parse("{\"start\": 2,\n \"coeffs\": [[1.0]]}") {
            Err(Error::Parse(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ball_point_rejects_outside() {
        assert!(BallPoint::new(c(0.6, 0.0), c(0.0, 0.7)).is_ok());
        assert!(matches!(
            BallPoint::new(c(0.6, 0.0), c(0.0, 0.8)),
            Err(Error::OutsideBall { .. })
        ));
        assert!(BallPoint::new(c(f64::NAN, 0.0), c(0.0, 0.0)).is_err());
    }
}
