//! Shearing maps `f(z) = (z1 + g(z2), z2)` of the unit ball and their
//! coefficient certificates.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{
    check_disk, BallPoint, CoeffSum, CoefficientSeries, DiskFunction, SeriesFunction,
};

/// `3 sqrt(3) / 2`, the sharp bound on `sum (k-1)|a_k|` for starlikeness.
pub const STARLIKE_CONSTANT: f64 = 2.598_076_211_353_316;

/// Largest admissible tail `sum_{k>N} k|a_k|` for the embedding criterion.
pub const EMBED_TAIL_LIMIT: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct ShearingMap {
    g: Arc<dyn DiskFunction>,
}

impl ShearingMap {
    pub fn new(g: Arc<dyn DiskFunction>) -> Self {
        ShearingMap { g }
    }

    pub fn from_series(series: CoefficientSeries) -> Self {
        Self::new(Arc::new(SeriesFunction::new(series)))
    }

    pub fn identity() -> Self {
        Self::from_series(CoefficientSeries::zero())
    }

    pub fn g(&self) -> &dyn DiskFunction {
        self.g.as_ref()
    }

    pub fn coefficients(&self) -> Option<&CoefficientSeries> {
        self.g.coefficients()
    }

    fn require_coefficients(&self, op: &'static str) -> Result<&CoefficientSeries> {
        self.coefficients().ok_or(Error::Unsupported(op))
    }

    pub fn eval(&self, z: &BallPoint) -> Result<[Complex64; 2]> {
        Ok([z.z1() + self.g.value(z.z2())?, z.z2()])
    }

    /// `(w1 - g(w2), w2)`; only `w2` is restricted.
    pub fn inverse_eval(&self, w: [Complex64; 2]) -> Result<[Complex64; 2]> {
        check_disk(w[1])?;
        Ok([w[0] - self.g.value(w[1])?, w[1]])
    }

    pub fn jacobian(&self, z: &BallPoint) -> Result<Jacobian2> {
        Ok(Jacobian2::unipotent(self.g.deriv(z.z2())?))
    }

    /// The polynomial shear `f_m` built from `a_2..a_m`.
    pub fn truncate(&self, m: usize) -> Result<ShearingMap> {
        if m < 2 {
            return Err(Error::Domain {
                what: "truncation degree",
                value: m as f64,
                range: "[2, inf)",
            });
        }
        let s = self.require_coefficients("truncate_shear")?;
        Ok(Self::from_series(s.truncated(m)))
    }

    /// `f_n^{-1} o f`, the shear whose coefficients are `{a_k}_{k>n}`.
    pub fn tail_compose(&self, n: usize) -> Result<ShearingMap> {
        if n < 1 {
            return Err(Error::Domain {
                what: "tail degree",
                value: n as f64,
                range: "[1, inf)",
            });
        }
        let s = self.require_coefficients("tail_compose")?;
        Ok(Self::from_series(s.tail_part(n)))
    }

    pub fn describe(&self) -> String {
        self.g.describe()
    }
}

/// A 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Jacobian2 {
    pub fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Jacobian2 { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Self::unipotent(Complex64::new(0.0, 0.0))
    }

    /// `[[1, m], [0, 1]]`.
    pub fn unipotent(m: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Jacobian2::new(one, m, zero, one)
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn is_unipotent(&self) -> bool {
        let one = Complex64::new(1.0, 0.0);
        self.a11 == one && self.a22 == one && self.a21 == Complex64::new(0.0, 0.0)
    }

    pub fn inverse(&self) -> Option<Jacobian2> {
        let d = self.det();
        if d.norm_sqr() == 0.0 {
            return None;
        }
        Some(Jacobian2::new(
            self.a22 / d,
            -self.a12 / d,
            -self.a21 / d,
            self.a11 / d,
        ))
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    Starlike,
    Starshapelike,
    Embeddable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateStatus {
    Certified,
    NotCertified,
}

/// Outcome of a coefficient criterion together with its slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub status: CertificateStatus,
    /// Minimal certified degree `N`; only for certified embeddings.
    pub degree: Option<usize>,
    pub margin: f64,
    /// Certified starlike maps are normalized starlike, hence in S0.
    pub s0_member: bool,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertificateStatus::Certified
    }

    pub const CSV_HEADER: &'static str = "kind,status,degree,margin,s0_member";

    pub fn csv_row(&self) -> String {
        format!(
            "{:?},{:?},{},{},{}",
            self.kind,
            self.status,
            self.degree.map(|d| d.to_string()).unwrap_or_default(),
            crate::report::fmt_real(self.margin),
            self.s0_member
        )
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?}", self.kind, self.status)?;
        if let Some(n) = self.degree {
            write!(f, " N={}", n)?;
        }
        write!(f, " margin={}", self.margin)
    }
}

/// Certified when `sum (k-1)|a_k| <= 3 sqrt(3)/2` (equality allowed).
pub fn starlike_certificate(f: &ShearingMap) -> Certificate {
    let s2 = f.coefficients().map_or(CoeffSum::NotFinite, |s| s.s2());
    let (status, margin) = match s2 {
        CoeffSum::Finite(v) if v <= STARLIKE_CONSTANT => {
            (CertificateStatus::Certified, STARLIKE_CONSTANT - v)
        }
        CoeffSum::Finite(v) => (CertificateStatus::NotCertified, STARLIKE_CONSTANT - v),
        CoeffSum::NotFinite => (CertificateStatus::NotCertified, f64::NEG_INFINITY),
    };
    Certificate {
        kind: CertificateKind::Starlike,
        status,
        degree: None,
        margin,
        s0_member: status == CertificateStatus::Certified,
    }
}

/// Certified when `sum k|a_k|` is known to be finite; the margin is that sum.
pub fn starshapelike_certificate(f: &ShearingMap) -> Certificate {
    let s1 = f.coefficients().map_or(CoeffSum::NotFinite, |s| s.s1());
    let (status, margin) = match s1 {
        CoeffSum::Finite(v) => (CertificateStatus::Certified, v),
        CoeffSum::NotFinite => (CertificateStatus::NotCertified, f64::INFINITY),
    };
    Certificate {
        kind: CertificateKind::Starshapelike,
        status,
        degree: None,
        margin,
        s0_member: false,
    }
}

/// Smallest `N <= n_max` with `sum_{k>N} k|a_k| <= 1`.
///
/// Such an `N` makes `f_N^{-1} o f` a member of S0, so `f` embeds into a
/// Loewner chain with range C^2.
pub fn embed_certificate(f: &ShearingMap, n_max: usize) -> Certificate {
    let not_certified = |margin| Certificate {
        kind: CertificateKind::Embeddable,
        status: CertificateStatus::NotCertified,
        degree: None,
        margin,
        s0_member: false,
    };
    let Some(series) = f.coefficients() else {
        return not_certified(f64::NEG_INFINITY);
    };
    let mut last_margin = f64::NEG_INFINITY;
    for n in 1..=n_max {
        let CoeffSum::Finite(tail) = series.tail_sum(n) else {
            return not_certified(f64::NEG_INFINITY);
        };
        last_margin = EMBED_TAIL_LIMIT - tail;
        if tail <= EMBED_TAIL_LIMIT {
            return Certificate {
                kind: CertificateKind::Embeddable,
                status: CertificateStatus::Certified,
                degree: Some(n),
                margin: last_margin,
                s0_member: false,
            };
        }
    }
    not_certified(last_margin)
}

/// Default search limit for [`embed_certificate`].
pub const DEFAULT_EMBED_MAX_DEGREE: usize = 1000;

/// Largest `||f(z) - h(z)||` over a polar grid of the ball of radius `radius`.
///
/// Both maps are shears, so the difference depends on `z2` only; the grid
/// covers `|z2| <= radius` with the boundary circle included.
pub fn max_deviation(
    f: &ShearingMap,
    h: &ShearingMap,
    radius: f64,
    radial: usize,
    angular: usize,
) -> Result<f64> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::Domain {
            what: "radius",
            value: radius,
            range: "(0, 1)",
        });
    }
    let mut sup = 0.0f64;
    for i in 0..=radial.max(1) {
        let rho = radius * i as f64 / radial.max(1) as f64;
        for j in 0..angular.max(1) {
            let theta = std::f64::consts::TAU * j as f64 / angular.max(1) as f64;
            let z = BallPoint::new(Complex64::new(0.0, 0.0), Complex64::from_polar(rho, theta))?;
            let a = f.eval(&z)?;
            let b = h.eval(&z)?;
            let d = ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt();
            sup = sup.max(d);
        }
    }
    Ok(sup)
}
