//! The shear `f(z) = (z1 + z2^2 h(z2), z2)` with `h(zeta) = exp(i / (1 - zeta)^3)`.
//!
//! `f` has Runge image, but `||df(0, r)||` grows like `3 r^2 / (1 - r)^4`
//! while every map in `A0(C^2) o S0(B^2)` obeys `||df(0, r)|| <= 4C / (1 - r)^3`
//! for a constant `C` depending on the automorphism. The ratio
//! `||df(0, r)|| (1 - r)^3` therefore has to stay bounded for an embeddable
//! map; here it diverges.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::shear_opnorm;
use crate::logmag::LogComplex;
use crate::report::fmt_real;
use crate::series::{check_disk, BallPoint, DiskFunction};
use crate::shear::ShearingMap;

/// Ceiling of `||df(0, r)|| (1 - r)^3` for S0 maps: `(1 + sqrt r)^2 <= 4`.
pub const S0_CEILING: f64 = 4.0;

pub const DEFAULT_C_REPORT: f64 = 10.0;

pub const DEFAULT_GRID: [f64; 6] = [0.6, 0.7, 0.8, 0.9, 0.95, 0.99];

/// `log h(zeta) = i / (1 - zeta)^3`, phase reduced mod 2pi.
pub fn h_log(zeta: Complex64) -> Result<LogComplex> {
    check_disk(zeta)?;
    let one = Complex64::new(1.0, 0.0);
    let u = (one - zeta).powi(3).inv();
    Ok(LogComplex::exp(Complex64::new(0.0, 1.0) * u))
}

pub fn h(zeta: Complex64) -> Result<Complex64> {
    h_log(zeta)?.to_complex()
}

/// `g(zeta) = zeta^2 exp(i / (1 - zeta)^3)`; closed form, no Taylor data.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExpShearFunction;

impl DiskFunction for ExpShearFunction {
    fn value_log(&self, zeta: Complex64) -> Result<LogComplex> {
        Ok(LogComplex::from_complex(zeta * zeta) * h_log(zeta)?)
    }

    /// `g'(zeta) = (2 zeta + 3i zeta^2 / (1 - zeta)^4) h(zeta)`.
    fn deriv_log(&self, zeta: Complex64) -> Result<LogComplex> {
        let h = h_log(zeta)?;
        let one = Complex64::new(1.0, 0.0);
        let poly = zeta * 2.0 + Complex64::new(0.0, 3.0) * zeta * zeta / (one - zeta).powi(4);
        Ok(LogComplex::from_complex(poly) * h)
    }

    fn describe(&self) -> String {
        "counterexample(z^2 exp(i/(1-z)^3))".to_string()
    }
}

impl fmt::Display for ExpShearFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

pub fn counterexample_map() -> ShearingMap {
    ShearingMap::new(Arc::new(ExpShearFunction))
}

/// `max | |h(r)| - 1 |` over the grid.
pub fn unit_modulus_check(radii: &[f64]) -> Result<f64> {
    radii.iter().try_fold(0.0f64, |acc, &r| {
        check_open_unit("r", r)?;
        Ok(acc.max((h(Complex64::new(r, 0.0))?.norm() - 1.0).abs()))
    })
}

fn check_open_unit(what: &'static str, r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            what,
            value: r,
            range: "(0, 1)",
        });
    }
    Ok(())
}

fn check_upper_half(r: f64) -> Result<()> {
    if !(r > 0.5 && r < 1.0) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            range: "(1/2, 1)",
        });
    }
    Ok(())
}

/// `3 r^2 / (1 - r)^4 - (1 + 2r)`, a lower bound for `||df(0, r)||` on `(1/2, 1)`.
pub fn ce_lower_bound(r: f64) -> Result<f64> {
    check_upper_half(r)?;
    Ok(3.0 * r * r / (1.0 - r).powi(4) - (1.0 + 2.0 * r))
}

/// `2 r^2 / (1 - r)^4`, which [`ce_lower_bound`] dominates on `(1/2, 1)`.
pub fn simplified_lower_bound(r: f64) -> Result<f64> {
    check_upper_half(r)?;
    Ok(2.0 * r * r / (1.0 - r).powi(4))
}

fn radial_point(r: f64) -> Result<BallPoint> {
    BallPoint::new(Complex64::new(0.0, 0.0), Complex64::new(r, 0.0))
}

/// `||df(0, r)||` for the counterexample.
pub fn radial_opnorm(r: f64) -> Result<f64> {
    check_open_unit("r", r)?;
    shear_opnorm(&counterexample_map(), &radial_point(r)?)
}

/// `||df(0, r)|| (1 - r)^3`.
pub fn divergence_ratio(r: f64) -> Result<f64> {
    Ok(radial_opnorm(r)? * (1.0 - r).powi(3))
}

/// `||f(0, r)||`; equals `r sqrt(1 + r^2)` because `|h(r)| = 1`.
pub fn radial_image_bound(r: f64) -> Result<f64> {
    check_open_unit("r", r)?;
    let w = counterexample_map().eval(&radial_point(r)?)?;
    Ok((w[0].norm_sqr() + w[1].norm_sqr()).sqrt())
}

/// The point `1 - delta e^{i angle}` on the circle `|zeta| = r`.
///
/// Along this ray `ln|g| = 2 ln r + sin(3 angle) / delta^3`, largest at
/// `angle = pi/6`.
pub fn boundary_probe(r: f64, angle: f64) -> Result<(f64, Complex64)> {
    check_open_unit("r", r)?;
    let c = angle.cos();
    let disc = c * c - (1.0 - r * r);
    if c <= 0.0 || disc < 0.0 {
        return Err(Error::Domain {
            what: "probe angle",
            value: angle,
            range: "ray from 1 that meets the circle",
        });
    }
    // smaller root of delta^2 - 2 cos(angle) delta + (1 - r^2) = 0
    let delta = (1.0 - r * r) / (c + disc.sqrt());
    let zeta = Complex64::new(1.0, 0.0) - Complex64::from_polar(delta, angle);
    Ok((delta, zeta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceRecord {
    pub r: f64,
    pub opnorm: f64,
    pub lower_bound: f64,
    pub simplified_bound: f64,
    pub ratio: f64,
    pub s0_ceiling: f64,
}

impl DivergenceRecord {
    pub const CSV_HEADER: &'static str = "r,opnorm,lower_bound,simplified_bound,ratio,ceiling";

    pub fn at(r: f64) -> Result<Self> {
        let opnorm = radial_opnorm(r)?;
        Ok(DivergenceRecord {
            r,
            opnorm,
            lower_bound: ce_lower_bound(r)?,
            simplified_bound: simplified_lower_bound(r)?,
            ratio: opnorm * (1.0 - r).powi(3),
            s0_ceiling: S0_CEILING,
        })
    }

    pub fn above_lower_bound(&self) -> bool {
        self.opnorm >= self.lower_bound
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            fmt_real(self.r),
            fmt_real(self.opnorm),
            fmt_real(self.lower_bound),
            fmt_real(self.simplified_bound),
            fmt_real(self.ratio),
            fmt_real(self.s0_ceiling)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// No `C <= c_report` gives `||df(0, r)|| <= 4C / (1 - r)^3` on the grid,
    /// and the ratio is still increasing at the tail.
    Affirmative,
    /// The grid does not exhibit the divergence.
    NotShown,
    /// Fewer than two radii; monotonicity cannot be judged.
    InsufficientGrid,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Affirmative => "affirmative",
            Verdict::NotShown => "not-shown",
            Verdict::InsufficientGrid => "insufficient-grid",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceScan {
    pub records: Vec<DivergenceRecord>,
    pub c_report: f64,
    pub verdict: Verdict,
}

impl DivergenceScan {
    pub fn verdict_row(&self) -> String {
        let tail = self.records.last().map_or(f64::NAN, |r| r.ratio);
        format!(
            "# verdict: {} (c_report={}, threshold={}, tail_ratio={})",
            self.verdict,
            fmt_real(self.c_report),
            fmt_real(S0_CEILING * self.c_report),
            fmt_real(tail)
        )
    }
}

pub fn divergence_scan(radii: &[f64], c_report: f64) -> Result<DivergenceScan> {
    if !(c_report.is_finite() && c_report > 0.0) {
        return Err(Error::Config(format!(
            "c_report must be positive, got {}",
            c_report
        )));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(
            "divergence grid must be strictly increasing".into(),
        ));
    }
    let records = radii
        .iter()
        .map(|&r| DivergenceRecord::at(r))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if records.len() < 2 {
        Verdict::InsufficientGrid
    } else {
        let increasing = records.windows(2).all(|w| w[1].ratio > w[0].ratio);
        let tail = records.last().expect("nonempty").ratio;
        if increasing && tail > S0_CEILING * c_report {
            Verdict::Affirmative
        } else {
            Verdict::NotShown
        }
    };
    Ok(DivergenceScan {
        records,
        c_report,
        verdict,
    })
}
