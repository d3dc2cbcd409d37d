//! Sampled checks of starlikeness for shears.
//!
//! For a shear, `Re <[df(z)]^{-1} f(z), z> = ||z||^2 + Re((g(z2) - z2 g'(z2)) conj(z1))`;
//! the map is starlike iff this is nonnegative on the punctured ball. A
//! starlike image also satisfies, for every `alpha in (0, 1]`,
//! `|z1 + g(z2) - g(alpha z2)/alpha|^2 + |z2|^2 < 1/alpha^2`, since
//! `alpha f(z)` must have a preimage in the ball. Scans here give evidence and
//! witnesses only; certificates come from coefficients.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logmag::{log_add_exp, LogComplex, PLAIN_LOG_LIMIT};
use crate::report::fmt_real;
use crate::sampling::{argmin, evaluate_all, polish, Best, Sampler, SphereCoords};
use crate::series::{check_disk, BallPoint, DiskFunction};
use crate::shear::ShearingMap;

/// Values below this count as violations; absorbs rounding at margin-0 certificates.
pub const VIOLATION_THRESHOLD: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Witness {
    Ball(BallPoint),
    BallAlpha { alpha: f64, point: BallPoint },
    Disk(Complex64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub extremum: f64,
    pub witness: Witness,
    pub samples: usize,
    pub polish_evals: usize,
    pub violation: bool,
    pub config_digest: String,
}

impl ScanReport {
    pub const CSV_HEADER: &'static str =
        "extremum,alpha,z1_re,z1_im,z2_re,z2_im,samples,polish_evals,violation,config_digest";

    pub fn csv_row(&self) -> String {
        let (alpha, z) = match self.witness {
            Witness::Ball(p) => (String::new(), p.as_pair()),
            Witness::BallAlpha { alpha, point } => (fmt_real(alpha), point.as_pair()),
            Witness::Disk(zeta) => (String::new(), [Complex64::new(0.0, 0.0), zeta]),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_real(self.extremum),
            alpha,
            fmt_real(z[0].re),
            fmt_real(z[0].im),
            fmt_real(z[1].re),
            fmt_real(z[1].im),
            self.samples,
            self.polish_evals,
            self.violation,
            crate::report::csv_field(&self.config_digest)
        )
    }
}

/// One row of a per-sample trace file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub s: f64,
    pub t: f64,
    pub phase1: f64,
    pub phase2: f64,
    pub value: f64,
}

impl TraceRow {
    pub const CSV_HEADER: &'static str = "s,t,phase1,phase2,value";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt_real(self.s),
            fmt_real(self.t),
            fmt_real(self.phase1),
            fmt_real(self.phase2),
            fmt_real(self.value)
        )
    }
}

fn is_overflow<T>(r: &Result<T>) -> bool {
    matches!(r, Err(Error::Overflow { .. }))
}

/// `||z||^2 + Re((g(z2) - z2 g'(z2)) conj(z1))`.
///
/// Falls back to log-domain arithmetic when `g` is too large for `f64`; the
/// result then saturates to `+-inf`.
pub fn starlike_quantity(f: &ShearingMap, z: &BallPoint) -> Result<f64> {
    let g = f.g();
    let (z1, z2) = (z.z1(), z.z2());
    let value = g.value(z2);
    let deriv = g.deriv(z2);
    if !is_overflow(&value) && !is_overflow(&deriv) {
        let w = value? - z2 * deriv?;
        return Ok(z.norm_sqr() + (w * z1.conj()).re);
    }
    let w = g.value_log(z2)? - g.deriv_log(z2)? * LogComplex::from_complex(z2);
    let term = w * LogComplex::from_complex(z1.conj());
    Ok(z.norm_sqr() + term.re())
}

/// The point `(z1, z2)` with `|z1| = modulus` and the phase of `z1` chosen to
/// make the correction term of [`starlike_quantity`] as negative as possible.
pub fn aligned_probe(f: &ShearingMap, z2: Complex64, modulus: f64) -> Result<BallPoint> {
    check_disk(z2)?;
    let g = f.g();
    let w = g.value_log(z2)? - g.deriv_log(z2)? * LogComplex::from_complex(z2);
    // Re(w conj z1) = -|w||z1| when arg z1 = arg w + pi
    let phase = if w.is_zero() {
        0.0
    } else {
        w.arg + std::f64::consts::PI
    };
    BallPoint::new(Complex64::from_polar(modulus, phase), z2)
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::Domain {
            what: "scan radius",
            value: radius,
            range: "(0, 1)",
        });
    }
    Ok(())
}

fn run_scan<F>(
    radius: f64,
    sampler: &Sampler,
    objective: F,
    trace: bool,
) -> Result<(Best, usize, usize, Option<Vec<TraceRow>>)>
where
    F: Fn(&SphereCoords) -> Result<f64> + Sync,
{
    check_radius(radius)?;
    sampler.validate()?;
    let samples = sampler.samples(radius);
    let values = evaluate_all(&samples, &objective)?;
    let mut best = argmin(&samples, &values).expect("sampler yields at least one point");
    let mut evals = 0;
    if sampler.polish && best.value.is_finite() {
        let s_max = radius.max(best.coords.s);
        let (b, n) = polish(best, s_max, sampler.polish_steps(radius), &objective);
        best = b;
        evals = n;
    }
    let rows = trace.then(|| {
        samples
            .iter()
            .zip(&values)
            .map(|(s, &value)| TraceRow {
                s: s.coords.s,
                t: s.coords.t,
                phase1: s.coords.phase1,
                phase2: s.coords.phase2,
                value,
            })
            .collect()
    });
    Ok((best, samples.len(), evals, rows))
}

/// Minimum of [`starlike_quantity`] over the ball of the given radius.
pub fn starlike_scan(f: &ShearingMap, radius: f64, sampler: &Sampler) -> Result<ScanReport> {
    starlike_scan_traced(f, radius, sampler, false).map(|(r, _)| r)
}

/// As [`starlike_scan`], also returning every sampled value.
pub fn starlike_scan_traced(
    f: &ShearingMap,
    radius: f64,
    sampler: &Sampler,
    trace: bool,
) -> Result<(ScanReport, Option<Vec<TraceRow>>)> {
    let objective = |c: &SphereCoords| starlike_quantity(f, &c.to_point()?);
    let (best, samples, polish_evals, rows) = run_scan(radius, sampler, objective, trace)?;
    let report = ScanReport {
        extremum: best.value,
        witness: Witness::Ball(best.coords.to_point()?),
        samples,
        polish_evals,
        violation: best.value < VIOLATION_THRESHOLD,
        config_digest: format!(
            "starlike-scan g={} {}",
            f.describe(),
            sampler.digest(radius)
        ),
    };
    Ok((report, rows))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
            range: "(0, 1]",
        });
    }
    Ok(())
}

/// `z1 + g(z2) - g(alpha z2) / alpha` in log-domain form.
fn eq1_vector_log(g: &dyn DiskFunction, alpha: f64, z: &BallPoint) -> Result<LogComplex> {
    let shifted = g.value_log(z.z2())? - g.value_log(z.z2() * alpha)?.scale(1.0 / alpha);
    Ok(LogComplex::from_complex(z.z1()) + shifted)
}

/// `1/alpha^2 - (|z1 + g(z2) - g(alpha z2)/alpha|^2 + |z2|^2)`.
///
/// Positive where the starlike-image inequality holds. Returns `-inf` when
/// the left side exceeds the `f64` range.
pub fn eq1_residual(f: &ShearingMap, alpha: f64, z: &BallPoint) -> Result<f64> {
    check_alpha(alpha)?;
    let g = f.g();
    let bound = 1.0 / (alpha * alpha);
    let full = g.value(z.z2());
    let scaled = g.value(z.z2() * alpha);
    if !is_overflow(&full) && !is_overflow(&scaled) {
        let x = z.z1() + (full? - scaled? / alpha);
        return Ok(bound - (x.norm_sqr() + z.z2().norm_sqr()));
    }
    let log_lhs = eq1_log_lhs(f, alpha, z)?;
    if log_lhs > PLAIN_LOG_LIMIT {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(bound - log_lhs.exp())
}

/// `ln(|z1 + g(z2) - g(alpha z2)/alpha|^2 + |z2|^2)`, finite even where the
/// plain value overflows.
pub fn eq1_log_lhs(f: &ShearingMap, alpha: f64, z: &BallPoint) -> Result<f64> {
    check_alpha(alpha)?;
    let x = eq1_vector_log(f.g(), alpha, z)?;
    Ok(log_add_exp(x.log_norm_sqr(), z.z2().norm_sqr().ln()))
}

/// Minimum of [`eq1_residual`] over `alphas` and the sampled ball.
///
/// This is a necessary-condition check for starlikeness only.
pub fn eq1_scan(
    f: &ShearingMap,
    alphas: &[f64],
    radius: f64,
    sampler: &Sampler,
) -> Result<ScanReport> {
    if alphas.is_empty() {
        return Err(Error::Config("alpha grid is empty".into()));
    }
    for &a in alphas {
        check_alpha(a)?;
    }
    let mut overall: Option<(f64, Best)> = None;
    let mut samples = 0;
    let mut polish_evals = 0;
    for &alpha in alphas {
        let objective = |c: &SphereCoords| eq1_residual(f, alpha, &c.to_point()?);
        let (best, n, evals, _) = run_scan(radius, sampler, objective, false)?;
        samples += n;
        polish_evals += evals;
        overall = match overall {
            Some((a, b)) if b.value.total_cmp(&best.value).is_le() => Some((a, b)),
            _ => Some((alpha, best)),
        };
    }
    let (alpha, best) = overall.expect("alpha grid is nonempty");
    let grid: Vec<String> = alphas.iter().map(|a| a.to_string()).collect();
    Ok(ScanReport {
        extremum: best.value,
        witness: Witness::BallAlpha {
            alpha,
            point: best.coords.to_point()?,
        },
        samples,
        polish_evals,
        violation: best.value < VIOLATION_THRESHOLD,
        config_digest: format!(
            "eq1-scan (necessary-condition check) g={} alphas=[{}] {}",
            f.describe(),
            grid.join(" "),
            sampler.digest(radius)
        ),
    })
}

/// Angles on the circle `|zeta| = r` at which `log|g|` is probed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryProbes {
    /// Equally spaced angles `2 pi k / angular`.
    pub angular: usize,
    pub extra_angles: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundednessReport {
    /// `max ln|g|` over the probes; `-inf` when `g` vanished at every probe.
    pub max_log_abs: f64,
    pub witness: Complex64,
    pub samples: usize,
}

impl BoundednessReport {
    pub fn identically_small(&self) -> bool {
        self.max_log_abs == f64::NEG_INFINITY
    }
}

/// Largest `ln|g(zeta)|` over probes on `|zeta| = r`, via log-domain evaluation.
///
/// Large values as `r -> 1` are evidence that `g` is unbounded, which rules
/// out starlikeness of the shear.
pub fn boundedness_scan(
    g: &dyn DiskFunction,
    r: f64,
    probes: &BoundaryProbes,
) -> Result<BoundednessReport> {
    check_radius(r)?;
    let angles = (0..probes.angular)
        .map(|k| TAU * k as f64 / probes.angular as f64)
        .chain(probes.extra_angles.iter().copied());
    let mut best: Option<(f64, Complex64)> = None;
    let mut samples = 0;
    for theta in angles {
        let zeta = Complex64::from_polar(r, theta);
        let v = g.log_abs(zeta)?;
        samples += 1;
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, zeta));
        }
    }
    let (max_log_abs, witness) = best.ok_or_else(|| Error::Config("no boundary probes".into()))?;
    Ok(BoundednessReport {
        max_log_abs,
        witness,
        samples,
    })
}
