//! Operator norms of 2x2 Jacobians and the S0 differential growth bound
//! `||df(z)|| <= (1 + sqrt r)^2 / (1 - r)^3` on `||z|| <= r`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::fmt_real;
use crate::series::BallPoint;
use crate::shear::{starlike_certificate, Jacobian2, ShearingMap};

/// Slack allowed when comparing a sampled norm with its bound.
pub const CONFORMANCE_SLACK: f64 = 1e-9;

/// Largest and smallest singular values.
///
/// `sigma^2 = (T +- sqrt(T^2 - 4D)) / 2` with `T` the squared Frobenius norm
/// and `D = |det J|^2`. The discriminant is formed as
/// `(p - q)^2 + 4|o|^2` from the entries `[[p, o], [conj o, q]]` of `J J*`,
/// which is nonnegative and free of cancellation.
pub fn singular_values2(j: &Jacobian2) -> (f64, f64) {
    let p = j.a11.norm_sqr() + j.a12.norm_sqr();
    let q = j.a21.norm_sqr() + j.a22.norm_sqr();
    let o = j.a11 * j.a21.conj() + j.a12 * j.a22.conj();
    let trace = p + q;
    let disc = ((p - q) * (p - q) + 4.0 * o.norm_sqr()).max(0.0);
    let big = 0.5 * (trace + disc.sqrt());
    let sigma_max = big.sqrt();
    let sigma_min = if sigma_max > 0.0 {
        j.det().norm() / sigma_max
    } else {
        0.0
    };
    (sigma_max, sigma_min)
}

/// The operator norm `||J||`, i.e. the largest singular value.
pub fn opnorm2(j: &Jacobian2) -> f64 {
    singular_values2(j).0
}

/// `||[[1, m], [0, 1]]|| = (|m| + sqrt(|m|^2 + 4)) / 2`.
pub fn unipotent_norm(m: f64) -> f64 {
    let m = m.abs();
    0.5 * (m + (m * m + 4.0).sqrt())
}

/// `||df(z)||` for a shear; depends on `z2` only.
pub fn shear_opnorm(f: &ShearingMap, z: &BallPoint) -> Result<f64> {
    Ok(unipotent_norm(f.g().deriv(z.z2())?.norm()))
}

fn check_unit_interval(what: &'static str, r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            what,
            value: r,
            range: "(0, 1)",
        });
    }
    Ok(())
}

/// `(1 + sqrt r)^2 / (1 - r)^3`.
pub fn s0_growth_bound(r: f64) -> Result<f64> {
    check_unit_interval("r", r)?;
    Ok((1.0 + r.sqrt()).powi(2) / (1.0 - r).powi(3))
}

/// `1 / ((1 - rho)^2 (1 - |zeta|^2))`, the bound on `||df(rho zeta)||`.
pub fn schwarz_pick_bound(rho: f64, zeta_norm: f64) -> Result<f64> {
    check_unit_interval("rho", rho)?;
    if !(0.0..1.0).contains(&zeta_norm) {
        return Err(Error::Domain {
            what: "|zeta|",
            value: zeta_norm,
            range: "[0, 1)",
        });
    }
    Ok(1.0 / ((1.0 - rho).powi(2) * (1.0 - zeta_norm * zeta_norm)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRecord {
    pub r: f64,
    pub sampled_sup_norm: f64,
    pub bound_value: f64,
    pub conforms: bool,
}

impl GrowthRecord {
    pub const CSV_HEADER: &'static str = "r,sup_norm,bound,conforms";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            fmt_real(self.r),
            fmt_real(self.sampled_sup_norm),
            fmt_real(self.bound_value),
            self.conforms
        )
    }
}

/// Polar grid for the disk `|z2| <= r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskGrid {
    pub angular: usize,
    pub radial: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        DiskGrid {
            angular: 2048,
            radial: 256,
        }
    }
}

/// `max ||df||` over `|z2| <= r` on a polar grid including the boundary circle.
pub fn sampled_sup_norm(f: &ShearingMap, r: f64, grid: DiskGrid) -> Result<f64> {
    check_unit_interval("r", r)?;
    if grid.angular == 0 || grid.radial == 0 {
        return Err(Error::Config("disk grid counts must be at least 1".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let centre = shear_opnorm(f, &BallPoint::origin())?;
    (1..=grid.radial)
        .into_par_iter()
        .map(|i| {
            let rho = r * i as f64 / grid.radial as f64;
            let mut sup = 0.0f64;
            for k in 0..grid.angular {
                let z2 = Complex64::from_polar(rho, TAU * k as f64 / grid.angular as f64);
                sup = sup.max(shear_opnorm(f, &BallPoint::new(zero, z2)?)?);
            }
            Ok(sup)
        })
        .try_reduce(|| centre, |a, b| Ok(a.max(b)))
}

/// Compare sampled `sup ||df||` with the S0 bound on each radius.
///
/// Only maps with a starlike certificate are accepted: the bound is a
/// statement about S0, and the certificate is the sole S0 witness here.
pub fn growth_conformance_scan(
    f: &ShearingMap,
    radii: &[f64],
    grid: DiskGrid,
) -> Result<Vec<GrowthRecord>> {
    let cert = starlike_certificate(f);
    if !cert.is_certified() {
        return Err(Error::NotCertified {
            margin: cert.margin,
        });
    }
    radii
        .iter()
        .map(|&r| {
            let sup = sampled_sup_norm(f, r, grid)?;
            let bound = s0_growth_bound(r)?;
            Ok(GrowthRecord {
                r,
                sampled_sup_norm: sup,
                bound_value: bound,
                conforms: sup <= bound + CONFORMANCE_SLACK,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{half_powers, CoefficientSeries};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn opnorm_examples() {
        assert_eq!(opnorm2(&Jacobian2::identity()), 1.0);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((opnorm2(&Jacobian2::unipotent(c(1.0, 0.0))) - golden).abs() < 1e-15);
        assert!(
            (opnorm2(&Jacobian2::unipotent(c(3.0, 0.0))) - (3.0 + 13f64.sqrt()) / 2.0).abs()
                < 1e-14
        );
        assert!((unipotent_norm(3.0) - 3.302_775_64).abs() < 1e-8);
        // phase of the off-diagonal entry is irrelevant
        assert!((opnorm2(&Jacobian2::unipotent(c(0.0, -1.0))) - golden).abs() < 1e-15);
    }

    #[test]
    fn opnorm_of_scalar_multiple_of_unitary() {
        let j = Jacobian2::new(c(0.0, 2.0), c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0));
        let (hi, lo) = singular_values2(&j);
        assert_eq!((hi, lo), (2.0, 2.0));
        let zero = Jacobian2::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(singular_values2(&zero), (0.0, 0.0));
    }

    #[test]
    fn shear_norm_examples() {
        let sq = ShearingMap::from_series(CoefficientSeries::monomial(c(1.0, 0.0)).unwrap());
        assert_eq!(shear_opnorm(&sq, &BallPoint::origin()).unwrap(), 1.0);
        let z = BallPoint::new(c(0.2, 0.0), c(0.5, 0.0)).unwrap();
        assert!((shear_opnorm(&sq, &z).unwrap() - 1.618_033_99).abs() < 1e-8);
        let j = sq.jacobian(&z).unwrap();
        assert!((shear_opnorm(&sq, &z).unwrap() - opnorm2(&j)).abs() < 1e-12);
    }

    #[test]
    fn growth_bound_values() {
        assert!((s0_growth_bound(0.5).unwrap() - 23.313_708_5).abs() < 1e-6);
        assert!((s0_growth_bound(0.9).unwrap() - 3_797.366_6).abs() < 1e-4);
        assert!((s0_growth_bound(1e-12).unwrap() - 1.0).abs() < 1e-5);
        assert!(s0_growth_bound(0.0).is_err());
        assert!(s0_growth_bound(1.0).is_err());
    }

    #[test]
    fn schwarz_pick_values() {
        assert_eq!(schwarz_pick_bound(0.5, 0.0).unwrap(), 4.0);
        let h = 0.5f64.sqrt();
        assert!((schwarz_pick_bound(h, h).unwrap() - 23.313_708_5).abs() < 1e-6);
        assert!((schwarz_pick_bound(1e-15, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(schwarz_pick_bound(0.5, 1.0).is_err());
        assert!(schwarz_pick_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn conformance_for_certified_maps() {
        let grid = DiskGrid {
            angular: 64,
            radial: 16,
        };
        let sq = ShearingMap::from_series(CoefficientSeries::monomial(c(1.0, 0.0)).unwrap());
        let rec = growth_conformance_scan(&sq, &[0.5], grid).unwrap();
        assert!((rec[0].sampled_sup_norm - (0.5 + 1.25f64.sqrt())).abs() < 1e-12);
        assert!(rec[0].conforms);
        let id = growth_conformance_scan(&ShearingMap::identity(), &[0.3, 0.7], grid).unwrap();
        assert!(id.iter().all(|r| r.sampled_sup_norm == 1.0 && r.conforms));
        let radii: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let half = growth_conformance_scan(&ShearingMap::from_series(half_powers()), &radii, grid)
            .unwrap();
        assert!(half.iter().all(|r| r.conforms && r.sampled_sup_norm <= 2.0));
    }

    #[test]
    fn conformance_refuses_uncertified_maps() {
        let big = ShearingMap::from_series(CoefficientSeries::monomial(c(2.7, 0.0)).unwrap());
        let err = growth_conformance_scan(&big, &[0.5], DiskGrid::default()).unwrap_err();
        assert!(matches!(err, Error::NotCertified { .. }));
    }
}
