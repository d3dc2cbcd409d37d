//! Sphere-stratified sampling of the ball and deterministic minimization.
//!
//! A point is parameterized as `z1 = s sqrt(1-t) e^{i phase1}`,
//! `z2 = s sqrt(t) e^{i phase2}` with `s = ||z||` and `t = |z2|^2 / s^2`.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::BallPoint;

pub const DEFAULT_SEED: u64 = 0x5EED_BA11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereCoords {
    pub s: f64,
    pub t: f64,
    pub phase1: f64,
    pub phase2: f64,
}

impl SphereCoords {
    pub fn new(s: f64, t: f64, phase1: f64, phase2: f64) -> Self {
        SphereCoords {
            s,
            t,
            phase1,
            phase2,
        }
    }

    pub fn to_point(&self) -> Result<BallPoint> {
        let t = self.t.clamp(0.0, 1.0);
        BallPoint::new(
            Complex64::from_polar(self.s * (1.0 - t).sqrt(), self.phase1),
            Complex64::from_polar(self.s * t.sqrt(), self.phase2),
        )
    }

    pub fn from_point(z: &BallPoint) -> Self {
        let s = z.norm();
        let t = if s > 0.0 {
            z.z2().norm_sqr() / (s * s)
        } else {
            0.0
        };
        SphereCoords::new(s, t, z.z1().arg(), z.z2().arg())
    }

    fn as_array(&self) -> [f64; 4] {
        [self.s, self.t, self.phase1, self.phase2]
    }

    fn lex_cmp(&self, other: &Self) -> Ordering {
        self.as_array()
            .iter()
            .zip(other.as_array().iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }
}

/// Sample layout for ball scans.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    /// Spheres `s = radius * i / radial`, `i = 1..=radial`.
    pub radial: usize,
    /// Splits `t = j / (split - 1)`, `j = 0..split`.
    pub split: usize,
    /// Phases `2 pi k / phases` for each coordinate.
    pub phases: usize,
    /// Uniform random points in the ball of the scan radius.
    pub random: usize,
    pub seed: u64,
    pub probes: Vec<BallPoint>,
    /// Refine the best sample by coordinate search.
    pub polish: bool,
    /// Sample only the sphere `||z|| = radius` (`radial` is ignored).
    pub shell: bool,
}

impl Default for Sampler {
    /// 25 * 25 * 12 * 12 grid points and 10^4 random points: 10^5 samples.
    fn default() -> Self {
        Sampler {
            radial: 25,
            split: 25,
            phases: 12,
            random: 10_000,
            seed: DEFAULT_SEED,
            probes: Vec::new(),
            polish: true,
            shell: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SampleOrigin {
    Grid,
    Random,
    Probe,
    Polish,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub coords: SphereCoords,
    pub origin: SampleOrigin,
}

impl Sampler {
    pub fn validate(&self) -> Result<()> {
        if self.radial == 0 || self.split == 0 || self.phases == 0 {
            return Err(Error::Config("grid counts must be at least 1".into()));
        }
        Ok(())
    }

    fn spheres(&self) -> usize {
        if self.shell {
            1
        } else {
            self.radial
        }
    }

    pub fn grid_count(&self) -> usize {
        self.spheres() * self.split * self.phases * self.phases
    }

    pub fn sample_count(&self) -> usize {
        self.grid_count() + self.random + self.probes.len()
    }

    /// Grid points, then random points, then probes.
    pub fn samples(&self, radius: f64) -> Vec<Sample> {
        let mut out = Vec::with_capacity(self.sample_count());
        let phase = |k: usize| TAU * k as f64 / self.phases as f64;
        let spheres = self.spheres();
        for i in 1..=spheres {
            let s = radius * i as f64 / spheres as f64;
            for j in 0..self.split {
                let t = if self.split == 1 {
                    0.5
                } else {
                    j as f64 / (self.split - 1) as f64
                };
                for k1 in 0..self.phases {
                    for k2 in 0..self.phases {
                        out.push(Sample {
                            coords: SphereCoords::new(s, t, phase(k1), phase(k2)),
                            origin: SampleOrigin::Grid,
                        });
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random {
            // for the uniform measure on the ball, ||z||^4 and |z2|^2/||z||^2 are uniform
            let u: f64 = rng.gen();
            let t: f64 = rng.gen();
            let p1: f64 = rng.gen_range(0.0..TAU);
            let p2: f64 = rng.gen_range(0.0..TAU);
            let s = if self.shell {
                radius
            } else {
                radius * u.powf(0.25)
            };
            out.push(Sample {
                coords: SphereCoords::new(s, t, p1, p2),
                origin: SampleOrigin::Random,
            });
        }
        for p in &self.probes {
            out.push(Sample {
                coords: SphereCoords::from_point(p),
                origin: SampleOrigin::Probe,
            });
        }
        out
    }

    pub fn digest(&self, radius: f64) -> String {
        let probes: Vec<String> = self
            .probes
            .iter()
            .map(|p| {
                format!(
                    "({}{:+}i;{}{:+}i)",
                    p.z1().re,
                    p.z1().im,
                    p.z2().re,
                    p.z2().im
                )
            })
            .collect();
        format!(
            "radius={} radial={} shell={} split={} phases={} random={} seed={} polish={} probes=[{}]",
            radius,
            self.radial,
            self.shell,
            self.split,
            self.phases,
            self.random,
            self.seed,
            self.polish,
            probes.join(" ")
        )
    }
}

/// Best value with its location; ties go to the lexicographically smaller point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Best {
    pub value: f64,
    pub coords: SphereCoords,
}

impl Best {
    pub fn better(self, other: Best) -> Best {
        match self
            .value
            .total_cmp(&other.value)
            .then_with(|| self.coords.lex_cmp(&other.coords))
        {
            Ordering::Greater => other,
            _ => self,
        }
    }
}

/// Evaluate `objective` on every sample in parallel; values keep sample order.
pub fn evaluate_all<F>(samples: &[Sample], objective: F) -> Result<Vec<f64>>
where
    F: Fn(&SphereCoords) -> Result<f64> + Sync,
{
    samples.par_iter().map(|s| objective(&s.coords)).collect()
}

/// Minimum of already evaluated samples, independent of evaluation order.
pub fn argmin(samples: &[Sample], values: &[f64]) -> Option<Best> {
    samples
        .iter()
        .zip(values)
        .map(|(s, &value)| Best {
            value,
            coords: s.coords,
        })
        .reduce(Best::better)
}

/// Coordinate search with step halving, started from `start`.
///
/// `s` stays in `[0, s_max]` and `t` in `[0, 1]`; phases are unconstrained.
/// Returns the refined point and the number of objective evaluations.
pub fn polish<F>(start: Best, s_max: f64, initial_steps: [f64; 4], objective: F) -> (Best, usize)
where
    F: Fn(&SphereCoords) -> Result<f64>,
{
    let mut best = start;
    let mut steps = initial_steps;
    let mut evals = 0;
    for _ in 0..400 {
        let mut improved = false;
        for axis in 0..4 {
            for dir in [1.0, -1.0] {
                let mut x = best.coords.as_array();
                x[axis] += dir * steps[axis];
                x[0] = x[0].clamp(0.0, s_max);
                x[1] = x[1].clamp(0.0, 1.0);
                let cand = SphereCoords::new(x[0], x[1], x[2], x[3]);
                evals += 1;
                if let Ok(v) = objective(&cand) {
                    if v < best.value {
                        best = Best {
                            value: v,
                            coords: cand,
                        };
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            for s in steps.iter_mut() {
                *s *= 0.5;
            }
            if steps.iter().all(|s| *s < 1e-13) {
                break;
            }
        }
    }
    (best, evals)
}

impl Sampler {
    /// Initial polishing steps: one grid cell in each coordinate.
    pub fn polish_steps(&self, radius: f64) -> [f64; 4] {
        let ph = TAU / self.phases as f64;
        [
            if self.shell {
                0.0
            } else {
                radius / self.radial as f64
            },
            1.0 / self.split.max(2) as f64,
            ph,
            ph,
        ]
    }
}
