#![allow(dead_code)]

use num_complex::Complex64;
use shearball::series::{CoefficientSeries, Tail};
use shearball::shear::{Jacobian2, ShearingMap};
use shearball::BallPoint;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `a_k = 2^-k`, `k = 2..=40`, with the exact tail `sum_{k>40} k 2^-k = 42 / 2^40`.
pub fn half_powers() -> CoefficientSeries {
    CoefficientSeries::from_fn(40, Tail::Bounded(42.0 / 2f64.powi(40)), |k| {
        c(0.5f64.powi(k as i32), 0.0)
    })
    .unwrap()
}

pub fn half_powers_map() -> ShearingMap {
    ShearingMap::from_series(half_powers())
}

pub fn monomial(a2: f64) -> ShearingMap {
    ShearingMap::from_series(CoefficientSeries::monomial(c(a2, 0.0)).unwrap())
}

/// Largest singular value by power iteration on `J* J`, accelerated by
/// repeated squaring: after `n` squarings the matrix is `(J* J)^(2^n)`.
pub fn power_iteration_opnorm(j: &Jacobian2, squarings: usize) -> f64 {
    // M = J* J as [[m00, m01], [m10, m11]]
    let a = [[j.a11, j.a12], [j.a21, j.a22]];
    let mut m = [[c(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            m[r][col] = a[0][r].conj() * a[0][col] + a[1][r].conj() * a[1][col];
        }
    }
    let base = m;
    let mut p = m;
    for _ in 0..squarings {
        let mut q = [[c(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for col in 0..2 {
                q[r][col] = p[r][0] * p[0][col] + p[r][1] * p[1][col];
            }
        }
        let scale = q.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        for z in q.iter_mut().flatten() {
            *z /= scale;
        }
        p = q;
    }
    // dominant eigenvector: the larger column of the converged power
    let col0 = [p[0][0], p[1][0]];
    let col1 = [p[0][1], p[1][1]];
    let n0 = col0[0].norm_sqr() + col0[1].norm_sqr();
    let n1 = col1[0].norm_sqr() + col1[1].norm_sqr();
    let v = if n0 >= n1 { col0 } else { col1 };
    let mv = [
        base[0][0] * v[0] + base[0][1] * v[1],
        base[1][0] * v[0] + base[1][1] * v[1],
    ];
    let num = (v[0].conj() * mv[0] + v[1].conj() * mv[1]).re;
    let den = v[0].norm_sqr() + v[1].norm_sqr();
    (num / den).sqrt()
}

/// Uniform point of the ball of the given radius (rejection sampling).
pub fn random_ball_point(rng: &mut impl rand::Rng, radius: f64) -> BallPoint {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 < 1.0 {
            return BallPoint::new(
                c(radius * v[0], radius * v[1]),
                c(radius * v[2], radius * v[3]),
            )
            .unwrap();
        }
    }
}

/// Complex Jacobian of a shear by centered differences along the complex
/// coordinate axes (holomorphic, so a real step suffices).
pub fn finite_difference_jacobian(
    f: &ShearingMap,
    z: &BallPoint,
    step: f64,
) -> [[Complex64; 2]; 2] {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for axis in 0..2 {
        let mut plus = z.as_pair();
        let mut minus = z.as_pair();
        plus[axis] += step;
        minus[axis] -= step;
        let fp = f.eval(&BallPoint::new(plus[0], plus[1]).unwrap()).unwrap();
        let fm = f
            .eval(&BallPoint::new(minus[0], minus[1]).unwrap())
            .unwrap();
        for row in 0..2 {
            out[row][axis] = (fp[row] - fm[row]) / (2.0 * step);
        }
    }
    out
}

pub fn jacobian_relative_error(j: &Jacobian2, fd: &[[Complex64; 2]; 2]) -> f64 {
    let e = [j.a11, j.a12, j.a21, j.a22];
    let d = [fd[0][0], fd[0][1], fd[1][0], fd[1][1]];
    let num: f64 = e.iter().zip(&d).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = e.iter().map(|a| a.norm_sqr()).sum();
    (num / den).sqrt()
}
