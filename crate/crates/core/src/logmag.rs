//! Complex numbers stored as (log-modulus, argument).
//!
//! Values of the counterexample shear reach `exp(1e6)` near the boundary of
//! the disk, far beyond `f64`. Products and sums are formed on the
//! log scale and only converted back when the modulus fits.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest log-modulus that plain `f64` evaluation accepts (`e^709` overflows).
pub const PLAIN_LOG_LIMIT: f64 = 700.0;

/// A complex number `exp(log_abs) * exp(i * arg)`; zero has `log_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub log_abs: f64,
    pub arg: f64,
}

/// Reduce an angle into `(-pi, pi]`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_abs: f64::NEG_INFINITY,
        arg: 0.0,
    };

    pub fn new(log_abs: f64, arg: f64) -> Self {
        if log_abs == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            log_abs,
            arg: reduce_angle(arg),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::ZERO
        } else {
            LogComplex {
                log_abs: z.norm().ln(),
                arg: z.arg(),
            }
        }
    }

    /// `exp(w)` for a complex exponent, with the phase reduced mod 2pi.
    pub fn exp(w: Complex64) -> Self {
        Self::new(w.re, w.im)
    }

    pub fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    /// Convert back to `f64`; refuses when the modulus exceeds `e^700`.
    pub fn to_complex(self) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if self.log_abs.is_nan() {
            return Err(Error::NonFinite("log-domain value"));
        }
        if self.log_abs > PLAIN_LOG_LIMIT {
            return Err(Error::Overflow {
                log_abs: self.log_abs,
                limit: PLAIN_LOG_LIMIT,
            });
        }
        Ok(Complex64::from_polar(self.log_abs.exp(), self.arg))
    }

    pub fn conj(self) -> Self {
        Self::new(self.log_abs, -self.arg)
    }

    pub fn scale(self, factor: f64) -> Self {
        self * Self::from_complex(Complex64::new(factor, 0.0))
    }

    /// Real part; saturates to `+-inf` once the modulus leaves `f64` range.
    pub fn re(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let c = self.arg.cos();
        if self.log_abs > PLAIN_LOG_LIMIT {
            if c == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(c)
            }
        } else {
            self.log_abs.exp() * c
        }
    }

    /// Natural log of the squared modulus.
    pub fn log_norm_sqr(self) -> f64 {
        2.0 * self.log_abs
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl Mul for LogComplex {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_abs + other.log_abs, self.arg + other.arg)
    }
}

impl Neg for LogComplex {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(self.log_abs, self.arg + PI)
    }
}

impl Add for LogComplex {
    type Output = Self;

    /// Sum computed relative to the larger operand, so neither side overflows.
    fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.log_abs >= other.log_abs {
            (self, other)
        } else {
            (other, self)
        };
        let rel = Complex64::from_polar((small.log_abs - big.log_abs).exp(), small.arg - big.arg);
        let sum = Complex64::new(1.0, 0.0) + rel;
        if sum.re == 0.0 && sum.im == 0.0 {
            return Self::ZERO;
        }
        Self::new(big.log_abs + sum.norm().ln(), big.arg + sum.arg())
    }
}

impl Sub for LogComplex {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        self + -other
    }
}
