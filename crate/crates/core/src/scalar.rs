//! Scalar abstractions.
//!
//! Polynomials and series are generic over a real field `R`; their
//! coefficients are `Complex<R>`. The symbolic pipeline runs over
//! [`BigRational`] (exact Gaussian rationals), while the numeric oracles run
//! over [`RealFloat`] types: `f32`, `f64` and [`DoubleDouble`].

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, NumAssign, ToPrimitive};

use crate::double_double::DoubleDouble;

/// A real coefficient field.
pub trait Real:
    Clone + Debug + PartialEq + Num + NumAssign + Neg<Output = Self> + Send + Sync + 'static
{
    /// Whether arithmetic is exact, so that structural zeros come out as
    /// exact zeros.
    const EXACT: bool = false;

    fn from_bigint(n: &BigInt) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn to_f64(&self) -> f64;

    fn from_i64(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    /// `self * n` for an integer `n`.
    fn mul_bigint(&self, n: &BigInt) -> Self {
        self.clone() * Self::from_bigint(n)
    }

    /// `self / n` for a nonzero integer `n`.
    fn div_bigint(&self, n: &BigInt) -> Self {
        self.clone() / Self::from_bigint(n)
    }
}

impl Real for BigRational {
    const EXACT: bool = true;

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn mul_bigint(&self, n: &BigInt) -> Self {
        self * BigRational::from_integer(n.clone())
    }
    fn div_bigint(&self, n: &BigInt) -> Self {
        self / BigRational::from_integer(n.clone())
    }
}

impl Real for f64 {
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }
    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Real for f32 {
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f32().unwrap_or(f32::NAN)
    }
    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN) as f32
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Real for DoubleDouble {
    fn from_bigint(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return DoubleDouble::from_f64(hi);
        }
        // exact remainder after the leading double
        let rest = n - BigInt::from_f64_exact(hi);
        DoubleDouble::new(hi, rest.to_f64().unwrap_or(0.0))
    }
    fn from_rational(q: &BigRational) -> Self {
        Self::from_bigint(q.numer()) / Self::from_bigint(q.denom())
    }
    fn to_f64(&self) -> f64 {
        DoubleDouble::to_f64(*self)
    }
}

trait FromF64Exact {
    fn from_f64_exact(x: f64) -> Self;
}

impl FromF64Exact for BigInt {
    fn from_f64_exact(x: f64) -> Self {
        num_traits::FromPrimitive::from_f64(x.trunc()).unwrap_or_default()
    }
}

/// Floating-point fields for the numeric oracles.
pub trait RealFloat: Real + Copy + PartialOrd {
    fn from_f64(x: f64) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn pi() -> Self;
    /// Unit roundoff of the representation.
    fn epsilon() -> f64;

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

macro_rules! primitive_float {
    ($t:ty) => {
        impl RealFloat for $t {
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn exp(self) -> Self {
                num_traits::Float::exp(self)
            }
            fn ln(self) -> Self {
                num_traits::Float::ln(self)
            }
            fn sin_cos(self) -> (Self, Self) {
                num_traits::Float::sin_cos(self)
            }
            fn sqrt(self) -> Self {
                num_traits::Float::sqrt(self)
            }
            fn abs(self) -> Self {
                num_traits::Float::abs(self)
            }
            fn pi() -> Self {
                <$t as num_traits::FloatConst>::PI()
            }
            fn epsilon() -> f64 {
                <$t>::EPSILON as f64
            }
        }
    };
}
primitive_float!(f32);
primitive_float!(f64);

impl RealFloat for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    fn ln(self) -> Self {
        DoubleDouble::ln(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        DoubleDouble::sin_cos(self)
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn pi() -> Self {
        DoubleDouble::PI
    }
    fn epsilon() -> f64 {
        DoubleDouble::EPSILON
    }
    fn powi(self, n: i32) -> Self {
        DoubleDouble::powi(self, n)
    }
}

/// `e^z` for a complex number over a [`RealFloat`] field.
pub fn complex_exp<F: RealFloat>(z: Complex<F>) -> Complex<F> {
    let m = z.re.exp();
    let (s, c) = z.im.sin_cos();
    Complex::new(m * c, m * s)
}

pub fn complex_abs<F: RealFloat>(z: Complex<F>) -> F {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Converts an exact Gaussian rational to a complex float.
pub fn complex_from_rational<F: Real>(z: &Complex<BigRational>) -> Complex<F> {
    Complex::new(F::from_rational(&z.re), F::from_rational(&z.im))
}
