//! Double-double floating point: an unevaluated sum `hi + lo` of two `f64`
//! values carrying roughly 106 bits (about 32 decimal digits) of precision.
//!
//! Only the operations the quadrature oracles need are provided: the four
//! arithmetic operations, square root, `exp`, `ln`, `sin` and `cos`. The
//! algorithms follow the classic error-free transformations (`two_sum`,
//! `two_prod` through fused multiply-add).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };
    pub const PI: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };
    pub const TAU: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::TAU,
        lo: 2.4492935982947064e-16,
    };
    pub const FRAC_PI_2: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123233995736766e-17,
    };
    pub const LN_2: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };
    /// 2^-104
    pub const EPSILON: f64 = 4.930380657631324e-32;

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, mut p2) = two_prod(self.hi, b);
        p2 += self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        DoubleDouble { hi, lo }
    }

    fn mul_pow2(self, b: f64) -> Self {
        DoubleDouble {
            hi: self.hi * b,
            lo: self.lo * b,
        }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            let (hi, lo) = quick_two_sum(hi, self.lo.round());
            DoubleDouble { hi, lo }
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // halfway on hi: the tail decides
            let hi = if self.lo > 0.0 {
                self.hi.ceil()
            } else {
                self.hi.floor()
            };
            DoubleDouble { hi, lo: 0.0 }
        } else {
            DoubleDouble { hi, lo: 0.0 }
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi == 0.0 {
            return Self::ZERO;
        }
        if self.hi < 0.0 {
            return DoubleDouble {
                hi: f64::NAN,
                lo: f64::NAN,
            };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let corr = (self - DoubleDouble::from_f64(ax).sqr()).hi * (x * 0.5);
        let (hi, lo) = two_sum(ax, corr);
        DoubleDouble { hi, lo }
    }

    pub fn exp(self) -> Self {
        if self.hi <= -745.0 {
            return Self::ZERO;
        }
        if self.hi >= 709.8 {
            return DoubleDouble {
                hi: f64::INFINITY,
                lo: 0.0,
            };
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ONE;
        }
        let m = (self.hi / Self::LN_2.hi).round();
        let r = (self - Self::LN_2.mul_f64(m)).mul_pow2(1.0 / 1024.0);
        // expm1 of the reduced argument by Taylor series
        let mut s = r;
        let mut term = r;
        let mut j = 2.0;
        loop {
            term = term * r / DoubleDouble::from_f64(j);
            s += term;
            if term.hi.abs() < 1e-36 || j > 30.0 {
                break;
            }
            j += 1.0;
        }
        // (1+s)^2 - 1 = 2s + s^2, applied ten times undoes the 1/1024 scaling
        for _ in 0..10 {
            s = s.mul_pow2(2.0) + s.sqr();
        }
        let e = s + Self::ONE;
        let scale = 2f64.powi(m as i32);
        if scale.is_finite() && scale != 0.0 {
            e.mul_pow2(scale)
        } else {
            let half = 2f64.powi((m / 2.0) as i32);
            e.mul_pow2(half)
                .mul_pow2(2f64.powi(m as i32 - (m / 2.0) as i32))
        }
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble {
                hi: if self.hi == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::NAN
                },
                lo: 0.0,
            };
        }
        let mut x = DoubleDouble::from_f64(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - Self::ONE;
        }
        x
    }

    /// Returns `(sin x, cos x)`.
    pub fn sin_cos(self) -> (Self, Self) {
        if self.hi == 0.0 {
            return (Self::ZERO, Self::ONE);
        }
        let turns = (self / Self::TAU).round();
        let r = self - Self::TAU * turns;
        let q = (r / Self::FRAC_PI_2).round();
        let t = r - Self::FRAC_PI_2 * q;
        let quadrant = (q.hi as i64).rem_euclid(4);

        let t2 = t.sqr();
        let mut sin_t = t;
        let mut term = t;
        let mut j = 1.0;
        loop {
            term = -(term * t2) / DoubleDouble::from_f64((j + 1.0) * (j + 2.0));
            sin_t += term;
            j += 2.0;
            if term.hi.abs() < 1e-36 || j > 60.0 {
                break;
            }
        }
        let mut cos_t = Self::ONE;
        let mut term = Self::ONE;
        let mut j = 0.0;
        loop {
            term = -(term * t2) / DoubleDouble::from_f64((j + 1.0) * (j + 2.0));
            cos_t += term;
            j += 2.0;
            if term.hi.abs() < 1e-36 || j > 60.0 {
                break;
            }
        }
        match quadrant {
            0 => (sin_t, cos_t),
            1 => (cos_t, -sin_t),
            2 => (-sin_t, -cos_t),
            _ => (-cos_t, sin_t),
        }
    }

    pub fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::ONE / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, b.hi);
        p2 += self.hi * b.lo + self.lo * b.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let q = if q.hi < 0.0 { -(-q).floor() } else { q.floor() };
        self - b * q
    }
}

impl DoubleDouble {
    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (hi, lo) = quick_two_sum(hi, self.lo.floor());
            DoubleDouble { hi, lo }
        } else {
            DoubleDouble { hi, lo: 0.0 }
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            #[inline]
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(DoubleDouble::from_f64)
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}
