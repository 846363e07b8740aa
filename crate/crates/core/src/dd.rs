//! Double-double arithmetic (about 31 significant digits).
//!
//! Chart transitions near a node differ from their limit by terms of size
//! `e^{-T}`, and mixed derivatives by `e^{-2T}`. At `T = 40` these sit well
//! below `f64` resolution of the O(1) quantities they ride on, so the
//! transition solver runs in this type and only rounds to `f64` after the
//! small parts have been isolated.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    if !s.is_finite() {
        return (s, 0.0);
    }
    (s, b - (s - a))
}

/// Veltkamp split `a = hi + lo` with 26-bit halves.
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0;
    if a.abs() > 1e290 {
        let (h, l) = split(a * 2f64.powi(-28));
        return (h * 2f64.powi(28), l * 2f64.powi(28));
    }
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Dekker's exact product; avoids a software `fma` on targets without one.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    if !p.is_finite() {
        return (p, 0.0);
    }
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const LN2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const FRAC_PI_2: Dd = Dd {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123_233_995_736_766e-17,
    };
    pub const TAU: Dd = Dd {
        hi: std::f64::consts::TAU,
        lo: 2.449_293_598_294_706_4e-16,
    };

    #[inline]
    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    /// Multiplication by a power of two, exact.
    #[inline]
    fn scale2(self, k: i32) -> Dd {
        let f = 2f64.powi(k);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let s = self.hi.sqrt();
        let s2 = Dd::from_f64(s).sqr();
        Dd::from_f64(s) + (self - s2) / Dd::from_f64(2.0 * s)
    }

    /// `e^x`, relative error a few units of 1e-32.
    pub fn exp(self) -> Dd {
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if self.hi > 709.8 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi == 0.0 {
            return Dd::ONE;
        }
        let k = (self.hi / Dd::LN2.hi).round();
        let r = self - Dd::LN2.mul_f64(k);
        // expm1 on r / 2^10 by Taylor, then e^{2x}-1 = s (s + 2) ten times.
        let x = r.scale2(-10);
        let mut term = x;
        let mut s = x;
        let mut n = 2.0;
        while term.hi.abs() > 1e-36 * s.hi.abs().max(1e-300) && n < 30.0 {
            term = term * x / Dd::from_f64(n);
            s += term;
            n += 1.0;
        }
        for _ in 0..10 {
            s = s * (s + Dd::from_f64(2.0));
        }
        let e = s + Dd::ONE;
        // 2^k may underflow past the normal range; split the scaling.
        let k = k as i32;
        if k < -1000 {
            e.scale2(-1000).scale2(k + 1000)
        } else {
            e.scale2(k)
        }
    }

    /// Natural logarithm; `ln 0 = -inf`, negative input yields NaN.
    pub fn ln(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::from_f64(f64::NEG_INFINITY);
        }
        if self.hi < 0.0 || self.hi.is_nan() {
            return Dd::from_f64(f64::NAN);
        }
        if self.hi.is_infinite() {
            return self;
        }
        let y = Dd::from_f64(self.hi.ln());
        // One Newton step on exp(y) = x doubles the f64 accuracy.
        y + self * (-y).exp() - Dd::ONE
    }

    /// `ln(1 + x)` with full relative accuracy for small `x`.
    pub fn ln_1p(self) -> Dd {
        if self.hi.abs() < 1e-2 {
            let mut pow = self;
            let mut acc = self;
            let mut k = 2.0;
            while k < 40.0 {
                pow = -(pow * self);
                let term = pow / Dd::from_f64(k);
                acc += term;
                if term.hi.abs() <= 1e-34 * acc.hi.abs() {
                    break;
                }
                k += 1.0;
            }
            acc
        } else {
            (Dd::ONE + self).ln()
        }
    }

    fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
        // |r| <= pi/4
        let r2 = r * r;
        let mut sin = r;
        let mut term = r;
        let mut n = 1.0;
        loop {
            term = -(term * r2) / Dd::from_f64((n + 1.0) * (n + 2.0));
            sin += term;
            n += 2.0;
            if term.hi.abs() < 1e-34 || n > 60.0 {
                break;
            }
        }
        let mut cos = Dd::ONE;
        let mut term = Dd::ONE;
        let mut n = 0.0;
        loop {
            term = -(term * r2) / Dd::from_f64((n + 1.0) * (n + 2.0));
            cos += term;
            n += 2.0;
            if term.hi.abs() < 1e-34 || n > 60.0 {
                break;
            }
        }
        (sin, cos)
    }

    /// Returns `(sin x, cos x)`.
    pub fn sin_cos(self) -> (Dd, Dd) {
        if self.hi == 0.0 {
            return (Dd::ZERO, Dd::ONE);
        }
        let k = (self.hi / Dd::FRAC_PI_2.hi).round();
        let r = self - Dd::FRAC_PI_2.mul_f64(k);
        let (s, c) = Dd::sin_cos_reduced(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    /// Four-quadrant arctangent of `y / x`.
    pub fn atan2(y: Dd, x: Dd) -> Dd {
        if x.hi == 0.0 && y.hi == 0.0 {
            return Dd::ZERO;
        }
        let a = Dd::from_f64(y.hi.atan2(x.hi));
        let (s, c) = a.sin_cos();
        a + (y * c - x * s) / (x * c + y * s)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        if !s.is_finite() {
            return Dd { hi: s, lo: 0.0 };
        }
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        if !p.is_finite() {
            return Dd { hi: p, lo: 0.0 };
        }
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Dd { hi: q1, lo: 0.0 };
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

/// Complex number over [`Dd`].
#[derive(Clone, Copy, Default, PartialEq, Debug)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: Cdd = Cdd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Cdd {
        Cdd { re, im }
    }

    pub fn real(x: Dd) -> Cdd {
        Cdd { re: x, im: Dd::ZERO }
    }

    pub fn from_c64(z: Complex64) -> Cdd {
        Cdd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> Cdd {
        Cdd {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    /// Modulus as an `f64`; only used for thresholds and magnitudes.
    pub fn norm_f64(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn scale(self, k: Dd) -> Cdd {
        Cdd {
            re: self.re * k,
            im: self.im * k,
        }
    }

    pub fn exp(self) -> Cdd {
        let m = self.re.exp();
        if m.is_zero() {
            return Cdd::ZERO;
        }
        let (s, c) = self.im.sin_cos();
        Cdd { re: m * c, im: m * s }
    }

    /// `e^{i t}` for real `t`.
    pub fn cis(t: Dd) -> Cdd {
        let (s, c) = t.sin_cos();
        Cdd { re: c, im: s }
    }

    /// Principal logarithm.
    pub fn ln(self) -> Cdd {
        Cdd {
            re: self.norm_sqr().ln().mul_f64(0.5),
            im: Dd::atan2(self.im, self.re),
        }
    }

    /// `ln(1 + z)`, relatively accurate for small `z`.
    pub fn ln_1p(self) -> Cdd {
        if self.norm_f64() < 1e-2 {
            let mut pow = self;
            let mut acc = self;
            let mut k = 2.0;
            while k < 40.0 {
                pow = -(pow * self);
                let term = pow.scale(Dd::ONE / Dd::from_f64(k));
                acc = acc + term;
                if term.norm_f64() <= 1e-34 * acc.norm_f64() {
                    break;
                }
                k += 1.0;
            }
            acc
        } else {
            (Cdd::ONE + self).ln()
        }
    }
}

impl From<Complex64> for Cdd {
    fn from(z: Complex64) -> Self {
        Cdd::from_c64(z)
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, b: Cdd) -> Cdd {
        // Denominators in this crate are O(1); no Smith scaling needed.
        let d = b.norm_sqr();
        Cdd {
            re: (self.re * b.re + self.im * b.im) / d,
            im: (self.im * b.re - self.re * b.im) / d,
        }
    }
}
