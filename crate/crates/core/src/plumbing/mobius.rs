//! Cross-ratios and gauge-fixing Möbius maps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ext {
    Finite(Complex64),
    Infinity,
}

impl From<Complex64> for Ext {
    fn from(z: Complex64) -> Self {
        Ext::Finite(z)
    }
}

fn diff(a: Ext, b: Ext) -> Option<Complex64> {
    match (a, b) {
        (Ext::Finite(x), Ext::Finite(y)) => Some(x - y),
        _ => None,
    }
}

/// `((z1 - z3)(z2 - z4)) / ((z1 - z4)(z2 - z3))`, with factors containing
/// infinity cancelled in pairs.
pub fn cross_ratio(z1: Ext, z2: Ext, z3: Ext, z4: Ext) -> Result<Ext> {
    let pts = [z1, z2, z3, z4];
    let inf = pts.iter().filter(|p| matches!(p, Ext::Infinity)).count();
    if inf > 1 {
        return Err(Error::Degenerate("more than one point at infinity".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let f = |a: Ext, b: Ext| diff(a, b).unwrap_or(one);
    let num = f(z1, z3) * f(z2, z4);
    let den = f(z1, z4) * f(z2, z3);
    let zero = |z: Complex64| z == Complex64::new(0.0, 0.0);
    match (zero(num), zero(den)) {
        (true, true) => Err(Error::Degenerate("0/0 cross-ratio".into())),
        (false, true) => Ok(Ext::Infinity),
        _ => Ok(Ext::Finite(num / den)),
    }
}

/// `z -> (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mobius { a: o, b: z, c: z, d: o }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        let r = |x: f64| Complex64::new(x, 0.0);
        Mobius {
            a: r(a),
            b: r(b),
            c: r(c),
            d: r(d),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: Ext) -> Ext {
        match z {
            Ext::Infinity => {
                if self.c == Complex64::new(0.0, 0.0) {
                    Ext::Infinity
                } else {
                    Ext::Finite(self.a / self.c)
                }
            }
            Ext::Finite(z) => {
                let den = self.c * z + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    Ext::Infinity
                } else {
                    Ext::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }
}

fn separated(pts: &[Complex64], what: &str) -> Result<()> {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if (pts[i] - pts[j]).norm() < super::tree::SEPARATION {
                return Err(Error::DegenerateGauge(format!(
                    "{what} gauge points {} and {} collide",
                    pts[i], pts[j]
                )));
            }
        }
    }
    Ok(())
}

/// Sends `(z2, z3, z1)` to `(0, 1, infinity)`, i.e. `z -> cross_ratio(z1, z2, z3, z)`.
pub fn sphere_gauge(z1: Complex64, z2: Complex64, z3: Complex64) -> Result<Mobius> {
    separated(&[z1, z2, z3], "sphere")?;
    // ((z1 - z3)(z2 - z)) / ((z1 - z)(z2 - z3))
    let k = z1 - z3;
    let m = z2 - z3;
    Ok(Mobius {
        a: -k,
        b: k * z2,
        c: -m,
        d: m * z1,
    })
}

/// Upper-half-plane automorphism sending real `(x0, x1, x2)` to `(-1, 0, 1)`.
pub fn disk_gauge(x0: f64, x1: f64, x2: f64) -> Result<Mobius> {
    let r = |x: f64| Complex64::new(x, 0.0);
    separated(&[r(x0), r(x1), r(x2)], "boundary")?;
    let orient = (x2 - x0) * (x2 - x1) * (x1 - x0);
    if !(orient > 0.0) {
        return Err(Error::DegenerateGauge(format!(
            "boundary gauge points {x0}, {x1}, {x2} are not in cyclic order"
        )));
    }
    // A sends (x1, x2, x0) to (0, 1, infinity); B^{-1}(y) = y / (2 - y).
    let a = Mobius::real(x2 - x0, -x1 * (x2 - x0), x2 - x1, -x0 * (x2 - x1));
    let b_inv = Mobius::real(1.0, 0.0, -1.0, 2.0);
    Ok(b_inv.compose(&a))
}

/// Upper-half-plane automorphism sending real `x0` to infinity and `w` to `i`.
pub fn disk_gauge_interior(x0: f64, w: Complex64) -> Result<Mobius> {
    if !(w.im > super::tree::SEPARATION) {
        return Err(Error::DegenerateGauge(format!(
            "interior gauge point {w} is not in the upper half-plane"
        )));
    }
    let y = -1.0 / (w - x0);
    let (u, v) = (y.re, y.im);
    // y = -1 / (z - x0), then (y - u) / v.
    let first = Mobius::real(0.0, -1.0, 1.0, -x0);
    let second = Mobius::real(1.0, -u, 0.0, v);
    Ok(second.compose(&first))
}
