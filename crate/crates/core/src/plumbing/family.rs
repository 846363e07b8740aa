//! Local node coordinates `F(u) = lambda u (1 + a1 u + a2 u^2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::{Cdd, Dd};
use crate::error::{Error, Result};

fn default_lambda() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn default_radius() -> f64 {
    2.0
}

/// Analytic coordinate at one branch of a node, valid for `|u| < radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordFamily {
    #[serde(default = "default_lambda")]
    pub lambda: Complex64,
    #[serde(default)]
    pub a1: Complex64,
    #[serde(default)]
    pub a2: Complex64,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

impl Default for CoordFamily {
    fn default() -> Self {
        CoordFamily::identity()
    }
}

impl CoordFamily {
    pub fn identity() -> Self {
        CoordFamily {
            lambda: default_lambda(),
            a1: Complex64::new(0.0, 0.0),
            a2: Complex64::new(0.0, 0.0),
            radius: default_radius(),
        }
    }

    pub fn linear(lambda: Complex64) -> Self {
        CoordFamily {
            lambda,
            ..Self::identity()
        }
    }

    pub fn is_real(&self) -> bool {
        self.lambda.im == 0.0 && self.a1.im == 0.0 && self.a2.im == 0.0
    }

    pub fn is_linear(&self) -> bool {
        self.a1 == Complex64::new(0.0, 0.0) && self.a2 == Complex64::new(0.0, 0.0)
    }

    fn check(&self, u: f64) -> Result<()> {
        if !(u < self.radius) {
            return Err(Error::Range(format!(
                "|u| = {u} outside the family's validity radius {}",
                self.radius
            )));
        }
        Ok(())
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.lambda * u * (1.0 + self.a1 * u + self.a2 * u * u)
    }

    pub fn deriv(&self, u: Complex64) -> Complex64 {
        self.lambda * (1.0 + 2.0 * self.a1 * u + 3.0 * self.a2 * u * u)
    }

    /// `F(u)` after checking `|u| < radius`.
    pub fn eval_checked(&self, u: Complex64) -> Result<Complex64> {
        self.check(u.norm())?;
        Ok(self.eval(u))
    }

    /// The root of `F(x) = zeta` on the branch through the origin.
    pub fn inverse(&self, zeta: Complex64) -> Result<Complex64> {
        let mut x = zeta / self.lambda;
        for _ in 0..60 {
            let dx = (self.eval(x) - zeta) / self.deriv(x);
            x -= dx;
            if dx.norm() <= 1e-16 * x.norm() {
                break;
            }
        }
        if !x.is_finite() || (self.eval(x) - zeta).norm() > 1e-12 * zeta.norm().max(1e-300) {
            return Err(Error::Range(format!("no inverse of the node coordinate at {zeta}")));
        }
        self.check(x.norm())?;
        Ok(x)
    }

    fn l(&self) -> Cdd {
        Cdd::from_c64(self.lambda)
    }

    /// `a1 u + a2 u^2`.
    pub fn g_dd(&self, u: Cdd) -> Cdd {
        (Cdd::from_c64(self.a1) + Cdd::from_c64(self.a2) * u) * u
    }

    pub fn eval_dd(&self, u: Cdd) -> Result<Cdd> {
        self.check(u.norm_f64())?;
        Ok(self.l() * u * (Cdd::ONE + self.g_dd(u)))
    }

    /// `F(u0 + mu) - F(u0)`, accurate for small `mu`.
    pub fn diff_dd(&self, u0: Cdd, mu: Cdd) -> Cdd {
        let a1 = Cdd::from_c64(self.a1);
        let a2 = Cdd::from_c64(self.a2);
        let three = Cdd::real(3.0.into());
        let two = Cdd::real(2.0.into());
        let inner = Cdd::ONE + a1 * (two * u0 + mu) + a2 * (three * u0 * u0 + three * u0 * mu + mu * mu);
        self.l() * mu * inner
    }

    pub fn inverse_dd(&self, zeta: Cdd) -> Result<Cdd> {
        if zeta.is_zero() {
            return Ok(Cdd::ZERO);
        }
        if self.is_linear() {
            let x = zeta / self.l();
            self.check(x.norm_f64())?;
            return Ok(x);
        }
        // The f64 root is accurate to ~1e-16; one Newton step in
        // double-double squares the error.
        let x = Cdd::from_c64(self.inverse(zeta.to_c64())?);
        let a1 = Cdd::from_c64(self.a1);
        let a2 = Cdd::from_c64(self.a2);
        let g = (a1 + a2 * x) * x;
        let fx = self.l() * x * (Cdd::ONE + g);
        let d = self.l() * (Cdd::ONE + (a1 + a1 + Cdd::real(Dd::from_f64(3.0)) * a2 * x) * x);
        Ok(x - (fx - zeta) / d)
    }

    /// `F^{-1}(zeta)/zeta - 1/lambda` at `x = F^{-1}(zeta)`, i.e. `-g / (lambda (1 + g))`.
    pub fn psi_offset_dd(&self, x: Cdd) -> Cdd {
        let g = self.g_dd(x);
        -(g / (self.l() * (Cdd::ONE + g)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam() -> CoordFamily {
        CoordFamily {
            lambda: Complex64::new(1.5, 0.2),
            a1: Complex64::new(0.3, 0.0),
            a2: Complex64::new(-0.1, 0.05),
            radius: 2.0,
        }
    }

    #[test]
    fn inverse_round_trips() {
        let f = fam();
        for z in [
            Complex64::new(1e-3, 2e-3),
            Complex64::new(0.3, -0.2),
            Complex64::new(1e-30, 0.0),
        ] {
            let x = f.inverse(z).unwrap();
            assert!((f.eval(x) - z).norm() <= 1e-14 * z.norm());
            let xd = f.inverse_dd(Cdd::from_c64(z)).unwrap();
            let back = f.eval_dd(xd).unwrap() - Cdd::from_c64(z);
            assert!(back.norm_f64() <= 1e-30 * z.norm());
        }
    }

    #[test]
    fn offset_forms_match_direct_evaluation() {
        let f = fam();
        let u0 = Cdd::from_c64(Complex64::new(0.7, 0.4));
        let mu = Cdd::from_c64(Complex64::new(1e-5, -3e-6));
        let direct = f.eval_dd(u0 + mu).unwrap() - f.eval_dd(u0).unwrap();
        assert!((f.diff_dd(u0, mu) - direct).norm_f64() < 1e-30);

        let z = Cdd::from_c64(Complex64::new(1e-4, 1e-4));
        let x = f.inverse_dd(z).unwrap();
        let psi = x / z - Cdd::ONE / Cdd::from_c64(f.lambda);
        assert!((f.psi_offset_dd(x) - psi).norm_f64() < 1e-28);
    }

    #[test]
    fn radius_is_enforced() {
        let f = CoordFamily::identity();
        assert!(matches!(f.eval_checked(Complex64::new(2.5, 0.0)), Err(Error::Range(_))));
        assert!(matches!(f.inverse(Complex64::new(3.0, 0.0)), Err(Error::Range(_))));
    }
}
