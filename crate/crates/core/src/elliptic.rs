//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! Every function here takes the *modulus* κ, not the parameter m = κ².
//! K and E come from the arithmetic-geometric mean; sn, cn and dn from the
//! descending Landen (Gauss) transformation driven by the same AGM sequence,
//! with dn recovered from dn² = 1 − κ²sn².

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_AGM_STEPS: usize = 64;

/// Jacobi elliptic modulus κ, restricted to the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(kappa: f64) -> Result<Self> {
        if kappa.is_finite() && kappa > 0.0 && kappa < 1.0 {
            Ok(Self(kappa))
        } else {
            Err(Error::Domain(format!(
                "elliptic modulus must lie in (0, 1), got {kappa}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The parameter m = κ².
    #[inline]
    pub fn parameter(self) -> f64 {
        self.0 * self.0
    }

    /// The complementary modulus κ' = √(1 − κ²).
    #[inline]
    pub fn complementary(self) -> f64 {
        // (1 - k)(1 + k) keeps precision when k is close to 1.
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

impl TryFrom<f64> for EllipticModulus {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<EllipticModulus> for f64 {
    fn from(k: EllipticModulus) -> f64 {
        k.0
    }
}

/// The AGM ladder started from (1, κ', κ), shared by K, E and the Landen
/// evaluation of sn/cn/dn.
#[derive(Debug, Clone)]
pub struct Jacobi {
    kappa: EllipticModulus,
    a: Vec<f64>,
    c: Vec<f64>,
}

impl Jacobi {
    pub fn new(kappa: EllipticModulus) -> Self {
        let mut a = vec![1.0];
        let mut c = vec![kappa.value()];
        let mut b = kappa.complementary();
        for _ in 0..MAX_AGM_STEPS {
            let an = *a.last().unwrap();
            let next_a = 0.5 * (an + b);
            let next_c = 0.5 * (an - b);
            b = (an * b).sqrt();
            a.push(next_a);
            c.push(next_c);
            if next_c.abs() <= f64::EPSILON * next_a {
                break;
            }
        }
        Self { kappa, a, c }
    }

    pub fn modulus(&self) -> EllipticModulus {
        self.kappa
    }

    /// K(κ) = π / (2 AGM(1, κ')).
    pub fn complete_k(&self) -> f64 {
        FRAC_PI_2 / self.a.last().unwrap()
    }

    /// E(κ) = K(κ) (1 − Σₙ 2ⁿ⁻¹ cₙ²).
    pub fn complete_e(&self) -> f64 {
        let mut weight = 0.5;
        let mut sum = 0.0;
        for cn in &self.c {
            sum += weight * cn * cn;
            weight *= 2.0;
        }
        self.complete_k() * (1.0 - sum)
    }

    /// (sn, cn, dn) at `u`, after reducing `u` into one real period 4K.
    pub fn sn_cn_dn(&self, u: f64) -> Result<(f64, f64, f64)> {
        if !u.is_finite() {
            return Err(Error::Domain(format!("Jacobi argument must be finite, got {u}")));
        }
        let period = 4.0 * self.complete_k();
        let u = u - period * (u / period).round();

        let steps = self.a.len() - 1;
        let mut phi = (steps as f64).exp2() * self.a[steps] * u;
        for n in (1..=steps).rev() {
            phi = 0.5 * (phi + (self.c[n] / self.a[n] * phi.sin()).asin());
        }
        let (sn, cn) = phi.sin_cos();
        // dn = cos φ₀ / cos(φ₁ − φ₀) is 0/0 near the quarter period; dn ≥ κ' > 0.
        let ks = self.kappa.value() * sn;
        let dn = ((1.0 - ks) * (1.0 + ks)).sqrt();
        Ok((sn, cn, dn))
    }
}

/// Complete elliptic integral of the first kind, K(κ).
pub fn complete_k(kappa: EllipticModulus) -> f64 {
    Jacobi::new(kappa).complete_k()
}

/// Complete elliptic integral of the second kind, E(κ).
pub fn complete_e(kappa: EllipticModulus) -> f64 {
    Jacobi::new(kappa).complete_e()
}

/// Both complete integrals from a single AGM run.
pub fn complete_k_e(kappa: EllipticModulus) -> (f64, f64) {
    let j = Jacobi::new(kappa);
    (j.complete_k(), j.complete_e())
}

/// Jacobi elliptic functions (sn, cn, dn)(u, κ).
pub fn jacobi_sn_cn_dn(u: f64, kappa: EllipticModulus) -> Result<(f64, f64, f64)> {
    Jacobi::new(kappa).sn_cn_dn(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn k(v: f64) -> EllipticModulus {
        EllipticModulus::new(v).unwrap()
    }

    /// Maclaurin series in κ², summed until terms drop below machine precision.
    fn series_k_e(kappa: f64) -> (f64, f64) {
        let m = kappa * kappa;
        let mut t = 1.0;
        let mut mn = 1.0;
        let (mut sk, mut se) = (1.0, 1.0);
        for n in 1..2000 {
            let nf = n as f64;
            t *= (2.0 * nf - 1.0) / (2.0 * nf);
            mn *= m;
            let term = t * t * mn;
            sk += term;
            se -= term / (2.0 * nf - 1.0);
            if term < 1e-18 {
                break;
            }
        }
        (FRAC_PI_2 * sk, FRAC_PI_2 * se)
    }

    #[test]
    fn rejects_endpoints_and_nan() {
        for bad in [0.0, 1.0, -0.3, 1.2, f64::NAN, f64::INFINITY] {
            assert!(matches!(EllipticModulus::new(bad), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn degenerate_modulus() {
        assert!((complete_k(k(1e-8)) - FRAC_PI_2).abs() < 1e-12);
        assert!((complete_e(k(1e-8)) - FRAC_PI_2).abs() < 1e-12);
        let (sn, cn, dn) = jacobi_sn_cn_dn(0.7, k(1e-9)).unwrap();
        assert!((sn - 0.7f64.sin()).abs() < 1e-12);
        assert!((cn - 0.7f64.cos()).abs() < 1e-12);
        assert!((dn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_series_oracle() {
        for kappa in [0.1, 0.3, 0.5, 0.7] {
            let (ks, es) = series_k_e(kappa);
            let (kk, ee) = complete_k_e(k(kappa));
            assert!(((kk - ks) / ks).abs() < 1e-13, "K({kappa})");
            assert!(((ee - es) / es).abs() < 1e-13, "E({kappa})");
        }
        let (k05, e05) = series_k_e(0.5);
        assert!((k05 - 1.685_750_354_8).abs() < 1e-9);
        assert!((e05 - 1.467_462_209_3).abs() < 1e-9);
    }

    #[test]
    fn legendre_relation() {
        for kappa in [0.3, 0.5, 0.7] {
            let kp = k(kappa).complementary();
            let (kk, ee) = complete_k_e(k(kappa));
            let (kkp, eep) = complete_k_e(k(kp));
            let lhs = ee * kkp + eep * kk - kk * kkp;
            assert!((lhs - FRAC_PI_2).abs() < 1e-12, "kappa {kappa}: {lhs}");
        }
    }

    #[test]
    fn monotone_in_modulus() {
        let mut prev = (0.0, f64::INFINITY);
        for i in 1..100 {
            let (kk, ee) = complete_k_e(k(i as f64 / 100.0));
            assert!(kk > prev.0 && ee < prev.1);
            prev = (kk, ee);
        }
        assert!(complete_k(k(0.9)) > complete_k(k(0.5)));
        assert!((complete_e(k(1.0 - 1e-12)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn special_points() {
        for kappa in [0.2, 0.5, 0.9] {
            let j = Jacobi::new(k(kappa));
            let (sn, cn, dn) = j.sn_cn_dn(0.0).unwrap();
            assert_eq!((sn, cn, dn), (0.0, 1.0, 1.0));
            let (sn, cn, dn) = j.sn_cn_dn(j.complete_k()).unwrap();
            assert!((sn - 1.0).abs() < 1e-13);
            assert!(cn.abs() < 1e-13);
            assert!((dn - k(kappa).complementary()).abs() < 1e-13);
        }
    }

    #[test]
    fn non_finite_argument() {
        assert!(jacobi_sn_cn_dn(f64::NAN, k(0.5)).is_err());
        assert!(jacobi_sn_cn_dn(f64::INFINITY, k(0.5)).is_err());
    }

    #[test]
    fn derivative_of_sn_is_cn_dn() {
        let h = 1e-5;
        for kappa in [0.3, 0.6, 0.95] {
            let j = Jacobi::new(k(kappa));
            for i in 0..40 {
                let u = -7.0 + 0.37 * i as f64;
                let fd = (j.sn_cn_dn(u + h).unwrap().0 - j.sn_cn_dn(u - h).unwrap().0) / (2.0 * h);
                let (_, cn, dn) = j.sn_cn_dn(u).unwrap();
                assert!((fd - cn * dn).abs() < 1e-8, "u={u} kappa={kappa}");
            }
        }
    }

    #[test]
    fn trigonometric_limit_over_periods() {
        let j = Jacobi::new(k(1e-7));
        for i in 0..50 {
            let u = -12.0 + 0.5 * i as f64;
            let (sn, cn, _) = j.sn_cn_dn(u).unwrap();
            assert!((sn - u.sin()).abs() < 1e-12);
            assert!((cn - u.cos()).abs() < 1e-12);
        }
        assert!((4.0 * j.complete_k() - 2.0 * PI).abs() < 1e-12);
    }
}
