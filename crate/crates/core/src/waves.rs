//! Dnoidal and snoidal traveling waves of the Benney system.
//!
//! The profile φ solves φ″ − σφ = (β − 1/c)φ³ with first integral
//! φ′² = ½(β − 1/c)φ⁴ + σφ² + a, and the long-wave component is
//! ψ = −φ²/c + γ with γ = σ + c²/4 − ω.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::elliptic::{EllipticModulus, Jacobi};
use crate::error::{Error, Result};
use crate::fourier::FourierBasis;
use crate::output::fmt_f64;

/// Smallest grid accepted by the wave constructors.
pub const MIN_GRID_SIZE: usize = 32;

/// Relative tolerance on the ODE and first-integral residuals.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Dnoidal,
    Snoidal,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Dnoidal => "dnoidal",
            Family::Snoidal => "snoidal",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dnoidal" | "dn" => Ok(Family::Dnoidal),
            "snoidal" | "sn" => Ok(Family::Snoidal),
            other => Err(Error::Domain(format!("unknown wave family '{other}'"))),
        }
    }
}

/// Physical parameters of a wave and every constant derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveParameters {
    pub family: Family,
    pub c: f64,
    pub beta: f64,
    pub sigma: f64,
    pub omega: f64,
    pub kappa: EllipticModulus,
    pub alpha: f64,
    pub phi0: f64,
    pub gamma: f64,
    pub half_period: f64,
    /// Constant a of the first integral, from its closed form.
    pub first_integral_a: f64,
    /// φ₁² = φ₀²(1 − κ²), the square of the dnoidal minimum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi1_sq: Option<f64>,
}

impl WaveParameters {
    pub fn new(
        family: Family,
        c: f64,
        beta: f64,
        sigma: f64,
        omega: f64,
        kappa: EllipticModulus,
    ) -> Result<Self> {
        for (name, v) in [("c", c), ("beta", beta), ("sigma", sigma), ("omega", omega)] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {v}")));
            }
        }
        if c == 0.0 {
            return Err(Error::Domain("wave speed c must be nonzero".into()));
        }
        let nonlin = 1.0 / c - beta;
        let k2 = kappa.parameter();
        let kk = Jacobi::new(kappa).complete_k();
        let gamma = sigma + c * c / 4.0 - omega;
        match family {
            Family::Dnoidal => {
                if !(nonlin > 0.0) {
                    return Err(Error::Domain(format!(
                        "dnoidal waves need 1/c - beta > 0, got {nonlin}"
                    )));
                }
                if !(sigma > 0.0) {
                    return Err(Error::Domain(format!("dnoidal waves need sigma > 0, got {sigma}")));
                }
                let alpha = (sigma / (2.0 - k2)).sqrt();
                let phi0_sq = 2.0 * sigma / ((2.0 - k2) * nonlin);
                let phi1_sq = phi0_sq * (1.0 - k2);
                Ok(Self {
                    family,
                    c,
                    beta,
                    sigma,
                    omega,
                    kappa,
                    alpha,
                    phi0: phi0_sq.sqrt(),
                    gamma,
                    half_period: kk / alpha,
                    first_integral_a: -(1.0 - c * beta) / (2.0 * c) * phi0_sq * phi1_sq,
                    phi1_sq: Some(phi1_sq),
                })
            }
            Family::Snoidal => {
                if !(nonlin < 0.0) {
                    return Err(Error::Domain(format!(
                        "snoidal waves need 1/c - beta < 0, got {nonlin}"
                    )));
                }
                if !(sigma < 0.0) {
                    return Err(Error::Domain(format!("snoidal waves need sigma < 0, got {sigma}")));
                }
                let alpha = (-sigma / (1.0 + k2)).sqrt();
                let phi0_sq = 2.0 * sigma * k2 / (nonlin * (1.0 + k2));
                let a = (c * beta - 1.0) / (2.0 * c)
                    * phi0_sq
                    * (2.0 * c * sigma / (1.0 - c * beta) - phi0_sq);
                Ok(Self {
                    family,
                    c,
                    beta,
                    sigma,
                    omega,
                    kappa,
                    alpha,
                    phi0: phi0_sq.sqrt(),
                    gamma,
                    half_period: 2.0 * kk / alpha,
                    first_integral_a: a,
                    phi1_sq: None,
                })
            }
        }
    }

    /// The coefficient β − 1/c of the cubic term.
    pub fn cubic_coefficient(&self) -> f64 {
        self.beta - 1.0 / self.c
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_period
    }

    /// φ(x) and φ′(x) at a single point.
    pub fn evaluate(&self, jacobi: &Jacobi, x: f64) -> Result<(f64, f64)> {
        let (sn, cn, dn) = jacobi.sn_cn_dn(self.alpha * x)?;
        let k2 = self.kappa.parameter();
        Ok(match self.family {
            Family::Dnoidal => (self.phi0 * dn, -self.phi0 * self.alpha * k2 * sn * cn),
            Family::Snoidal => (self.phi0 * sn, self.phi0 * self.alpha * cn * dn),
        })
    }
}

/// Result of the carrier-phase periodicity diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePeriodicity {
    pub q: f64,
    pub nearest: i64,
    pub residual: f64,
}

/// Checks whether the carrier e^{icx/2} is periodic over the wave's period.
///
/// Dnoidal: q = cK√(2−κ²)/(2π√σ); snoidal: q = cK√(1+κ²)/(π√(−σ)). The
/// condition holds when q is an integer. Diagnostic only.
pub fn check_phase_periodicity(params: &WaveParameters) -> PhasePeriodicity {
    let k2 = params.kappa.parameter();
    let kk = Jacobi::new(params.kappa).complete_k();
    let q = match params.family {
        Family::Dnoidal => params.c * kk * (2.0 - k2).sqrt() / (2.0 * PI * params.sigma.sqrt()),
        Family::Snoidal => params.c * kk * (1.0 + k2).sqrt() / (PI * (-params.sigma).sqrt()),
    };
    let nearest = q.round();
    PhasePeriodicity { q, nearest: nearest as i64, residual: (q - nearest).abs() }
}

/// Sampled wave on the grid x_j = −T + 2Tj/N.
#[derive(Debug, Clone, Serialize)]
pub struct WaveProfile {
    pub params: WaveParameters,
    pub grid_size: usize,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub psi: Vec<f64>,
    /// max |φ″ − σφ − (β − 1/c)φ³| with φ″ computed spectrally.
    pub ode_residual: f64,
    /// Median over the grid of φ′² − ½(β − 1/c)φ⁴ − σφ².
    pub first_integral_median: f64,
    /// Spread (max − min) of the same expression, relative to its term magnitudes.
    pub first_integral_residual: f64,
    #[serde(skip)]
    basis: FourierBasis,
}

impl WaveProfile {
    /// Samples the wave without checking the residual tolerances.
    pub fn sample(params: WaveParameters, n: usize) -> Result<Self> {
        if n < MIN_GRID_SIZE || !n.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "grid size must be even and at least {MIN_GRID_SIZE}, got {n}"
            )));
        }
        let basis = FourierBasis::new(n, params.half_period)?;
        let jacobi = Jacobi::new(params.kappa);
        let x = basis.grid().to_vec();
        let mut phi = Vec::with_capacity(n);
        let mut dphi = Vec::with_capacity(n);
        for &xj in &x {
            let (p, dp) = params.evaluate(&jacobi, xj)?;
            phi.push(p);
            dphi.push(dp);
        }
        let psi = phi.iter().map(|p| -p * p / params.c + params.gamma).collect();

        let b = params.cubic_coefficient();
        let phi_xx = basis.to_samples(&basis.differentiate(&basis.to_coefficients(&phi), 2));
        let ode_residual = phi
            .iter()
            .zip(&phi_xx)
            .map(|(p, pxx)| (pxx - params.sigma * p - b * p * p * p).abs())
            .fold(0.0, f64::max);

        let mut energy = Vec::with_capacity(n);
        let mut scale = 0.0f64;
        for (p, dp) in phi.iter().zip(&dphi) {
            let terms = [dp * dp, 0.5 * b * p.powi(4), params.sigma * p * p];
            energy.push(terms[0] - terms[1] - terms[2]);
            scale = scale.max(terms.iter().map(|t| t.abs()).sum());
        }
        let spread = energy.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - energy.iter().cloned().fold(f64::INFINITY, f64::min);
        energy.sort_by(f64::total_cmp);
        let first_integral_median = 0.5 * (energy[n / 2 - 1] + energy[n / 2]);

        Ok(Self {
            params,
            grid_size: n,
            x,
            phi,
            dphi,
            psi,
            ode_residual,
            first_integral_median,
            first_integral_residual: if scale > 0.0 { spread / scale } else { 0.0 },
            basis,
        })
    }

    /// Samples the wave and rejects it if the grid does not resolve it.
    pub fn new(params: WaveParameters, n: usize) -> Result<Self> {
        let wave = Self::sample(params, n)?;
        let tol = wave.ode_tolerance();
        if wave.ode_residual > tol {
            return Err(Error::Resolution {
                what: "profile ODE",
                residual: wave.ode_residual,
                tolerance: tol,
            });
        }
        if wave.first_integral_residual > RESIDUAL_TOLERANCE {
            return Err(Error::Resolution {
                what: "first integral",
                residual: wave.first_integral_residual,
                tolerance: RESIDUAL_TOLERANCE,
            });
        }
        Ok(wave)
    }

    /// 1e-8 · max|φ| · max(σ, 1).
    pub fn ode_tolerance(&self) -> f64 {
        let amp = self.phi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        RESIDUAL_TOLERANCE * amp * self.params.sigma.max(1.0)
    }

    pub fn basis(&self) -> &FourierBasis {
        &self.basis
    }

    pub fn half_period(&self) -> f64 {
        self.params.half_period
    }

    /// Trapezoid inner product over one period.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.basis.inner(f, g)
    }

    /// Writes columns x, phi, dphi, psi.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "phi", "dphi", "psi"]).map_err(csv_error)?;
        for j in 0..self.grid_size {
            w.write_record([
                fmt_f64(self.x[j]),
                fmt_f64(self.phi[j]),
                fmt_f64(self.dphi[j]),
                fmt_f64(self.psi[j]),
            ])
            .map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// φ = φ₀ dn(αx, κ); requires c ≠ 0, 1/c − β > 0, σ > 0.
pub fn make_dnoidal(
    c: f64,
    beta: f64,
    sigma: f64,
    omega: f64,
    kappa: EllipticModulus,
    n: usize,
) -> Result<WaveProfile> {
    WaveProfile::new(WaveParameters::new(Family::Dnoidal, c, beta, sigma, omega, kappa)?, n)
}

/// φ = φ₀ sn(αx, κ); requires c ≠ 0, 1/c − β < 0, σ < 0.
pub fn make_snoidal(
    c: f64,
    beta: f64,
    sigma: f64,
    omega: f64,
    kappa: EllipticModulus,
    n: usize,
) -> Result<WaveProfile> {
    WaveProfile::new(WaveParameters::new(Family::Snoidal, c, beta, sigma, omega, kappa)?, n)
}

/// ψ = −φ²/c + γ on the wave grid.
pub fn psi_profile(wave: &WaveProfile) -> Vec<f64> {
    wave.phi.iter().map(|p| -p * p / wave.params.c + wave.params.gamma).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::complete_k;

    fn k(v: f64) -> EllipticModulus {
        EllipticModulus::new(v).unwrap()
    }

    #[test]
    fn dnoidal_parameters() {
        let w = make_dnoidal(1.0, 0.0, 1.0, 0.0, k(0.5), 256).unwrap();
        let p = &w.params;
        assert!((p.alpha * p.alpha - 1.0 / 1.75).abs() < 1e-14);
        assert!((p.phi0 * p.phi0 - 2.0 / 1.75).abs() < 1e-14);
        let t = complete_k(k(0.5)) * 1.75f64.sqrt();
        assert!((p.half_period - t).abs() < 1e-13);
        assert!((p.half_period - 2.2300).abs() < 1e-4);
        assert!((p.gamma - 1.25).abs() < 1e-15);
        assert!((w.psi[w.grid_size / 2] - (1.25 - 2.0 / 1.75)).abs() < 1e-14);
    }

    #[test]
    fn snoidal_parameters_and_oddness() {
        let w = make_snoidal(1.0, 2.0, -1.0, 0.0, k(0.5), 256).unwrap();
        let p = &w.params;
        assert!((p.phi0 * p.phi0 - 0.4).abs() < 1e-14);
        assert!((p.alpha * p.alpha - 0.8).abs() < 1e-14);
        assert!((p.half_period - 2.0 * complete_k(k(0.5)) / 0.8f64.sqrt()).abs() < 1e-13);
        assert!((p.half_period - 3.7695).abs() < 1e-4);
        let n = w.grid_size;
        for j in 1..n {
            assert!((w.phi[j] + w.phi[n - j]).abs() < 1e-12);
        }
        assert!(w.phi[n / 2].abs() < 1e-15);
    }

    #[test]
    fn residuals_within_tolerance() {
        for (fam, c, b, s) in [
            (Family::Dnoidal, 1.0, 0.0, 1.0),
            (Family::Dnoidal, -1.0, -2.0, 2.0),
            (Family::Snoidal, 1.0, 2.0, -1.0),
            (Family::Snoidal, 1.0, 1.01, -1.0),
        ] {
            for kappa in [0.2, 0.5, 0.8] {
                let p = WaveParameters::new(fam, c, b, s, 0.0, k(kappa)).unwrap();
                let w = WaveProfile::new(p, 256).unwrap();
                assert!(w.ode_residual <= w.ode_tolerance());
                assert!(w.first_integral_residual <= 1e-8);
                let a = p.first_integral_a;
                assert!((w.first_integral_median - a).abs() <= 1e-10 * (1.0 + a.abs()), "{fam} {kappa}");
            }
        }
    }

    #[test]
    fn dnoidal_root_relation() {
        for (c, b, s) in [(1.0, 0.0, 1.0), (1.0, 0.5, 0.5), (-1.0, -2.0, 2.0)] {
            let p = WaveParameters::new(Family::Dnoidal, c, b, s, 0.0, k(0.6)).unwrap();
            let lhs = p.phi0 * p.phi0 + p.phi1_sq.unwrap();
            assert!((lhs - 2.0 * c * s / (1.0 - c * b)).abs() < 1e-12);
        }
    }

    #[test]
    fn nearly_constant_profile() {
        let w = make_dnoidal(1.0, 0.0, 1.0, 0.0, k(1e-6), 64).unwrap();
        let max = w.phi.iter().cloned().fold(f64::MIN, f64::max);
        let min = w.phi.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max - min <= 1e-8);
    }

    #[test]
    fn domain_errors() {
        assert!(WaveParameters::new(Family::Dnoidal, 0.0, 0.0, 1.0, 0.0, k(0.5)).unwrap_err().is_domain());
        assert!(WaveParameters::new(Family::Dnoidal, 1.0, 2.0, 1.0, 0.0, k(0.5)).unwrap_err().is_domain());
        assert!(WaveParameters::new(Family::Dnoidal, 1.0, 0.0, -1.0, 0.0, k(0.5)).unwrap_err().is_domain());
        assert!(WaveParameters::new(Family::Snoidal, 1.0, 0.0, -1.0, 0.0, k(0.5)).unwrap_err().is_domain());
        assert!(WaveParameters::new(Family::Snoidal, 1.0, 2.0, 1.0, 0.0, k(0.5)).unwrap_err().is_domain());
        assert!(make_dnoidal(1.0, 0.0, 1.0, 0.0, k(0.5), 30).unwrap_err().is_domain());
        assert!(make_dnoidal(1.0, 0.0, 1.0, 0.0, k(0.5), 65).unwrap_err().is_domain());
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let err = make_dnoidal(1.0, 0.0, 1.0, 0.0, k(0.999), 32).unwrap_err();
        assert!(matches!(err, Error::Resolution { .. }));
    }

    #[test]
    fn phase_periodicity() {
        let p = WaveParameters::new(Family::Dnoidal, 1.0, 0.0, 1.0, 0.0, k(0.5)).unwrap();
        let r = check_phase_periodicity(&p);
        let q = p.half_period / (2.0 * PI);
        assert!((r.q - q).abs() < 1e-14 && (r.q - 0.35493).abs() < 1e-5);
        assert_eq!(r.nearest, 0);
        assert!((r.residual - r.q).abs() < 1e-15);

        // Choose c so that q is exactly 3.
        let c = 3.0 / q;
        let p = WaveParameters::new(Family::Dnoidal, c, 0.0, 1.0, 0.0, k(0.5)).unwrap();
        let r = check_phase_periodicity(&p);
        assert_eq!(r.nearest, 3);
        assert!(r.residual <= 1e-12);

        let p = WaveParameters::new(Family::Snoidal, 1.0, 2.0, -1.0, 0.0, k(0.5)).unwrap();
        let r = check_phase_periodicity(&p);
        let expect = complete_k(k(0.5)) * 1.25f64.sqrt() / PI;
        assert!((r.q - expect).abs() < 1e-14);
        assert!((r.q - 0.59993).abs() < 1e-5);
    }

    #[test]
    fn psi_with_zero_gamma() {
        let c = 1.3;
        let omega = 1.0 + c * c / 4.0;
        let w = make_dnoidal(c, 0.0, 1.0, omega, k(0.4), 64).unwrap();
        assert_eq!(w.params.gamma, 0.0);
        let psi = psi_profile(&w);
        for (s, p) in psi.iter().zip(&w.phi) {
            assert_eq!(*s, -p * p / c);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let w = make_snoidal(1.0, 2.0, -1.0, 0.0, k(0.5), 32).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "x,phi,dphi,psi");
        assert_eq!(lines.len(), 33);
        assert!(!text.contains('\r'));
    }
}
