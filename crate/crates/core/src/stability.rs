//! The index matrix D, closed-form elliptic-integral values of its entries,
//! and the Hamiltonian–Krein count k_Ham = n(H) − n(D).
//!
//! D is built from the generalized-kernel vectors
//! ψ₁ = (φ/(2c(cβ−1)), −βφ²/(c(cβ−1)), L₂⁻¹φ′), ψ₂ = (−L⁻¹φ, 1 + (2/c)φL⁻¹φ, 0)
//! and ψ₃ = (0, 1, 0) as D_ij = ⟨Hψᵢ, ψⱼ⟩.

use faer::{Mat, Side};
use serde::Serialize;

use crate::elliptic::{EllipticModulus, Jacobi};
use crate::error::{Error, Result};
use crate::hill::{BlockOperatorH, HillOperator, OperatorLabel};
use crate::linearization::{assemble_jh, eigen_spectrum_jh, EigenReport};
use crate::waves::{Family, WaveParameters, WaveProfile};

/// n(D) counts eigenvalues below −tol · ‖D‖.
pub const D_ZERO_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DComponents {
    /// ⟨L₂⁻¹φ′, φ′⟩
    pub l2_inv_dphi_dphi: f64,
    /// ⟨L⁻¹φ, φ⟩
    pub l_inv_phi_phi: f64,
    /// ⟨φ, φ⟩
    pub phi_phi: f64,
    /// ⟨φ², φ²⟩
    pub phi2_phi2: f64,
    /// cT
    pub c_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DMatrix {
    pub entries: [[f64; 3]; 3],
    pub n_d: usize,
    pub det: f64,
    pub eigenvalues: [f64; 3],
    pub components: DComponents,
}

impl DMatrix {
    pub fn from_components(p: &WaveParameters, comp: DComponents) -> Result<Self> {
        let (c, beta) = (p.c, p.beta);
        let cb = c * beta - 1.0;
        let d11 = comp.l2_inv_dphi_dphi + beta * comp.phi2_phi2 / (2.0 * c * c * cb);
        let d12 = -comp.phi_phi / (2.0 * c * cb);
        let d13 = -comp.phi_phi / (2.0 * c);
        let d22 = comp.l_inv_phi_phi;
        let d33 = comp.c_t;
        let entries = [[d11, d12, d13], [d12, d22, 0.0], [d13, 0.0, d33]];
        let det = d33 * (d11 * d22 - d12 * d12) - d13 * d13 * d22;
        let m = Mat::from_fn(3, 3, |i, j| entries[i][j]);
        let ev = m
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let scale = ev.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let n_d = ev.iter().filter(|&&v| v < -D_ZERO_TOLERANCE * scale).count();
        Ok(Self { entries, n_d, det, eigenvalues: [ev[0], ev[1], ev[2]], components: comp })
    }
}

pub fn assemble_d(wave: &WaveProfile) -> Result<DMatrix> {
    let b = wave.basis();
    let phi = b.to_coefficients(&wave.phi);
    let dphi = b.to_coefficients(&wave.dphi);
    let l = HillOperator::for_wave(wave, OperatorLabel::L)?;
    let l2 = HillOperator::for_wave(wave, OperatorLabel::L2)?;
    let u = l.solve_coefficients(&phi)?;
    let w = l2.solve_coefficients(&dphi)?;
    let phi2: Vec<f64> = wave.phi.iter().map(|p| p * p).collect();
    let comp = DComponents {
        l2_inv_dphi_dphi: b.inner_coefficients(&w, &dphi),
        l_inv_phi_phi: b.inner_coefficients(&u, &phi),
        phi_phi: wave.inner(&wave.phi, &wave.phi),
        phi2_phi2: wave.inner(&phi2, &phi2),
        c_t: wave.params.c * wave.params.half_period,
    };
    DMatrix::from_components(&wave.params, comp)
}

/// (E² − (1−κ²)K²) / (2(1−κ²)K − (2−κ²)E), the κ-dependent factor of the dnoidal ⟨L⁻¹φ, φ⟩.
pub fn dnoidal_d22_ratio(kappa: EllipticModulus) -> f64 {
    let j = Jacobi::new(kappa);
    let (kk, ee) = (j.complete_k(), j.complete_e());
    let k2 = kappa.parameter();
    let kp2 = (1.0 - kappa.value()) * (1.0 + kappa.value());
    (ee * ee - kp2 * kk * kk) / (2.0 * kp2 * kk - (2.0 - k2) * ee)
}

/// Dnoidal ⟨L⁻¹φ, φ⟩ = (1/α)(1/(1/c − β)) · ratio(κ).
pub fn closed_form_d22_dnoidal(c: f64, beta: f64, sigma: f64, kappa: EllipticModulus) -> Result<f64> {
    let p = WaveParameters::new(Family::Dnoidal, c, beta, sigma, 0.0, kappa)?;
    Ok(dnoidal_d22_ratio(kappa) / (p.alpha * (1.0 / c - beta)))
}

/// F(κ) = 2K + 2E(−1 + κ²E/((κ²+1)E − (1−κ²)K)).
pub fn closed_form_f(kappa: EllipticModulus) -> f64 {
    let j = Jacobi::new(kappa);
    let (kk, ee) = (j.complete_k(), j.complete_e());
    let k2 = kappa.parameter();
    let kp2 = (1.0 - kappa.value()) * (1.0 + kappa.value());
    2.0 * kk + 2.0 * ee * (-1.0 + k2 * ee / ((k2 + 1.0) * ee - kp2 * kk))
}

/// Snoidal ⟨L⁻¹φ, φ⟩ = (1/α) F(κ)/(β − 1/c).
pub fn closed_form_d22_snoidal(c: f64, beta: f64, sigma: f64, kappa: EllipticModulus) -> Result<f64> {
    let p = WaveParameters::new(Family::Snoidal, c, beta, sigma, 0.0, kappa)?;
    Ok(closed_form_f(kappa) / (p.alpha * (beta - 1.0 / c)))
}

/// H(κ) = [(2(κ²+2)K − 4(κ²+1)E)(2K + 2E(κ²E/((κ²−1)K + (κ²+1)E) − 1)) − 12(E−K)²] / (3κ⁴).
pub fn closed_form_h(kappa: EllipticModulus) -> f64 {
    let j = Jacobi::new(kappa);
    let (kk, ee) = (j.complete_k(), j.complete_e());
    let k2 = kappa.parameter();
    let first = 2.0 * (k2 + 2.0) * kk - 4.0 * (k2 + 1.0) * ee;
    let second = 2.0 * kk + 2.0 * ee * (k2 * ee / ((k2 - 1.0) * kk + (k2 + 1.0) * ee) - 1.0);
    (first * second - 12.0 * (ee - kk).powi(2)) / (3.0 * k2 * k2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Indeterminate,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Stable when k_Ham = 0, Unstable when k_Ham is odd or the direct count finds
/// an eigenvalue with positive real part, Indeterminate otherwise.
pub fn decide(k_ham: i64, k_real: usize, k_complex_quadruplets: usize) -> Verdict {
    if k_ham == 0 {
        Verdict::Stable
    } else if k_ham.rem_euclid(2) == 1 || k_real >= 1 || k_complex_quadruplets >= 1 {
        Verdict::Unstable
    } else {
        Verdict::Indeterminate
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub family: Family,
    pub parameters: WaveParameters,
    pub grid_size: usize,
    pub n_h: usize,
    pub n_d: usize,
    pub k_ham: i64,
    pub det_d: f64,
    pub k_real: usize,
    pub k_complex_quadruplets: usize,
    pub max_real_part: f64,
    pub zero_cluster_dim: usize,
    pub zero_tolerance: f64,
    pub spectral_radius: f64,
    pub verdict: Verdict,
    /// k_r + 2k_c ≤ k_Ham and k_r ≡ k_Ham (mod 2).
    pub consistency: bool,
}

impl StabilityReport {
    pub fn assemble(wave: &WaveProfile, n_h: usize, d: &DMatrix, eig: &EigenReport) -> Self {
        let k_ham = n_h as i64 - d.n_d as i64;
        let direct = eig.k_real as i64 + 2 * eig.k_complex_quadruplets as i64;
        Self {
            family: wave.params.family,
            parameters: wave.params,
            grid_size: wave.grid_size,
            n_h,
            n_d: d.n_d,
            k_ham,
            det_d: d.det,
            k_real: eig.k_real,
            k_complex_quadruplets: eig.k_complex_quadruplets,
            max_real_part: eig.max_real_part,
            zero_cluster_dim: eig.zero_cluster_dim,
            zero_tolerance: eig.zero_tolerance,
            spectral_radius: eig.spectral_radius,
            verdict: decide(k_ham, eig.k_real, eig.k_complex_quadruplets),
            consistency: direct <= k_ham && (k_ham - direct) % 2 == 0,
        }
    }
}

/// n(H), D and the JH spectrum combined into the index-formula verdict.
pub fn krein_verdict(wave: &WaveProfile) -> Result<StabilityReport> {
    let n_h = BlockOperatorH::new(wave)?.morse_index()?;
    let d = assemble_d(wave)?;
    let eig = eigen_spectrum_jh(&assemble_jh(wave)?, None)?;
    Ok(StabilityReport::assemble(wave, n_h, &d, &eig))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub epsilon: f64,
    pub det_d: f64,
    pub prediction: f64,
    pub ratio: f64,
    /// The ratio is more than 10% from one: higher-order terms in ε are not negligible.
    pub warning: bool,
}

/// Leading-order det D ≈ D₃₃ φ₀⁴ H(κ) / (α² c² (cβ − 1)²) for snoidal waves with β = 1/c + ε.
pub fn snoidal_det_d_prediction(p: &WaveParameters) -> f64 {
    let cb = p.c * p.beta - 1.0;
    p.c * p.half_period * p.phi0.powi(4) * closed_form_h(p.kappa)
        / (p.alpha * p.alpha * p.c * p.c * cb * cb)
}

pub fn snoidal_det_d_asymptotics(
    c: f64,
    sigma: f64,
    kappa: EllipticModulus,
    epsilons: &[f64],
    grid_size: usize,
) -> Result<Vec<AsymptoticRow>> {
    epsilons
        .iter()
        .map(|&eps| {
            if !(eps > 0.0) {
                return Err(Error::Domain(format!("epsilon must be positive, got {eps}")));
            }
            let p = WaveParameters::new(Family::Snoidal, c, 1.0 / c + eps, sigma, 0.0, kappa)?;
            let wave = WaveProfile::new(p, grid_size)?;
            let det_d = assemble_d(&wave)?.det;
            let prediction = snoidal_det_d_prediction(&p);
            let ratio = det_d / prediction;
            let warning = (ratio - 1.0).abs() > 0.1;
            if warning {
                log::warn!(
                    "epsilon = {eps}: det D / leading-order prediction = {ratio:.4}; higher-order terms dominate"
                );
            }
            Ok(AsymptoticRow { epsilon: eps, det_d, prediction, ratio, warning })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuationPoint {
    pub beta: f64,
    pub k_real: usize,
    pub k_complex_quadruplets: usize,
    pub zero_cluster_dim: usize,
    pub max_real_part: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationCheck {
    pub points: Vec<ContinuationPoint>,
    /// A real positive eigenvalue at every β.
    pub real_instability_throughout: bool,
    /// Exactly five eigenvalues at zero at every β.
    pub zero_cluster_intact: bool,
}

/// Follows snoidal waves along the given β values (all > 1/c) and records
/// whether a real unstable eigenvalue and the five-dimensional zero cluster persist.
pub fn snoidal_beta_continuation(
    c: f64,
    sigma: f64,
    kappa: EllipticModulus,
    betas: &[f64],
    grid_size: usize,
) -> Result<ContinuationCheck> {
    let mut points = Vec::with_capacity(betas.len());
    for &beta in betas {
        let wave = WaveProfile::new(
            WaveParameters::new(Family::Snoidal, c, beta, sigma, 0.0, kappa)?,
            grid_size,
        )?;
        let eig = eigen_spectrum_jh(&assemble_jh(&wave)?, None)?;
        points.push(ContinuationPoint {
            beta,
            k_real: eig.k_real,
            k_complex_quadruplets: eig.k_complex_quadruplets,
            zero_cluster_dim: eig.zero_cluster_dim,
            max_real_part: eig.max_real_part,
        });
    }
    Ok(ContinuationCheck {
        real_instability_throughout: points.iter().all(|p| p.k_real >= 1),
        zero_cluster_intact: points.iter().all(|p| p.zero_cluster_dim == 5),
        points,
    })
}
