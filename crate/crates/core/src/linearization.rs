//! The linearized operator JH about a wave, its spectrum, the generalized
//! kernel at zero and linear time evolution.
//!
//! Perturbations are triples (P, V, Q): real and imaginary parts of the
//! short-wave perturbation and the long-wave perturbation. With
//! J = [[0, 0, I], [0, 2∂ₓ, 0], [−I, 0, 0]],
//!
//! ```text
//! JH = [[  0,    0,  L₂],
//!       [ 2∂φ,  c∂,  0 ],
//!       [ −L₁,  −φ,  0 ]]
//! ```
//!
//! All matrices act on Fourier coefficient vectors of length 3M.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expm::{expm, norm_1};
use crate::fourier::FourierBasis;
use crate::hill::{dot, mat_vec, norm, BlockOperatorH, HillOperator, OperatorLabel};
use crate::waves::WaveProfile;

/// Default zero tolerance of the JH spectrum, relative to the spectral radius.
pub const ZERO_TOLERANCE_FACTOR: f64 = 1e-8;

/// Relative residual accepted for the generalized-kernel relations.
pub const KERNEL_RESIDUAL_TOLERANCE: f64 = 1e-7;

/// A perturbation (P, V, Q) as three grid-sample vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockVector {
    pub p: Vec<f64>,
    pub v: Vec<f64>,
    pub q: Vec<f64>,
}

impl BlockVector {
    pub fn zeros(n: usize) -> Self {
        Self { p: vec![0.0; n], v: vec![0.0; n], q: vec![0.0; n] }
    }

    /// Coefficient vector of length 3M.
    pub fn to_coefficients(&self, basis: &FourierBasis) -> Result<Vec<f64>> {
        for part in [&self.p, &self.v, &self.q] {
            basis.check_len(part.len())?;
        }
        let mut z = basis.to_coefficients(&self.p);
        z.extend(basis.to_coefficients(&self.v));
        z.extend(basis.to_coefficients(&self.q));
        Ok(z)
    }

    pub fn from_coefficients(basis: &FourierBasis, z: &[f64]) -> Result<Self> {
        let m = basis.dim();
        if z.len() != 3 * m {
            return Err(Error::Dimension { expected: 3 * m, found: z.len() });
        }
        Ok(Self {
            p: basis.to_samples(&z[..m]),
            v: basis.to_samples(&z[m..2 * m]),
            q: basis.to_samples(&z[2 * m..]),
        })
    }
}

/// The assembled matrix of J·H.
#[derive(Debug, Clone)]
pub struct BlockOperatorJH {
    pub h: BlockOperatorH,
    derivative: Mat<f64>,
    basis: FourierBasis,
    matrix: Mat<f64>,
}

impl BlockOperatorJH {
    pub fn new(wave: &WaveProfile) -> Result<Self> {
        Self::from_parts(BlockOperatorH::new(wave)?, wave.basis().clone())
    }

    /// Linearization about arbitrary samples φ, which need not be a wave.
    pub fn from_samples(
        basis: FourierBasis,
        c: f64,
        beta: f64,
        sigma: f64,
        phi: &[f64],
    ) -> Result<Self> {
        basis.check_len(phi.len())?;
        if c == 0.0 || !c.is_finite() {
            return Err(Error::Domain(format!("wave speed must be finite and nonzero, got {c}")));
        }
        let potential = |coeff: f64| phi.iter().map(|f| sigma + coeff * f * f).collect::<Vec<_>>();
        let h = BlockOperatorH {
            c,
            l1: HillOperator::new(basis.clone(), potential(3.0 * beta - 1.0 / c), OperatorLabel::L1)?,
            l2: HillOperator::new(basis.clone(), potential(beta - 1.0 / c), OperatorLabel::L2)?,
            phi_mult: basis.multiplication_matrix(phi),
        };
        Self::from_parts(h, basis)
    }

    fn from_parts(h: BlockOperatorH, basis: FourierBasis) -> Result<Self> {
        let m = h.block_dim();
        let d = basis.derivative_matrix();
        let dphi = &d * &h.phi_mult;
        let l1 = h.l1.matrix();
        let l2 = h.l2.matrix();
        let c = h.c;
        let matrix = Mat::from_fn(3 * m, 3 * m, |i, j| {
            let (bi, bj) = (i / m, j / m);
            let (r, s) = (i % m, j % m);
            match (bi, bj) {
                (0, 2) => l2[(r, s)],
                (1, 0) => 2.0 * dphi[(r, s)],
                (1, 1) => c * d[(r, s)],
                (2, 0) => -l1[(r, s)],
                (2, 1) => -h.phi_mult[(r, s)],
                _ => 0.0,
            }
        });
        Ok(Self { h, derivative: d, basis, matrix })
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn basis(&self) -> &FourierBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The antisymmetric matrix J.
    pub fn j_matrix(&self) -> Mat<f64> {
        let m = self.h.block_dim();
        Mat::from_fn(3 * m, 3 * m, |i, j| {
            let (r, s) = (i % m, j % m);
            match (i / m, j / m) {
                (0, 2) if r == s => 1.0,
                (2, 0) if r == s => -1.0,
                (1, 1) => 2.0 * self.derivative[(r, s)],
                _ => 0.0,
            }
        })
    }

    pub fn apply_coefficients(&self, z: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, z)
    }

    pub fn apply(&self, z: &BlockVector) -> Result<BlockVector> {
        let a = z.to_coefficients(&self.basis)?;
        BlockVector::from_coefficients(&self.basis, &self.apply_coefficients(&a))
    }

    /// ⟨Hz, z⟩ in the grid inner product, for a coefficient vector.
    pub fn energy(&self, z: &[f64]) -> f64 {
        self.basis.spacing() * dot(&self.h.apply_coefficients(z), z)
    }

    /// Upper bound on the spectral radius: the largest absolute row sum.
    pub fn spectral_radius_bound(&self) -> f64 {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.matrix[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn eigenvalues(&self) -> Result<Vec<c64>> {
        self.matrix.eigenvalues().map_err(|e| Error::Eigensolver(format!("{e:?}")))
    }
}

pub fn assemble_jh(wave: &WaveProfile) -> Result<BlockOperatorJH> {
    BlockOperatorJH::new(wave)
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    /// All eigenvalues as (re, im), sorted by decreasing real part, then imaginary part.
    pub eigenvalues: Vec<(f64, f64)>,
    pub max_real_part: f64,
    /// Real eigenvalues with Re λ > zeroTol.
    pub k_real: usize,
    /// Quadruplets ±λ, ±λ̄ with Re λ > zeroTol and Im λ > zeroTol.
    pub k_complex_quadruplets: usize,
    pub zero_cluster_dim: usize,
    /// max over |λ| > zeroTol of min_μ |μ + λ| / (1 + |λ|).
    pub symmetry_residual: f64,
    pub zero_tolerance: f64,
    pub spectral_radius: f64,
    /// Smallest |λ| outside the zero cluster.
    pub cluster_gap: f64,
}

impl EigenReport {
    pub fn from_eigenvalues(values: &[c64], zero_tol: Option<f64>) -> Self {
        let spectral_radius = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = zero_tol.unwrap_or(ZERO_TOLERANCE_FACTOR * spectral_radius.max(1.0));
        let mut eigenvalues: Vec<(f64, f64)> = values.iter().map(|z| (z.re, z.im)).collect();
        eigenvalues.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
        let max_real_part = eigenvalues.first().map(|e| e.0).unwrap_or(0.0);
        let k_real = values.iter().filter(|z| z.im.abs() <= tol && z.re > tol).count();
        let k_complex_quadruplets = values.iter().filter(|z| z.im > tol && z.re > tol).count();
        let zero_cluster_dim = values.iter().filter(|z| z.norm() <= tol).count();
        let cluster_gap = values
            .iter()
            .map(|z| z.norm())
            .filter(|&r| r > tol)
            .fold(f64::INFINITY, f64::min);
        let mut symmetry_residual: f64 = 0.0;
        for z in values.iter().filter(|z| z.norm() > tol) {
            let nearest = values.iter().map(|mu| (mu + z).norm()).fold(f64::INFINITY, f64::min);
            symmetry_residual = symmetry_residual.max(nearest / (1.0 + z.norm()));
        }
        Self {
            eigenvalues,
            max_real_part,
            k_real,
            k_complex_quadruplets,
            zero_cluster_dim,
            symmetry_residual,
            zero_tolerance: tol,
            spectral_radius,
            cluster_gap,
        }
    }

    /// Writes columns re, im.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        use crate::output::fmt_f64;
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["re", "im"]).map_err(err)?;
        for (re, im) in &self.eigenvalues {
            w.write_record([fmt_f64(*re), fmt_f64(*im)]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Full spectrum of JH. `zero_tol` defaults to 1e-8 × spectral radius.
pub fn eigen_spectrum_jh(op: &BlockOperatorJH, zero_tol: Option<f64>) -> Result<EigenReport> {
    Ok(EigenReport::from_eigenvalues(&op.eigenvalues()?, zero_tol))
}

/// The five vectors spanning the generalized kernel of JH, as coefficient vectors.
#[derive(Debug, Clone)]
pub struct GeneralizedKernelBasis {
    /// (φ′, −(2/c)φφ′, 0)
    pub k1: Vec<f64>,
    /// (0, 0, φ)
    pub k2: Vec<f64>,
    /// (−L⁻¹φ, 1 + (2/c)φL⁻¹φ, 0)
    pub k3: Vec<f64>,
    /// (φ/(2c(cβ−1)), −βφ²/(c(cβ−1)), L₂⁻¹φ′), with JH g₁ = k₁
    pub g1: Vec<f64>,
    /// (0, 1, 0), with JH g₂ = −k₂
    pub g2: Vec<f64>,
    /// ⟨L⁻¹φ, φ⟩
    pub l_inv_phi_phi: f64,
    /// ⟨L₂⁻¹φ′, φ′⟩
    pub l2_inv_dphi_dphi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelResiduals {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub g1: f64,
    pub g2: f64,
}

impl KernelResiduals {
    pub fn max(&self) -> f64 {
        [self.k1, self.k2, self.k3, self.g1, self.g2].into_iter().fold(0.0, f64::max)
    }
}

impl GeneralizedKernelBasis {
    pub fn vectors(&self) -> [&Vec<f64>; 5] {
        [&self.k1, &self.k2, &self.k3, &self.g1, &self.g2]
    }

    /// Relative residuals of JH kᵢ = 0, JH g₁ = k₁, JH g₂ = −k₂.
    pub fn residuals(&self, op: &BlockOperatorJH) -> KernelResiduals {
        let rel = |v: &Vec<f64>, target: Option<(&Vec<f64>, f64)>| {
            let jv = op.apply_coefficients(v);
            match target {
                None => norm(&jv) / norm(v),
                Some((t, s)) => {
                    let diff: Vec<f64> = jv.iter().zip(t).map(|(a, b)| a - s * b).collect();
                    norm(&diff) / norm(t)
                }
            }
        };
        KernelResiduals {
            k1: rel(&self.k1, None),
            k2: rel(&self.k2, None),
            k3: rel(&self.k3, None),
            g1: rel(&self.g1, Some((&self.k1, 1.0))),
            g2: rel(&self.g2, Some((&self.k2, -1.0))),
        }
    }

    /// Smallest singular value of the five column-normalized vectors.
    pub fn min_singular_value(&self) -> Result<f64> {
        let cols = self.vectors();
        let n = cols[0].len();
        let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
        let m = Mat::from_fn(n, 5, |i, j| cols[j][i] / norms[j]);
        let sv = m.singular_values().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Ok(sv.into_iter().fold(f64::INFINITY, f64::min))
    }
}

pub fn generalized_kernel_basis(wave: &WaveProfile) -> Result<GeneralizedKernelBasis> {
    let b = wave.basis();
    let p = &wave.params;
    let (c, beta) = (p.c, p.beta);
    let m = b.dim();
    let phi = b.to_coefficients(&wave.phi);
    let dphi = b.to_coefficients(&wave.dphi);

    let l = HillOperator::for_wave(wave, OperatorLabel::L)?;
    let u = l.solve_coefficients(&phi)?;
    let l_inv_phi_phi = b.inner_coefficients(&u, &phi);
    let threshold = 1e-8 * b.inner_coefficients(&phi, &phi);
    if l_inv_phi_phi.abs() <= threshold {
        return Err(Error::Degenerate { value: l_inv_phi_phi.abs(), threshold });
    }
    let l2 = HillOperator::for_wave(wave, OperatorLabel::L2)?;
    let w = l2.solve_coefficients(&dphi)?;
    let l2_inv_dphi_dphi = b.inner_coefficients(&w, &dphi);

    let u_s = b.to_samples(&u);
    let samples = |f: &dyn Fn(usize) -> f64| b.to_coefficients(&(0..b.n()).map(f).collect::<Vec<_>>());
    let zero = vec![0.0; m];
    let cat = |a: &[f64], bb: &[f64], cc: &[f64]| [a, bb, cc].concat();

    let v1 = samples(&|j| -2.0 / c * wave.phi[j] * wave.dphi[j]);
    let v3 = samples(&|j| 1.0 + 2.0 / c * wave.phi[j] * u_s[j]);
    let neg_u: Vec<f64> = u.iter().map(|x| -x).collect();
    let scale = c * (c * beta - 1.0);
    let p1: Vec<f64> = phi.iter().map(|x| x / (2.0 * scale)).collect();
    let v_g1 = samples(&|j| -beta * wave.phi[j] * wave.phi[j] / scale);
    let one = samples(&|_| 1.0);

    Ok(GeneralizedKernelBasis {
        k1: cat(&dphi, &v1, &zero),
        k2: cat(&zero, &zero, &phi),
        k3: cat(&neg_u, &v3, &zero),
        g1: cat(&p1, &v_g1, &w),
        g2: cat(&zero, &one, &zero),
        l_inv_phi_phi,
        l2_inv_dphi_dphi,
    })
}

/// Outcome of the Jordan-structure check at zero.
#[derive(Debug, Clone, Serialize)]
pub struct JordanCheck {
    pub passed: bool,
    pub zero_cluster_dim: usize,
    pub rank_jh: usize,
    pub rank_jh_squared: usize,
    pub singular_values_jh: Vec<f64>,
    pub singular_values_jh_squared: Vec<f64>,
}

const SUBSPACE_ITERATIONS: usize = 40;
const JORDAN_SEED: u64 = 0x5eed_0001;

/// Checks that the zero eigenvalue of JH has a five-dimensional generalized
/// eigenspace on which rank(JH) − rank(JH²) = 2, i.e. two chains of length two
/// and one of length one, with no longer chains.
///
/// The invariant subspace is found by shifted inverse subspace iteration; JH
/// is compressed onto it and ranks are read off its singular values at the
/// spectrum's zero tolerance.
pub fn verify_no_higher_jordan_blocks(
    op: &BlockOperatorJH,
    report: &EigenReport,
) -> Result<JordanCheck> {
    let tol = report.zero_tolerance;
    if report.cluster_gap < 10.0 * tol {
        return Err(Error::Inconclusive(format!(
            "zero cluster not separated: nearest nonzero |lambda| = {:.3e}, zero tolerance {:.3e}",
            report.cluster_gap, tol
        )));
    }
    let dim = report.zero_cluster_dim;
    if dim == 0 {
        return Ok(JordanCheck {
            passed: false,
            zero_cluster_dim: 0,
            rank_jh: 0,
            rank_jh_squared: 0,
            singular_values_jh: vec![],
            singular_values_jh_squared: vec![],
        });
    }
    let n = op.dim();
    let shifted = Mat::from_fn(n, n, |i, j| op.matrix[(i, j)] - if i == j { tol } else { 0.0 });
    let lu = shifted.partial_piv_lu();
    let mut rng = ChaCha8Rng::seed_from_u64(JORDAN_SEED);
    let mut x = Mat::from_fn(n, dim, |_, _| rng.gen_range(-1.0..1.0));
    for _ in 0..SUBSPACE_ITERATIONS {
        let y = lu.solve(&x);
        if y.col_iter().any(|c| c.iter().any(|v| !v.is_finite())) {
            return Err(Error::Inconclusive("inverse iteration diverged".into()));
        }
        x = y.qr().compute_thin_Q();
    }
    let ax = &op.matrix * &x;
    let a_r = x.transpose() * &ax;
    let a_r2 = &a_r * &a_r;
    let sv = |m: &Mat<f64>| -> Result<Vec<f64>> {
        m.singular_values().map_err(|e| Error::Eigensolver(format!("{e:?}")))
    };
    let s1 = sv(&a_r)?;
    let s2 = sv(&a_r2)?;
    let rank = |s: &[f64]| s.iter().filter(|&&v| v > tol).count();
    let (r1, r2) = (rank(&s1), rank(&s2));
    Ok(JordanCheck {
        passed: dim == 5 && r1 - r2 == 2 && r2 == 0,
        zero_cluster_dim: dim,
        rank_jh: r1,
        rank_jh_squared: r2,
        singular_values_jh: s1,
        singular_values_jh_squared: s2,
    })
}

/// e^{t·JH} applied to a perturbation.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: BlockVector,
    pub coefficients: Vec<f64>,
    /// t·‖JH‖₁.
    pub condition_estimate: f64,
}

pub fn evolve_linearized(op: &BlockOperatorJH, initial: &BlockVector, t: f64) -> Result<Evolution> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("evolution time must be finite and nonnegative, got {t}")));
    }
    let z0 = initial.to_coefficients(&op.basis)?;
    if t == 0.0 {
        return Ok(Evolution {
            state: BlockVector::from_coefficients(&op.basis, &z0)?,
            coefficients: z0,
            condition_estimate: 0.0,
        });
    }
    let e = expm(&scaled(&op.matrix, t))?;
    let z = mat_vec(&e.value, &z0);
    Ok(Evolution {
        state: BlockVector::from_coefficients(&op.basis, &z)?,
        coefficients: z,
        condition_estimate: e.condition_estimate,
    })
}

fn scaled(a: &Mat<f64>, s: f64) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| s * a[(i, j)])
}

/// Fixed-step propagator e^{Δt·JH} for sampling trajectories.
#[derive(Debug, Clone)]
pub struct Propagator {
    step: Mat<f64>,
    dt: f64,
    pub condition_estimate: f64,
}

impl Propagator {
    pub fn new(op: &BlockOperatorJH, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be positive, got {dt}")));
        }
        let e = expm(&scaled(&op.matrix, dt))?;
        Ok(Self { step: e.value, dt, condition_estimate: norm_1(&op.matrix) * dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// States at t = 0, Δt, …, steps·Δt, as coefficient vectors.
    pub fn trajectory(&self, z0: &[f64], steps: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(z0.to_vec());
        for _ in 0..steps {
            let next = mat_vec(&self.step, out.last().unwrap());
            out.push(next);
        }
        out
    }
}

/// Least-squares slope of log ‖z‖ against t.
pub fn fit_growth_rate(times: &[f64], norms: &[f64]) -> f64 {
    let n = times.len() as f64;
    let logs: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let mt = times.iter().sum::<f64>() / n;
    let ml = logs.iter().sum::<f64>() / n;
    let cov: f64 = times.iter().zip(&logs).map(|(t, l)| (t - mt) * (l - ml)).sum();
    let var: f64 = times.iter().map(|t| (t - mt) * (t - mt)).sum();
    cov / var
}

/// Seeded random perturbation with coefficients decaying like 1/(1 + k²).
pub fn random_initial_data(basis: &FourierBasis, seed: u64) -> BlockVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut part = || {
        let a: Vec<f64> = basis
            .wavenumbers()
            .iter()
            .map(|w| rng.gen_range(-1.0..1.0) / (1.0 + w * w))
            .collect();
        basis.to_samples(&a)
    };
    BlockVector { p: part(), v: part(), q: part() }
}
