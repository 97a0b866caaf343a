//! Hill operators −∂ₓ² + V(x) and the symmetric block operator H.
//!
//! Operators are dense Galerkin matrices in the real Fourier basis of
//! [`FourierBasis`]; vectors passed in and out are grid samples.

use std::sync::OnceLock;

use faer::{Mat, Side};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierBasis;
use crate::waves::WaveProfile;

/// Relative zero tolerance for symmetric spectra: τ = factor · max(1, max|λ|).
pub const ZERO_TOLERANCE_FACTOR: f64 = 1e-10;

/// Kernel component of a right-hand side (relative) accepted by the projected solve.
pub const SOLVABILITY_TOLERANCE: f64 = 1e-8;

/// Relative residual accepted by the projected solve.
const REFINEMENT_STEPS: usize = 4;

pub const SOLVE_RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OperatorLabel {
    /// −∂² + σ + 3(β − 1/c)φ²
    L,
    /// −∂² + σ + (3β − 1/c)φ²
    L1,
    /// −∂² + σ + (β − 1/c)φ²
    L2,
    Custom,
}

impl OperatorLabel {
    pub fn name(self) -> &'static str {
        match self {
            OperatorLabel::L => "L",
            OperatorLabel::L1 => "L1",
            OperatorLabel::L2 => "L2",
            OperatorLabel::Custom => "custom",
        }
    }
}

#[derive(Debug)]
struct SymmetricEigen {
    values: Vec<f64>,
    vectors: Mat<f64>,
}

fn symmetric_eigen(m: &Mat<f64>) -> Result<SymmetricEigen> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i]).collect();
    Ok(SymmetricEigen { values, vectors: evd.U().to_owned() })
}

fn symmetric_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// τ = 1e-10 · max(1, max|λ|) for an ascending list.
pub fn zero_tolerance(sorted: &[f64]) -> f64 {
    let scale = sorted
        .first()
        .map(|a| a.abs())
        .unwrap_or(0.0)
        .max(sorted.last().map(|b| b.abs()).unwrap_or(0.0));
    ZERO_TOLERANCE_FACTOR * scale.max(1.0)
}

/// (Morse index, kernel dimension) of an ascending list at tolerance `tol`.
pub fn count_indices(sorted: &[f64], tol: f64) -> (usize, usize) {
    let negative = sorted.iter().filter(|&&l| l < -tol).count();
    let zero = sorted.iter().filter(|&&l| l.abs() <= tol).count();
    (negative, zero)
}

/// Symmetric matrix of −∂ₓ² + V on the periodic interval [−T, T).
#[derive(Debug)]
pub struct HillOperator {
    label: OperatorLabel,
    potential: Vec<f64>,
    basis: FourierBasis,
    matrix: Mat<f64>,
    eigen: OnceLock<SymmetricEigen>,
}

impl Clone for HillOperator {
    fn clone(&self) -> Self {
        Self {
            label: self.label,
            potential: self.potential.clone(),
            basis: self.basis.clone(),
            matrix: self.matrix.clone(),
            eigen: OnceLock::new(),
        }
    }
}

impl HillOperator {
    pub fn new(basis: FourierBasis, potential: Vec<f64>, label: OperatorLabel) -> Result<Self> {
        basis.check_len(potential.len())?;
        if let Some(v) = potential.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("potential has non-finite sample {v}")));
        }
        let mut matrix = basis.multiplication_matrix(&potential);
        for (i, w) in basis.wavenumbers().iter().enumerate() {
            matrix[(i, i)] += w * w;
        }
        Ok(Self { label, potential, basis, matrix, eigen: OnceLock::new() })
    }

    /// One of L, L₁, L₂ for a wave.
    pub fn for_wave(wave: &WaveProfile, label: OperatorLabel) -> Result<Self> {
        let p = &wave.params;
        let coeff = match label {
            OperatorLabel::L => 3.0 * (p.beta - 1.0 / p.c),
            OperatorLabel::L1 => 3.0 * p.beta - 1.0 / p.c,
            OperatorLabel::L2 => p.beta - 1.0 / p.c,
            OperatorLabel::Custom => {
                return Err(Error::Domain("a custom operator needs an explicit potential".into()))
            }
        };
        let v = wave.phi.iter().map(|f| p.sigma + coeff * f * f).collect();
        Self::new(wave.basis().clone(), v, label)
    }

    pub fn label(&self) -> OperatorLabel {
        self.label
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn basis(&self) -> &FourierBasis {
        &self.basis
    }

    /// Full period 2T.
    pub fn period(&self) -> f64 {
        2.0 * self.basis.half_period()
    }

    /// Galerkin matrix, (N − 1) × (N − 1).
    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    fn eigen(&self) -> Result<&SymmetricEigen> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let e = symmetric_eigen(&self.matrix)?;
        Ok(self.eigen.get_or_init(|| e))
    }

    pub fn eigenvalues(&self) -> Result<&[f64]> {
        Ok(&self.eigen()?.values)
    }

    pub fn zero_tolerance(&self) -> Result<f64> {
        Ok(zero_tolerance(self.eigenvalues()?))
    }

    pub fn apply_coefficients(&self, a: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, a)
    }

    /// Applies the operator to grid samples (band-limiting them first).
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.basis.check_len(f.len())?;
        let a = self.basis.to_coefficients(f);
        Ok(self.basis.to_samples(&self.apply_coefficients(&a)))
    }

    /// Lowest `count` eigenvalues, with Morse index and kernel dimension of the whole spectrum.
    pub fn spectrum(&self, count: usize) -> Result<SpectrumReport> {
        self.spectrum_with_vectors(count, &[])
    }

    /// As [`Self::spectrum`], also returning the sampled eigenfunctions at the
    /// given ascending-order indices, normalized in the grid inner product.
    pub fn spectrum_with_vectors(&self, count: usize, vectors: &[usize]) -> Result<SpectrumReport> {
        let e = self.eigen()?;
        let tol = zero_tolerance(&e.values);
        let (morse_index, kernel_dim) = count_indices(&e.values, tol);
        let mut eigenvectors = Vec::with_capacity(vectors.len());
        let scale = self.basis.spacing().sqrt().recip();
        for &i in vectors {
            if i >= e.values.len() {
                return Err(Error::Dimension { expected: e.values.len(), found: i });
            }
            let col: Vec<f64> = (0..e.values.len()).map(|r| e.vectors[(r, i)] * scale).collect();
            eigenvectors.push(EigenFunction { index: i, eigenvalue: e.values[i], samples: self.basis.to_samples(&col) });
        }
        Ok(SpectrumReport {
            operator: self.label,
            eigenvalues: e.values.iter().take(count).copied().collect(),
            morse_index,
            kernel_dim,
            zero_tolerance: tol,
            eigenvectors,
        })
    }

    /// Solves op·u = rhs on the orthogonal complement of the numerical kernel.
    ///
    /// Returns the sampled solution, which is orthogonal to the kernel.
    pub fn kernel_projection_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.basis.check_len(rhs.len())?;
        let b = self.basis.to_coefficients(rhs);
        let u = self.solve_coefficients(&b)?;
        Ok(self.basis.to_samples(&u))
    }

    /// Coefficient-space version of [`Self::kernel_projection_solve`].
    pub fn solve_coefficients(&self, b: &[f64]) -> Result<Vec<f64>> {
        let e = self.eigen()?;
        let tol = zero_tolerance(&e.values);
        let m = e.values.len();
        let norm_b = norm(b);
        if norm_b == 0.0 {
            return Ok(vec![0.0; m]);
        }
        let kernel: Vec<usize> = (0..m).filter(|&k| e.values[k].abs() <= tol).collect();
        let kernel_sq: f64 = kernel.iter().map(|&k| column_dot(&e.vectors, k, b).powi(2)).sum();
        let component = kernel_sq.sqrt() / norm_b;
        if component > SOLVABILITY_TOLERANCE {
            return Err(Error::Solvability { component, tolerance: SOLVABILITY_TOLERANCE });
        }
        // The eigenvectors are accurate to a few ulps of ‖A‖ only, so a few
        // refinement steps recover a residual near machine precision.
        let mut u = vec![0.0; m];
        let mut r = b.to_vec();
        let mut residual = f64::INFINITY;
        for _ in 0..REFINEMENT_STEPS {
            for (k, &lambda) in e.values.iter().enumerate() {
                if lambda.abs() <= tol {
                    continue;
                }
                let s = column_dot(&e.vectors, k, &r) / lambda;
                for (i, ui) in u.iter_mut().enumerate() {
                    *ui += s * e.vectors[(i, k)];
                }
            }
            let au = self.apply_coefficients(&u);
            r = au.iter().zip(b).map(|(x, y)| y - x).collect();
            for &k in &kernel {
                let s = column_dot(&e.vectors, k, &r);
                for (i, ri) in r.iter_mut().enumerate() {
                    *ri -= s * e.vectors[(i, k)];
                }
            }
            residual = norm(&r) / norm_b;
            if residual <= SOLVE_RESIDUAL_TOLERANCE {
                break;
            }
        }
        if residual > SOLVE_RESIDUAL_TOLERANCE {
            return Err(Error::Resolution { what: "kernel-projected solve", residual, tolerance: SOLVE_RESIDUAL_TOLERANCE });
        }
        Ok(u)
    }
}

fn column_dot(v: &Mat<f64>, k: usize, b: &[f64]) -> f64 {
    b.iter().enumerate().map(|(i, x)| v[(i, k)] * x).sum()
}

/// Potential samples V and half period T → operator −∂ₓ² + V on [−T, T).
pub fn build_operator(potential: &[f64], half_period: f64) -> Result<HillOperator> {
    let basis = FourierBasis::new(potential.len(), half_period)?;
    HillOperator::new(basis, potential.to_vec(), OperatorLabel::Custom)
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenFunction {
    pub index: usize,
    pub eigenvalue: f64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub operator: OperatorLabel,
    /// Lowest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub morse_index: usize,
    pub kernel_dim: usize,
    pub zero_tolerance: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub eigenvectors: Vec<EigenFunction>,
}

/// H = [[L₁, φ, 0], [φ, c/2, 0], [0, 0, L₂]] acting on (P, V, Q).
#[derive(Debug, Clone)]
pub struct BlockOperatorH {
    pub c: f64,
    pub l1: HillOperator,
    pub l2: HillOperator,
    /// Galerkin matrix of multiplication by φ.
    pub phi_mult: Mat<f64>,
}

impl BlockOperatorH {
    pub fn new(wave: &WaveProfile) -> Result<Self> {
        Ok(Self {
            c: wave.params.c,
            l1: HillOperator::for_wave(wave, OperatorLabel::L1)?,
            l2: HillOperator::for_wave(wave, OperatorLabel::L2)?,
            phi_mult: wave.basis().multiplication_matrix(&wave.phi),
        })
    }

    /// Modes per component, M = N − 1.
    pub fn block_dim(&self) -> usize {
        self.phi_mult.nrows()
    }

    /// The assembled 3M × 3M symmetric matrix.
    pub fn matrix(&self) -> Mat<f64> {
        let m = self.block_dim();
        let l1 = self.l1.matrix();
        let l2 = self.l2.matrix();
        Mat::from_fn(3 * m, 3 * m, |i, j| match (i / m, j / m) {
            (0, 0) => l1[(i, j)],
            (0, 1) => self.phi_mult[(i, j - m)],
            (1, 0) => self.phi_mult[(i - m, j)],
            (1, 1) if i == j => 0.5 * self.c,
            (2, 2) => l2[(i - 2 * m, j - 2 * m)],
            _ => 0.0,
        })
    }

    /// H₀ = [[L₁, φ], [φ, c/2]], the upper-left 2M × 2M block.
    pub fn h0_matrix(&self) -> Mat<f64> {
        let m = self.block_dim();
        let l1 = self.l1.matrix();
        Mat::from_fn(2 * m, 2 * m, |i, j| match (i / m, j / m) {
            (0, 0) => l1[(i, j)],
            (0, 1) => self.phi_mult[(i, j - m)],
            (1, 0) => self.phi_mult[(i - m, j)],
            (1, 1) if i == j => 0.5 * self.c,
            _ => 0.0,
        })
    }

    /// H applied to a coefficient vector of length 3M.
    pub fn apply_coefficients(&self, z: &[f64]) -> Vec<f64> {
        let m = self.block_dim();
        let (p, rest) = z.split_at(m);
        let (v, q) = rest.split_at(m);
        let mut out = Vec::with_capacity(3 * m);
        let l1p = self.l1.apply_coefficients(p);
        let phiv = mat_vec(&self.phi_mult, v);
        out.extend(l1p.iter().zip(&phiv).map(|(a, b)| a + b));
        let phip = mat_vec(&self.phi_mult, p);
        out.extend(phip.iter().zip(v).map(|(a, b)| a + 0.5 * self.c * b));
        out.extend(self.l2.apply_coefficients(q));
        out
    }

    /// Eigenvalues of H, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        symmetric_eigenvalues(&self.matrix())
    }

    pub fn morse_index(&self) -> Result<usize> {
        let ev = self.eigenvalues()?;
        Ok(count_indices(&ev, zero_tolerance(&ev)).0)
    }

    /// n(H₀), from the eigenvalues of the 2M × 2M block.
    pub fn morse_index_h0(&self) -> Result<usize> {
        let ev = symmetric_eigenvalues(&self.h0_matrix())?;
        Ok(count_indices(&ev, zero_tolerance(&ev)).0)
    }

    /// (⟨H₀(f,g),(f,g)⟩, ⟨Lf,f⟩ + ∫(√(2/c)φf + √(c/2)g)²) for sampled f, g.
    ///
    /// The two values agree exactly in exact arithmetic; the decomposition
    /// needs c > 0.
    pub fn quadratic_form_identity(
        &self,
        wave: &WaveProfile,
        f: &[f64],
        g: &[f64],
    ) -> Result<(f64, f64)> {
        let c = self.c;
        if !(c > 0.0) {
            return Err(Error::Domain(format!(
                "the square completion of H0 needs c > 0, got c = {c}"
            )));
        }
        let basis = wave.basis();
        basis.check_len(f.len())?;
        basis.check_len(g.len())?;
        let a = basis.to_coefficients(f);
        let b = basis.to_coefficients(g);
        let h = basis.spacing();
        let l1a = self.l1.apply_coefficients(&a);
        let phib = mat_vec(&self.phi_mult, &b);
        let lhs = h * (dot(&l1a, &a) + 2.0 * dot(&phib, &a) + 0.5 * c * dot(&b, &b));

        let l = HillOperator::for_wave(wave, OperatorLabel::L)?;
        let fs = basis.to_samples(&a);
        let gs = basis.to_samples(&b);
        let (s1, s2) = ((2.0 / c).sqrt(), (0.5 * c).sqrt());
        let square: f64 = fs
            .iter()
            .zip(&gs)
            .zip(&wave.phi)
            .map(|((fv, gv), p)| (s1 * p * fv + s2 * gv).powi(2))
            .sum();
        let rhs = h * dot(&l.apply_coefficients(&a), &a) + h * square;
        Ok((lhs, rhs))
    }
}

pub fn build_h_block(wave: &WaveProfile) -> Result<BlockOperatorH> {
    BlockOperatorH::new(wave)
}

/// n(H) from the symmetric eigensolve of the assembled block operator.
pub fn morse_index_h(wave: &WaveProfile) -> Result<usize> {
    BlockOperatorH::new(wave)?.morse_index()
}

pub(crate) fn mat_vec(m: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(m.ncols(), x.len());
    let mut out = vec![0.0; m.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        let col = m.col(j);
        for (i, o) in out.iter_mut().enumerate() {
            *o += col[i] * xj;
        }
    }
    out
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
