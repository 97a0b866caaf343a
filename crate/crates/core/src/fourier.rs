//! Real Fourier basis on the periodic grid x_j = −T + 2Tj/N.
//!
//! Functions are represented by their coefficients in the orthonormal (with
//! respect to the plain grid sum) basis
//!
//! ```text
//! 1/√N,  √(2/N) cos(πk x/T),  √(2/N) sin(πk x/T),   k = 1 .. N/2 − 1
//! ```
//!
//! so a grid of N points carries M = N − 1 modes. The Nyquist cosine is left
//! out: its derivative vanishes on the grid, which would put a spurious
//! constant in the kernel of every first-derivative operator.
//!
//! Since the basis is orthonormal for the grid sum, the trapezoid inner
//! product of two band-limited grid functions is `h · (a · b)` with h = 2T/N.

use std::f64::consts::PI;

use faer::Mat;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FourierBasis {
    half_period: f64,
    x: Vec<f64>,
    /// N × M matrix of sampled basis functions.
    q: Mat<f64>,
    wavenumbers: Vec<f64>,
}

impl FourierBasis {
    pub fn new(n: usize, half_period: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::Domain(format!("grid size must be even and at least 4, got {n}")));
        }
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(Error::Domain(format!("half period must be positive, got {half_period}")));
        }
        let x: Vec<f64> = (0..n)
            .map(|j| -half_period + 2.0 * half_period * j as f64 / n as f64)
            .collect();
        let m = n - 1;
        let mut wavenumbers = vec![0.0; m];
        for k in 1..n / 2 {
            let w = PI * k as f64 / half_period;
            wavenumbers[2 * k - 1] = w;
            wavenumbers[2 * k] = w;
        }
        let c0 = (1.0 / n as f64).sqrt();
        let c1 = (2.0 / n as f64).sqrt();
        let q = Mat::from_fn(n, m, |j, col| {
            if col == 0 {
                return c0;
            }
            let k = col.div_ceil(2);
            // Exact integer phase keeps cos/sin symmetric about x = 0.
            let jj = (j as i64 - (n / 2) as i64) * k as i64;
            let theta = 2.0 * PI * (jj.rem_euclid(n as i64)) as f64 / n as f64;
            if col % 2 == 1 {
                c1 * theta.cos()
            } else {
                c1 * theta.sin()
            }
        });
        Ok(Self { half_period, x, q, wavenumbers })
    }

    /// Number of grid points N.
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Number of modes M = N − 1.
    pub fn dim(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    /// Grid spacing h = 2T/N, the trapezoid weight.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_period / self.n() as f64
    }

    /// Angular wavenumber of each basis column.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn samples_matrix(&self) -> &Mat<f64> {
        &self.q
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n() {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.n(), found: len })
        }
    }

    pub fn to_coefficients(&self, samples: &[f64]) -> Vec<f64> {
        debug_assert_eq!(samples.len(), self.n());
        let mut out = vec![0.0; self.dim()];
        for (col, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, s) in samples.iter().enumerate() {
                acc += self.q[(j, col)] * s;
            }
            *o = acc;
        }
        out
    }

    pub fn to_samples(&self, coefficients: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coefficients.len(), self.dim());
        (0..self.n())
            .map(|j| {
                coefficients
                    .iter()
                    .enumerate()
                    .map(|(col, a)| self.q[(j, col)] * a)
                    .sum()
            })
            .collect()
    }

    /// Galerkin matrix Qᵀ diag(v) Q of multiplication by the grid function `v`.
    pub fn multiplication_matrix(&self, v: &[f64]) -> Mat<f64> {
        debug_assert_eq!(v.len(), self.n());
        let weighted = Mat::from_fn(self.n(), self.dim(), |j, col| v[j] * self.q[(j, col)]);
        let product = self.q.transpose() * &weighted;
        // Exact symmetry; the two triangles differ only by rounding.
        Mat::from_fn(self.dim(), self.dim(), |i, j| 0.5 * (product[(i, j)] + product[(j, i)]))
    }

    /// Matrix of d/dx: cos(kx) ↦ −k sin(kx), sin(kx) ↦ k cos(kx). Antisymmetric.
    pub fn derivative_matrix(&self) -> Mat<f64> {
        let m = self.dim();
        let mut d = Mat::zeros(m, m);
        for col in (1..m).step_by(2) {
            let w = self.wavenumbers[col];
            d[(col + 1, col)] = -w;
            d[(col, col + 1)] = w;
        }
        d
    }

    /// Coefficients of the derivative of order `order` of a band-limited function.
    pub fn differentiate(&self, coefficients: &[f64], order: u32) -> Vec<f64> {
        let mut a = coefficients.to_vec();
        for _ in 0..order {
            let mut next = vec![0.0; a.len()];
            for col in (1..a.len()).step_by(2) {
                let w = self.wavenumbers[col];
                next[col + 1] = -w * a[col];
                next[col] = w * a[col + 1];
            }
            a = next;
        }
        a
    }

    /// Trapezoid inner product of two grid functions.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.spacing() * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Inner product of two coefficient vectors, equal to [`Self::inner`] of their samples.
    pub fn inner_coefficients(&self, a: &[f64], b: &[f64]) -> f64 {
        self.spacing() * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }
}
