//! Dense real matrix exponential by scaling and squaring with a [13/13]
//! Padé approximant (Higham, "The scaling and squaring method for the matrix
//! exponential revisited", 2005).
//!
//! No eigendecomposition is involved, so defective eigenvalues (the Jordan
//! chains at zero of JH) do not affect accuracy.

use faer::linalg::solvers::Solve;
use faer::Mat;

use crate::error::{Error, Result};

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Maximum absolute column sum.
pub fn norm_1(a: &Mat<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn combine(terms: &[(f64, &Mat<f64>)], identity_coeff: f64, n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| {
        let mut s = if i == j { identity_coeff } else { 0.0 };
        for (c, m) in terms {
            s += c * m[(i, j)];
        }
        s
    })
}

#[derive(Debug, Clone)]
pub struct MatrixExponential {
    pub value: Mat<f64>,
    /// Number of squarings applied.
    pub squarings: u32,
    /// ‖A‖₁ of the exponentiated matrix, a rough conditioning indicator.
    pub condition_estimate: f64,
}

/// e^A for a square real matrix.
pub fn expm(a: &Mat<f64>) -> Result<MatrixExponential> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension { expected: n, found: a.ncols() });
    }
    let norm = norm_1(a);
    if !norm.is_finite() {
        return Err(Error::Domain("matrix exponential of a non-finite matrix".into()));
    }
    if norm == 0.0 {
        let value = Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 });
        return Ok(MatrixExponential { value, squarings: 0, condition_estimate: 0.0 });
    }
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as u32 } else { 0 };
    let scale = (-(squarings as f64)).exp2();
    let a = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);

    let b = &PADE_13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = combine(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], 0.0, n);
    let u_poly = &a6 * &inner_u;
    let u_poly = combine(&[(1.0, &u_poly), (b[7], &a6), (b[5], &a4), (b[3], &a2)], b[1], n);
    let u = &a * &u_poly;
    let inner_v = combine(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], 0.0, n);
    let v = &a6 * &inner_v;
    let v = combine(&[(1.0, &v), (b[6], &a6), (b[4], &a4), (b[2], &a2)], b[0], n);

    let p = combine(&[(1.0, &v), (1.0, &u)], 0.0, n);
    let q = combine(&[(1.0, &v), (-1.0, &u)], 0.0, n);
    let mut r = q.partial_piv_lu().solve(&p);
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.col_iter().any(|c| c.iter().any(|x| !x.is_finite())) {
        return Err(Error::Eigensolver("matrix exponential overflowed".into()));
    }
    Ok(MatrixExponential { value: r, squarings, condition_estimate: norm })
}
