//! Parameter sweeps and figure data, evaluated point by point with results
//! kept in input order.

use std::io::Write;

use serde::Serialize;

use crate::elliptic::EllipticModulus;
use crate::error::{Error, Result};
use crate::output::fmt_f64;
use crate::stability::{closed_form_f, closed_form_h, dnoidal_d22_ratio, krein_verdict, StabilityReport};
use crate::waves::{Family, WaveParameters, WaveProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled, and runs
    /// sequentially otherwise.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// `f` applied to every item; the output order matches the input order.
pub fn map_ordered<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub family: Family,
    pub c: f64,
    pub beta: f64,
    pub sigma: f64,
    pub omega: f64,
    pub kappa: f64,
}

/// Value lists for each swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub families: Vec<Family>,
    pub c: Vec<f64>,
    pub beta: Vec<f64>,
    pub sigma: Vec<f64>,
    pub omega: f64,
    pub kappa: Vec<f64>,
    pub grid_size: usize,
}

impl SweepGrid {
    /// Cartesian product, with κ varying fastest and family slowest.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &family in &self.families {
            for &c in &self.c {
                for &beta in &self.beta {
                    for &sigma in &self.sigma {
                        for &kappa in &self.kappa {
                            out.push(SweepPoint { family, c, beta, sigma, omega: self.omega, kappa });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.families.len() * self.c.len() * self.beta.len() * self.sigma.len() * self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub report: Option<StabilityReport>,
    /// Why the point has no report (outside the family's parameter domain, or a numerical failure).
    pub error: Option<String>,
    pub domain_error: bool,
}

pub fn evaluate_point(point: &SweepPoint, grid_size: usize) -> Result<StabilityReport> {
    let kappa = EllipticModulus::new(point.kappa)?;
    let p = WaveParameters::new(point.family, point.c, point.beta, point.sigma, point.omega, kappa)?;
    krein_verdict(&WaveProfile::new(p, grid_size)?)
}

pub fn run_sweep(grid: &SweepGrid, exec: Execution) -> Vec<SweepRow> {
    let points = grid.points();
    map_ordered(&points, exec, |pt| match evaluate_point(pt, grid.grid_size) {
        Ok(r) => SweepRow { point: *pt, report: Some(r), error: None, domain_error: false },
        Err(e) => {
            log::warn!("{} c={} beta={} sigma={} kappa={}: {e}", pt.family, pt.c, pt.beta, pt.sigma, pt.kappa);
            SweepRow { point: *pt, report: None, error: Some(e.to_string()), domain_error: e.is_domain() }
        }
    })
}

pub const SWEEP_COLUMNS: [&str; 12] =
    ["family", "c", "beta", "sigma", "kappa", "nH", "nD", "kHam", "detD", "kReal", "maxRe", "verdict"];

/// One row per point; points without a report have empty numeric fields and
/// verdict `domain-error` or `numerical-error`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(SWEEP_COLUMNS).map_err(err)?;
    for row in rows {
        let p = &row.point;
        let mut rec = vec![p.family.to_string(), fmt_f64(p.c), fmt_f64(p.beta), fmt_f64(p.sigma), fmt_f64(p.kappa)];
        match &row.report {
            Some(r) => rec.extend([
                r.n_h.to_string(),
                r.n_d.to_string(),
                r.k_ham.to_string(),
                fmt_f64(r.det_d),
                r.k_real.to_string(),
                fmt_f64(r.max_real_part),
                r.verdict.to_string(),
            ]),
            None => {
                rec.extend(std::iter::repeat_n(String::new(), 6));
                rec.push(if row.domain_error { "domain-error" } else { "numerical-error" }.to_string());
            }
        }
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// κ = 0.02, 0.025, …, 0.98 (193 points).
pub fn figure_kappa_grid() -> Vec<f64> {
    (0..193).map(|i| 0.02 + 0.005 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureTable {
    /// File stem, e.g. `fig1_d22_ratio`.
    pub name: &'static str,
    /// Name of the value column.
    pub column: &'static str,
    pub kappa: Vec<f64>,
    pub values: Vec<f64>,
}

impl FigureTable {
    /// Columns kappa, value, sign (−1, 0 or 1).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["kappa", self.column, "sign"]).map_err(err)?;
        for (k, v) in self.kappa.iter().zip(&self.values) {
            let sign = if *v > 0.0 { "1" } else if *v < 0.0 { "-1" } else { "0" };
            w.write_record([fmt_f64(*k), fmt_f64(*v), sign.to_string()]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// The dnoidal ⟨L⁻¹φ, φ⟩ κ-factor, F(κ) and H(κ) on [`figure_kappa_grid`].
pub fn figure_tables(exec: Execution) -> Result<Vec<FigureTable>> {
    let kappa = figure_kappa_grid();
    let moduli = kappa.iter().map(|&k| EllipticModulus::new(k)).collect::<Result<Vec<_>>>()?;
    let table = |name, column, f: fn(EllipticModulus) -> f64| FigureTable {
        name,
        column,
        kappa: kappa.clone(),
        values: map_ordered(&moduli, exec, |&k| f(k)),
    };
    Ok(vec![
        table("fig1_d22_ratio", "d22_ratio", dnoidal_d22_ratio),
        table("fig2_f", "F", closed_form_f),
        table("fig3_h", "H", closed_form_h),
    ])
}
