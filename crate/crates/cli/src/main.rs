//! `benney`: wave profiles, operator spectra, the D matrix, stability verdicts,
//! parameter sweeps and figure data from the command line.
//!
//! Exit status: 0 on success, 1 on usage or parameter-domain errors, 2 on
//! numerical failures.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use benney_core::hill::{BlockOperatorH, HillOperator, OperatorLabel};
use benney_core::linearization::{assemble_jh, eigen_spectrum_jh};
use benney_core::output::fmt_f64;
use benney_core::stability::{
    assemble_d, closed_form_d22_dnoidal, closed_form_d22_snoidal, krein_verdict, snoidal_det_d_prediction, DMatrix,
};
use benney_core::sweep::{figure_tables, run_sweep, write_sweep_csv, Execution, SweepGrid, SweepRow};
use benney_core::waves::check_phase_periodicity;
use benney_core::{EllipticModulus, Family, WaveParameters, WaveProfile};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{Format, ParamArgs, Settings};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or parameters outside a family's domain.
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl From<benney_core::Error> for Failure {
    fn from(e: benney_core::Error) -> Self {
        if e.is_domain() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("output error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(format!("output error: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "benney", version, about = "Periodic waves of the Benney system and their spectral stability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sampled wave profile (x, φ, φ′, ψ) or its parameters and residuals
    Wave {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Lowest eigenvalues and indices of L, L1, L2, H, or the full spectrum of JH
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum)]
        operator: Option<OperatorArg>,
        /// Number of eigenvalues to report [default: 10]
        #[arg(long)]
        count: Option<usize>,
    },
    /// The 3×3 matrix D with closed-form cross-checks
    Dmatrix {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Index counts and stability verdict
    Stability {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Stability over the Cartesian product of parameter ranges
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        /// Evaluate points one at a time
        #[arg(long)]
        sequential: bool,
    },
    /// CSV data for the D22 ratio, F(κ) and H(κ) on κ ∈ [0.02, 0.98]
    Figures {
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OperatorArg {
    L,
    L1,
    L2,
    H,
    Jh,
}

impl OperatorArg {
    fn parse(s: &str) -> Result<Self, Failure> {
        Self::from_str(s, true).map_err(|_| Failure::Usage(format!("unknown operator '{s}' (L, L1, L2, H, JH)")))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Wave { params } => wave(&Settings::from_args(&params, &[])?),
        Command::Spectrum { params, operator, count } => {
            let op = operator.map(|o| format!("{o:?}"));
            let s = Settings::from_args(&params, &[("operator", op)])?;
            spectrum(&s, count.unwrap_or(10))
        }
        Command::Dmatrix { params } => dmatrix(&Settings::from_args(&params, &[])?),
        Command::Stability { params } => stability(&Settings::from_args(&params, &[])?),
        Command::Sweep { params, sequential } => {
            let exec = if sequential { Execution::Sequential } else { Execution::default() };
            sweep(&Settings::from_args(&params, &[])?, exec)
        }
        Command::Figures { params } => figures(&Settings::from_args(&params, &[])?),
    }
}

fn parameters(s: &Settings) -> Result<WaveParameters, Failure> {
    let kappa = EllipticModulus::new(s.single("kappa")?)?;
    Ok(WaveParameters::new(
        s.single_family()?,
        s.single("c")?,
        s.single("beta")?,
        s.single("sigma")?,
        s.single("omega")?,
        kappa,
    )?)
}

fn profile(s: &Settings) -> Result<WaveProfile, Failure> {
    Ok(WaveProfile::new(parameters(s)?, s.grid_size()?)?)
}

/// Runs `f` on the `--out` file or on standard output.
fn emit(s: &Settings, f: impl FnOnce(&mut dyn Write) -> Result<(), Failure>) -> Result<(), Failure> {
    match &s.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(|e| {
                Failure::Usage(format!("cannot create {}: {e}", path.display()))
            })?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(s: &Settings, value: &T) -> Result<(), Failure> {
    emit(s, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

/// Rows of `quantity,value`.
fn emit_pairs(s: &Settings, rows: &[(String, String)]) -> Result<(), Failure> {
    emit(s, |w| {
        writeln!(w, "quantity,value")?;
        for (k, v) in rows {
            writeln!(w, "{k},{v}")?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct WaveSummary<'a> {
    parameters: &'a WaveParameters,
    grid_size: usize,
    period: f64,
    ode_residual: f64,
    first_integral_median: f64,
    first_integral_residual: f64,
    phase_periodicity: benney_core::waves::PhasePeriodicity,
    max_phi: f64,
    min_phi: f64,
}

fn wave(s: &Settings) -> Result<(), Failure> {
    let w = profile(s)?;
    match s.format() {
        Format::Csv => emit(s, |out| Ok(w.write_csv(out)?)),
        Format::Json => {
            let summary = WaveSummary {
                parameters: &w.params,
                grid_size: w.grid_size,
                period: w.params.period(),
                ode_residual: w.ode_residual,
                first_integral_median: w.first_integral_median,
                first_integral_residual: w.first_integral_residual,
                phase_periodicity: check_phase_periodicity(&w.params),
                max_phi: w.phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                min_phi: w.phi.iter().cloned().fold(f64::INFINITY, f64::min),
            };
            emit_json(s, &summary)
        }
    }
}

#[derive(Serialize)]
struct BlockSpectrum {
    operator: &'static str,
    eigenvalues: Vec<f64>,
    morse_index: usize,
    morse_index_h0: usize,
    morse_index_l2: usize,
}

fn spectrum(s: &Settings, count: usize) -> Result<(), Failure> {
    let w = profile(s)?;
    let op = OperatorArg::parse(s.raw("operator").unwrap_or("L"))?;
    let label = match op {
        OperatorArg::L => OperatorLabel::L,
        OperatorArg::L1 => OperatorLabel::L1,
        OperatorArg::L2 => OperatorLabel::L2,
        OperatorArg::H => {
            let h = BlockOperatorH::new(&w)?;
            let ev = h.eigenvalues()?;
            let report = BlockSpectrum {
                operator: "H",
                eigenvalues: ev.iter().take(count).copied().collect(),
                morse_index: h.morse_index()?,
                morse_index_h0: h.morse_index_h0()?,
                morse_index_l2: h.l2.spectrum(0)?.morse_index,
            };
            return match s.format() {
                Format::Json => emit_json(s, &report),
                Format::Csv => emit_indexed(s, &report.eigenvalues),
            };
        }
        OperatorArg::Jh => {
            let eig = eigen_spectrum_jh(&assemble_jh(&w)?, None)?;
            return match s.format() {
                Format::Json => emit_json(s, &eig),
                Format::Csv => emit(s, |out| Ok(eig.write_csv(out)?)),
            };
        }
    };
    let report = HillOperator::for_wave(&w, label)?.spectrum(count)?;
    match s.format() {
        Format::Json => emit_json(s, &report),
        Format::Csv => emit_indexed(s, &report.eigenvalues),
    }
}

fn emit_indexed(s: &Settings, values: &[f64]) -> Result<(), Failure> {
    emit(s, |w| {
        writeln!(w, "index,eigenvalue")?;
        for (i, v) in values.iter().enumerate() {
            writeln!(w, "{i},{}", fmt_f64(*v))?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct DReport {
    d: DMatrix,
    /// ⟨L⁻¹φ, φ⟩ from the closed form for the family.
    d22_closed_form: f64,
    d22_relative_error: f64,
    /// Leading-order det D for snoidal waves near β = 1/c.
    #[serde(skip_serializing_if = "Option::is_none")]
    det_leading_order: Option<f64>,
}

fn dmatrix(s: &Settings) -> Result<(), Failure> {
    let w = profile(s)?;
    let p = &w.params;
    let d = assemble_d(&w)?;
    let closed = match p.family {
        Family::Dnoidal => closed_form_d22_dnoidal(p.c, p.beta, p.sigma, p.kappa)?,
        Family::Snoidal => closed_form_d22_snoidal(p.c, p.beta, p.sigma, p.kappa)?,
    };
    let report = DReport {
        d,
        d22_closed_form: closed,
        d22_relative_error: ((d.entries[1][1] - closed) / closed).abs(),
        det_leading_order: (p.family == Family::Snoidal).then(|| snoidal_det_d_prediction(p)),
    };
    match s.format() {
        Format::Json => emit_json(s, &report),
        Format::Csv => {
            let mut rows = vec![];
            for i in 0..3 {
                for j in 0..3 {
                    rows.push((format!("d{}{}", i + 1, j + 1), fmt_f64(d.entries[i][j])));
                }
            }
            rows.push(("det".into(), fmt_f64(d.det)));
            rows.push(("nD".into(), d.n_d.to_string()));
            rows.push(("d22_closed_form".into(), fmt_f64(closed)));
            rows.push(("d22_relative_error".into(), fmt_f64(report.d22_relative_error)));
            if let Some(v) = report.det_leading_order {
                rows.push(("det_leading_order".into(), fmt_f64(v)));
            }
            emit_pairs(s, &rows)
        }
    }
}

fn stability(s: &Settings) -> Result<(), Failure> {
    let w = profile(s)?;
    let report = krein_verdict(&w)?;
    match s.format() {
        Format::Json => emit_json(s, &report),
        Format::Csv => {
            let p = &w.params;
            let row = SweepRow {
                point: benney_core::sweep::SweepPoint {
                    family: p.family,
                    c: p.c,
                    beta: p.beta,
                    sigma: p.sigma,
                    omega: p.omega,
                    kappa: p.kappa.value(),
                },
                report: Some(report),
                error: None,
                domain_error: false,
            };
            emit(s, |out| Ok(write_sweep_csv(&[row], out)?))
        }
    }
}

fn sweep(s: &Settings, exec: Execution) -> Result<(), Failure> {
    let grid = SweepGrid {
        families: s.families()?,
        c: s.range("c")?,
        beta: s.range("beta")?,
        sigma: s.range("sigma")?,
        omega: s.single("omega")?,
        kappa: s.range("kappa")?,
        grid_size: s.grid_size()?,
    };
    let rows = run_sweep(&grid, exec);
    match s.format() {
        Format::Json => emit_json(s, &rows),
        Format::Csv => emit(s, |out| Ok(write_sweep_csv(&rows, out)?)),
    }
}

fn figures(s: &Settings) -> Result<(), Failure> {
    let dir = s.out.as_deref().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
    for table in figure_tables(Execution::default())? {
        let path = dir.join(format!("{}.csv", table.name));
        let mut w = BufWriter::new(
            File::create(&path).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))?,
        );
        table.write_csv(&mut w)?;
        w.flush()?;
        println!("{}", path.display());
    }
    Ok(())
}
