mod config;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qsync_core::ansatz::{limits, VALIDITY_MAX_DRIVE};
use qsync_core::experiments::{correlation_matrix, read_table, run_sweep, write_csv, write_table};
use qsync_core::measures::{linspace, phase_distribution, wigner};
use qsync_core::{
    measure_all, solve_with, MeasureConfig, MeasureSet, OscillatorParams, SteadyStateReport,
};

use config::{read_toml, validate, ParamArgs, SolverArgs, StateFile, SweepFile};

const EXIT_MISUSE: u8 = 1;
const EXIT_UNCONVERGED: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qsync",
    version,
    about = "Synchronization measures of a driven, squeezed quantum van der Pol oscillator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one steady state and print its measures as JSON
    Steady {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// TOML file with [params], [solver] and [measures] tables
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the density matrix as JSON to this path
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a one- or two-axis parameter sweep
    Sweep {
        /// TOML sweep description
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Worker threads (0 = one per core)
        #[arg(long, env = "QSYNC_WORKERS", default_value_t = 0)]
        workers: usize,
        /// CSV output path; a .meta.json sidecar is written next to it
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Pearson correlation matrix of sweep-table columns
    Correlate {
        /// Sweep CSV
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated columns (default: every measure column)
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Closed-form deep-quantum limits over a drive grid
    Ansatz {
        #[arg(long = "drive-min", default_value_t = 0.0)]
        drive_min: f64,
        #[arg(long = "drive-max", default_value_t = VALIDITY_MAX_DRIVE)]
        drive_max: f64,
        #[arg(long, default_value_t = 31)]
        points: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Phase distribution P(Φ) of a steady state
    PhaseDist {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Grid points on [0, 2π)
        #[arg(long, default_value_t = qsync_core::measures::DEFAULT_GRID_SIZE)]
        grid: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Wigner function of a steady state on a square grid
    Wigner {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Half-width of the square x, p window
        #[arg(long, default_value_t = 4.0)]
        extent: f64,
        /// Points per axis
        #[arg(long, default_value_t = 161)]
        points: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn status(converged: bool) -> u8 {
    if converged {
        0
    } else {
        EXIT_UNCONVERGED
    }
}

fn warn_unconverged(r: &SteadyStateReport) {
    if !r.converged {
        eprintln!(
            "warning: steady state not converged (residual {:e}, top population {:e}, min eigenvalue {:e}, fock_dim {})",
            r.residual, r.top_population, r.min_eigenvalue, r.fock_dim
        );
    }
}

/// Resolves flags over an optional config file and solves.
fn solve_state(
    params: &ParamArgs,
    solver: &SolverArgs,
    config: Option<&Path>,
) -> Result<(OscillatorParams, SteadyStateReport, MeasureConfig)> {
    let file: StateFile = match config {
        Some(p) => read_toml(p)?,
        None => StateFile::default(),
    };
    let (p, explicit) = params.or(&file.params).resolve();
    validate(&p)?;
    let cfg = solver.or(&file.solver).resolve(explicit)?;
    let report = solve_with(&p, &cfg)?;
    warn_unconverged(&report);
    let rho = if p.white_noise_p > 0.0 {
        report.rho.with_white_noise(p.white_noise_p)?
    } else {
        report.rho.clone()
    };
    Ok((
        p,
        SteadyStateReport { rho, ..report },
        file.measures.unwrap_or_default(),
    ))
}

#[derive(Serialize)]
struct SteadySummary<'a> {
    params: &'a OscillatorParams,
    fock_dim: usize,
    converged: bool,
    residual: f64,
    top_population: f64,
    min_eigenvalue: f64,
    mean_photon_number: f64,
    measures: &'a MeasureSet,
}

fn cmd_steady(
    params: &ParamArgs,
    solver: &SolverArgs,
    config: Option<&Path>,
    output: Option<&Path>,
) -> Result<u8> {
    let (p, r, mcfg) = solve_state(params, solver, config)?;
    let m = measure_all(&r.rho, &mcfg)?;
    if let Some(path) = output {
        r.rho
            .write_json(path)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let summary = SteadySummary {
        params: &OscillatorParams {
            fock_dim: r.fock_dim,
            ..p
        },
        fock_dim: r.fock_dim,
        converged: r.converged,
        residual: r.residual,
        top_population: r.top_population,
        min_eigenvalue: r.min_eigenvalue,
        mean_photon_number: r.rho.mean_photon_number(),
        measures: &m,
    };
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &summary)?;
    writeln!(out)?;
    Ok(status(r.converged))
}

fn cmd_sweep(
    config: &Path,
    params: &ParamArgs,
    solver: &SolverArgs,
    workers: usize,
    output: Option<&Path>,
) -> Result<u8> {
    let file: SweepFile = read_toml(config)?;
    let spec = file.into_spec(params, solver)?;
    validate(&spec.base)?;
    let table = run_sweep(&spec, workers)?;
    let bad = table.rows.iter().filter(|r| !r.converged).count();
    if bad > 0 {
        eprintln!(
            "warning: {bad} of {} grid points did not converge",
            table.rows.len()
        );
    }
    match output {
        Some(path) => write_table(&table, path, Some(&spec))
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => {
            let mut out = open_output(None)?;
            write_csv(&table, &mut out)?;
            out.flush()?;
        }
    }
    Ok(status(bad == 0))
}

fn cmd_correlate(input: &Path, columns: &[String], output: Option<&Path>) -> Result<u8> {
    let table = read_table(input).with_context(|| format!("cannot read {}", input.display()))?;
    let names: Vec<String> = if columns.is_empty() {
        table
            .measures
            .iter()
            .map(|m| m.name().to_string())
            .collect()
    } else {
        columns.to_vec()
    };
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let m = correlation_matrix(&table, &refs)?;
    let mut out = open_output(output)?;
    m.write_csv(&mut out)?;
    out.flush()?;
    Ok(0)
}

fn cmd_ansatz(lo: f64, hi: f64, points: usize, output: Option<&Path>) -> Result<u8> {
    if points == 0 {
        bail!("invalid value for --points: must be at least 1");
    }
    if !(lo.is_finite() && lo >= 0.0) {
        bail!("invalid value for --drive-min: must be finite and >= 0, got {lo}");
    }
    if !(hi.is_finite() && hi >= lo) {
        bail!("invalid value for --drive-max: must be finite and >= --drive-min, got {hi}");
    }
    let mut out = open_output(output)?;
    writeln!(out, "drive_e,mrl1,qfi,pcoh,speak,cfi")?;
    let mut flagged = 0;
    for e in linspace(lo, hi, points) {
        let l = limits(e)?;
        flagged += usize::from(l.outside_validity);
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            l.e, l.mrl1, l.qfi, l.pcoh, l.speak, l.cfi
        )?;
    }
    out.flush()?;
    if flagged > 0 {
        eprintln!(
            "warning: {flagged} drive values exceed {VALIDITY_MAX_DRIVE}, where the limits are unreliable"
        );
    }
    Ok(0)
}

fn cmd_phase_dist(
    params: &ParamArgs,
    solver: &SolverArgs,
    config: Option<&Path>,
    grid: usize,
    output: Option<&Path>,
) -> Result<u8> {
    let (_, r, _) = solve_state(params, solver, config)?;
    let pdist = phase_distribution(&r.rho, grid).context("invalid value for --grid")?;
    let mut out = open_output(output)?;
    pdist.write_csv(&mut out)?;
    out.flush()?;
    Ok(status(r.converged))
}

fn cmd_wigner(
    params: &ParamArgs,
    solver: &SolverArgs,
    config: Option<&Path>,
    extent: f64,
    points: usize,
    output: Option<&Path>,
) -> Result<u8> {
    if !(extent.is_finite() && extent > 0.0) {
        bail!("invalid value for --extent: must be positive, got {extent}");
    }
    if points < 2 {
        bail!("invalid value for --points: must be at least 2");
    }
    let (_, r, _) = solve_state(params, solver, config)?;
    let axis = linspace(-extent, extent, points);
    let grid = wigner(&r.rho, &axis, &axis)?;
    let mut out = open_output(output)?;
    grid.write_csv(&mut out)?;
    out.flush()?;
    Ok(status(r.converged))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Steady {
            params,
            solver,
            config,
            output,
        } => cmd_steady(&params, &solver, config.as_deref(), output.as_deref()),
        Command::Sweep {
            config,
            params,
            solver,
            workers,
            output,
        } => cmd_sweep(&config, &params, &solver, workers, output.as_deref()),
        Command::Correlate {
            input,
            columns,
            output,
        } => cmd_correlate(&input, &columns, output.as_deref()),
        Command::Ansatz {
            drive_min,
            drive_max,
            points,
            output,
        } => cmd_ansatz(drive_min, drive_max, points, output.as_deref()),
        Command::PhaseDist {
            params,
            solver,
            config,
            grid,
            output,
        } => cmd_phase_dist(&params, &solver, config.as_deref(), grid, output.as_deref()),
        Command::Wigner {
            params,
            solver,
            config,
            extent,
            points,
            output,
        } => cmd_wigner(
            &params,
            &solver,
            config.as_deref(),
            extent,
            points,
            output.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_MISUSE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_MISUSE)
        }
    }
}
