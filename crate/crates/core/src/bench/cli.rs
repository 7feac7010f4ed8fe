//! Command-line interface of the `muscl` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use super::{check_theorem1, run_convergence_study, thread_pool, BenchConfig, BenchError};
use crate::physics::{exact_riemann_euler, Primitive};

#[derive(Debug, Parser)]
#[command(name = "muscl", version, about = "MUSCL finite-volume schemes with optimization-based limiting")]
pub struct Cli {
    /// Worker threads (overrides the configuration and MUSCL_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the first mesh level of a configuration and print its error.
    Run { config: PathBuf },
    /// Run every mesh level and print the CSV report.
    Convergence { config: PathBuf },
    /// Sample the exact solution of a Riemann problem for the Euler equations.
    Riemann {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        rho_l: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        u_l: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        p_l: f64,
        #[arg(long, default_value_t = 0.125, allow_negative_numbers = true)]
        rho_r: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        u_r: f64,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        p_r: f64,
        #[arg(long, default_value_t = 0.2)]
        time: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x_max: f64,
        #[arg(long, default_value_t = 1.4)]
        gamma: f64,
    },
    /// Compare QP and minmod gradients on random Cartesian data.
    CheckTheorem1 {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 16)]
        cells: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Exit code for unreadable or malformed configuration files.
pub const EXIT_CONFIG: u8 = 2;

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli, &mut std::io::stdout().lock()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                BenchError::ReadConfig { .. } | BenchError::Config(_) => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn load(path: &Path, threads: Option<usize>) -> Result<BenchConfig, BenchError> {
    let mut config = BenchConfig::from_file(path)?;
    if threads.is_some() {
        config.threads = threads;
    }
    Ok(config)
}

/// Runs a parsed command line, writing results to `out`.
pub fn execute<W: Write>(cli: Cli, out: &mut W) -> Result<ExitCode, BenchError> {
    match cli.command {
        Command::Run { config } => {
            let mut config = load(&config, cli.threads)?;
            config.mesh = first_level(&config.mesh);
            let (report, results) = run_convergence_study(&config)?;
            let r = &results[0];
            writeln!(out, "elements: {}", r.elements)?;
            writeln!(out, "h: {}", r.h)?;
            writeln!(out, "steps: {}", r.steps)?;
            writeln!(out, "t_end: {}", r.final_state.t)?;
            writeln!(out, "l1_error: {}", r.l1_error)?;
            writeln!(out, "wall_seconds: {}", report.rows[0].wall_seconds)?;
        }
        Command::Convergence { config } => {
            let config = load(&config, cli.threads)?;
            let (report, _) = run_convergence_study(&config)?;
            report.write_csv(&mut *out)?;
        }
        Command::Riemann { rho_l, u_l, p_l, rho_r, u_r, p_r, time, samples, x_min, x_max, gamma } => {
            let sol = exact_riemann_euler(Primitive::new(rho_l, u_l, p_l), Primitive::new(rho_r, u_r, p_r), gamma)
                .map_err(|e| BenchError::Config(e.to_string()))?;
            if !(time > 0.0) || samples == 0 {
                return Err(BenchError::Config("riemann needs --time > 0 and --samples ≥ 1".into()));
            }
            writeln!(out, "x,rho,u,p,p_star,u_star")?;
            for i in 0..samples {
                let x = if samples == 1 { 0.5 * (x_min + x_max) } else { x_min + (x_max - x_min) * i as f64 / (samples - 1) as f64 };
                let w = sol.sample(x / time);
                writeln!(out, "{x},{},{},{},{},{}", w.rho, w.u, w.p, sol.p_star, sol.u_star)?;
            }
        }
        Command::CheckTheorem1 { dim, cells, trials, seed } => {
            let pool = thread_pool(super::thread_count(cli.threads))?;
            let worst = pool.install(|| check_theorem1(dim, cells, trials, seed))?;
            writeln!(out, "dim {dim}, {cells} cells per axis, {trials} trials")?;
            writeln!(out, "max deviation: {worst:e}")?;
            if worst > 1e-10 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn first_level(mesh: &super::MeshConfig) -> super::MeshConfig {
    use super::MeshConfig::*;
    match mesh {
        Triangles { levels } => Triangles { levels: levels[..1].to_vec() },
        Checkerboard { levels } => Checkerboard { levels: levels[..1].to_vec() },
        Cartesian { lower, upper, cells } => Cartesian { lower: lower.clone(), upper: upper.clone(), cells: cells[..1].to_vec() },
        Files { paths } => Files { paths: paths[..1].to_vec() },
    }
}
