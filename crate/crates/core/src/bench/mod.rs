//! Benchmark problems, error norms, convergence studies and the CLI.

pub mod cli;
mod config;
mod problems;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::CellField;
use crate::mesh::{
    attach_ghosts, build_cartesian, checkerboard_refine, periodic_box_spec, read_gmsh_msh, read_native, uniform_refine, unit_square_123,
    GhostPlacement, Mesh, MeshError, Point,
};
use crate::reconstruction::{ReconstructionConfig, ReconstructionKind, Reconstructor};
use crate::solver::{write_vtk, Scheme, SchemeState, SolverError};

pub use config::{BenchConfig, ErrorNorm, MeshConfig, ProblemKind};
pub use problems::{p123_states, sod_states, solid_rotation_exact, solid_rotation_initial, Problem};
pub use report::{eoc_pair, BenchReport, ReportRow};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read configuration {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("cannot build thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}

/// Quadrature points per direction for error integrals.
const ERROR_QUADRATURE: usize = 3;

/// `Σ_E ∫_E Σ_k |u_E,k − u_k(x)| dx` for a piecewise-constant field, by
/// quadrature on a simplicial decomposition of each element.
pub fn l1_error<F>(mesh: &Mesh, field: &CellField, exact: F) -> f64
where
    F: Fn(&Point, &mut [f64]) + Sync,
{
    l1_error_with(mesh, field, exact, ErrorNorm::Pointwise)
}

/// `Σ_E |E| Σ_k |u_E,k − ū_E,k|` with `ū_E` the exact cell average,
/// integrated by the same quadrature as [`l1_error`].
pub fn l1_error_averaged<F>(mesh: &Mesh, field: &CellField, exact: F) -> f64
where
    F: Fn(&Point, &mut [f64]) + Sync,
{
    l1_error_with(mesh, field, exact, ErrorNorm::CellAverage)
}

pub fn l1_error_with<F>(mesh: &Mesh, field: &CellField, exact: F, norm: ErrorNorm) -> f64
where
    F: Fn(&Point, &mut [f64]) + Sync,
{
    let n = field.ncomp();
    let per_cell: Vec<f64> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|e| {
            let mut u = vec![0.0; n];
            let mut integral = vec![0.0; n];
            let mut total = 0.0;
            for simplex in mesh.simplices(e) {
                for (x, w) in simplex.quadrature(ERROR_QUADRATURE) {
                    exact(&x, &mut u);
                    match norm {
                        ErrorNorm::Pointwise => {
                            total += w * u.iter().zip(field.state(e)).map(|(a, b)| (a - b).abs()).sum::<f64>();
                        }
                        ErrorNorm::CellAverage => {
                            for (s, a) in integral.iter_mut().zip(&u) {
                                *s += w * a;
                            }
                        }
                    }
                }
            }
            if norm == ErrorNorm::CellAverage {
                let vol = mesh.elements()[e].measure;
                total = integral.iter().zip(field.state(e)).map(|(s, b)| (s - vol * b).abs()).sum();
            }
            total
        })
        .collect();
    // sequential sum keeps the value independent of the worker count
    per_cell.iter().sum()
}

/// Worker count from the configuration, else `MUSCL_THREADS`, else rayon's default.
pub fn thread_count(config: Option<usize>) -> Option<usize> {
    config.or_else(|| std::env::var("MUSCL_THREADS").ok().and_then(|v| v.trim().parse().ok()).filter(|&n| n > 0))
}

pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, BenchError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(threads) {
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

/// Mesh of resolution level `level` (without ghosts).
pub fn build_mesh(config: &MeshConfig, level: usize) -> Result<Mesh, BenchError> {
    Ok(match config {
        MeshConfig::Triangles { levels } => {
            let mut mesh = unit_square_123();
            for _ in 0..levels[level] {
                mesh = uniform_refine(&mesh)?;
            }
            mesh
        }
        MeshConfig::Checkerboard { levels } => {
            let n = 8usize << levels[level];
            checkerboard_refine(&build_cartesian(&[0.0, 0.0], &[1.0, 1.0], &[n, n])?)?
        }
        MeshConfig::Cartesian { lower, upper, cells } => build_cartesian(lower, upper, &vec![cells[level]; lower.len()])?,
        MeshConfig::Files { paths } => read_mesh_file(&paths[level])?,
    })
}

/// Reads `.msh` files as Gmsh 2.2 ASCII and anything else as the native format.
pub fn read_mesh_file(path: &Path) -> Result<Mesh, BenchError> {
    let bytes = std::fs::read(path)?;
    Ok(if path.extension().is_some_and(|e| e == "msh") { read_gmsh_msh(&bytes)? } else { read_native(&String::from_utf8_lossy(&bytes))? })
}

/// Outcome of one run on one mesh.
#[derive(Debug, Clone)]
pub struct LevelResult {
    pub elements: usize,
    pub h: f64,
    pub l1_error: f64,
    pub wall_seconds: f64,
    pub steps: usize,
    /// Smallest and largest first component (scalar or density) over all steps.
    pub range: (f64, f64),
    /// Smallest pressure over all steps (Euler only).
    pub min_pressure: Option<f64>,
    /// Largest reconstruction admissibility violation on the sampled steps.
    pub max_violation: f64,
    pub sampled_steps: usize,
    pub final_state: SchemeState,
}

/// Scheme for a problem on a mesh without ghosts.
pub fn build_scheme(config: &BenchConfig, problem: &Problem, mesh: Mesh) -> Result<Scheme, BenchError> {
    let spec = problem.boundary_spec(&mesh);
    let mesh = attach_ghosts(mesh, &spec, GhostPlacement::Reflected)?;
    Ok(Scheme::new(mesh, problem.model(), config.reconstruction, problem.boundary(), config.solver())?)
}

fn admissibility_checked(kind: ReconstructionKind) -> bool {
    matches!(kind, ReconstructionKind::LsfLimited | ReconstructionKind::Lp | ReconstructionKind::Qp | ReconstructionKind::Minmod)
}

/// Runs `config` on level `level` in the current thread pool.
pub fn run_level(config: &BenchConfig, level: usize) -> Result<LevelResult, BenchError> {
    let mesh = build_mesh(&config.mesh, level)?;
    let problem = Problem::new(config.problem, mesh.dim(), config.flux)?;
    let scheme = build_scheme(config, &problem, mesh)?;
    let t_end = config.t_end();
    let snapshot = |name: &str, state: &SchemeState| -> Result<(), SolverError> {
        if let Some(dir) = &config.output_dir {
            std::fs::create_dir_all(dir)?;
            let mut file = std::io::BufWriter::new(std::fs::File::create(dir.join(name))?);
            write_vtk(&mut file, scheme.mesh(), &state.field, &component_names(&problem))?;
        }
        Ok(())
    };

    let start = Instant::now();
    let field = scheme.project(|x, out| problem.initial(x, out), problem.projection());
    let initial = SchemeState { t: 0.0, field };
    let mut monitor = Monitor::new(&problem, &initial.field);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ level as u64);
    let check = admissibility_checked(config.reconstruction.kind) && config.admissibility_sample > 0.0;
    let mut max_violation: f64 = 0.0;
    let mut sampled_steps = 0;
    let mut io_seconds = 0.0;
    let mut steps = 0;
    let state = scheme.run(initial, t_end, |info, state| {
        steps = info.step;
        monitor.update(&problem, &state.field);
        if check && rng.random::<f64>() < config.admissibility_sample {
            max_violation = max_violation.max(scheme.admissibility_violation(&state.field, state.t)?);
            sampled_steps += 1;
        }
        if config.snapshot_every.is_some_and(|k| k > 0 && info.step % k == 0) {
            let io = Instant::now();
            snapshot(&format!("level{level}_step{:06}.vtk", info.step), state)?;
            io_seconds += io.elapsed().as_secs_f64();
        }
        Ok(())
    })?;
    let wall_seconds = start.elapsed().as_secs_f64() - io_seconds;
    snapshot(&format!("level{level}.vtk"), &state)?;

    let l1 = error_of(&problem, scheme.mesh(), &state.field, t_end, config.error_norm);
    log::info!("level {level}: {} elements, {steps} steps, L1 error {l1:.6e}, {wall_seconds:.3} s", scheme.mesh().num_elements());
    Ok(LevelResult {
        elements: scheme.mesh().num_elements(),
        h: scheme.mesh().max_diameter(),
        l1_error: l1,
        wall_seconds,
        steps,
        range: monitor.range,
        min_pressure: monitor.min_pressure,
        max_violation,
        sampled_steps,
        final_state: state,
    })
}

/// L¹ error of a conserved-variable field against the problem's exact
/// solution at time `t`, in the problem's error variables.
pub fn error_of(problem: &Problem, mesh: &Mesh, field: &CellField, t: f64, norm: ErrorNorm) -> f64 {
    let n = field.ncomp();
    let mut converted = field.clone();
    for (o, u) in converted.cell_values_mut().chunks_mut(n).zip(field.cell_values().chunks(n)) {
        problem.error_variables(u, o);
    }
    l1_error_with(mesh, &converted, |x, out| problem.exact(x, t, out), norm)
}

fn component_names(problem: &Problem) -> Vec<&'static str> {
    if problem.is_euler() {
        ["rho", "m1", "m2", "m3"][..=problem.dim].iter().copied().chain(["energy"]).collect()
    } else {
        vec!["u"]
    }
}

struct Monitor {
    range: (f64, f64),
    min_pressure: Option<f64>,
}

impl Monitor {
    fn new(problem: &Problem, field: &CellField) -> Self {
        let mut m = Self { range: (f64::INFINITY, f64::NEG_INFINITY), min_pressure: None };
        m.update(problem, field);
        m
    }

    fn update(&mut self, problem: &Problem, field: &CellField) {
        let n = field.ncomp();
        for u in field.cell_values().chunks(n) {
            self.range.0 = self.range.0.min(u[0]);
            self.range.1 = self.range.1.max(u[0]);
        }
        if problem.is_euler() {
            let e = crate::physics::Euler::new(problem.dim);
            let p = field.cell_values().chunks(n).map(|u| e.pressure(u)).fold(f64::INFINITY, f64::min);
            self.min_pressure = Some(self.min_pressure.map_or(p, |q| q.min(p)));
        }
    }
}

/// Runs every level of `config` sequentially inside a pool with the
/// configured worker count and collects the report. Writes `report.csv`
/// into the output directory when one is set.
pub fn run_convergence_study(config: &BenchConfig) -> Result<(BenchReport, Vec<LevelResult>), BenchError> {
    let pool = thread_pool(config.threads)?;
    let mut report = BenchReport::default();
    report.meta("problem", format!("{:?}", config.problem));
    report.meta("config", config.to_toml().replace('\n', "; "));
    report.meta("version", env!("CARGO_PKG_VERSION"));
    report.meta("threads", pool.current_num_threads());
    report.meta("wall_seconds", "solver loop only, mesh construction and I/O excluded");
    let mut results = Vec::new();
    for level in 0..config.mesh.num_levels() {
        let r = pool.install(|| run_level(config, level))?;
        report.push(r.elements, r.h, r.l1_error, r.wall_seconds);
        results.push(r);
    }
    if let Some(dir) = &config.output_dir {
        std::fs::create_dir_all(dir)?;
        report.write_csv(std::fs::File::create(dir.join("report.csv"))?)?;
    }
    Ok((report, results))
}

/// Largest deviation between QP and minmod gradients over `trials` random
/// fields with random per-face weights on a periodic `cells^dim` grid.
pub fn check_theorem1(dim: usize, cells: usize, trials: usize, seed: u64) -> Result<f64, BenchError> {
    if !(1..=3).contains(&dim) || cells < 2 {
        return Err(BenchError::Config("check-theorem1 needs 1 ≤ dim ≤ 3 and at least 2 cells".into()));
    }
    let grid = build_cartesian(&vec![0.0; dim], &vec![1.0; dim], &vec![cells; dim])?;
    let mesh = attach_ghosts(grid, &periodic_box_spec(dim), GhostPlacement::Reflected)?;
    let minmod = Reconstructor::new(&mesh, ReconstructionConfig::with_kind(ReconstructionKind::Minmod)).map_err(SolverError::from)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let weights: Vec<Vec<f64>> =
            (0..mesh.num_elements()).map(|e| mesh.adjacency(e).iter().map(|_| 10.0 - rng.random_range(0.0..9.9)).collect()).collect();
        let qp = Reconstructor::with_weights(&mesh, ReconstructionConfig::with_kind(ReconstructionKind::Qp), |e, i, _| weights[e][i])
            .map_err(SolverError::from)?;
        let values: Vec<f64> = (0..mesh.num_elements())
            .map(|_| match rng.random_range(0..4) {
                0 => 0.5,
                1 => rng.random_range(0..4) as f64 * 0.25,
                _ => rng.random_range(-1.0..1.0),
            })
            .collect();
        let field = CellField::from_cells(&mesh, 1, values);
        let a = qp.reconstruct(&field).map_err(SolverError::from)?;
        let b = minmod.reconstruct(&field).map_err(SolverError::from)?;
        for e in 0..mesh.num_elements() {
            for i in 0..3 {
                worst = worst.max((a.gradient(e, 0)[i] - b.gradient(e, 0)[i]).abs());
            }
        }
    }
    Ok(worst)
}
