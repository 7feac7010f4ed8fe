use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::physics::NumericalFlux;
use crate::reconstruction::ReconstructionConfig;
use crate::solver::{BoundaryTrace, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// Quadratic balance law with a manufactured travelling wave on the unit square.
    ManufacturedNonlinear,
    /// Slotted cylinder, cone and hump rotating about the centre of the unit square.
    SolidRotation,
    EulerSod,
    EulerP123,
}

impl ProblemKind {
    pub fn default_t_end(self) -> f64 {
        match self {
            ProblemKind::ManufacturedNonlinear => 0.3,
            ProblemKind::SolidRotation => std::f64::consts::TAU,
            ProblemKind::EulerSod => 0.5,
            ProblemKind::EulerP123 => 0.15,
        }
    }
}

/// How the L¹ distance between cell averages and the exact solution is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorNorm {
    /// `Σ_E |E| |u_E − ū_E|` against the exact cell averages `ū_E`.
    #[default]
    CellAverage,
    /// `Σ_E ∫_E |u_E − u(x)| dx`; bounded below by an `O(h)` term for smooth data.
    Pointwise,
}

/// Sequence of meshes, one per resolution level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshConfig {
    /// The 123-triangle unit-square mesh refined `level` times (123·4^level elements).
    Triangles { levels: Vec<u32> },
    /// Checkerboard refinement of a `(8·2^level)²` grid (160·4^level elements).
    Checkerboard { levels: Vec<u32> },
    /// Axis-aligned grids with `cells[k]` cells per axis on level `k`.
    Cartesian { lower: Vec<f64>, upper: Vec<f64>, cells: Vec<usize> },
    /// Mesh files (`.msh` Gmsh 2.2 ASCII, anything else the native format),
    /// relative to the configuration file.
    Files { paths: Vec<PathBuf> },
}

impl MeshConfig {
    pub fn num_levels(&self) -> usize {
        match self {
            MeshConfig::Triangles { levels } | MeshConfig::Checkerboard { levels } => levels.len(),
            MeshConfig::Cartesian { cells, .. } => cells.len(),
            MeshConfig::Files { paths } => paths.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub problem: ProblemKind,
    pub mesh: MeshConfig,
    #[serde(default)]
    pub reconstruction: ReconstructionConfig,
    #[serde(default)]
    pub flux: NumericalFlux,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub dt_max: Option<f64>,
    #[serde(default)]
    pub boundary_trace: BoundaryTrace,
    #[serde(default)]
    pub error_norm: ErrorNorm,
    /// Final time; the problem's default when absent.
    pub t_end: Option<f64>,
    /// Directory for `report.csv` and VTK files.
    pub output_dir: Option<PathBuf>,
    /// Write a VTK snapshot every this many steps (final state always).
    pub snapshot_every: Option<usize>,
    /// Worker threads; `MUSCL_THREADS` or all cores when absent.
    pub threads: Option<usize>,
    /// Fraction of steps on which reconstruction admissibility is re-checked.
    #[serde(default = "default_sample")]
    pub admissibility_sample: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_cfl() -> f64 {
    SolverConfig::default().cfl
}

fn default_sample() -> f64 {
    0.01
}

impl BenchConfig {
    pub fn new(problem: ProblemKind, mesh: MeshConfig) -> Self {
        Self {
            problem,
            mesh,
            reconstruction: ReconstructionConfig::default(),
            flux: NumericalFlux::default(),
            cfl: default_cfl(),
            dt_max: None,
            boundary_trace: BoundaryTrace::default(),
            error_norm: ErrorNorm::default(),
            t_end: None,
            output_dir: None,
            snapshot_every: None,
            threads: None,
            admissibility_sample: default_sample(),
            seed: 0,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        let config: Self = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a configuration file; relative mesh paths are resolved against
    /// its directory.
    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::ReadConfig { path: path.to_owned(), source })?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let MeshConfig::Files { paths } = &mut config.mesh {
            for p in paths.iter_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        if let Some(dir) = &mut config.output_dir {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let fail = |m: &str| Err(BenchError::Config(m.to_owned()));
        if !(self.cfl > 0.0) {
            return fail("cfl must be positive");
        }
        if self.t_end.is_some_and(|t| !(t >= 0.0)) {
            return fail("t_end must be non-negative");
        }
        if self.mesh.num_levels() == 0 {
            return fail("mesh needs at least one level");
        }
        if let MeshConfig::Cartesian { lower, upper, .. } = &self.mesh {
            if lower.len() != upper.len() || lower.is_empty() || lower.len() > 3 {
                return fail("cartesian lower/upper must have equal length 1 to 3");
            }
        }
        if !(0.0..=1.0).contains(&self.admissibility_sample) {
            return fail("admissibility_sample must lie in [0, 1]");
        }
        if self.threads == Some(0) {
            return fail("threads must be positive");
        }
        Ok(())
    }

    pub fn t_end(&self) -> f64 {
        self.t_end.unwrap_or(self.problem.default_t_end())
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { cfl: self.cfl, dt_max: self.dt_max.unwrap_or(f64::INFINITY), boundary_trace: self.boundary_trace }
    }
}
