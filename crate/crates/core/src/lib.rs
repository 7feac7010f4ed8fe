//! Second-order MUSCL finite-volume schemes on unstructured meshes whose
//! slopes are chosen by small linear or quadratic programs.

pub mod bench;
pub mod field;
pub mod mesh;
pub mod optim;
pub mod physics;
pub mod reconstruction;
pub mod solver;

pub use bench::BenchError;
pub use field::CellField;
pub use mesh::{Mesh, MeshError};
pub use optim::OptimError;
pub use physics::{Model, PhysicsError};
pub use reconstruction::{ReconstructionConfig, ReconstructionError, ReconstructionKind, Reconstructor};
pub use solver::{Scheme, SchemeState, SolverConfig, SolverError};

/// Any error raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error(transparent)]
    Reconstruction(#[from] ReconstructionError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Bench(#[from] BenchError),
}
