//! Semi-discrete MUSCL finite-volume scheme with SSP-RK2 time stepping.
//!
//! `d/dt u_E = −1/|E| Σ_e |e| G(w_E(x_e), w_E'(x_e), ν_e) + s(x_E, t)`, with
//! `w` the reconstructed piecewise-linear field and `x_e` the face centroid.

mod projection;
mod vtk;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::CellField;
use crate::mesh::geometry::sub;
use crate::mesh::{BoundaryKind, FaceNeighbor, Mesh, MeshError, Point};
use crate::physics::{Model, PhysicsError};
use crate::reconstruction::{LinearField, ReconstructionConfig, ReconstructionError, ReconstructionKind, Reconstructor};

pub use projection::{project_initial, Projection};
pub use vtk::write_vtk;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Reconstruction(#[from] ReconstructionError),
    #[error("flux on face {face} (cell {cell}): {source}")]
    Flux { face: usize, cell: usize, source: PhysicsError },
    #[error("step {step}, t = {time}: non-finite value in cell {cell}")]
    NonFinite { step: usize, time: f64, cell: usize },
    #[error("step {step}, t = {time}: non-physical state in cell {cell}")]
    NonPhysical { step: usize, time: f64, cell: usize },
    #[error("boundary face {face} (tag {tag}) has no boundary condition")]
    OpenBoundary { face: usize, tag: i32 },
    #[error("field has {found} values, expected {expected}")]
    FieldSize { expected: usize, found: usize },
    #[error("invalid time step {0}")]
    TimeStep(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// State outside a boundary face used by the numerical flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTrace {
    /// The ghost average itself (ghosts are not reconstructed).
    Ghost,
    /// Dirichlet data evaluated at the face centroid; slip walls mirror the
    /// interior trace. Ghosts are still not reconstructed.
    #[default]
    Face,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub cfl: f64,
    pub dt_max: f64,
    pub boundary_trace: BoundaryTrace,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { cfl: 0.4, dt_max: f64::INFINITY, boundary_trace: BoundaryTrace::Ghost }
    }
}

/// Dirichlet data `g(x, t)` in conserved variables.
pub type BoundaryFn = dyn Fn(&Point, f64, &mut [f64]) + Send + Sync;

/// Time and cell averages.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    pub t: f64,
    pub field: CellField,
}

/// Result of one residual evaluation.
#[derive(Debug, Clone)]
pub struct Residual {
    /// `d/dt u_E`, element-major.
    pub values: Vec<f64>,
    /// Largest wave speed of the two traces on each face.
    pub face_speeds: Vec<f64>,
}

/// Progress report handed to the observer after every step.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
}

/// The discretization of one problem on one mesh.
pub struct Scheme {
    mesh: Mesh,
    model: Box<dyn Model>,
    reconstructor: Reconstructor,
    boundary: Box<BoundaryFn>,
    config: SolverConfig,
}

impl std::fmt::Debug for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scheme")
            .field("elements", &self.mesh.num_elements())
            .field("reconstruction", self.reconstructor.config())
            .field("config", &self.config)
            .finish()
    }
}

impl Scheme {
    /// `mesh` must have its ghosts attached.
    pub fn new(
        mesh: Mesh,
        model: Box<dyn Model>,
        reconstruction: ReconstructionConfig,
        boundary: Box<BoundaryFn>,
        config: SolverConfig,
    ) -> Result<Self, SolverError> {
        for (fid, face) in mesh.faces().iter().enumerate() {
            if let FaceNeighbor::Boundary { tag, ghost: None } = face.outer {
                return Err(SolverError::OpenBoundary { face: fid, tag });
            }
        }
        let reconstructor = Reconstructor::new(&mesh, reconstruction)?;
        Ok(Self { mesh, model, reconstructor, boundary, config })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn model(&self) -> &dyn Model {
        self.model.as_ref()
    }

    pub fn reconstructor(&self) -> &Reconstructor {
        &self.reconstructor
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn ncomp(&self) -> usize {
        self.model.ncomp()
    }

    /// Empty field of the right shape.
    pub fn zero_field(&self) -> CellField {
        CellField::zeros(&self.mesh, self.ncomp())
    }

    /// Cell averages of `u0` (conserved variables).
    pub fn project<F>(&self, u0: F, mode: Projection) -> CellField
    where
        F: Fn(&Point, &mut [f64]) + Sync,
    {
        project_initial(&self.mesh, self.ncomp(), u0, mode)
    }

    /// Sets ghost values for time `t`: Dirichlet data at the ghost centroid,
    /// or the mirrored interior state at slip walls.
    pub fn fill_ghosts(&self, field: &mut CellField, t: f64) {
        let n = self.ncomp();
        let ghosts = self.mesh.ghosts();
        let (cells, ghost_values) = field.split_mut();
        ghost_values.par_chunks_mut(n).zip(ghosts.par_iter()).for_each(|(out, g)| match g.kind {
            BoundaryKind::Dirichlet => (self.boundary)(&g.centroid, t, out),
            BoundaryKind::SlipWall => {
                let normal = self.mesh.faces()[g.face].normal;
                self.model.mirror(&cells[g.element * n..(g.element + 1) * n], &normal, out)
            }
            BoundaryKind::Periodic { .. } => unreachable!("periodic faces carry no ghosts"),
        });
    }

    /// Field in reconstruction variables, ghosts included.
    fn limited_field(&self, field: &CellField) -> CellField {
        let n = self.ncomp();
        let mut w = field.clone();
        w.cell_values_mut().par_chunks_mut(n).zip(field.cell_values().par_chunks(n)).for_each(|(o, u)| self.model.to_limited(u, o));
        w.ghost_values_mut().par_chunks_mut(n).zip(field.ghost_values().par_chunks(n)).for_each(|(o, u)| self.model.to_limited(u, o));
        w
    }

    fn trace(&self, lin: &LinearField, cell: usize, x: &Point, shift: &Point, out: &mut [f64]) {
        let n = self.ncomp();
        let mut w = [0.0; 8];
        let c = self.mesh.element(cell).centroid;
        let offset = sub(&sub(x, shift), &c);
        lin.evaluate_into(cell, &offset, &mut w[..n]);
        self.model.conserved_from_limited(&w[..n], out);
    }

    /// Reconstruction of `field` (ghosts already filled). With
    /// `qp_positive`, cells with a non-physical face trace fall back to
    /// their constant state.
    pub fn reconstruct(&self, field: &CellField) -> Result<LinearField, SolverError> {
        let w = self.limited_field(field);
        let mut lin = self.reconstructor.reconstruct(&w)?;
        if self.reconstructor.config().kind == ReconstructionKind::QpPositive {
            let n = self.ncomp();
            let bad: Vec<usize> = (0..self.mesh.num_elements())
                .into_par_iter()
                .filter(|&e| {
                    let mut u = [0.0; 8];
                    self.mesh.adjacency(e).iter().any(|adj| {
                        let x = self.mesh.face_centroid_from(adj);
                        self.trace(&lin, e, &x, &[0.0; 3], &mut u[..n]);
                        !self.model.is_admissible(&u[..n])
                    })
                })
                .collect();
            for e in bad {
                log::debug!("cell {e}: non-physical trace, using constant state");
                lin.flatten_cell(e);
            }
        }
        Ok(lin)
    }

    /// Time derivative of the cell averages at time `t`. Fills the ghosts of
    /// `field` first.
    pub fn spatial_residual(&self, field: &mut CellField, t: f64) -> Result<Residual, SolverError> {
        let n = self.ncomp();
        let expected = self.mesh.num_elements() * n;
        if field.cell_values().len() != expected || field.ncomp() != n {
            return Err(SolverError::FieldSize { expected, found: field.cell_values().len() });
        }
        self.fill_ghosts(field, t);
        let lin = self.reconstruct(field)?;
        let faces = self.mesh.faces();
        let mut fluxes = vec![0.0; faces.len() * n];
        let mut face_speeds = vec![0.0; faces.len()];
        fluxes.par_chunks_mut(n).zip(face_speeds.par_iter_mut()).enumerate().try_for_each(|(fid, (g, speed))| {
            let face = &faces[fid];
            let mut left = [0.0; 8];
            let mut right = [0.0; 8];
            self.trace(&lin, face.inner, &face.centroid, &[0.0; 3], &mut left[..n]);
            match face.outer {
                FaceNeighbor::Interior { element, shift } => {
                    self.trace(&lin, element, &face.centroid, &shift, &mut right[..n]);
                }
                FaceNeighbor::Boundary { ghost: Some(gid), .. } => {
                    let ghost = &self.mesh.ghosts()[gid];
                    match (self.config.boundary_trace, ghost.kind) {
                        (BoundaryTrace::Ghost, _) => right[..n].copy_from_slice(field.ghost_state(gid)),
                        (BoundaryTrace::Face, BoundaryKind::SlipWall) => self.model.mirror(&left[..n], &face.normal, &mut right[..n]),
                        (BoundaryTrace::Face, _) => (self.boundary)(&face.centroid, t, &mut right[..n]),
                    }
                }
                FaceNeighbor::Boundary { tag, ghost: None } => return Err(SolverError::OpenBoundary { face: fid, tag }),
            }
            self.model.numerical_flux(&left[..n], &right[..n], &face.centroid, &face.normal, g).map_err(|source| SolverError::Flux {
                face: fid,
                cell: face.inner,
                source,
            })?;
            for v in g.iter_mut() {
                *v *= face.measure;
            }
            *speed = self.model.max_speed(&left[..n], &face.centroid, &face.normal).max(self.model.max_speed(
                &right[..n],
                &face.centroid,
                &face.normal,
            ));
            Ok(())
        })?;
        let mut values = vec![0.0; expected];
        values.par_chunks_mut(n).enumerate().for_each(|(e, r)| {
            let el = self.mesh.element(e);
            for adj in self.mesh.adjacency(e) {
                let g = &fluxes[adj.face * n..(adj.face + 1) * n];
                for k in 0..n {
                    r[k] -= adj.orientation * g[k];
                }
            }
            for v in r.iter_mut() {
                *v /= el.measure;
            }
            let mut s = [0.0; 8];
            if self.model.source(&el.centroid, t, &mut s[..n]) {
                for k in 0..n {
                    r[k] += s[k];
                }
            }
        });
        Ok(Residual { values, face_speeds })
    }

    /// `cfl · min_E 2|E| / Σ_e |e| λ_e`, capped by `dt_max`, from per-face
    /// wave speeds.
    pub fn dt_from_speeds(&self, face_speeds: &[f64]) -> f64 {
        let dt = (0..self.mesh.num_elements())
            .into_par_iter()
            .map(|e| {
                let total: f64 = self.mesh.adjacency(e).iter().map(|adj| self.mesh.faces()[adj.face].measure * face_speeds[adj.face]).sum();
                if total > 0.0 {
                    2.0 * self.mesh.element(e).measure / total
                } else {
                    f64::INFINITY
                }
            })
            .reduce(|| f64::INFINITY, f64::min);
        (self.config.cfl * dt).min(self.config.dt_max)
    }

    /// Stable time step for `field` at time `t`, using the wave speeds of the
    /// reconstructed face traces.
    pub fn cfl_dt(&self, field: &mut CellField, t: f64) -> Result<f64, SolverError> {
        let res = self.spatial_residual(field, t)?;
        Ok(self.dt_from_speeds(&res.face_speeds))
    }

    /// One SSP-RK2 (Heun) step of size `dt`.
    pub fn rk2_step(&self, state: &SchemeState, dt: f64) -> Result<SchemeState, SolverError> {
        let mut field = state.field.clone();
        let first = self.spatial_residual(&mut field, state.t)?;
        self.finish_step(state, field, first, dt)
    }

    fn finish_step(&self, state: &SchemeState, mut field: CellField, first: Residual, dt: f64) -> Result<SchemeState, SolverError> {
        let u0 = state.field.cell_values().to_vec();
        let mut l0 = Some(first.values);
        let u = heun_step(&u0, state.t, dt, |u, t| -> Result<Vec<f64>, SolverError> {
            if let Some(l) = l0.take() {
                return Ok(l);
            }
            field.cell_values_mut().copy_from_slice(u);
            Ok(self.spatial_residual(&mut field, t)?.values)
        })?;
        field.cell_values_mut().copy_from_slice(&u);
        Ok(SchemeState { t: state.t + dt, field })
    }

    /// Integrates from `state` to `t_end`, calling `observer` after every
    /// step. The last step is shortened to hit `t_end` exactly.
    pub fn run<O>(&self, state: SchemeState, t_end: f64, mut observer: O) -> Result<SchemeState, SolverError>
    where
        O: FnMut(&StepInfo, &SchemeState) -> Result<(), SolverError>,
    {
        let mut state = state;
        let mut step = 0;
        while state.t < t_end {
            let mut field = state.field.clone();
            let first = self.spatial_residual(&mut field, state.t)?;
            let mut dt = self.dt_from_speeds(&first.face_speeds);
            if !(dt > 0.0) {
                return Err(SolverError::TimeStep(dt));
            }
            let last = state.t + dt >= t_end;
            if last {
                dt = t_end - state.t;
            }
            let mut next = self.finish_step(&state, field, first, dt)?;
            if last {
                next.t = t_end;
            }
            step += 1;
            self.check_state(&next, step)?;
            observer(&StepInfo { step, t: next.t, dt }, &next)?;
            state = next;
        }
        Ok(state)
    }

    fn check_state(&self, state: &SchemeState, step: usize) -> Result<(), SolverError> {
        let n = self.ncomp();
        let values = state.field.cell_values();
        if let Some(cell) = values.par_chunks(n).position_first(|u| u.iter().any(|v| !v.is_finite())) {
            log::error!("step {step}: non-finite state {:?} in cell {cell}", &values[cell * n..(cell + 1) * n]);
            return Err(SolverError::NonFinite { step, time: state.t, cell });
        }
        if let Some(cell) = values.par_chunks(n).position_first(|u| !self.model.is_admissible(u)) {
            return Err(SolverError::NonPhysical { step, time: state.t, cell });
        }
        Ok(())
    }

    /// Largest violation of the reconstruction admissibility bounds for the
    /// field at time `t`.
    pub fn admissibility_violation(&self, field: &CellField, t: f64) -> Result<f64, SolverError> {
        let mut f = field.clone();
        self.fill_ghosts(&mut f, t);
        let w = self.limited_field(&f);
        let lin = self.reconstructor.reconstruct(&w)?;
        Ok(self.reconstructor.admissibility_violation(&w, &lin))
    }

    /// `Σ_E |E| u_E` per component.
    pub fn total(&self, field: &CellField) -> Vec<f64> {
        let n = self.ncomp();
        let mut total = vec![0.0; n];
        for (e, el) in self.mesh.elements().iter().enumerate() {
            for k in 0..n {
                total[k] += el.measure * field.state(e)[k];
            }
        }
        total
    }
}

/// Heun's method `u¹ = u + dt L(u, t)`, `u⁺ = ½u + ½(u¹ + dt L(u¹, t + dt))`
/// for a generic right-hand side.
pub fn heun_step<F, E>(u: &[f64], t: f64, dt: f64, mut rhs: F) -> Result<Vec<f64>, E>
where
    F: FnMut(&[f64], f64) -> Result<Vec<f64>, E>,
{
    let l0 = rhs(u, t)?;
    let u1: Vec<f64> = u.iter().zip(&l0).map(|(a, l)| a + dt * l).collect();
    let l1 = rhs(&u1, t + dt)?;
    Ok(u.iter().zip(u1.iter().zip(&l1)).map(|(a, (b, l))| 0.5 * a + 0.5 * (b + dt * l)).collect())
}
