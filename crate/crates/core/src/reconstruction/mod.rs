//! Piecewise-linear reconstruction of piecewise-constant data.
//!
//! For every cell `E` with centroid `x_E` and neighbours `E'` (including
//! ghosts and periodic images) the operators work with the offsets
//! `d = x_E' − x_E`, the jumps `m = u_E' − u_E` and weights `ω`. A gradient
//! `σ` is admissible when `0 ≤ sign(m) d·σ ≤ |m|` for every neighbour, with
//! `sign(0) = +1`.

mod config;
mod linear;

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::field::FieldAccess;
use crate::mesh::geometry::{distance, sub};
use crate::mesh::{Mesh, Neighbor};
use crate::optim::linalg::{cholesky, cholesky_solve, dot};
use crate::optim::{sign, solve_lp, solve_qp_active_set, BoxedDirectionalConstraints, OptimError, QuadraticObjective, Vector};

pub use config::{PositiveConstraintPoint, ReconstructionConfig, ReconstructionKind, WeightRule};
pub use linear::LinearField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructionError {
    #[error("cell {cell}: neighbour offsets do not span the space (least-squares problem is ill-posed)")]
    WellPosedness { cell: usize },
    #[error("cell {cell} is not part of a Cartesian grid")]
    NotCartesian { cell: usize },
    #[error("cell {cell}, component {comp}: {source}")]
    Solver { cell: usize, comp: usize, source: OptimError },
    #[error("field has {found} cells, mesh has {expected}")]
    FieldSize { expected: usize, found: usize },
}

/// Minmod of two slopes: the smaller magnitude when both have the same sign,
/// zero otherwise.
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b > 0.0 {
        sign(a) * a.abs().min(b.abs())
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    neighbor: Neighbor,
    offset: Vector,
    /// Face centroid relative to the cell centroid.
    face_offset: Vector,
    weight: f64,
    /// Share of the neighbour value in the intermediate state at the face.
    theta: f64,
}

#[derive(Debug, Clone)]
struct CellStencil {
    start: usize,
    len: usize,
    chol: [[f64; 3]; 3],
}

/// Per-cell geometry (offsets, weights and the factorized least-squares
/// Hessian) prepared once for a mesh, plus the operator configuration.
#[derive(Debug)]
pub struct Reconstructor {
    config: ReconstructionConfig,
    dim: usize,
    entries: Vec<Entry>,
    cells: Vec<CellStencil>,
    fallbacks: AtomicUsize,
}

impl Reconstructor {
    pub fn new(mesh: &Mesh, config: ReconstructionConfig) -> Result<Self, ReconstructionError> {
        let rule = config.weights;
        Self::with_weights(mesh, config, move |_, _, offset: &Vector| rule.weight(offset))
    }

    /// Like [`Reconstructor::new`] with weights chosen per adjacency entry:
    /// `weight(cell, entry_index, offset)` where `entry_index` indexes
    /// `mesh.adjacency(cell)`.
    pub fn with_weights<W>(mesh: &Mesh, config: ReconstructionConfig, weight: W) -> Result<Self, ReconstructionError>
    where
        W: Fn(usize, usize, &Vector) -> f64,
    {
        let dim = mesh.dim();
        let mut entries = Vec::new();
        let mut cells = Vec::with_capacity(mesh.num_elements());
        for e in 0..mesh.num_elements() {
            let xe = mesh.element(e).centroid;
            let start = entries.len();
            let mut h = [[0.0; 3]; 3];
            for (i, adj) in mesh.adjacency(e).iter().enumerate() {
                let Some(xn) = mesh.neighbor_centroid(&adj.neighbor) else { continue };
                let offset = sub(&xn, &xe);
                let xf = mesh.face_centroid_from(adj);
                let (de, dn) = (distance(&xe, &xf), distance(&xn, &xf));
                let theta = if de + dn > 0.0 { de / (de + dn) } else { 0.5 };
                let w = weight(e, i, &offset);
                for a in 0..dim {
                    for b in 0..dim {
                        h[a][b] += w * offset[a] * offset[b];
                    }
                }
                entries.push(Entry { neighbor: adj.neighbor, offset, face_offset: sub(&xf, &xe), weight: w, theta });
            }
            let chol = cholesky(&h, dim).ok_or(ReconstructionError::WellPosedness { cell: e })?;
            cells.push(CellStencil { start, len: entries.len() - start, chol });
        }
        Ok(Self { config, dim, entries, cells, fallbacks: AtomicUsize::new(0) })
    }

    pub fn config(&self) -> &ReconstructionConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Number of cell problems where the QP solver failed and the zero
    /// gradient was used instead.
    pub fn fallback_count(&self) -> usize {
        self.fallbacks.load(Ordering::Relaxed)
    }

    fn stencil(&self, cell: usize) -> &[Entry] {
        let s = &self.cells[cell];
        &self.entries[s.start..s.start + s.len]
    }

    /// Neighbour offsets `x_E' − x_E` of a cell in stencil order.
    pub fn offsets(&self, cell: usize) -> impl Iterator<Item = (Neighbor, Vector)> + '_ {
        self.stencil(cell).iter().map(|en| (en.neighbor, en.offset))
    }

    fn jumps<'a, F: FieldAccess + ?Sized>(&'a self, field: &'a F, cell: usize, comp: usize) -> impl Iterator<Item = (&'a Entry, f64)> + 'a {
        let u = field.cell(cell, comp);
        self.stencil(cell).iter().map(move |en| {
            let v = field.neighbor(&en.neighbor, comp).expect("stencil holds no open faces");
            (en, v - u)
        })
    }

    fn hessian(&self, cell: usize) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        for en in self.stencil(cell) {
            for a in 0..self.dim {
                for b in 0..self.dim {
                    h[a][b] += en.weight * en.offset[a] * en.offset[b];
                }
            }
        }
        h
    }

    fn lsf_rhs<F: FieldAccess + ?Sized>(&self, field: &F, cell: usize, comp: usize) -> Vector {
        let mut g = [0.0; 3];
        for (en, m) in self.jumps(field, cell, comp) {
            for a in 0..self.dim {
                g[a] += en.weight * m * en.offset[a];
            }
        }
        g
    }

    /// `H = Σ ω d⊗d`, `g = Σ ω m d` and one row `0 ≤ sign(m) d·σ ≤ |m|` per
    /// neighbour.
    pub fn assemble_cell_problem<F: FieldAccess + ?Sized>(
        &self,
        field: &F,
        cell: usize,
        comp: usize,
    ) -> Result<(QuadraticObjective, BoxedDirectionalConstraints), ReconstructionError> {
        let fail = |source| ReconstructionError::Solver { cell, comp, source };
        let obj = QuadraticObjective::new(self.dim, self.hessian(cell), self.lsf_rhs(field, cell, comp)).map_err(fail)?;
        let mut cons = BoxedDirectionalConstraints::new(self.dim).map_err(fail)?;
        for (en, m) in self.jumps(field, cell, comp) {
            cons.push_jump(&en.offset, m).map_err(fail)?;
        }
        Ok((obj, cons))
    }

    /// Rows bounding the face values between the cell value and the
    /// distance-weighted intermediate state.
    fn positive_constraints<F: FieldAccess + ?Sized>(
        &self,
        field: &F,
        cell: usize,
        comp: usize,
    ) -> Result<BoxedDirectionalConstraints, ReconstructionError> {
        let fail = |source| ReconstructionError::Solver { cell, comp, source };
        let mut cons = BoxedDirectionalConstraints::new(self.dim).map_err(fail)?;
        for (en, m) in self.jumps(field, cell, comp) {
            let at = match self.config.positive_point {
                PositiveConstraintPoint::FaceCentroid => &en.face_offset,
                PositiveConstraintPoint::NeighborCentroid => &en.offset,
            };
            cons.push_jump(at, en.theta * m).map_err(fail)?;
        }
        Ok(cons)
    }

    /// Unconstrained least-squares gradient `H⁻¹ g`.
    pub fn lsf_gradient<F: FieldAccess + ?Sized>(&self, field: &F, cell: usize, comp: usize) -> Vector {
        cholesky_solve(&self.cells[cell].chol, self.dim, &self.lsf_rhs(field, cell, comp))
    }

    /// Largest `α ∈ [0, 1]` such that `α·candidate` is admissible.
    pub fn limit_scale_alpha<F: FieldAccess + ?Sized>(&self, field: &F, cell: usize, comp: usize, candidate: &Vector) -> f64 {
        let mut alpha: f64 = 1.0;
        for (en, m) in self.jumps(field, cell, comp) {
            let delta = dot(candidate, &en.offset);
            let gap = if delta > 0.0 { m.max(0.0) } else { (-m).max(0.0) };
            if delta != 0.0 {
                alpha = alpha.min((gap / delta.abs()).clamp(0.0, 1.0));
            }
        }
        alpha
    }

    /// Minmod of the forward and backward difference quotients per axis.
    /// With only one neighbour along an axis its one-sided quotient is used.
    pub fn minmod_gradient_cartesian<F: FieldAccess + ?Sized>(
        &self,
        field: &F,
        cell: usize,
        comp: usize,
    ) -> Result<Vector, ReconstructionError> {
        let mut slopes: [[Option<f64>; 2]; 3] = [[None; 2]; 3];
        for (en, m) in self.jumps(field, cell, comp) {
            let len = dot(&en.offset, &en.offset).sqrt();
            let axis =
                (0..self.dim).find(|&a| en.offset[a].abs() >= (1.0 - 1e-9) * len).ok_or(ReconstructionError::NotCartesian { cell })?;
            let side = usize::from(en.offset[axis] > 0.0);
            if slopes[axis][side].is_some() {
                return Err(ReconstructionError::NotCartesian { cell });
            }
            slopes[axis][side] = Some(m / en.offset[axis]);
        }
        let mut grad = [0.0; 3];
        for a in 0..self.dim {
            grad[a] = match slopes[a] {
                [Some(b), Some(f)] => minmod(f, b),
                [Some(s), None] | [None, Some(s)] => s,
                [None, None] => 0.0,
            };
        }
        Ok(grad)
    }

    fn qp_gradient(&self, obj: &QuadraticObjective, cons: &BoxedDirectionalConstraints, cell: usize, comp: usize) -> Vector {
        // the unconstrained minimizer wins whenever it is admissible
        let free = cholesky_solve(&self.cells[cell].chol, self.dim, obj.gradient());
        let fits = cons.rows().iter().all(|r| {
            let v = dot(&r.direction, &free);
            let slack = 1e-13 * (r.upper + dot(&r.direction, &r.direction).sqrt() * dot(&free, &free).sqrt());
            v >= -slack && v <= r.upper + slack
        });
        if fits {
            return free;
        }
        match solve_qp_active_set(obj, cons, self.config.tol) {
            Ok(x) => x,
            Err(err) => {
                self.fallbacks.fetch_add(1, Ordering::Relaxed);
                log::warn!("QP solver failed on cell {cell}, component {comp} ({err}); using zero gradient");
                [0.0; 3]
            }
        }
    }

    /// Gradient of one component of one cell under the configured operator.
    pub fn cell_gradient<F: FieldAccess + ?Sized>(&self, field: &F, cell: usize, comp: usize) -> Result<Vector, ReconstructionError> {
        Ok(match self.config.kind {
            ReconstructionKind::None => [0.0; 3],
            ReconstructionKind::Lsf => self.lsf_gradient(field, cell, comp),
            ReconstructionKind::LsfLimited => {
                let v = self.lsf_gradient(field, cell, comp);
                let alpha = self.limit_scale_alpha(field, cell, comp, &v);
                [alpha * v[0], alpha * v[1], alpha * v[2]]
            }
            ReconstructionKind::Qp => {
                let (obj, cons) = self.assemble_cell_problem(field, cell, comp)?;
                self.qp_gradient(&obj, &cons, cell, comp)
            }
            ReconstructionKind::QpPositive => {
                let (obj, _) = self.assemble_cell_problem(field, cell, comp)?;
                let cons = self.positive_constraints(field, cell, comp)?;
                self.qp_gradient(&obj, &cons, cell, comp)
            }
            ReconstructionKind::Lp => {
                let fail = |source| ReconstructionError::Solver { cell, comp, source };
                let mut cons = BoxedDirectionalConstraints::new(self.dim).map_err(fail)?;
                let mut objective = [0.0; 3];
                for (en, m) in self.jumps(field, cell, comp) {
                    cons.push_jump(&en.offset, m).map_err(fail)?;
                    for a in 0..self.dim {
                        objective[a] += sign(m) * en.offset[a];
                    }
                }
                solve_lp(&objective, &cons).map_err(fail)?
            }
            ReconstructionKind::Minmod => self.minmod_gradient_cartesian(field, cell, comp)?,
        })
    }

    /// Reconstructs every cell and component into `out`, in parallel on the
    /// current rayon pool. Each cell is computed independently, so the
    /// result does not depend on the number of workers.
    pub fn reconstruct_into<F: FieldAccess + ?Sized>(&self, field: &F, out: &mut LinearField) -> Result<(), ReconstructionError> {
        let ncomp = field.ncomp();
        if out.num_cells() != self.cells.len() {
            return Err(ReconstructionError::FieldSize { expected: self.cells.len(), found: out.num_cells() });
        }
        out.reset(self.dim, ncomp);
        let (values, gradients) = out.parts_mut();
        values.par_chunks_mut(ncomp).zip(gradients.par_chunks_mut(ncomp)).enumerate().try_for_each(|(cell, (vals, grads))| {
            for k in 0..ncomp {
                vals[k] = field.cell(cell, k);
                grads[k] = self.cell_gradient(field, cell, k)?;
            }
            Ok(())
        })
    }

    pub fn reconstruct<F: FieldAccess + ?Sized>(&self, field: &F) -> Result<LinearField, ReconstructionError> {
        let mut out = LinearField::new(self.dim, field.ncomp(), self.cells.len());
        self.reconstruct_into(field, &mut out)?;
        Ok(out)
    }

    /// Largest violation of the admissibility bounds
    /// `min(u_E, u_E') ≤ w_E(x_E') ≤ max(u_E, u_E')` over all cells,
    /// neighbours and components.
    pub fn admissibility_violation<F: FieldAccess + ?Sized>(&self, field: &F, linear: &LinearField) -> f64 {
        (0..self.cells.len())
            .into_par_iter()
            .map(|cell| {
                let mut worst: f64 = 0.0;
                for k in 0..field.ncomp() {
                    let u = field.cell(cell, k);
                    let grad = linear.gradient(cell, k);
                    for (en, m) in self.jumps(field, cell, k) {
                        let w = u + dot(grad, &en.offset);
                        let (lo, hi) = (u.min(u + m), u.max(u + m));
                        worst = worst.max(lo - w).max(w - hi);
                    }
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Least-squares objective `J_E(σ) = Σ ω/2 (m − d·σ)²`.
    pub fn objective<F: FieldAccess + ?Sized>(&self, field: &F, cell: usize, comp: usize, gradient: &Vector) -> f64 {
        self.jumps(field, cell, comp)
            .map(|(en, m)| {
                let r = m - dot(&en.offset, gradient);
                0.5 * en.weight * r * r
            })
            .sum()
    }

    /// The neighbours of `cell` that the stencil reads.
    pub fn neighbors(&self, cell: usize) -> impl Iterator<Item = Neighbor> + '_ {
        self.stencil(cell).iter().map(|en| en.neighbor)
    }
}
