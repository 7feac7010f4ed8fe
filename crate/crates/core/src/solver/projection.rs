use rayon::prelude::*;

use crate::field::CellField;
use crate::mesh::{Mesh, Point};

/// Quadrature used for cell averages of initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Projection {
    /// Collapsed Gauss rule with 3 points per direction on each simplex.
    #[default]
    Smooth,
    /// `4^d` sample points per simplex, for data with jumps.
    Discontinuous,
}

/// Cell averages of `u0` over a simplicial decomposition of each element.
/// Cells on which every sample agrees receive that value exactly.
pub fn project_initial<F>(mesh: &Mesh, ncomp: usize, u0: F, mode: Projection) -> CellField
where
    F: Fn(&Point, &mut [f64]) + Sync,
{
    let n = match mode {
        Projection::Smooth => 3,
        Projection::Discontinuous => 4,
    };
    let mut field = CellField::zeros(mesh, ncomp);
    field.cell_values_mut().par_chunks_mut(ncomp).enumerate().for_each(|(e, out)| {
        let mut sample = vec![0.0; ncomp];
        let mut first: Option<Vec<f64>> = None;
        let mut uniform = true;
        let mut total = 0.0;
        for simplex in mesh.simplices(e) {
            for (x, w) in simplex.quadrature(n) {
                u0(&x, &mut sample);
                match &first {
                    None => first = Some(sample.clone()),
                    Some(f) => uniform &= *f == sample,
                }
                for k in 0..ncomp {
                    out[k] += w * sample[k];
                }
                total += w;
            }
        }
        match first {
            Some(f) if uniform => out.copy_from_slice(&f),
            _ => out.iter_mut().for_each(|v| *v /= total),
        }
    });
    field
}
