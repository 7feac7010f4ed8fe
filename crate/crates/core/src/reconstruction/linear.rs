use crate::mesh::Point;
use crate::optim::Vector;

/// Piecewise-linear field `w_E(x) = u_E + ∇w_E·(x − x_E)`.
///
/// The centroid values are copies of the cell averages, so every cell keeps
/// its mean exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearField {
    dim: usize,
    ncomp: usize,
    values: Vec<f64>,
    gradients: Vec<Vector>,
}

impl LinearField {
    pub fn new(dim: usize, ncomp: usize, cells: usize) -> Self {
        Self { dim, ncomp, values: vec![0.0; cells * ncomp], gradients: vec![[0.0; 3]; cells * ncomp] }
    }

    pub(crate) fn reset(&mut self, dim: usize, ncomp: usize) {
        let cells = self.num_cells();
        self.dim = dim;
        self.ncomp = ncomp;
        self.values.resize(cells * ncomp, 0.0);
        self.gradients.resize(cells * ncomp, [0.0; 3]);
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut [Vector]) {
        (&mut self.values, &mut self.gradients)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn num_cells(&self) -> usize {
        self.values.len().checked_div(self.ncomp).unwrap_or(0)
    }

    pub fn value(&self, cell: usize, comp: usize) -> f64 {
        self.values[cell * self.ncomp + comp]
    }

    pub fn gradient(&self, cell: usize, comp: usize) -> &Vector {
        &self.gradients[cell * self.ncomp + comp]
    }

    pub fn set_gradient(&mut self, cell: usize, comp: usize, gradient: Vector) {
        self.gradients[cell * self.ncomp + comp] = gradient;
    }

    /// Drops every gradient of a cell, leaving its constant state.
    pub fn flatten_cell(&mut self, cell: usize) {
        for g in &mut self.gradients[cell * self.ncomp..(cell + 1) * self.ncomp] {
            *g = [0.0; 3];
        }
    }

    /// Value of component `comp` at `offset = x − x_E`.
    pub fn evaluate(&self, cell: usize, comp: usize, offset: &Point) -> f64 {
        let g = self.gradient(cell, comp);
        self.value(cell, comp) + g[0] * offset[0] + g[1] * offset[1] + g[2] * offset[2]
    }

    /// All components at `offset = x − x_E`.
    pub fn evaluate_into(&self, cell: usize, offset: &Point, out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate().take(self.ncomp) {
            *o = self.evaluate(cell, k, offset);
        }
    }
}
