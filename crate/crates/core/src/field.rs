//! Piecewise-constant fields: one value per element and component, plus one
//! per ghost cell.

use crate::mesh::{Mesh, Neighbor};

/// Read access to cell and ghost averages. Reconstruction goes through this
/// trait only, so tests can observe which entries are read.
pub trait FieldAccess: Sync {
    fn ncomp(&self) -> usize;
    fn cell(&self, element: usize, comp: usize) -> f64;
    fn ghost(&self, ghost: usize, comp: usize) -> f64;

    /// Value across an adjacency entry; `None` for open boundary faces.
    fn neighbor(&self, neighbor: &Neighbor, comp: usize) -> Option<f64> {
        match neighbor {
            Neighbor::Element { id, .. } => Some(self.cell(*id, comp)),
            Neighbor::Ghost(g) => Some(self.ghost(*g, comp)),
            Neighbor::Open { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    ncomp: usize,
    cells: Vec<f64>,
    ghosts: Vec<f64>,
}

impl CellField {
    pub fn zeros(mesh: &Mesh, ncomp: usize) -> Self {
        Self { ncomp, cells: vec![0.0; mesh.num_elements() * ncomp], ghosts: vec![0.0; mesh.ghosts().len() * ncomp] }
    }

    /// Field from element-major values; ghost values start at zero.
    pub fn from_cells(mesh: &Mesh, ncomp: usize, cells: Vec<f64>) -> Self {
        assert_eq!(cells.len(), mesh.num_elements() * ncomp, "cell value count");
        Self { ncomp, cells, ghosts: vec![0.0; mesh.ghosts().len() * ncomp] }
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len() / self.ncomp
    }

    pub fn cell_values(&self) -> &[f64] {
        &self.cells
    }

    pub fn cell_values_mut(&mut self) -> &mut [f64] {
        &mut self.cells
    }

    pub fn ghost_values(&self) -> &[f64] {
        &self.ghosts
    }

    pub fn ghost_values_mut(&mut self) -> &mut [f64] {
        &mut self.ghosts
    }

    /// Cell values for reading and ghost values for writing at once.
    pub fn split_mut(&mut self) -> (&[f64], &mut [f64]) {
        (&self.cells, &mut self.ghosts)
    }

    pub fn state(&self, element: usize) -> &[f64] {
        &self.cells[element * self.ncomp..(element + 1) * self.ncomp]
    }

    pub fn state_mut(&mut self, element: usize) -> &mut [f64] {
        &mut self.cells[element * self.ncomp..(element + 1) * self.ncomp]
    }

    pub fn ghost_state(&self, ghost: usize) -> &[f64] {
        &self.ghosts[ghost * self.ncomp..(ghost + 1) * self.ncomp]
    }

    pub fn ghost_state_mut(&mut self, ghost: usize) -> &mut [f64] {
        &mut self.ghosts[ghost * self.ncomp..(ghost + 1) * self.ncomp]
    }

    /// Component `comp` of every cell.
    pub fn component(&self, comp: usize) -> Vec<f64> {
        self.cells.iter().skip(comp).step_by(self.ncomp).copied().collect()
    }
}

impl FieldAccess for CellField {
    fn ncomp(&self) -> usize {
        self.ncomp
    }

    fn cell(&self, element: usize, comp: usize) -> f64 {
        self.cells[element * self.ncomp + comp]
    }

    fn ghost(&self, ghost: usize, comp: usize) -> f64 {
        self.ghosts[ghost * self.ncomp + comp]
    }
}
