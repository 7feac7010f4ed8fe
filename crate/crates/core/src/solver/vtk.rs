use std::io::Write;

use crate::field::CellField;
use crate::mesh::Mesh;

/// Writes `mesh` and the cell data of `field` as a legacy ASCII VTK
/// unstructured grid. `names` labels the components.
pub fn write_vtk<W: Write>(out: &mut W, mesh: &Mesh, field: &CellField, names: &[&str]) -> std::io::Result<()> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "muscl cell data")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.vertices().len())?;
    for v in mesh.vertices() {
        writeln!(out, "{:.17e} {:.17e} {:.17e}", v[0], v[1], v[2])?;
    }
    let elements = mesh.elements();
    let size: usize = elements.iter().map(|e| e.vertices.len() + 1).sum();
    writeln!(out, "CELLS {} {}", elements.len(), size)?;
    for el in elements {
        write!(out, "{}", el.vertices.len())?;
        for v in &el.vertices {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {}", elements.len())?;
    for el in elements {
        writeln!(out, "{}", el.kind.vtk_id())?;
    }
    writeln!(out, "CELL_DATA {}", elements.len())?;
    for k in 0..field.ncomp() {
        let name = names.get(k).map(|s| s.to_string()).unwrap_or_else(|| format!("u{k}"));
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for e in 0..elements.len() {
            writeln!(out, "{:.17e}", field.state(e)[k])?;
        }
    }
    Ok(())
}
