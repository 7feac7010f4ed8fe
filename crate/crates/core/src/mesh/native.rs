//! Plain-text mesh format used for the shipped fixtures.
//!
//! ```text
//! # comments and blank lines are ignored
//! dim 2
//! vertices <n>
//! <x> <y> [<z>]                 n lines
//! elements <m>
//! <kind> <v0> <v1> ...          m lines, kind ∈ seg tri quad tet hex,
//!                               0-based vertex indices
//! boundary <k>                  optional section
//! <tag> <v0> <v1> ...           facet vertices carrying a boundary tag
//! ```
//!
//! Without a `boundary` section the boundary is tagged by axis direction
//! (see [`BoundaryTagging::AxisSides`]).

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{BoundaryTagging, ElementKind, FaceNeighbor, Mesh, MeshError};

fn kind_name(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::Segment => "seg",
        ElementKind::Triangle => "tri",
        ElementKind::Quadrilateral => "quad",
        ElementKind::Tetrahedron => "tet",
        ElementKind::Hexahedron => "hex",
    }
}

fn err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse { line, message: message.into() }
}

pub fn read_native(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim())).filter(|(_, l)| !l.is_empty());
    let mut header = |what: &str| -> Result<(usize, usize), MeshError> {
        let (n, l) = lines.next().ok_or_else(|| err(0, format!("missing {what}")))?;
        let mut it = l.split_whitespace();
        if it.next() != Some(what) {
            return Err(err(n, format!("expected {what}")));
        }
        let v = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| err(n, format!("invalid {what} count")))?;
        Ok((n, v))
    };
    let (_, dim) = header("dim")?;
    let (_, nv) = header("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines.next().ok_or_else(|| err(0, "truncated vertex list"))?;
        let mut p = [0.0; 3];
        for (k, tok) in l.split_whitespace().enumerate() {
            if k >= 3 {
                return Err(err(n, "too many coordinates"));
            }
            p[k] = tok.parse().map_err(|_| err(n, format!("invalid coordinate {tok:?}")))?;
        }
        vertices.push(p);
    }
    let (n, l) = lines.next().ok_or_else(|| err(0, "missing elements"))?;
    let ne: usize = l.strip_prefix("elements").and_then(|r| r.trim().parse().ok()).ok_or_else(|| err(n, "expected elements <count>"))?;
    let mut cells = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (n, l) = lines.next().ok_or_else(|| err(0, "truncated element list"))?;
        let mut it = l.split_whitespace();
        let kind = match it.next() {
            Some("seg") => ElementKind::Segment,
            Some("tri") => ElementKind::Triangle,
            Some("quad") => ElementKind::Quadrilateral,
            Some("tet") => ElementKind::Tetrahedron,
            Some("hex") => ElementKind::Hexahedron,
            other => return Err(err(n, format!("unknown element kind {other:?}"))),
        };
        let vs: Vec<usize> = it.map(|t| t.parse().map_err(|_| err(n, format!("invalid vertex index {t:?}")))).collect::<Result<_, _>>()?;
        if vs.len() != kind.vertex_count() {
            return Err(err(n, format!("{} needs {} vertices", kind_name(kind), kind.vertex_count())));
        }
        cells.push((kind, vs));
    }
    let tagging = match lines.next() {
        None => BoundaryTagging::AxisSides,
        Some((n, l)) => {
            let nb: usize =
                l.strip_prefix("boundary").and_then(|r| r.trim().parse().ok()).ok_or_else(|| err(n, "expected boundary <count>"))?;
            let mut tags = HashMap::new();
            for _ in 0..nb {
                let (n, l) = lines.next().ok_or_else(|| err(0, "truncated boundary list"))?;
                let mut it = l.split_whitespace();
                let tag: i32 = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| err(n, "invalid tag"))?;
                let mut key: Vec<usize> =
                    it.map(|t| t.parse().map_err(|_| err(n, format!("invalid vertex index {t:?}")))).collect::<Result<_, _>>()?;
                key.sort_unstable();
                tags.insert(key, tag);
            }
            BoundaryTagging::Explicit { tags, default: 0 }
        }
    };
    Mesh::from_elements(dim, vertices, cells, tagging)
}

/// Serializes vertices, elements and boundary tags in the native format.
pub fn write_native(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dim {}", mesh.dim());
    let _ = writeln!(s, "vertices {}", mesh.vertices().len());
    for p in mesh.vertices() {
        let coords: Vec<String> = p[..mesh.dim()].iter().map(|c| format!("{c:?}")).collect();
        let _ = writeln!(s, "{}", coords.join(" "));
    }
    let _ = writeln!(s, "elements {}", mesh.num_elements());
    for el in mesh.elements() {
        let vs: Vec<String> = el.vertices.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{} {}", kind_name(el.kind), vs.join(" "));
    }
    let boundary: Vec<(i32, &Vec<usize>)> = mesh
        .faces()
        .iter()
        .filter_map(|f| match f.outer {
            FaceNeighbor::Boundary { tag, .. } => Some((tag, &f.vertices)),
            _ => None,
        })
        .collect();
    let _ = writeln!(s, "boundary {}", boundary.len());
    for (tag, vs) in boundary {
        let vs: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{tag} {}", vs.join(" "));
    }
    s
}

/// The 123-triangle coarse Delaunay triangulation of the unit square shipped
/// with the crate.
pub fn unit_square_123() -> Mesh {
    read_native(include_str!("../../fixtures/unit_square_123.mesh")).expect("bundled fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_square_fixture() {
        let m = unit_square_123();
        assert_eq!(m.num_elements(), 123);
        assert!((m.total_measure() - 1.0).abs() < 1e-12);
        assert_eq!(m.boundary_tags(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn write_then_read_preserves_mesh() {
        let m = crate::mesh::build_cartesian(&[0.0, 0.0], &[1.0, 2.0], &[3, 2]).unwrap();
        let back = read_native(&write_native(&m)).unwrap();
        assert_eq!(back.elements(), m.elements());
        assert_eq!(back.faces(), m.faces());
    }

    #[test]
    fn wrong_vertex_count_reports_line() {
        let text = "dim 2\nvertices 3\n0 0\n1 0\n0 1\nelements 1\ntri 0 1\n";
        assert!(matches!(read_native(text), Err(MeshError::Parse { line: 7, .. })));
    }
}
