//! Reader for Gmsh MSH 2.2 ASCII files.
//!
//! Grammar accepted (one item per line, whitespace separated):
//!
//! ```text
//! $MeshFormat
//! 2.2 0 <data-size>            version must be 2.2, file-type 0 (ASCII)
//! $EndMeshFormat
//! $Nodes
//! <count>
//! <node-id> <x> <y> <z>        repeated <count> times, ids arbitrary
//! $EndNodes
//! $Elements
//! <count>
//! <id> <type> <ntags> <tag>... <node-id>...
//! $EndElements
//! ```
//!
//! Any other `$Section ... $EndSection` block (`$PhysicalNames`,
//! `$Periodic`, ...) is skipped. Element types: 1 (line), 2 (triangle),
//! 3 (quadrilateral), 4 (tetrahedron) and 15 (point). The mesh dimension is
//! the largest element dimension present; elements one dimension lower
//! assign their first tag (the physical group) to the matching boundary
//! facets, elements two or more dimensions lower are ignored. Points
//! (type 15) are ignored unless [`MshOptions::strict`] is set, in which case
//! they are rejected. Every other element type is an error.

use std::collections::HashMap;

use super::geometry::Point;
use super::{BoundaryTagging, ElementKind, Mesh, MeshError};

#[derive(Debug, Clone, Copy, Default)]
pub struct MshOptions {
    /// Reject point elements (type 15) instead of ignoring them.
    pub strict: bool,
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse { line, message: message.into() }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), MeshError> {
        self.next().ok_or_else(|| parse_err(self.last, format!("unexpected end of file, expected {what}")))
    }

    fn expect_exact(&mut self, token: &str) -> Result<(), MeshError> {
        let (n, l) = self.expect(token)?;
        if l != token {
            return Err(parse_err(n, format!("expected {token}, found {l:?}")));
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T, MeshError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} {tok:?}")))
}

struct RawElement {
    line: usize,
    kind: Option<ElementKind>,
    dim: usize,
    tag: i32,
    nodes: Vec<usize>,
}

pub fn read_gmsh_msh(bytes: &[u8]) -> Result<Mesh, MeshError> {
    read_gmsh_msh_with(bytes, MshOptions::default())
}

pub fn read_gmsh_msh_with(bytes: &[u8], options: MshOptions) -> Result<Mesh, MeshError> {
    let text = std::str::from_utf8(bytes).map_err(|e| parse_err(0, format!("not valid UTF-8 text: {e}")))?;
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };

    let (n, first) = lines.expect("$MeshFormat")?;
    if first != "$MeshFormat" {
        return Err(parse_err(n, format!("expected $MeshFormat, found {first:?}")));
    }
    let (n, header) = lines.expect("format header")?;
    let mut it = header.split_whitespace();
    let version = it.next().unwrap_or("");
    if version != "2.2" && version != "2.2.0" {
        return Err(parse_err(n, format!("unsupported MSH version {version:?} (only 2.2 ASCII is read)")));
    }
    let file_type: i32 = parse_num(n, it.next(), "file type")?;
    if file_type != 0 {
        return Err(parse_err(n, "binary MSH files are not supported"));
    }
    lines.expect_exact("$EndMeshFormat")?;

    let mut node_index: HashMap<u64, usize> = HashMap::new();
    let mut points: Vec<Point> = Vec::new();
    let mut raw: Vec<RawElement> = Vec::new();
    let mut seen_nodes = false;
    let mut seen_elements = false;

    while let Some((n, l)) = lines.next() {
        match l {
            "$Nodes" => {
                let (cn, c) = lines.expect("node count")?;
                let count: usize = parse_num(cn, Some(c), "node count")?;
                points.reserve(count);
                for _ in 0..count {
                    let (ln, l) = lines.expect("node line")?;
                    let mut it = l.split_whitespace();
                    let id: u64 = parse_num(ln, it.next(), "node id")?;
                    let x: f64 = parse_num(ln, it.next(), "x coordinate")?;
                    let y: f64 = parse_num(ln, it.next(), "y coordinate")?;
                    let z: f64 = parse_num(ln, it.next(), "z coordinate")?;
                    if node_index.insert(id, points.len()).is_some() {
                        return Err(parse_err(ln, format!("duplicate node id {id}")));
                    }
                    points.push([x, y, z]);
                }
                lines.expect_exact("$EndNodes")?;
                seen_nodes = true;
            }
            "$Elements" => {
                let (cn, c) = lines.expect("element count")?;
                let count: usize = parse_num(cn, Some(c), "element count")?;
                for _ in 0..count {
                    let (ln, l) = lines.expect("element line")?;
                    let mut it = l.split_whitespace();
                    let _id: u64 = parse_num(ln, it.next(), "element id")?;
                    let ty: u32 = parse_num(ln, it.next(), "element type")?;
                    let ntags: usize = parse_num(ln, it.next(), "tag count")?;
                    let mut tags = Vec::with_capacity(ntags);
                    for _ in 0..ntags {
                        tags.push(parse_num::<i32>(ln, it.next(), "tag")?);
                    }
                    let (kind, dim, nn) = match ty {
                        1 => (None, 1, 2),
                        2 => (Some(ElementKind::Triangle), 2, 3),
                        3 => (Some(ElementKind::Quadrilateral), 2, 4),
                        4 => (Some(ElementKind::Tetrahedron), 3, 4),
                        15 => {
                            if options.strict {
                                return Err(parse_err(ln, "point elements (type 15) rejected in strict mode"));
                            }
                            continue;
                        }
                        other => return Err(parse_err(ln, format!("unsupported element type {other}"))),
                    };
                    let mut nodes = Vec::with_capacity(nn);
                    for _ in 0..nn {
                        let id: u64 = parse_num(ln, it.next(), "node reference")?;
                        nodes.push(id as usize);
                    }
                    raw.push(RawElement { line: ln, kind, dim, tag: tags.first().copied().unwrap_or(0), nodes });
                }
                lines.expect_exact("$EndElements")?;
                seen_elements = true;
            }
            s if s.starts_with('$') && !s.starts_with("$End") => {
                let end = format!("$End{}", &s[1..]);
                loop {
                    let (_, l) = lines.expect(&end)?;
                    if l == end {
                        break;
                    }
                }
            }
            other => return Err(parse_err(n, format!("unexpected content {other:?}"))),
        }
    }
    if !seen_nodes {
        return Err(parse_err(lines.last, "missing $Nodes section"));
    }
    if !seen_elements {
        return Err(parse_err(lines.last, "missing $Elements section"));
    }

    // resolve node ids
    for el in &mut raw {
        for node in &mut el.nodes {
            *node =
                *node_index.get(&(*node as u64)).ok_or_else(|| parse_err(el.line, format!("element references unknown node {node}")))?;
        }
    }

    let dim = raw.iter().map(|e| e.dim).max().ok_or_else(|| parse_err(lines.last, "no elements"))?;
    let mut cells = Vec::new();
    let mut tags = HashMap::new();
    for el in raw {
        if el.dim == dim {
            let kind = el.kind.unwrap_or(ElementKind::Segment);
            cells.push((kind, el.nodes));
        } else if el.dim + 1 == dim {
            let mut key = el.nodes;
            key.sort_unstable();
            tags.insert(key, el.tag);
        }
    }
    Mesh::from_elements(dim, points, cells, BoundaryTagging::Explicit { tags, default: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::FaceNeighbor;

    const ONE_TET: &str = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n$Elements\n1\n1 4 2 7 7 1 2 3 4\n$EndElements\n";

    #[test]
    fn single_tetrahedron() {
        let m = read_gmsh_msh(ONE_TET.as_bytes()).unwrap();
        assert_eq!(m.dim(), 3);
        assert_eq!(m.num_elements(), 1);
        assert_eq!(m.faces().len(), 4);
        assert!((m.element(0).measure - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn two_tetrahedra_share_a_face() {
        let text = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$PhysicalNames\n1\n2 5 \"wall\"\n$EndPhysicalNames\n$Nodes\n5\n10 0 0 0\n20 1 0 0\n30 0 1 0\n40 0 0 1\n50 1 1 1\n$EndNodes\n$Elements\n3\n1 2 2 5 1 10 20 30\n2 4 2 1 1 10 20 30 40\n3 4 2 1 1 20 30 40 50\n$EndElements\n";
        let m = read_gmsh_msh(text.as_bytes()).unwrap();
        assert_eq!(m.num_elements(), 2);
        let interior = m.faces().iter().filter(|f| matches!(f.outer, FaceNeighbor::Interior { .. })).count();
        assert_eq!(interior, 1);
        assert_eq!(m.faces().len() - interior, 6);
        assert_eq!(m.boundary_tags(), vec![0, 5]);
    }

    #[test]
    fn point_elements_follow_strictness() {
        let text = ONE_TET.replace("$Elements\n1\n", "$Elements\n2\n9 15 2 3 3 1\n");
        assert_eq!(read_gmsh_msh(text.as_bytes()).unwrap().num_elements(), 1);
        let err = read_gmsh_msh_with(text.as_bytes(), MshOptions { strict: true }).unwrap_err();
        assert!(matches!(err, MeshError::Parse { line: 13, .. }), "{err:?}");
    }

    #[test]
    fn rejects_other_versions_and_types() {
        let v4 = ONE_TET.replace("2.2 0 8", "4.1 0 8");
        assert!(matches!(read_gmsh_msh(v4.as_bytes()), Err(MeshError::Parse { line: 2, .. })));
        let bin = ONE_TET.replace("2.2 0 8", "2.2 1 8");
        assert!(matches!(read_gmsh_msh(bin.as_bytes()), Err(MeshError::Parse { line: 2, .. })));
        let hex = ONE_TET.replace("1 4 2 7 7 1 2 3 4", "1 5 2 7 7 1 2 3 4 1 2 3 4");
        assert!(matches!(read_gmsh_msh(hex.as_bytes()), Err(MeshError::Parse { line: 13, .. })));
    }

    #[test]
    fn dangling_node_reference() {
        let text = ONE_TET.replace("1 4 2 7 7 1 2 3 4", "1 4 2 7 7 1 2 3 9");
        let err = read_gmsh_msh(text.as_bytes()).unwrap_err();
        assert!(matches!(err, MeshError::Parse { line: 13, ref message } if message.contains("unknown node 9")), "{err:?}");
    }
}
