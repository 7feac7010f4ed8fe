//! Structured mesh generators and refinement rules.

use std::collections::{HashMap, VecDeque};

use super::geometry::{add, scale, Point};
use super::{BoundaryTagging, ElementKind, FaceNeighbor, Mesh, MeshError};

/// Tensor-product grid on the box `[lower, upper]` with `counts[i]` cells
/// along axis `i`. Elements are numbered with the first axis fastest.
pub fn build_cartesian(lower: &[f64], upper: &[f64], counts: &[usize]) -> Result<Mesh, MeshError> {
    let dim = counts.len();
    if !(1..=3).contains(&dim) || lower.len() != dim || upper.len() != dim {
        return Err(MeshError::UnsupportedDimension(dim));
    }
    for axis in 0..dim {
        if !(upper[axis] > lower[axis]) || !lower[axis].is_finite() || !upper[axis].is_finite() {
            return Err(MeshError::InvalidExtent { axis, lower: lower[axis], upper: upper[axis] });
        }
        if counts[axis] == 0 {
            return Err(MeshError::ZeroCells { axis });
        }
    }
    let mut n = [1usize; 3];
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    n[..dim].copy_from_slice(counts);
    lo[..dim].copy_from_slice(lower);
    hi[..dim].copy_from_slice(upper);
    let nv = [n[0] + 1, if dim > 1 { n[1] + 1 } else { 1 }, if dim > 2 { n[2] + 1 } else { 1 }];
    let coord = |axis: usize, i: usize| {
        if i == n[axis] {
            hi[axis]
        } else {
            lo[axis] + (hi[axis] - lo[axis]) * i as f64 / n[axis] as f64
        }
    };
    let mut vertices = Vec::with_capacity(nv[0] * nv[1] * nv[2]);
    for k in 0..nv[2] {
        for j in 0..nv[1] {
            for i in 0..nv[0] {
                let mut p = [0.0; 3];
                p[0] = coord(0, i);
                if dim > 1 {
                    p[1] = coord(1, j);
                }
                if dim > 2 {
                    p[2] = coord(2, k);
                }
                vertices.push(p);
            }
        }
    }
    let vid = |i: usize, j: usize, k: usize| i + nv[0] * (j + nv[1] * k);
    let mut cells = Vec::with_capacity(n[0] * n[1] * n[2]);
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let cell = match dim {
                    1 => (ElementKind::Segment, vec![vid(i, 0, 0), vid(i + 1, 0, 0)]),
                    2 => (ElementKind::Quadrilateral, vec![vid(i, j, 0), vid(i + 1, j, 0), vid(i + 1, j + 1, 0), vid(i, j + 1, 0)]),
                    _ => (
                        ElementKind::Hexahedron,
                        vec![
                            vid(i, j, k),
                            vid(i + 1, j, k),
                            vid(i + 1, j + 1, k),
                            vid(i, j + 1, k),
                            vid(i, j, k + 1),
                            vid(i + 1, j, k + 1),
                            vid(i + 1, j + 1, k + 1),
                            vid(i, j + 1, k + 1),
                        ],
                    ),
                };
                cells.push(cell);
            }
        }
    }
    Mesh::from_elements(dim, vertices, cells, BoundaryTagging::AxisSides)
}

/// Shared-midpoint bookkeeping for refinement.
struct Midpoints<'a> {
    vertices: &'a mut Vec<Point>,
    map: HashMap<(usize, usize), usize>,
}

impl Midpoints<'_> {
    fn get(&mut self, a: usize, b: usize) -> usize {
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&m) = self.map.get(&key) {
            return m;
        }
        let p = scale(0.5, &add(&self.vertices[a], &self.vertices[b]));
        self.vertices.push(p);
        let id = self.vertices.len() - 1;
        self.map.insert(key, id);
        id
    }

    fn center(&mut self, vs: &[usize]) -> usize {
        let mut c = [0.0; 3];
        for &v in vs {
            c = add(&c, &self.vertices[v]);
        }
        self.vertices.push(scale(1.0 / vs.len() as f64, &c));
        self.vertices.len() - 1
    }
}

fn split_quad(mid: &mut Midpoints<'_>, v: &[usize]) -> [Vec<usize>; 4] {
    let m01 = mid.get(v[0], v[1]);
    let m12 = mid.get(v[1], v[2]);
    let m23 = mid.get(v[2], v[3]);
    let m30 = mid.get(v[3], v[0]);
    let c = mid.center(v);
    [vec![v[0], m01, c, m30], vec![m01, v[1], m12, c], vec![c, m12, v[2], m23], vec![m30, c, m23, v[3]]]
}

fn split_triangle(mid: &mut Midpoints<'_>, v: &[usize]) -> [Vec<usize>; 4] {
    let ab = mid.get(v[0], v[1]);
    let bc = mid.get(v[1], v[2]);
    let ca = mid.get(v[2], v[0]);
    [vec![v[0], ab, ca], vec![ab, v[1], bc], vec![ca, bc, v[2]], vec![ab, bc, ca]]
}

/// Boundary tags of the parent mesh carried over to the children: each
/// boundary edge `(a, b)` passes its tag to `(a, m)` and `(m, b)` when it was
/// split, and keeps it otherwise.
fn inherited_tags(mesh: &Mesh, mid: &HashMap<(usize, usize), usize>) -> BoundaryTagging {
    let mut tags = HashMap::new();
    for face in mesh.faces() {
        if let FaceNeighbor::Boundary { tag, .. } = face.outer {
            let (a, b) = (face.vertices[0], face.vertices[1]);
            let key = if a < b { (a, b) } else { (b, a) };
            match mid.get(&key) {
                Some(&m) => {
                    tags.insert(sorted(&[a, m]), tag);
                    tags.insert(sorted(&[m, b]), tag);
                }
                None => {
                    tags.insert(sorted(&[a, b]), tag);
                }
            }
        }
    }
    BoundaryTagging::Explicit { tags, default: 0 }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// Uniform refinement of a conforming 2D mesh: triangles are split into four
/// congruent children through their edge midpoints, quadrilaterals into four
/// by bisection.
pub fn uniform_refine(mesh: &Mesh) -> Result<Mesh, MeshError> {
    if !mesh.is_conforming() {
        return Err(MeshError::NonConforming("uniform refinement"));
    }
    let mut vertices = mesh.vertices().to_vec();
    let mut mid = Midpoints { vertices: &mut vertices, map: HashMap::new() };
    let mut cells = Vec::with_capacity(4 * mesh.num_elements());
    for el in mesh.elements() {
        let children = match el.kind {
            ElementKind::Triangle => split_triangle(&mut mid, &el.vertices),
            ElementKind::Quadrilateral => split_quad(&mut mid, &el.vertices),
            kind => return Err(MeshError::UnsupportedElement { kind, op: "uniform refinement" }),
        };
        cells.extend(children.into_iter().map(|c| (el.kind, c)));
    }
    let map = mid.map;
    let tagging = inherited_tags(mesh, &map);
    Mesh::from_elements(2, vertices, cells, tagging)
}

/// Two-coloring of the element adjacency graph, `None` if not bipartite.
pub fn two_coloring(mesh: &Mesh) -> Option<Vec<u8>> {
    let n = mesh.num_elements();
    let mut color = vec![u8::MAX; n];
    for start in 0..n {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(e) = queue.pop_front() {
            for adj in mesh.adjacency(e) {
                if let super::Neighbor::Element { id, shift } = adj.neighbor {
                    if shift != [0.0; 3] {
                        continue;
                    }
                    if color[id] == u8::MAX {
                        color[id] = 1 - color[e];
                        queue.push_back(id);
                    } else if color[id] == color[e] {
                        return None;
                    }
                }
            }
        }
    }
    Some(color)
}

/// Refines every element of one color class of a conforming quadrilateral
/// mesh into four, leaving the other class coarse. Each coarse element then
/// borders its refined neighbors through two sub-faces with a hanging node.
pub fn checkerboard_refine(mesh: &Mesh) -> Result<Mesh, MeshError> {
    if !mesh.is_conforming() {
        return Err(MeshError::NonConforming("checkerboard refinement"));
    }
    if let Some(el) = mesh.elements().iter().find(|e| e.kind != ElementKind::Quadrilateral) {
        return Err(MeshError::UnsupportedElement { kind: el.kind, op: "checkerboard refinement" });
    }
    let color = two_coloring(mesh).ok_or(MeshError::NotTwoColorable)?;
    let mut vertices = mesh.vertices().to_vec();
    let mut mid = Midpoints { vertices: &mut vertices, map: HashMap::new() };
    let mut cells = Vec::new();
    for (e, el) in mesh.elements().iter().enumerate() {
        if color[e] == 1 {
            let children = split_quad(&mut mid, &el.vertices);
            cells.extend(children.into_iter().map(|c| (ElementKind::Quadrilateral, c)));
        } else {
            cells.push((ElementKind::Quadrilateral, el.vertices.clone()));
        }
    }
    let map = mid.map;
    let tagging = inherited_tags(mesh, &map);
    Mesh::from_elements(2, vertices, cells, tagging)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::geometry::{dot, sub};
    use crate::mesh::Neighbor;

    fn normal_closure_residual(mesh: &Mesh) -> f64 {
        let mut worst: f64 = 0.0;
        for e in 0..mesh.num_elements() {
            let mut s = [0.0; 3];
            let mut surface = 0.0;
            for adj in mesh.adjacency(e) {
                let f = &mesh.faces()[adj.face];
                s = add(&s, &scale(f.measure, &mesh.oriented_normal(adj)));
                surface += f.measure;
            }
            worst = worst.max(dot(&s, &s).sqrt() / surface);
        }
        worst
    }

    #[test]
    fn unit_square_two_by_two() {
        let m = build_cartesian(&[0.0, 0.0], &[1.0, 1.0], &[2, 2]).unwrap();
        assert_eq!(m.num_elements(), 4);
        let expected = [[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]];
        for (el, c) in m.elements().iter().zip(expected) {
            assert!((el.measure - 0.25).abs() < 1e-15);
            assert!((el.centroid[0] - c[0]).abs() < 1e-15 && (el.centroid[1] - c[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_interval_neighbors() {
        let m = build_cartesian(&[0.0], &[1.0], &[4]).unwrap();
        let offsets: Vec<(usize, f64)> = m
            .adjacency(1)
            .iter()
            .filter_map(|a| match a.neighbor {
                Neighbor::Element { id, .. } => Some((id, m.element(id).centroid[0] - m.element(1).centroid[0])),
                _ => None,
            })
            .collect();
        assert_eq!(offsets.len(), 2);
        assert!(offsets.iter().any(|&(id, d)| id == 0 && (d + 0.25).abs() < 1e-15));
        assert!(offsets.iter().any(|&(id, d)| id == 2 && (d - 0.25).abs() < 1e-15));
    }

    #[test]
    fn unit_cube_center_has_six_neighbors() {
        let m = build_cartesian(&[0.0; 3], &[1.0; 3], &[3, 3, 3]).unwrap();
        assert_eq!(m.num_elements(), 27);
        let interior = m.adjacency(13).iter().filter(|a| matches!(a.neighbor, Neighbor::Element { .. })).count();
        assert_eq!(interior, 6);
        assert!(normal_closure_residual(&m) < 1e-12);
        assert!((m.total_measure() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_extent_and_counts() {
        assert!(matches!(build_cartesian(&[1.0], &[0.0], &[2]), Err(MeshError::InvalidExtent { axis: 0, .. })));
        assert!(matches!(build_cartesian(&[0.0, 0.0], &[1.0, 1.0], &[2, 0]), Err(MeshError::ZeroCells { axis: 1 })));
    }

    #[test]
    fn single_triangle_refines_into_four() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let m = Mesh::from_elements(2, v, vec![(ElementKind::Triangle, vec![0, 1, 2])], BoundaryTagging::AxisSides).unwrap();
        let r = uniform_refine(&m).unwrap();
        assert_eq!(r.num_elements(), 4);
        assert!((r.total_measure() - 0.5).abs() < 1e-14);
        for el in r.elements() {
            assert!((el.measure - 0.125).abs() < 1e-15);
        }
        // hypotenuse keeps tag 0, legs keep their side tags
        assert_eq!(r.boundary_tags(), vec![0, 1, 3]);
    }

    #[test]
    fn cartesian_quads_refine_to_sixteen() {
        let m = build_cartesian(&[0.0, 0.0], &[1.0, 1.0], &[2, 2]).unwrap();
        let r = uniform_refine(&m).unwrap();
        assert_eq!(r.num_elements(), 16);
        assert!(r.is_conforming());
        assert!(normal_closure_residual(&r) < 1e-12);
    }

    #[test]
    fn checkerboard_counts_and_hanging_faces() {
        let mut elements = Vec::new();
        let mut hanging = Vec::new();
        for n in [8usize, 16, 32] {
            let m = checkerboard_refine(&build_cartesian(&[0.0, 0.0], &[1.0, 1.0], &[n, n]).unwrap()).unwrap();
            assert!((m.total_measure() - 1.0).abs() < 1e-12);
            assert!(normal_closure_residual(&m) < 1e-12);
            elements.push(m.num_elements());
            hanging.push(m.hanging_faces());
        }
        assert_eq!(elements, vec![160, 640, 2560]);
        // each interior edge of the n×n grid becomes two fine sub-faces: 4n(n-1)
        assert_eq!(hanging, vec![4 * 8 * 7, 4 * 16 * 15, 4 * 32 * 31]);
    }

    #[test]
    fn odd_cycle_is_not_two_colorable() {
        // hexagon split into three quads around its center
        let mut v = vec![[0.0, 0.0, 0.0]];
        for k in 0..6 {
            let a = std::f64::consts::PI / 3.0 * k as f64;
            v.push([a.cos(), a.sin(), 0.0]);
        }
        let cells = (0..3)
            .map(|q| {
                let b = 1 + 2 * q;
                (ElementKind::Quadrilateral, vec![0, b, b + 1, if b + 2 > 6 { 1 } else { b + 2 }])
            })
            .collect();
        let m = Mesh::from_elements(2, v, cells, BoundaryTagging::AxisSides).unwrap();
        assert_eq!(checkerboard_refine(&m).unwrap_err(), MeshError::NotTwoColorable);
    }

    #[test]
    fn coarse_cell_sees_two_fine_neighbors_per_edge() {
        let m = checkerboard_refine(&build_cartesian(&[0.0, 0.0], &[1.0, 1.0], &[8, 8]).unwrap()).unwrap();
        // interior coarse cells: 4 edges × 2 sub-faces
        let coarse = (0..m.num_elements()).filter(|&e| (m.element(e).measure - 1.0 / 64.0).abs() < 1e-15).collect::<Vec<_>>();
        assert_eq!(coarse.len(), 32);
        let interior_coarse =
            coarse.iter().find(|&&e| m.adjacency(e).iter().all(|a| matches!(a.neighbor, Neighbor::Element { .. }))).copied().unwrap();
        assert_eq!(m.adjacency(interior_coarse).len(), 8);
        // adjacency symmetry
        for e in 0..m.num_elements() {
            for adj in m.adjacency(e) {
                if let Neighbor::Element { id, .. } = adj.neighbor {
                    assert!(m
                        .adjacency(id)
                        .iter()
                        .any(|b| b.face == adj.face && b.neighbor == Neighbor::Element { id: e, shift: [0.0; 3] }));
                    let f = &m.faces()[adj.face];
                    let out = sub(&f.centroid, &m.element(e).centroid);
                    assert!(dot(&out, &m.oriented_normal(adj)) > 0.0);
                }
            }
        }
    }

    #[test]
    fn checkerboard_rejects_triangles() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let m = Mesh::from_elements(2, v, vec![(ElementKind::Triangle, vec![0, 1, 2])], BoundaryTagging::AxisSides).unwrap();
        assert!(matches!(checkerboard_refine(&m), Err(MeshError::UnsupportedElement { .. })));
    }
}
