//! Polytopal meshes with face adjacency, hanging-node interfaces and ghost
//! cells.
//!
//! A [`Mesh`] is immutable once built. Faces are stored once; each element
//! keeps an ordered adjacency list `(neighbor, face, orientation)` that the
//! reconstruction and the flux assembly both iterate in the same order.
//!
//! Non-conforming interfaces are stored at the fine level: a coarse element
//! that borders two refined elements across one of its edges sees two
//! distinct sub-faces.

pub mod generators;
pub mod geometry;
pub mod ghosts;
pub mod msh;
pub mod native;

use std::collections::HashMap;

pub use generators::{build_cartesian, checkerboard_refine, uniform_refine};
pub use geometry::Point;
pub use ghosts::{attach_ghosts, periodic_box_spec, uniform_spec, BoundaryKind, BoundarySpec, GhostPlacement};
pub use msh::{read_gmsh_msh, read_gmsh_msh_with, MshOptions};
pub use native::{read_native, unit_square_123, write_native};

use geometry::{add, average, distance, dot, norm, polygon_area_vector, scale, sub, Simplex};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum MeshError {
    #[error("invalid extent on axis {axis}: lower {lower} must be below upper {upper}")]
    InvalidExtent { axis: usize, lower: f64, upper: f64 },
    #[error("cell count on axis {axis} must be at least 1")]
    ZeroCells { axis: usize },
    #[error("unsupported spatial dimension {0}")]
    UnsupportedDimension(usize),
    #[error("element {element} has non-positive measure {measure}")]
    DegenerateElement { element: usize, measure: f64 },
    #[error("element {element} references vertex {vertex} which does not exist")]
    DanglingVertex { element: usize, vertex: usize },
    #[error("facet {0:?} is shared by more than two elements")]
    NonManifold(Vec<usize>),
    #[error("{op} does not support {kind:?} elements")]
    UnsupportedElement { kind: ElementKind, op: &'static str },
    #[error("element adjacency is not two-colorable")]
    NotTwoColorable,
    #[error("{0} requires a conforming mesh")]
    NonConforming(&'static str),
    #[error("boundary tag {0} has no boundary condition")]
    MissingBoundaryCondition(i32),
    #[error("periodic boundary face {face} (tag {tag}) has no geometric partner")]
    PeriodicPartner { face: usize, tag: i32 },
    #[error("boundary conditions already attached")]
    GhostsAttached,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Segment,
    Triangle,
    Quadrilateral,
    Tetrahedron,
    /// Vertex order as in VTK: bottom face counter-clockwise, then top face.
    Hexahedron,
}

impl ElementKind {
    pub fn dim(self) -> usize {
        match self {
            ElementKind::Segment => 1,
            ElementKind::Triangle | ElementKind::Quadrilateral => 2,
            ElementKind::Tetrahedron | ElementKind::Hexahedron => 3,
        }
    }

    pub fn vertex_count(self) -> usize {
        match self {
            ElementKind::Segment => 2,
            ElementKind::Triangle => 3,
            ElementKind::Quadrilateral | ElementKind::Tetrahedron => 4,
            ElementKind::Hexahedron => 8,
        }
    }

    /// Local vertex lists of the facets, polygon facets in cyclic order.
    pub fn facets(self) -> &'static [&'static [usize]] {
        match self {
            ElementKind::Segment => &[&[0], &[1]],
            ElementKind::Triangle => &[&[0, 1], &[1, 2], &[2, 0]],
            ElementKind::Quadrilateral => &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
            ElementKind::Tetrahedron => &[&[1, 2, 3], &[0, 2, 3], &[0, 1, 3], &[0, 1, 2]],
            ElementKind::Hexahedron => &[&[0, 3, 2, 1], &[4, 5, 6, 7], &[0, 1, 5, 4], &[1, 2, 6, 5], &[2, 3, 7, 6], &[3, 0, 4, 7]],
        }
    }

    /// VTK cell type id.
    pub fn vtk_id(self) -> u8 {
        match self {
            ElementKind::Segment => 3,
            ElementKind::Triangle => 5,
            ElementKind::Quadrilateral => 9,
            ElementKind::Tetrahedron => 10,
            ElementKind::Hexahedron => 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    pub vertices: Vec<usize>,
    pub centroid: Point,
    pub measure: f64,
    /// Largest vertex-to-vertex distance.
    pub diameter: f64,
}

/// What lies on the far side of a face, seen from its `inner` element.
#[derive(Debug, Clone, PartialEq)]
pub enum FaceNeighbor {
    /// Another element. `shift` translates the outer element into the frame
    /// of the inner one (non-zero only across periodic boundaries).
    Interior { element: usize, shift: Point },
    /// Domain boundary; `ghost` is set once boundary conditions are attached.
    Boundary { tag: i32, ghost: Option<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub centroid: Point,
    /// Unit normal pointing out of `inner`.
    pub normal: Point,
    pub measure: f64,
    pub inner: usize,
    pub outer: FaceNeighbor,
}

/// Neighbor of an element as seen from that element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighbor {
    /// `shift` maps the neighbor's coordinates into this element's frame.
    Element {
        id: usize,
        shift: Point,
    },
    Ghost(usize),
    /// Boundary face without an attached ghost.
    Open {
        tag: i32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adjacency {
    pub neighbor: Neighbor,
    pub face: usize,
    /// `+1` if the element is the face's `inner` side, `-1` otherwise.
    pub orientation: f64,
}

/// Exterior cell attached to a boundary face.
#[derive(Debug, Clone, PartialEq)]
pub struct Ghost {
    pub face: usize,
    pub element: usize,
    pub centroid: Point,
    pub tag: i32,
    pub kind: BoundaryKind,
}

/// How boundary faces receive their tags during construction.
#[derive(Debug, Clone, Default)]
pub enum BoundaryTagging {
    /// Tag axis-aligned boundary faces by outward normal: `-x → 1`, `+x → 2`,
    /// `-y → 3`, `+y → 4`, `-z → 5`, `+z → 6`; anything else gets 0.
    #[default]
    AxisSides,
    /// Tags keyed by the sorted vertex list of the boundary facet; missing
    /// facets fall back to `default`.
    Explicit { tags: HashMap<Vec<usize>, i32>, default: i32 },
}

#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Point>,
    elements: Vec<Element>,
    faces: Vec<Face>,
    adjacency: Vec<Vec<Adjacency>>,
    ghosts: Vec<Ghost>,
    hanging_faces: usize,
}

fn axis_tag(normal: &Point) -> i32 {
    for axis in 0..3 {
        if normal[axis] <= -1.0 + 1e-9 {
            return 1 + 2 * axis as i32;
        }
        if normal[axis] >= 1.0 - 1e-9 {
            return 2 + 2 * axis as i32;
        }
    }
    0
}

fn sorted_key(vertices: &[usize]) -> Vec<usize> {
    let mut k = vertices.to_vec();
    k.sort_unstable();
    k
}

struct Facet {
    element: usize,
    vertices: Vec<usize>,
}

impl Mesh {
    /// Builds a mesh from raw vertex and element lists, deriving faces,
    /// adjacency (including single hanging nodes in 2D) and boundary tags.
    pub fn from_elements(
        dim: usize,
        vertices: Vec<Point>,
        cells: Vec<(ElementKind, Vec<usize>)>,
        tagging: BoundaryTagging,
    ) -> Result<Mesh, MeshError> {
        if !(1..=3).contains(&dim) {
            return Err(MeshError::UnsupportedDimension(dim));
        }
        let mut elements = Vec::with_capacity(cells.len());
        for (id, (kind, vs)) in cells.into_iter().enumerate() {
            if kind.dim() != dim {
                return Err(MeshError::UnsupportedElement { kind, op: "mesh of this dimension" });
            }
            if let Some(&v) = vs.iter().find(|&&v| v >= vertices.len()) {
                return Err(MeshError::DanglingVertex { element: id, vertex: v });
            }
            let points: Vec<Point> = vs.iter().map(|&v| vertices[v]).collect();
            let (measure, centroid) = geometry::measure_and_centroid(&element_simplices(kind, &points));
            if !(measure > 0.0) {
                return Err(MeshError::DegenerateElement { element: id, measure });
            }
            let mut diameter: f64 = 0.0;
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    diameter = diameter.max(distance(&points[i], &points[j]));
                }
            }
            elements.push(Element { kind, vertices: vs, centroid, measure, diameter });
        }

        let mut facets = Vec::new();
        for (e, el) in elements.iter().enumerate() {
            for local in el.kind.facets() {
                facets.push(Facet { element: e, vertices: local.iter().map(|&i| el.vertices[i]).collect() });
            }
        }

        // conforming pairs
        let mut partner: Vec<Option<usize>> = vec![None; facets.len()];
        let mut by_key: HashMap<Vec<usize>, usize> = HashMap::with_capacity(facets.len());
        for (i, f) in facets.iter().enumerate() {
            let key = sorted_key(&f.vertices);
            match by_key.get(&key) {
                Some(&j) => {
                    if partner[j].is_some() {
                        return Err(MeshError::NonManifold(key));
                    }
                    partner[j] = Some(i);
                    partner[i] = Some(j);
                }
                None => {
                    by_key.insert(key, i);
                }
            }
        }

        // single hanging nodes: coarse edge (a, b) against fine edges (a, m), (m, b)
        let mut hanging: HashMap<usize, [usize; 2]> = HashMap::new();
        let mut is_fine = vec![false; facets.len()];
        if dim == 2 {
            let mut by_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
            for (i, f) in facets.iter().enumerate() {
                if partner[i].is_none() {
                    for &v in &f.vertices {
                        by_vertex.entry(v).or_default().push(i);
                    }
                }
            }
            for i in 0..facets.len() {
                if partner[i].is_some() || is_fine[i] {
                    continue;
                }
                let (a, b) = (facets[i].vertices[0], facets[i].vertices[1]);
                let len = distance(&vertices[a], &vertices[b]);
                let candidates = by_vertex.get(&a).cloned().unwrap_or_default();
                'search: for g in candidates {
                    if g == i || is_fine[g] || hanging.contains_key(&g) || facets[g].element == facets[i].element {
                        continue;
                    }
                    let m = if facets[g].vertices[0] == a { facets[g].vertices[1] } else { facets[g].vertices[0] };
                    if m == b {
                        continue;
                    }
                    let gap = distance(&vertices[a], &vertices[m]) + distance(&vertices[m], &vertices[b]) - len;
                    if gap.abs() > 1e-12 * len {
                        continue;
                    }
                    for &h in by_vertex.get(&b).map(|v| v.as_slice()).unwrap_or(&[]) {
                        if h == i || h == g || is_fine[h] || facets[h].element == facets[i].element {
                            continue;
                        }
                        if facets[h].vertices.contains(&m) {
                            hanging.insert(i, [g, h]);
                            is_fine[g] = true;
                            is_fine[h] = true;
                            break 'search;
                        }
                    }
                }
            }
        }

        let mut faces = Vec::new();
        let hanging_faces = 2 * hanging.len();
        for (i, f) in facets.iter().enumerate() {
            if is_fine[i] {
                continue;
            }
            if let Some(j) = partner[i] {
                if i < j {
                    faces.push(make_face(
                        dim,
                        &vertices,
                        &elements,
                        f.element,
                        &f.vertices,
                        FaceNeighbor::Interior { element: facets[j].element, shift: geometry::ORIGIN },
                    ));
                }
            } else if let Some(fine) = hanging.get(&i) {
                for &g in fine {
                    faces.push(make_face(
                        dim,
                        &vertices,
                        &elements,
                        f.element,
                        &facets[g].vertices,
                        FaceNeighbor::Interior { element: facets[g].element, shift: geometry::ORIGIN },
                    ));
                }
            } else {
                let mut face = make_face(dim, &vertices, &elements, f.element, &f.vertices, FaceNeighbor::Boundary { tag: 0, ghost: None });
                let tag = match &tagging {
                    BoundaryTagging::AxisSides => axis_tag(&face.normal),
                    BoundaryTagging::Explicit { tags, default } => *tags.get(&sorted_key(&f.vertices)).unwrap_or(default),
                };
                face.outer = FaceNeighbor::Boundary { tag, ghost: None };
                faces.push(face);
            }
        }

        let mut mesh = Mesh { dim, vertices, elements, faces, adjacency: Vec::new(), ghosts: Vec::new(), hanging_faces };
        mesh.rebuild_adjacency();
        Ok(mesh)
    }

    pub(crate) fn rebuild_adjacency(&mut self) {
        let mut adjacency = vec![Vec::new(); self.elements.len()];
        for (fid, face) in self.faces.iter().enumerate() {
            match &face.outer {
                FaceNeighbor::Interior { element, shift } => {
                    adjacency[face.inner].push(Adjacency {
                        neighbor: Neighbor::Element { id: *element, shift: *shift },
                        face: fid,
                        orientation: 1.0,
                    });
                    adjacency[*element].push(Adjacency {
                        neighbor: Neighbor::Element { id: face.inner, shift: scale(-1.0, shift) },
                        face: fid,
                        orientation: -1.0,
                    });
                }
                FaceNeighbor::Boundary { tag, ghost } => {
                    let neighbor = match ghost {
                        Some(g) => Neighbor::Ghost(*g),
                        None => Neighbor::Open { tag: *tag },
                    };
                    adjacency[face.inner].push(Adjacency { neighbor, face: fid, orientation: 1.0 });
                }
            }
        }
        self.adjacency = adjacency;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> &Element {
        &self.elements[id]
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn ghosts(&self) -> &[Ghost] {
        &self.ghosts
    }

    pub fn adjacency(&self, element: usize) -> &[Adjacency] {
        &self.adjacency[element]
    }

    /// Number of fine sub-faces created across hanging nodes.
    pub fn hanging_faces(&self) -> usize {
        self.hanging_faces
    }

    pub fn is_conforming(&self) -> bool {
        self.hanging_faces == 0
    }

    /// Largest element diameter.
    pub fn max_diameter(&self) -> f64 {
        self.elements.iter().map(|e| e.diameter).fold(0.0, f64::max)
    }

    pub fn total_measure(&self) -> f64 {
        self.elements.iter().map(|e| e.measure).sum()
    }

    /// Boundary tags present on the mesh, sorted.
    pub fn boundary_tags(&self) -> Vec<i32> {
        let mut tags: Vec<i32> = self
            .faces
            .iter()
            .filter_map(|f| match f.outer {
                FaceNeighbor::Boundary { tag, .. } => Some(tag),
                _ => None,
            })
            .collect();
        tags.sort_unstable();
        tags.dedup();
        tags
    }

    /// Centroid of a neighbor in the frame of `element`.
    pub fn neighbor_centroid(&self, neighbor: &Neighbor) -> Option<Point> {
        match neighbor {
            Neighbor::Element { id, shift } => Some(add(&self.elements[*id].centroid, shift)),
            Neighbor::Ghost(g) => Some(self.ghosts[*g].centroid),
            Neighbor::Open { .. } => None,
        }
    }

    /// Simplicial decomposition of an element (fan from the vertex average
    /// for non-simplicial kinds).
    pub fn simplices(&self, element: usize) -> Vec<Simplex> {
        let el = &self.elements[element];
        let points: Vec<Point> = el.vertices.iter().map(|&v| self.vertices[v]).collect();
        element_simplices(el.kind, &points)
    }

    /// Outward unit normal of `face` as seen from the element with the given
    /// adjacency orientation.
    pub fn oriented_normal(&self, adj: &Adjacency) -> Point {
        scale(adj.orientation, &self.faces[adj.face].normal)
    }

    /// Centroid of the face of `adj` in the frame of the element owning the
    /// adjacency entry (differs from the stored centroid only for the outer
    /// side of a periodic face).
    pub fn face_centroid_from(&self, adj: &Adjacency) -> Point {
        let c = self.faces[adj.face].centroid;
        match adj.neighbor {
            Neighbor::Element { shift, .. } if adj.orientation < 0.0 => add(&c, &shift),
            _ => c,
        }
    }

    pub(crate) fn faces_mut(&mut self) -> &mut Vec<Face> {
        &mut self.faces
    }

    pub(crate) fn set_ghosts(&mut self, ghosts: Vec<Ghost>) {
        self.ghosts = ghosts;
    }
}

pub(crate) fn element_simplices(kind: ElementKind, points: &[Point]) -> Vec<Simplex> {
    match kind {
        ElementKind::Segment | ElementKind::Triangle | ElementKind::Tetrahedron => {
            vec![Simplex::new(points.to_vec())]
        }
        ElementKind::Quadrilateral => {
            let c = average(points);
            (0..4).map(|i| Simplex::new(vec![c, points[i], points[(i + 1) % 4]])).collect()
        }
        ElementKind::Hexahedron => {
            let c = average(points);
            let mut out = Vec::with_capacity(24);
            for facet in kind.facets() {
                let fp: Vec<Point> = facet.iter().map(|&i| points[i]).collect();
                let fc = average(&fp);
                for i in 0..fp.len() {
                    out.push(Simplex::new(vec![c, fc, fp[i], fp[(i + 1) % fp.len()]]));
                }
            }
            out
        }
    }
}

fn make_face(dim: usize, vertices: &[Point], elements: &[Element], inner: usize, face_vertices: &[usize], outer: FaceNeighbor) -> Face {
    let points: Vec<Point> = face_vertices.iter().map(|&v| vertices[v]).collect();
    let xe = elements[inner].centroid;
    let (measure, centroid, mut normal) = match dim {
        1 => (1.0, points[0], [1.0, 0.0, 0.0]),
        2 => {
            let t = sub(&points[1], &points[0]);
            let len = norm(&t);
            (len, average(&points), [t[1] / len, -t[0] / len, 0.0])
        }
        _ => {
            let (area, c) = polygon_area_vector(&points);
            let m = norm(&area);
            (m, c, scale(1.0 / m, &area))
        }
    };
    if dot(&normal, &sub(&centroid, &xe)) < 0.0 {
        normal = scale(-1.0, &normal);
    }
    Face { vertices: face_vertices.to_vec(), centroid, normal, measure, inner, outer }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Mesh {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]];
        let cells = vec![(ElementKind::Triangle, vec![0, 1, 2]), (ElementKind::Triangle, vec![0, 2, 3])];
        Mesh::from_elements(2, v, cells, BoundaryTagging::AxisSides).unwrap()
    }

    #[test]
    fn shared_edge_becomes_one_interior_face() {
        let m = two_triangles();
        assert_eq!(m.faces().len(), 5);
        let interior: Vec<_> = m.faces().iter().filter(|f| matches!(f.outer, FaceNeighbor::Interior { .. })).collect();
        assert_eq!(interior.len(), 1);
        assert!((interior[0].measure - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.adjacency(0).len(), 3);
        assert_eq!(m.boundary_tags(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn degenerate_element_rejected() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]];
        let err = Mesh::from_elements(2, v, vec![(ElementKind::Triangle, vec![0, 1, 2])], BoundaryTagging::AxisSides).unwrap_err();
        assert!(matches!(err, MeshError::DegenerateElement { element: 0, .. }));
    }

    #[test]
    fn dangling_vertex_rejected() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
        let err = Mesh::from_elements(2, v, vec![(ElementKind::Triangle, vec![0, 1, 5])], BoundaryTagging::AxisSides).unwrap_err();
        assert_eq!(err, MeshError::DanglingVertex { element: 0, vertex: 5 });
    }

    #[test]
    fn quad_centroid_matches_diagonal_split() {
        // irregular convex quad: fan decomposition against a two-triangle split
        let p = [[0.0, 0.0, 0.0], [3.0, 0.2, 0.0], [2.5, 2.0, 0.0], [0.3, 1.4, 0.0]];
        let fan = geometry::measure_and_centroid(&element_simplices(ElementKind::Quadrilateral, &p));
        let split = geometry::measure_and_centroid(&[Simplex::new(vec![p[0], p[1], p[2]]), Simplex::new(vec![p[0], p[2], p[3]])]);
        assert!((fan.0 - split.0).abs() < 1e-14);
        for k in 0..2 {
            assert!((fan.1[k] - split.1[k]).abs() < 1e-14);
        }
    }
}
