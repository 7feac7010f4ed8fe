//! Boundary conditions at the mesh level: ghost cells for Dirichlet and
//! slip-wall faces, and periodic identification of face pairs.

use std::collections::BTreeMap;

use super::geometry::{add, distance, dot, scale, sub, Point};
use super::{FaceNeighbor, Ghost, Mesh, MeshError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    SlipWall,
    /// Faces with this tag are identified with the faces tagged `partner`.
    Periodic {
        partner: i32,
    },
}

/// Boundary condition kind per boundary tag.
pub type BoundarySpec = BTreeMap<i32, BoundaryKind>;

/// Where the exterior cell of a boundary face sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GhostPlacement {
    /// Mirror image of the interior centroid across the face hyperplane.
    #[default]
    Reflected,
    /// Degenerate ghost located at the face centroid.
    FaceCentroid,
}

/// Attaches ghosts to every boundary face. Periodic face pairs are turned into
/// interior faces whose outer element carries a translation, so the
/// wrap-around partner appears as an ordinary neighbor.
pub fn attach_ghosts(mut mesh: Mesh, spec: &BoundarySpec, placement: GhostPlacement) -> Result<Mesh, MeshError> {
    if !mesh.ghosts().is_empty() {
        return Err(MeshError::GhostsAttached);
    }
    let mut by_tag: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (fid, face) in mesh.faces().iter().enumerate() {
        if let FaceNeighbor::Boundary { tag, ghost } = face.outer {
            if ghost.is_some() {
                return Err(MeshError::GhostsAttached);
            }
            if !spec.contains_key(&tag) {
                return Err(MeshError::MissingBoundaryCondition(tag));
            }
            by_tag.entry(tag).or_default().push(fid);
        }
    }

    // periodic pairs: the lower tag of each pair keeps the face
    let mut removed = vec![false; mesh.faces().len()];
    let mut relinked: Vec<(usize, usize, Point)> = Vec::new();
    for (&tag, faces) in &by_tag {
        let Some(BoundaryKind::Periodic { partner }) = spec.get(&tag).copied() else { continue };
        if partner <= tag {
            continue;
        }
        let partners = by_tag.get(&partner).ok_or(MeshError::PeriodicPartner { face: faces[0], tag })?;
        let mean = |ids: &[usize]| {
            let mut c = [0.0; 3];
            for &f in ids {
                c = add(&c, &mesh.faces()[f].centroid);
            }
            scale(1.0 / ids.len() as f64, &c)
        };
        let translation = sub(&mean(partners), &mean(faces));
        let length = dot(&translation, &translation).sqrt();
        let mut taken = vec![false; partners.len()];
        for &f in faces {
            let target = add(&mesh.faces()[f].centroid, &translation);
            let found = partners
                .iter()
                .enumerate()
                .find(|(k, &g)| !taken[*k] && distance(&mesh.faces()[g].centroid, &target) <= 1e-9 * (1.0 + length));
            let Some((k, &g)) = found else {
                return Err(MeshError::PeriodicPartner { face: f, tag });
            };
            taken[k] = true;
            removed[g] = true;
            relinked.push((f, mesh.faces()[g].inner, scale(-1.0, &translation)));
        }
        if taken.iter().any(|t| !t) {
            let k = taken.iter().position(|t| !t).unwrap_or(0);
            return Err(MeshError::PeriodicPartner { face: partners[k], tag: partner });
        }
    }
    for (f, element, shift) in relinked {
        mesh.faces_mut()[f].outer = FaceNeighbor::Interior { element, shift };
    }
    if removed.iter().any(|&r| r) {
        let faces = std::mem::take(mesh.faces_mut());
        *mesh.faces_mut() = faces.into_iter().zip(&removed).filter(|(_, &r)| !r).map(|(f, _)| f).collect();
    }

    let mut ghosts = Vec::new();
    for (fid, face) in mesh.faces_mut().iter_mut().enumerate() {
        if let FaceNeighbor::Boundary { tag, .. } = face.outer {
            let kind = spec[&tag];
            if let BoundaryKind::Periodic { .. } = kind {
                return Err(MeshError::PeriodicPartner { face: fid, tag });
            }
            ghosts.push((fid, face.inner, tag, kind));
            face.outer = FaceNeighbor::Boundary { tag, ghost: Some(ghosts.len() - 1) };
        }
    }
    let ghosts = ghosts
        .into_iter()
        .map(|(fid, element, tag, kind)| {
            let face = &mesh.faces()[fid];
            let centroid = match placement {
                GhostPlacement::FaceCentroid => face.centroid,
                GhostPlacement::Reflected => {
                    let xe = mesh.element(element).centroid;
                    let depth = dot(&sub(&face.centroid, &xe), &face.normal);
                    add(&xe, &scale(2.0 * depth, &face.normal))
                }
            };
            Ghost { face: fid, element, centroid, tag, kind }
        })
        .collect();
    mesh.set_ghosts(ghosts);
    mesh.rebuild_adjacency();
    Ok(mesh)
}

/// Every boundary tag of the mesh mapped to the same kind.
pub fn uniform_spec(mesh: &Mesh, kind: BoundaryKind) -> BoundarySpec {
    mesh.boundary_tags().into_iter().map(|t| (t, kind)).collect()
}

/// Periodic identification of opposite sides of an axis-aligned box tagged
/// with [`super::BoundaryTagging::AxisSides`].
pub fn periodic_box_spec(dim: usize) -> BoundarySpec {
    let mut spec = BoundarySpec::new();
    for axis in 0..dim as i32 {
        spec.insert(1 + 2 * axis, BoundaryKind::Periodic { partner: 2 + 2 * axis });
        spec.insert(2 + 2 * axis, BoundaryKind::Periodic { partner: 1 + 2 * axis });
    }
    spec
}
