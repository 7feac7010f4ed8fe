use crate::mesh::geometry::distance;
use crate::mesh::{BoundaryKind, BoundarySpec, Mesh, Point};
use crate::physics::{
    exact_riemann_euler, Euler, LinearAdvection, Manufactured, Model, NumericalFlux, Primitive, QuadraticScalar, RiemannSolution,
};
use crate::solver::{BoundaryFn, Projection};

use super::config::ProblemKind;
use super::BenchError;

const SLOT_CENTER: Point = [0.5, 0.75, 0.0];
const CONE_CENTER: Point = [0.5, 0.25, 0.0];
const HUMP_CENTER: Point = [0.25, 0.5, 0.0];
const RADIUS: f64 = 0.15;

/// Slotted cylinder, cone and smooth hump.
pub fn solid_rotation_initial(x: &Point) -> f64 {
    let p = [x[0], x[1], 0.0];
    if distance(&p, &SLOT_CENTER) <= RADIUS {
        let in_slot = (0.475..=0.525).contains(&x[0]) && (0.0..=0.85).contains(&x[1]);
        if in_slot {
            0.0
        } else {
            1.0
        }
    } else if distance(&p, &CONE_CENTER) <= RADIUS {
        1.0 - distance(&p, &CONE_CENTER) / RADIUS
    } else if distance(&p, &HUMP_CENTER) <= RADIUS {
        0.25 + 0.25 * (std::f64::consts::PI * distance(&p, &HUMP_CENTER) / RADIUS).cos()
    } else {
        0.0
    }
}

/// Exact rotation solution: the initial data rotated by angle `t` about the
/// centre of the unit square.
pub fn solid_rotation_exact(x: &Point, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let (dx, dy) = (x[0] - 0.5, x[1] - 0.5);
    solid_rotation_initial(&[0.5 + c * dx + s * dy, 0.5 - s * dx + c * dy, 0.0])
}

pub fn sod_states() -> (Primitive, Primitive) {
    (Primitive::new(1.0, 0.0, 1.0), Primitive::new(0.125, 0.0, 0.1))
}

pub fn p123_states() -> (Primitive, Primitive) {
    (Primitive::new(1.0, -2.0, 0.4), Primitive::new(1.0, 2.0, 0.4))
}

/// A benchmark problem on a mesh of a given dimension.
#[derive(Debug, Clone)]
pub struct Problem {
    pub kind: ProblemKind,
    pub dim: usize,
    pub flux: NumericalFlux,
    riemann: Option<RiemannSolution>,
}

impl Problem {
    pub fn new(kind: ProblemKind, dim: usize, flux: NumericalFlux) -> Result<Self, BenchError> {
        let need = |want: usize| {
            if dim == want {
                Ok(())
            } else {
                Err(BenchError::Config(format!("{kind:?} needs a {want}-dimensional mesh, got {dim}")))
            }
        };
        let riemann = match kind {
            ProblemKind::ManufacturedNonlinear | ProblemKind::SolidRotation => {
                need(2)?;
                None
            }
            ProblemKind::EulerSod | ProblemKind::EulerP123 => {
                let (l, r) = if kind == ProblemKind::EulerSod { sod_states() } else { p123_states() };
                Some(exact_riemann_euler(l, r, 1.4).map_err(|e| BenchError::Config(e.to_string()))?)
            }
        };
        if riemann.is_none() && flux == NumericalFlux::Hll {
            return Err(BenchError::Config("the HLL flux is only available for the Euler problems".into()));
        }
        Ok(Self { kind, dim, flux, riemann })
    }

    pub fn is_euler(&self) -> bool {
        self.riemann.is_some()
    }

    pub fn ncomp(&self) -> usize {
        if self.is_euler() {
            self.dim + 2
        } else {
            1
        }
    }

    pub fn model(&self) -> Box<dyn Model> {
        match self.kind {
            ProblemKind::ManufacturedNonlinear => Box::new(QuadraticScalar::with_source(2, Manufactured::default())),
            ProblemKind::SolidRotation => Box::new(LinearAdvection::rotation()),
            ProblemKind::EulerSod | ProblemKind::EulerP123 => Box::new(Euler::new(self.dim).with_flux(self.flux)),
        }
    }

    /// Dirichlet everywhere for the scalar problems; for the shock tubes
    /// tags 1 and 2 (the tube ends) are Dirichlet and all others slip walls.
    pub fn boundary_spec(&self, mesh: &Mesh) -> BoundarySpec {
        mesh.boundary_tags()
            .into_iter()
            .map(|tag| {
                let kind = if !self.is_euler() || tag == 1 || tag == 2 { BoundaryKind::Dirichlet } else { BoundaryKind::SlipWall };
                (tag, kind)
            })
            .collect()
    }

    pub fn projection(&self) -> Projection {
        match self.kind {
            ProblemKind::ManufacturedNonlinear => Projection::Smooth,
            _ => Projection::Discontinuous,
        }
    }

    fn conserved_from_primitive(&self, w: &Primitive, out: &mut [f64]) {
        Euler::new(self.dim).conserved(w.rho, &[w.u, 0.0, 0.0], w.p, out);
    }

    /// Initial data in conserved variables.
    pub fn initial(&self, x: &Point, out: &mut [f64]) {
        match self.kind {
            ProblemKind::ManufacturedNonlinear => out[0] = Manufactured::default().solution(x, 0.0),
            ProblemKind::SolidRotation => out[0] = solid_rotation_initial(x),
            _ => {
                let sol = self.riemann.as_ref().expect("Euler problem");
                let w = if x[0] < 0.0 { sol.left } else { sol.right };
                self.conserved_from_primitive(&w, out);
            }
        }
    }

    /// Dirichlet data in conserved variables.
    pub fn boundary(&self) -> Box<BoundaryFn> {
        let this = self.clone();
        match self.kind {
            ProblemKind::ManufacturedNonlinear => {
                let m = Manufactured::default();
                Box::new(move |x, t, out| out[0] = m.solution(x, t))
            }
            ProblemKind::SolidRotation => Box::new(|_, _, out| out[0] = 0.0),
            _ => Box::new(move |x, _, out| this.initial(x, out)),
        }
    }

    /// Exact solution in error variables (the scalar, or `(ρ, v, p)`).
    pub fn exact(&self, x: &Point, t: f64, out: &mut [f64]) {
        match self.kind {
            ProblemKind::ManufacturedNonlinear => out[0] = Manufactured::default().solution(x, t),
            ProblemKind::SolidRotation => out[0] = solid_rotation_exact(x, t),
            _ => {
                let sol = self.riemann.as_ref().expect("Euler problem");
                let w = if t > 0.0 {
                    sol.sample(x[0] / t)
                } else if x[0] < 0.0 {
                    sol.left
                } else {
                    sol.right
                };
                out.fill(0.0);
                out[0] = w.rho;
                out[1] = w.u;
                out[self.dim + 1] = w.p;
            }
        }
    }

    /// Converts a cell average into error variables.
    pub fn error_variables(&self, u: &[f64], out: &mut [f64]) {
        if self.is_euler() {
            Euler::new(self.dim).primitive(u, out);
        } else {
            out.copy_from_slice(u);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_initial_values() {
        assert_eq!(solid_rotation_initial(&HUMP_CENTER), 0.5);
        assert_eq!(solid_rotation_initial(&CONE_CENTER), 1.0);
        assert_eq!(solid_rotation_initial(&[0.5, 0.8, 0.0]), 0.0);
        assert_eq!(solid_rotation_initial(&[0.45, 0.75, 0.0]), 1.0);
        assert_eq!(solid_rotation_initial(&[0.9, 0.9, 0.0]), 0.0);
        assert!((solid_rotation_initial(&[0.5, 0.325, 0.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rotation_is_periodic() {
        for x in [[0.3, 0.6, 0.0], [0.5, 0.2, 0.0], [0.52, 0.7, 0.0]] {
            let a = solid_rotation_exact(&x, std::f64::consts::TAU);
            assert!((a - solid_rotation_initial(&x)).abs() < 1e-12);
        }
        // a quarter turn moves the cone centre to the right
        assert!((solid_rotation_exact(&[0.75, 0.5, 0.0], std::f64::consts::FRAC_PI_2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn euler_problem_states() {
        let p = Problem::new(ProblemKind::EulerSod, 3, NumericalFlux::Hll).unwrap();
        let mut u = [0.0; 5];
        p.initial(&[-0.5, 0.0, 0.0], &mut u);
        let mut w = [0.0; 5];
        p.error_variables(&u, &mut w);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[4] - 1.0).abs() < 1e-15);
        p.exact(&[2.0, 0.0, 0.0], 0.5, &mut w);
        assert_eq!(w, [0.125, 0.0, 0.0, 0.0, 0.1]);
        assert!(Problem::new(ProblemKind::SolidRotation, 3, NumericalFlux::Llf).is_err());
        assert!(Problem::new(ProblemKind::SolidRotation, 2, NumericalFlux::Hll).is_err());
    }
}
