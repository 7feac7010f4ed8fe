//! Model problems: physical fluxes, numerical fluxes, the Euler system and
//! its exact Riemann solver.

pub mod euler;
pub mod riemann;
pub mod scalar;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::Point;

pub use euler::Euler;
pub use riemann::{exact_riemann_euler, sample_riemann, Primitive, RiemannSolution, Wave};
pub use scalar::{LinearAdvection, Manufactured, QuadraticScalar, Velocity};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicsError {
    #[error("non-physical state (density {density}, pressure {pressure})")]
    NonPhysical { density: f64, pressure: f64 },
    #[error("Riemann data generates vacuum")]
    Vacuum,
    #[error("Newton iteration for the star pressure did not converge")]
    NoConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericalFlux {
    /// Local Lax-Friedrichs (Rusanov).
    #[default]
    Llf,
    /// Harten-Lax-van Leer, Euler only.
    Hll,
}

/// A balance law `∂_t u + ∇·F(u, x) = s(x, t)` as seen by the finite-volume
/// scheme.
pub trait Model: Send + Sync {
    fn ncomp(&self) -> usize;

    /// `F(u, x)·ν` into `out`.
    fn normal_flux(&self, u: &[f64], x: &Point, normal: &Point, out: &mut [f64]);

    /// Spectral radius of `∂(F·ν)/∂u`.
    fn max_speed(&self, u: &[f64], x: &Point, normal: &Point) -> f64;

    /// Numerical flux per unit face measure from the `left` trace (inside,
    /// `normal` points away from it) to the `right` trace.
    fn numerical_flux(&self, left: &[f64], right: &[f64], x: &Point, normal: &Point, out: &mut [f64]) -> Result<(), PhysicsError> {
        llf(self, left, right, x, normal, out);
        Ok(())
    }

    /// Writes `s(x, t)` into `out` and returns `true` if the model has a
    /// source term.
    fn source(&self, _x: &Point, _t: f64, _out: &mut [f64]) -> bool {
        false
    }

    /// Conversion into the variables that are reconstructed.
    fn to_limited(&self, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(u);
    }

    fn conserved_from_limited(&self, w: &[f64], out: &mut [f64]) {
        out.copy_from_slice(w);
    }

    /// State admissibility (finite, and physical for gas dynamics).
    fn is_admissible(&self, u: &[f64]) -> bool {
        u.iter().all(|v| v.is_finite())
    }

    /// Reflection of a state across a wall with unit normal `normal`.
    fn mirror(&self, u: &[f64], _normal: &Point, out: &mut [f64]) {
        out.copy_from_slice(u);
    }
}

/// Local Lax-Friedrichs flux
/// `½(F(a) + F(b))·ν − ½ λ (b − a)` with `λ = max(λ(a), λ(b))`.
pub fn llf<M: Model + ?Sized>(model: &M, a: &[f64], b: &[f64], x: &Point, normal: &Point, out: &mut [f64]) {
    let n = model.ncomp();
    let mut fa = [0.0; 8];
    let mut fb = [0.0; 8];
    model.normal_flux(a, x, normal, &mut fa[..n]);
    model.normal_flux(b, x, normal, &mut fb[..n]);
    let lambda = model.max_speed(a, x, normal).max(model.max_speed(b, x, normal));
    for k in 0..n {
        out[k] = 0.5 * (fa[k] + fb[k]) - 0.5 * lambda * (b[k] - a[k]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn llf_quadratic_hand_value() {
        let m = QuadraticScalar::new(2);
        let mut g = [0.0];
        llf(&m, &[0.0], &[1.0], &[0.0; 3], &[1.0, 0.0, 0.0], &mut g);
        assert_eq!(g[0], -0.5);
    }

    #[test]
    fn llf_consistency_and_antisymmetry() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = QuadraticScalar::new(2);
        for _ in 0..1000 {
            let a = [rng.random_range(-2.0..2.0)];
            let b = [rng.random_range(-2.0..2.0)];
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let nu = [t.cos(), t.sin(), 0.0];
            let neg = [-nu[0], -nu[1], 0.0];
            let (mut g, mut h) = ([0.0], [0.0]);
            llf(&m, &a, &b, &[0.0; 3], &nu, &mut g);
            llf(&m, &b, &a, &[0.0; 3], &neg, &mut h);
            assert_eq!(g[0], -h[0]);
            llf(&m, &a, &a, &[0.0; 3], &nu, &mut g);
            let mut f = [0.0];
            m.normal_flux(&a, &[0.0; 3], &nu, &mut f);
            assert_eq!(g[0], f[0]);
        }
    }
}
