//! Compressible Euler equations for an ideal gas in conserved variables
//! `U = (ρ, ρv, E)`.

use super::{Model, NumericalFlux, PhysicsError};
use crate::mesh::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler {
    pub dim: usize,
    pub gamma: f64,
    pub flux: NumericalFlux,
}

impl Euler {
    pub fn new(dim: usize) -> Self {
        Self { dim, gamma: 1.4, flux: NumericalFlux::Llf }
    }

    pub fn with_flux(mut self, flux: NumericalFlux) -> Self {
        self.flux = flux;
        self
    }

    pub fn ncomp(&self) -> usize {
        self.dim + 2
    }

    pub fn velocity(&self, u: &[f64]) -> Point {
        let mut v = [0.0; 3];
        for i in 0..self.dim {
            v[i] = u[1 + i] / u[0];
        }
        v
    }

    fn kinetic(&self, rho: f64, v: &Point) -> f64 {
        0.5 * rho * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    }

    pub fn pressure(&self, u: &[f64]) -> f64 {
        let v = self.velocity(u);
        (self.gamma - 1.0) * (u[self.dim + 1] - self.kinetic(u[0], &v))
    }

    pub fn sound_speed(&self, u: &[f64]) -> f64 {
        (self.gamma * self.pressure(u) / u[0]).sqrt()
    }

    /// `U` from density, velocity and pressure.
    pub fn conserved(&self, rho: f64, v: &Point, p: f64, out: &mut [f64]) {
        out[0] = rho;
        for i in 0..self.dim {
            out[1 + i] = rho * v[i];
        }
        out[self.dim + 1] = p / (self.gamma - 1.0) + self.kinetic(rho, v);
    }

    /// `(ρ, v, p)` from `U`.
    pub fn primitive(&self, u: &[f64], out: &mut [f64]) {
        let v = self.velocity(u);
        out[0] = u[0];
        out[1..=self.dim].copy_from_slice(&v[..self.dim]);
        out[self.dim + 1] = self.pressure(u);
    }

    pub fn is_physical(&self, u: &[f64]) -> bool {
        u.iter().all(|v| v.is_finite()) && u[0] > 0.0 && self.pressure(u) > 0.0
    }

    fn check(&self, u: &[f64]) -> Result<(), PhysicsError> {
        if self.is_physical(u) {
            Ok(())
        } else {
            Err(PhysicsError::NonPhysical { density: u[0], pressure: self.pressure(u) })
        }
    }

    /// Physical flux `F(U)·ν`.
    pub fn flux_normal(&self, u: &[f64], normal: &Point, out: &mut [f64]) {
        let v = self.velocity(u);
        let p = self.pressure(u);
        let vn: f64 = (0..self.dim).map(|i| v[i] * normal[i]).sum();
        out[0] = u[0] * vn;
        for i in 0..self.dim {
            out[1 + i] = u[1 + i] * vn + p * normal[i];
        }
        out[self.dim + 1] = (u[self.dim + 1] + p) * vn;
    }

    /// HLL flux with the wave speed estimates
    /// `S_L = min(v_L·ν − c_L, v_R·ν − c_R)`, `S_R = max(v_L·ν + c_L, v_R·ν + c_R)`.
    pub fn hll(&self, left: &[f64], right: &[f64], normal: &Point, out: &mut [f64]) -> Result<(), PhysicsError> {
        self.check(left)?;
        self.check(right)?;
        let n = self.ncomp();
        let (vl, vr) = (self.velocity(left), self.velocity(right));
        let vnl: f64 = (0..self.dim).map(|i| vl[i] * normal[i]).sum();
        let vnr: f64 = (0..self.dim).map(|i| vr[i] * normal[i]).sum();
        let (cl, cr) = (self.sound_speed(left), self.sound_speed(right));
        let sl = (vnl - cl).min(vnr - cr);
        let sr = (vnl + cl).max(vnr + cr);
        let mut fl = [0.0; 5];
        let mut fr = [0.0; 5];
        self.flux_normal(left, normal, &mut fl[..n]);
        self.flux_normal(right, normal, &mut fr[..n]);
        for k in 0..n {
            out[k] = if sl >= 0.0 {
                fl[k]
            } else if sr <= 0.0 {
                fr[k]
            } else {
                (sr * fl[k] - sl * fr[k] + sl * sr * (right[k] - left[k])) / (sr - sl)
            };
        }
        Ok(())
    }
}

impl Model for Euler {
    fn ncomp(&self) -> usize {
        self.dim + 2
    }

    fn normal_flux(&self, u: &[f64], _x: &Point, normal: &Point, out: &mut [f64]) {
        self.flux_normal(u, normal, out);
    }

    fn max_speed(&self, u: &[f64], _x: &Point, normal: &Point) -> f64 {
        let v = self.velocity(u);
        let vn: f64 = (0..self.dim).map(|i| v[i] * normal[i]).sum();
        vn.abs() + self.sound_speed(u)
    }

    fn numerical_flux(&self, left: &[f64], right: &[f64], x: &Point, normal: &Point, out: &mut [f64]) -> Result<(), PhysicsError> {
        match self.flux {
            NumericalFlux::Llf => {
                self.check(left)?;
                self.check(right)?;
                super::llf(self, left, right, x, normal, out);
                Ok(())
            }
            NumericalFlux::Hll => self.hll(left, right, normal, out),
        }
    }

    /// Limited variables `(ρ, v, E)`.
    fn to_limited(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
        for i in 0..self.dim {
            out[1 + i] = u[1 + i] / u[0];
        }
        out[self.dim + 1] = u[self.dim + 1];
    }

    fn conserved_from_limited(&self, w: &[f64], out: &mut [f64]) {
        out[0] = w[0];
        for i in 0..self.dim {
            out[1 + i] = w[0] * w[1 + i];
        }
        out[self.dim + 1] = w[self.dim + 1];
    }

    fn is_admissible(&self, u: &[f64]) -> bool {
        self.is_physical(u)
    }

    fn mirror(&self, u: &[f64], normal: &Point, out: &mut [f64]) {
        out.copy_from_slice(u);
        let mn: f64 = (0..self.dim).map(|i| u[1 + i] * normal[i]).sum();
        for i in 0..self.dim {
            out[1 + i] = u[1 + i] - 2.0 * mn * normal[i];
        }
    }
}
