//! Scalar models: the quadratic flux with a manufactured solution, and
//! linear advection.

use std::f64::consts::PI;

use super::Model;
use crate::mesh::Point;

/// `F(u) = (u², …, u²)` in `dim` space dimensions, optionally with the
/// manufactured source.
#[derive(Debug, Clone)]
pub struct QuadraticScalar {
    dim: usize,
    source: Option<Manufactured>,
}

impl QuadraticScalar {
    pub fn new(dim: usize) -> Self {
        Self { dim, source: None }
    }

    pub fn with_source(dim: usize, source: Manufactured) -> Self {
        Self { dim, source: Some(source) }
    }

    pub fn flux(u: f64) -> [f64; 2] {
        [u * u, u * u]
    }
}

fn normal_sum(normal: &Point, dim: usize) -> f64 {
    normal[..dim].iter().sum()
}

impl Model for QuadraticScalar {
    fn ncomp(&self) -> usize {
        1
    }

    fn normal_flux(&self, u: &[f64], _x: &Point, normal: &Point, out: &mut [f64]) {
        out[0] = u[0] * u[0] * normal_sum(normal, self.dim);
    }

    fn max_speed(&self, u: &[f64], _x: &Point, normal: &Point) -> f64 {
        (2.0 * u[0] * normal_sum(normal, self.dim)).abs()
    }

    fn source(&self, x: &Point, t: f64, out: &mut [f64]) -> bool {
        match &self.source {
            Some(s) => {
                out[0] = s.source(x, t);
                true
            }
            None => false,
        }
    }
}

/// The travelling wave `u = A sin(2π(x₁ − t)) sin(2π(x₂ − t))` and the
/// source that makes it a solution of the quadratic balance law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub amplitude: f64,
}

impl Default for Manufactured {
    fn default() -> Self {
        Self { amplitude: 0.2 }
    }
}

impl Manufactured {
    fn phases(x: &Point, t: f64) -> (f64, f64) {
        (2.0 * PI * (x[0] - t), 2.0 * PI * (x[1] - t))
    }

    pub fn solution(&self, x: &Point, t: f64) -> f64 {
        let (a, b) = Self::phases(x, t);
        self.amplitude * a.sin() * b.sin()
    }

    /// `(∂₁u, ∂₂u)`.
    pub fn gradient(&self, x: &Point, t: f64) -> [f64; 2] {
        let (a, b) = Self::phases(x, t);
        let k = 2.0 * PI * self.amplitude;
        [k * a.cos() * b.sin(), k * a.sin() * b.cos()]
    }

    /// `s = ∂_t u + ∂₁u² + ∂₂u² = (2u − 1)(∂₁u + ∂₂u)`, using
    /// `∂_t u = −(∂₁u + ∂₂u)`.
    pub fn source(&self, x: &Point, t: f64) -> f64 {
        let u = self.solution(x, t);
        let [ux, uy] = self.gradient(x, t);
        (2.0 * u - 1.0) * (ux + uy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Velocity {
    /// Counter-clockwise solid rotation `v = (c₂ − y, x − c₁)`.
    Rotation {
        center: [f64; 2],
    },
    Constant(Point),
}

impl Velocity {
    pub fn at(&self, x: &Point) -> Point {
        match self {
            Velocity::Rotation { center } => [center[1] - x[1], x[0] - center[0], 0.0],
            Velocity::Constant(v) => *v,
        }
    }
}

/// `F(u, x) = v(x) u`.
#[derive(Debug, Clone)]
pub struct LinearAdvection {
    pub velocity: Velocity,
}

impl LinearAdvection {
    pub fn rotation() -> Self {
        Self { velocity: Velocity::Rotation { center: [0.5, 0.5] } }
    }

    pub fn constant(v: Point) -> Self {
        Self { velocity: Velocity::Constant(v) }
    }

    pub fn flux(&self, u: f64, x: &Point) -> Point {
        let v = self.velocity.at(x);
        [v[0] * u, v[1] * u, v[2] * u]
    }
}

impl Model for LinearAdvection {
    fn ncomp(&self) -> usize {
        1
    }

    fn normal_flux(&self, u: &[f64], x: &Point, normal: &Point, out: &mut [f64]) {
        let v = self.velocity.at(x);
        out[0] = (v[0] * normal[0] + v[1] * normal[1] + v[2] * normal[2]) * u[0];
    }

    fn max_speed(&self, _u: &[f64], x: &Point, normal: &Point) -> f64 {
        let v = self.velocity.at(x);
        (v[0] * normal[0] + v[1] * normal[1] + v[2] * normal[2]).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn quadratic_flux_values() {
        assert_eq!(QuadraticScalar::flux(0.5), [0.25, 0.25]);
        assert_eq!(QuadraticScalar::flux(0.0), [0.0, 0.0]);
        let f = QuadraticScalar::flux(-0.2);
        assert!((f[0] - 0.04).abs() < 1e-17 && f[0] == f[1]);
    }

    #[test]
    fn rotation_velocity() {
        let a = LinearAdvection::rotation();
        assert_eq!(a.flux(1.0, &[0.5, 0.5, 0.0]), [0.0, 0.0, 0.0]);
        assert_eq!(a.flux(1.0, &[1.0, 0.5, 0.0]), [0.0, 0.5, 0.0]);
        assert_eq!(a.flux(0.0, &[0.1, 0.9, 0.0]), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn rotation_is_divergence_free() {
        let v = Velocity::Rotation { center: [0.5, 0.5] };
        let h = 1e-6;
        let x = [0.3, 0.8, 0.0];
        let div = (v.at(&[x[0] + h, x[1], 0.0])[0] - v.at(&[x[0] - h, x[1], 0.0])[0]) / (2.0 * h)
            + (v.at(&[x[0], x[1] + h, 0.0])[1] - v.at(&[x[0], x[1] - h, 0.0])[1]) / (2.0 * h);
        assert!(div.abs() < 1e-12);
    }

    #[test]
    fn manufactured_source_matches_finite_differences() {
        let m = Manufactured::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let h = 1e-5;
        for _ in 0..1000 {
            let x = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), 0.0];
            let t = rng.random_range(0.0..0.3);
            let u = |x: [f64; 3], t: f64| m.solution(&x, t);
            let ut = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
            let f = |x: [f64; 3]| u(x, t).powi(2);
            let div = (f([x[0] + h, x[1], 0.0]) - f([x[0] - h, x[1], 0.0])) / (2.0 * h)
                + (f([x[0], x[1] + h, 0.0]) - f([x[0], x[1] - h, 0.0])) / (2.0 * h);
            assert!((m.source(&x, t) - (ut + div)).abs() < 1e-6);
        }
    }

    #[test]
    fn manufactured_source_travels_with_the_wave() {
        let m = Manufactured::default();
        let d = 0.137;
        for &(x, y, t) in &[(0.1, 0.2, 0.0), (0.7, 0.4, 0.25), (0.9, 0.05, 0.1)] {
            let a = m.source(&[x, y, 0.0], t);
            let b = m.source(&[x + d, y + d, 0.0], t + d);
            assert!((a - b).abs() < 1e-13);
        }
        // zero of u with u_x = 0: x₁ − t = 0, x₂ − t = ¼ → s = −(u_x + u_y) = −u_x
        let s = m.source(&[0.0, 0.25, 0.0], 0.0);
        assert!((s - -(2.0 * PI * 0.2)).abs() < 1e-14);
    }

    #[test]
    fn manufactured_source_integral_identity() {
        // ∫_Ω s = d/dt ∫_Ω u + ∮ u² (ν₁ + ν₂) on the unit square
        let m = Manufactured::default();
        let t = 0.11;
        let n = 400;
        let h = 1.0 / n as f64;
        let (nodes, weights) = crate::mesh::geometry::gauss_legendre_unit(4);
        let mut int_s = 0.0;
        let mut int_u_plus = 0.0;
        let mut int_u_minus = 0.0;
        let dt = 1e-5;
        for i in 0..n {
            for j in 0..n {
                for (a, wa) in nodes.iter().zip(&weights) {
                    for (b, wb) in nodes.iter().zip(&weights) {
                        let x = [(i as f64 + a) * h, (j as f64 + b) * h, 0.0];
                        let w = wa * wb * h * h;
                        int_s += w * m.source(&x, t);
                        int_u_plus += w * m.solution(&x, t + dt);
                        int_u_minus += w * m.solution(&x, t - dt);
                    }
                }
            }
        }
        let mut boundary = 0.0;
        for i in 0..n {
            for (a, wa) in nodes.iter().zip(&weights) {
                let s = (i as f64 + a) * h;
                let w = wa * h;
                boundary += w * (m.solution(&[1.0, s, 0.0], t).powi(2) - m.solution(&[0.0, s, 0.0], t).powi(2));
                boundary += w * (m.solution(&[s, 1.0, 0.0], t).powi(2) - m.solution(&[s, 0.0, 0.0], t).powi(2));
            }
        }
        let ddt = (int_u_plus - int_u_minus) / (2.0 * dt);
        assert!((int_s - (ddt + boundary)).abs() < 1e-8, "{int_s} vs {}", ddt + boundary);
    }
}
