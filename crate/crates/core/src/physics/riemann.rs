//! Exact Riemann solver for the one-dimensional Euler equations of an ideal
//! gas (Newton iteration on the pressure function, Toro's formulation).

use super::PhysicsError;

const PRESSURE_FLOOR: f64 = 1e-12;
const MAX_NEWTON: usize = 100;

/// `(ρ, u, p)` with `u` the velocity along the tube axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl Primitive {
    pub fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, p }
    }

    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p / self.rho).sqrt()
    }

    /// `(ρ, ρu, E)`.
    pub fn conserved(&self, gamma: f64) -> [f64; 3] {
        [self.rho, self.rho * self.u, self.p / (gamma - 1.0) + 0.5 * self.rho * self.u * self.u]
    }

    /// `(ρu, ρu² + p, u(E + p))`.
    pub fn flux(&self, gamma: f64) -> [f64; 3] {
        let e = self.conserved(gamma)[2];
        [self.rho * self.u, self.rho * self.u * self.u + self.p, self.u * (e + self.p)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    Shock,
    Rarefaction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub left: Primitive,
    pub right: Primitive,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
}

/// Pressure function of one side and its derivative.
fn side_function(p: f64, s: &Primitive, gamma: f64) -> (f64, f64) {
    let c = s.sound_speed(gamma);
    if p > s.p {
        let a = 2.0 / ((gamma + 1.0) * s.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * s.p;
        let q = (a / (p + b)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (b + p)))
    } else {
        let z = (gamma - 1.0) / (2.0 * gamma);
        let r = (p / s.p).powf(z);
        (2.0 * c / (gamma - 1.0) * (r - 1.0), (p / s.p).powf(-(gamma + 1.0) / (2.0 * gamma)) / (s.rho * c))
    }
}

/// `f(p) = f_L(p) + f_R(p) + u_R − u_L`.
pub fn pressure_function(p: f64, left: &Primitive, right: &Primitive, gamma: f64) -> f64 {
    side_function(p, left, gamma).0 + side_function(p, right, gamma).0 + right.u - left.u
}

/// Solves the Riemann problem with ratio of specific heats `gamma`.
pub fn exact_riemann_euler(left: Primitive, right: Primitive, gamma: f64) -> Result<RiemannSolution, PhysicsError> {
    for s in [&left, &right] {
        if !(s.rho > 0.0 && s.p > 0.0 && s.u.is_finite()) {
            return Err(PhysicsError::NonPhysical { density: s.rho, pressure: s.p });
        }
    }
    let (cl, cr) = (left.sound_speed(gamma), right.sound_speed(gamma));
    if 2.0 / (gamma - 1.0) * (cl + cr) <= right.u - left.u {
        return Err(PhysicsError::Vacuum);
    }
    let z = (gamma - 1.0) / (2.0 * gamma);
    let guess = ((cl + cr - 0.5 * (gamma - 1.0) * (right.u - left.u)) / (cl / left.p.powf(z) + cr / right.p.powf(z))).powf(1.0 / z);
    let mut p = guess.max(PRESSURE_FLOOR);
    let mut converged = false;
    for _ in 0..MAX_NEWTON {
        let f = pressure_function(p, &left, &right, gamma);
        if f.abs() <= 1e-15 {
            converged = true;
            break;
        }
        let df = side_function(p, &left, gamma).1 + side_function(p, &right, gamma).1;
        let next = (p - f / df).max(PRESSURE_FLOOR);
        let change = 2.0 * (next - p).abs() / (next + p);
        p = next;
        if change <= 1e-15 {
            converged = true;
            break;
        }
    }
    let residual = pressure_function(p, &left, &right, gamma);
    if !converged && residual.abs() > 1e-12 || !residual.is_finite() {
        return Err(PhysicsError::NoConvergence);
    }
    let u_star = 0.5 * (left.u + right.u) + 0.5 * (side_function(p, &right, gamma).0 - side_function(p, &left, gamma).0);
    let g6 = (gamma - 1.0) / (gamma + 1.0);
    let star_density = |s: &Primitive| {
        if p > s.p {
            let r = p / s.p;
            (s.rho * (r + g6) / (g6 * r + 1.0), Wave::Shock)
        } else {
            (s.rho * (p / s.p).powf(1.0 / gamma), Wave::Rarefaction)
        }
    };
    let (rho_star_left, left_wave) = star_density(&left);
    let (rho_star_right, right_wave) = star_density(&right);
    Ok(RiemannSolution { left, right, gamma, p_star: p, u_star, rho_star_left, rho_star_right, left_wave, right_wave })
}

impl RiemannSolution {
    /// Shock speed on the given side, `None` for a rarefaction.
    pub fn shock_speed(&self, left_side: bool) -> Option<f64> {
        let g = self.gamma;
        let (s, wave, sign) = if left_side { (&self.left, self.left_wave, -1.0) } else { (&self.right, self.right_wave, 1.0) };
        (wave == Wave::Shock).then(|| {
            let c = s.sound_speed(g);
            s.u + sign * c * ((g + 1.0) / (2.0 * g) * self.p_star / s.p + (g - 1.0) / (2.0 * g)).sqrt()
        })
    }

    /// Head and tail speeds of the fan on the given side, `None` for a shock.
    pub fn fan_speeds(&self, left_side: bool) -> Option<(f64, f64)> {
        let g = self.gamma;
        if left_side {
            (self.left_wave == Wave::Rarefaction).then(|| {
                let c_star = (g * self.p_star / self.rho_star_left).sqrt();
                (self.left.u - self.left.sound_speed(g), self.u_star - c_star)
            })
        } else {
            (self.right_wave == Wave::Rarefaction).then(|| {
                let c_star = (g * self.p_star / self.rho_star_right).sqrt();
                (self.right.u + self.right.sound_speed(g), self.u_star + c_star)
            })
        }
    }

    /// Self-similar solution at `ξ = x / t`.
    pub fn sample(&self, xi: f64) -> Primitive {
        let g = self.gamma;
        let left_side = xi <= self.u_star;
        let (s, rho_star, sign) = if left_side { (&self.left, self.rho_star_left, 1.0) } else { (&self.right, self.rho_star_right, -1.0) };
        let star = Primitive::new(rho_star, self.u_star, self.p_star);
        // sign = +1 on the left, −1 on the right; waves travel in direction −sign
        if let Some(speed) = self.shock_speed(left_side) {
            return if sign * (xi - speed) <= 0.0 { *s } else { star };
        }
        let (head, tail) = self.fan_speeds(left_side).expect("rarefaction");
        if sign * (xi - head) <= 0.0 {
            *s
        } else if sign * (xi - tail) > 0.0 {
            star
        } else {
            let c = s.sound_speed(g);
            let base = 2.0 / (g + 1.0) + sign * (g - 1.0) / ((g + 1.0) * c) * (s.u - xi);
            let rho = s.rho * base.powf(2.0 / (g - 1.0));
            let u = 2.0 / (g + 1.0) * (sign * c + (g - 1.0) / 2.0 * s.u + xi);
            let p = s.p * base.powf(2.0 * g / (g - 1.0));
            Primitive::new(rho, u, p)
        }
    }
}

/// Free-function form of [`RiemannSolution::sample`].
pub fn sample_riemann(sol: &RiemannSolution, xi: f64) -> Primitive {
    sol.sample(xi)
}
