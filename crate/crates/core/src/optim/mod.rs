//! Small dense QP and LP solvers for the per-cell reconstruction problems.
//!
//! Every problem lives in ℝ^d with d ≤ 3 and is constrained by "boxed"
//! directional rows `0 ≤ a·x ≤ u` with `u ≥ 0`, so the origin is always
//! feasible. Vectors are stored as `[f64; 3]`; components beyond the problem
//! dimension are zero.

mod active_set;
pub(crate) mod linalg;
mod oracle;
mod simplex;

use smallvec::SmallVec;
use thiserror::Error;

pub use active_set::solve_qp_active_set;
pub use oracle::qp_oracle_enumerate;
pub use simplex::solve_lp;

pub type Vector = [f64; 3];

/// Default solver tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimError {
    #[error("dimension {0} is not in 1..=3")]
    Dimension(usize),
    #[error("Hessian is not symmetric (entry ({row}, {col}) differs by {gap:e})")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("Hessian is not positive definite")]
    NotPositiveDefinite,
    #[error("row {row} has invalid upper bound {upper}")]
    InvalidUpper { row: usize, upper: f64 },
    #[error("row {row} has a non-finite direction")]
    InvalidDirection { row: usize },
    #[error("active-set iteration limit of {iterations} reached")]
    IterationLimit { iterations: usize, last: Vector },
    #[error("linear program is unbounded")]
    Unbounded,
}

/// One row `0 ≤ direction·x ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub direction: Vector,
    pub upper: f64,
}

/// The feasible polytope `{x : 0 ≤ a_j·x ≤ u_j for all rows j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxedDirectionalConstraints {
    dim: usize,
    rows: SmallVec<[Row; 12]>,
}

impl BoxedDirectionalConstraints {
    pub fn new(dim: usize) -> Result<Self, OptimError> {
        if !(1..=3).contains(&dim) {
            return Err(OptimError::Dimension(dim));
        }
        Ok(Self { dim, rows: SmallVec::new() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn clear(&mut self) {
        self.rows.clear();
    }

    /// Adds `0 ≤ direction·x ≤ upper`. Only the first `dim` components of
    /// `direction` are used.
    pub fn push(&mut self, direction: &[f64], upper: f64) -> Result<(), OptimError> {
        let row = self.rows.len();
        if !(upper >= 0.0 && upper.is_finite()) {
            return Err(OptimError::InvalidUpper { row, upper });
        }
        let mut a = [0.0; 3];
        for (k, v) in direction.iter().take(self.dim).enumerate() {
            if !v.is_finite() {
                return Err(OptimError::InvalidDirection { row });
            }
            a[k] = *v;
        }
        self.rows.push(Row { direction: a, upper });
        Ok(())
    }

    /// Adds the row for a neighbour at `offset` whose value differs by
    /// `jump`: `0 ≤ sign(jump)·offset·x ≤ |jump|`, with `sign(0) = +1`.
    pub fn push_jump(&mut self, offset: &[f64], jump: f64) -> Result<(), OptimError> {
        let s = sign(jump);
        let mut a = [0.0; 3];
        for (k, v) in offset.iter().take(self.dim).enumerate() {
            a[k] = s * v;
        }
        self.push(&a, jump.abs())
    }

    /// Largest violation of any row at `x` (0 when feasible).
    pub fn violation(&self, x: &Vector) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let v = linalg::dot(&r.direction, x);
                (-v).max(v - r.upper).max(0.0)
            })
            .fold(0.0, f64::max)
    }
}

/// `sign(a) ∈ {−1, 1}` with `sign(0) = 1`.
pub fn sign(a: f64) -> f64 {
    if a < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `½ x·Hx − g·x` with `H` symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObjective {
    dim: usize,
    h: [[f64; 3]; 3],
    g: Vector,
}

impl QuadraticObjective {
    pub fn new(dim: usize, h: [[f64; 3]; 3], g: Vector) -> Result<Self, OptimError> {
        if !(1..=3).contains(&dim) {
            return Err(OptimError::Dimension(dim));
        }
        let scale = (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).map(|(i, j)| h[i][j].abs()).fold(1.0, f64::max);
        for i in 0..dim {
            for j in 0..i {
                let gap = (h[i][j] - h[j][i]).abs();
                if gap > 1e-14 * scale {
                    return Err(OptimError::NotSymmetric { row: i, col: j, gap });
                }
            }
        }
        let mut hh = [[0.0; 3]; 3];
        let mut gg = [0.0; 3];
        for i in 0..dim {
            gg[i] = g[i];
            hh[i][..dim].copy_from_slice(&h[i][..dim]);
        }
        if linalg::cholesky(&hh, dim).is_none() {
            return Err(OptimError::NotPositiveDefinite);
        }
        Ok(Self { dim, h: hh, g: gg })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hessian(&self) -> &[[f64; 3]; 3] {
        &self.h
    }

    pub fn gradient(&self) -> &Vector {
        &self.g
    }

    pub fn value(&self, x: &Vector) -> f64 {
        0.5 * linalg::dot(x, &linalg::mat_vec(&self.h, x)) - linalg::dot(&self.g, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_data() {
        let mut c = BoxedDirectionalConstraints::new(2).unwrap();
        assert_eq!(c.push(&[1.0, 0.0], -1.0), Err(OptimError::InvalidUpper { row: 0, upper: -1.0 }));
        assert_eq!(c.push(&[f64::NAN, 0.0], 1.0), Err(OptimError::InvalidDirection { row: 0 }));
        assert!(BoxedDirectionalConstraints::new(4).is_err());
        let h = [[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0; 3]];
        assert_eq!(QuadraticObjective::new(2, h, [0.0; 3]), Err(OptimError::NotPositiveDefinite));
        let h = [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0; 3]];
        assert!(matches!(QuadraticObjective::new(2, h, [0.0; 3]), Err(OptimError::NotSymmetric { .. })));
    }

    #[test]
    fn jump_rows_use_sign_convention() {
        let mut c = BoxedDirectionalConstraints::new(1).unwrap();
        c.push_jump(&[2.0], -3.0).unwrap();
        c.push_jump(&[-1.0], 0.0).unwrap();
        assert_eq!(c.rows()[0], Row { direction: [-2.0, 0.0, 0.0], upper: 3.0 });
        assert_eq!(c.rows()[1], Row { direction: [-1.0, 0.0, 0.0], upper: 0.0 });
        assert_eq!(c.violation(&[0.0; 3]), 0.0);
        assert_eq!(c.violation(&[-2.0, 0.0, 0.0]), 2.0);
    }
}
