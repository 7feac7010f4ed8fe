//! Bounded-variable primal simplex for `max c·x` over boxed directional rows.
//!
//! Each row `lo ≤ a·x ≤ hi` gets a slack `s = a·x` bounded by `[lo, hi]`;
//! the `x` variables are free. Starting basis: all slacks, with `x = 0`,
//! which is feasible because `lo ≤ 0 ≤ hi`. Entering and leaving variables
//! follow Bland's rule.

use smallvec::SmallVec;

use super::linalg::{axpy, dot, norm};
use super::{BoxedDirectionalConstraints, OptimError, Vector};

struct GeneralRow {
    a: Vector,
    lo: f64,
    hi: f64,
}

struct Outcome {
    x: Vector,
    /// Some non-basic variable can move without changing the objective.
    dual_degenerate: bool,
}

const MAX_VARS: usize = 3 + 16;

fn simplex_max(dim: usize, c: &Vector, rows: &[GeneralRow]) -> Result<Outcome, OptimError> {
    let m = rows.len();
    let n = dim + m;
    // tableau B⁻¹[−A | I], basis = slacks
    let mut t: Vec<SmallVec<[f64; MAX_VARS]>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: SmallVec<[f64; MAX_VARS]> = SmallVec::from_elem(0.0, n);
            for k in 0..dim {
                row[k] = -r.a[k];
            }
            row[dim + i] = 1.0;
            row
        })
        .collect();
    let mut basis: SmallVec<[usize; 16]> = (dim..n).collect();
    let mut is_basic: SmallVec<[bool; MAX_VARS]> = (0..n).map(|j| j >= dim).collect();
    let lower = |j: usize| if j < dim { f64::NEG_INFINITY } else { rows[j - dim].lo };
    let upper = |j: usize| if j < dim { f64::INFINITY } else { rows[j - dim].hi };
    let cost = |j: usize| if j < dim { c[j] } else { 0.0 };
    let mut val: SmallVec<[f64; MAX_VARS]> = SmallVec::from_elem(0.0, n);

    let c_scale = norm(c).max(f64::MIN_POSITIVE);
    let eps = 1e-11 * c_scale;
    let cap = 50 * (n + 1);
    for _ in 0..cap {
        // basic values from the non-basic ones
        for (i, &b) in basis.iter().enumerate() {
            let mut s = 0.0;
            for j in 0..n {
                if !is_basic[j] {
                    s -= t[i][j] * val[j];
                }
            }
            val[b] = s;
        }
        let reduced = |j: usize, t: &[SmallVec<[f64; MAX_VARS]>], basis: &[usize]| {
            let mut r = cost(j);
            for (i, &b) in basis.iter().enumerate() {
                r -= cost(b) * t[i][j];
            }
            r
        };
        let mut entering: Option<(usize, f64)> = None;
        let mut degenerate = false;
        for j in 0..n {
            if is_basic[j] {
                continue;
            }
            let (lo, hi) = (lower(j), upper(j));
            if lo == hi {
                continue;
            }
            let r = reduced(j, &t, &basis);
            let dir = if r > eps && val[j] < hi {
                1.0
            } else if r < -eps && val[j] > lo {
                -1.0
            } else {
                if r.abs() <= eps {
                    degenerate = true;
                }
                continue;
            };
            entering = Some((j, dir));
            break;
        }
        let Some((j, dir)) = entering else {
            let mut x = [0.0; 3];
            x[..dim].copy_from_slice(&val[..dim]);
            return Ok(Outcome { x, dual_degenerate: degenerate });
        };

        // ratio test
        let mut step = upper(j) - lower(j);
        let mut leave: Option<usize> = None;
        for (i, &b) in basis.iter().enumerate() {
            let delta = -t[i][j] * dir;
            if delta.abs() <= 1e-12 {
                continue;
            }
            let room = if delta > 0.0 { upper(b) - val[b] } else { val[b] - lower(b) };
            if room.is_infinite() {
                continue;
            }
            let ratio = room.max(0.0) / delta.abs();
            let better = match leave {
                _ if ratio < step => true,
                Some(l) => ratio == step && b < basis[l],
                None => false,
            };
            if better {
                step = ratio;
                leave = Some(i);
            }
        }
        if step.is_infinite() {
            return Err(OptimError::Unbounded);
        }
        match leave {
            None => {
                val[j] = if dir > 0.0 { upper(j) } else { lower(j) };
            }
            Some(i) => {
                let b = basis[i];
                let delta = -t[i][j] * dir;
                val[b] = if delta > 0.0 { upper(b) } else { lower(b) };
                val[j] += dir * step;
                let pivot = t[i][j];
                for v in t[i].iter_mut() {
                    *v /= pivot;
                }
                let prow = t[i].clone();
                for (k, row) in t.iter_mut().enumerate() {
                    if k != i {
                        let f = row[j];
                        if f != 0.0 {
                            for (v, p) in row.iter_mut().zip(&prow) {
                                *v -= f * p;
                            }
                        }
                    }
                }
                basis[i] = j;
                is_basic[j] = true;
                is_basic[b] = false;
            }
        }
    }
    Err(OptimError::IterationLimit { iterations: cap, last: [0.0; 3] })
}

/// Maximizes `objective·x` over `{0 ≤ a_j·x ≤ u_j}` and returns a vertex.
///
/// Ties are broken deterministically: when the origin attains the optimum it
/// is returned, otherwise the lexicographically smallest optimal point. The
/// solution is homogeneous in the bounds, so it is computed with the bounds
/// divided by the largest one and scaled back.
pub fn solve_lp(objective: &Vector, cons: &BoxedDirectionalConstraints) -> Result<Vector, OptimError> {
    let scale = cons.rows().iter().map(|r| r.upper).fold(0.0, f64::max);
    if scale == 0.0 || scale == 1.0 {
        return solve_unit(objective, cons);
    }
    let mut unit = cons.clone();
    for r in unit.rows.iter_mut() {
        r.upper /= scale;
    }
    let up = |x: Vector| x.map(|v| v * scale);
    match solve_unit(objective, &unit) {
        Ok(x) => Ok(up(x)),
        Err(OptimError::IterationLimit { iterations, last }) => Err(OptimError::IterationLimit { iterations, last: up(last) }),
        Err(e) => Err(e),
    }
}

fn solve_unit(objective: &Vector, cons: &BoxedDirectionalConstraints) -> Result<Vector, OptimError> {
    let dim = cons.dim();
    let mut c = [0.0; 3];
    c[..dim].copy_from_slice(&objective[..dim]);
    if c.iter().all(|v| *v == 0.0) {
        return Ok([0.0; 3]);
    }
    let mut rows: SmallVec<[GeneralRow; 16]> = cons.rows().iter().map(|r| GeneralRow { a: r.direction, lo: 0.0, hi: r.upper }).collect();
    let first = simplex_max(dim, &c, &rows)?;
    let value = dot(&c, &first.x);
    let scale: f64 = cons.rows().iter().map(|r| norm(&r.direction) * norm(&first.x) + r.upper).fold(0.0, f64::max);
    if value <= 1e-12 * norm(&c) * (1.0 + scale) {
        return Ok([0.0; 3]);
    }
    if !first.dual_degenerate {
        return Ok(first.x);
    }

    // lexicographic refinement: minimize x_0, x_1, ... over the optimal face,
    // each time shifting the origin to the current point
    let mut x = first.x;
    let mut fixed: SmallVec<[Vector; 4]> = SmallVec::new();
    fixed.push(c);
    for k in 0..dim {
        rows.clear();
        for r in cons.rows() {
            let ax = dot(&r.direction, &x);
            rows.push(GeneralRow { a: r.direction, lo: (-ax).min(0.0), hi: (r.upper - ax).max(0.0) });
        }
        for f in &fixed {
            rows.push(GeneralRow { a: *f, lo: 0.0, hi: 0.0 });
        }
        let mut e = [0.0; 3];
        e[k] = -1.0;
        match simplex_max(dim, &e, &rows) {
            Ok(step) => x = axpy(1.0, &step.x, &x),
            Err(OptimError::Unbounded) => {}
            Err(other) => return Err(other),
        }
        let mut e = [0.0; 3];
        e[k] = 1.0;
        fixed.push(e);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::linalg::{cholesky, cholesky_solve};

    fn cons(dim: usize, rows: &[(&[f64], f64)]) -> BoxedDirectionalConstraints {
        let mut c = BoxedDirectionalConstraints::new(dim).unwrap();
        for (a, u) in rows {
            c.push(a, *u).unwrap();
        }
        c
    }

    /// Brute-force vertex enumeration: every choice of `dim` rows on one of
    /// their two faces, solved by normal equations.
    fn lp_oracle(c: &Vector, cons: &BoxedDirectionalConstraints) -> (f64, Vec<Vector>) {
        let dim = cons.dim();
        let rows = cons.rows();
        let mut best = f64::NEG_INFINITY;
        let mut vertices = Vec::new();
        let m = rows.len();
        let mut pick = vec![0usize; dim];
        fn rec(level: usize, start: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, m: usize) {
            if level == pick.len() {
                out.push(pick.clone());
                return;
            }
            for r in start..m {
                pick[level] = r;
                rec(level + 1, r + 1, pick, out, m);
            }
        }
        let mut subsets = Vec::new();
        rec(0, 0, &mut pick, &mut subsets, m);
        for s in subsets {
            for faces in 0..(1u32 << dim) {
                let mut ata = [[0.0; 3]; 3];
                let mut atb = [0.0; 3];
                for (k, &r) in s.iter().enumerate() {
                    let b = if faces >> k & 1 == 1 { rows[r].upper } else { 0.0 };
                    for i in 0..dim {
                        for j in 0..dim {
                            ata[i][j] += rows[r].direction[i] * rows[r].direction[j];
                        }
                        atb[i] += rows[r].direction[i] * b;
                    }
                }
                let Some(l) = cholesky(&ata, dim) else { continue };
                let x = cholesky_solve(&l, dim, &atb);
                if cons.violation(&x) > 1e-9 {
                    continue;
                }
                let v = dot(c, &x);
                if v > best + 1e-9 {
                    best = v;
                    vertices.clear();
                }
                if v > best - 1e-9 {
                    vertices.push(x);
                }
            }
        }
        (best, vertices)
    }

    #[test]
    fn one_dimensional_cell() {
        // data (0, 1, 3) on unit spacing: rows from both neighbours
        let mut c = BoxedDirectionalConstraints::new(1).unwrap();
        c.push_jump(&[-1.0], -1.0).unwrap();
        c.push_jump(&[1.0], 2.0).unwrap();
        let x = solve_lp(&[2.0, 0.0, 0.0], &c).unwrap();
        assert_eq!(x[0], 1.0);
    }

    #[test]
    fn zero_objective_returns_origin() {
        let c = cons(2, &[(&[1.0, 0.0], 1.0), (&[0.0, 1.0], 1.0)]);
        assert_eq!(solve_lp(&[0.0; 3], &c).unwrap(), [0.0; 3]);
    }

    #[test]
    fn single_aligned_row() {
        let c = cons(1, &[(&[2.0], 3.0)]);
        let x = solve_lp(&[2.0, 0.0, 0.0], &c).unwrap();
        assert!((2.0 * x[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_optimum_uses_lexicographic_vertex() {
        // max x1 + x2 on the unit box: the optimal vertex is unique (1, 1);
        // max x1 leaves the edge x1 = 1, x2 ∈ [0, 1] → (1, 0)
        let c = cons(2, &[(&[1.0, 0.0], 1.0), (&[0.0, 1.0], 1.0)]);
        assert_eq!(solve_lp(&[1.0, 1.0, 0.0], &c).unwrap(), [1.0, 1.0, 0.0]);
        assert_eq!(solve_lp(&[1.0, 0.0, 0.0], &c).unwrap(), [1.0, 0.0, 0.0]);
        // box shifted so the optimal edge does not contain the axis:
        // rows 0 ≤ x1 ≤ 1 and 0 ≤ -x2 ≤ 2 → edge x1 = 1, x2 ∈ [-2, 0]
        let c = cons(2, &[(&[1.0, 0.0], 1.0), (&[0.0, -1.0], 2.0)]);
        assert_eq!(solve_lp(&[1.0, 0.0, 0.0], &c).unwrap(), [1.0, -2.0, 0.0]);
    }

    #[test]
    fn matches_vertex_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let dim = rng.random_range(1..=3);
            let m = rng.random_range(dim..=8);
            let mut c = BoxedDirectionalConstraints::new(dim).unwrap();
            for _ in 0..m {
                let a: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let u = if rng.random_bool(0.15) { 0.0 } else { rng.random_range(0.0..2.0) };
                c.push(&a, u).unwrap();
            }
            // objective: sum of the row directions, as in the reconstruction LP
            let mut obj = [0.0; 3];
            for r in c.rows() {
                obj = axpy(1.0, &r.direction, &obj);
            }
            let (best, vertices) = lp_oracle(&obj, &c);
            if !best.is_finite() {
                continue;
            }
            let x = solve_lp(&obj, &c).unwrap();
            assert!(c.violation(&x) <= 1e-10, "infeasible {x:?}");
            assert!((dot(&obj, &x) - best).abs() <= 1e-9 * (1.0 + best.abs()), "{} vs {best}", dot(&obj, &x));
            let at_vertex = vertices.iter().any(|v| norm(&axpy(-1.0, v, &x)) <= 1e-8 * (1.0 + norm(v))) || x == [0.0; 3];
            assert!(at_vertex, "{x:?} not among {vertices:?}");
        }
    }
}
