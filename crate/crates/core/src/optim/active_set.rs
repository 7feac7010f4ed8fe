//! Primal active-set method started from the origin.

use smallvec::SmallVec;

use super::linalg::{axpy, cholesky, cholesky_solve, dot, mat_vec, norm};
use super::{BoxedDirectionalConstraints, OptimError, QuadraticObjective, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Face {
    /// `a·x = 0` held as `a·x ≥ 0`.
    Lower,
    /// `a·x = u` held as `−a·x ≥ −u`.
    Upper,
    /// Row with `u = 0`; never released.
    Fixed,
}

#[derive(Debug, Clone, Copy)]
struct Active {
    row: usize,
    face: Face,
    normal: Vector,
}

/// Orthonormal basis `q` of the working normals with the triangular factor
/// `r` such that `normal_i = Σ_{j≤i} r[j][i] q_j`.
struct Factor {
    q: SmallVec<[Vector; 3]>,
    r: [[f64; 3]; 3],
}

fn factorize(work: &[Active]) -> Factor {
    let mut q: SmallVec<[Vector; 3]> = SmallVec::new();
    let mut r = [[0.0; 3]; 3];
    for (i, w) in work.iter().enumerate() {
        let mut v = w.normal;
        for _ in 0..2 {
            for (j, qj) in q.iter().enumerate() {
                let c = dot(qj, &v);
                r[j][i] += c;
                v = axpy(-c, qj, &v);
            }
        }
        let n = norm(&v);
        r[i][i] = n;
        q.push([v[0] / n, v[1] / n, v[2] / n]);
    }
    Factor { q, r }
}

/// Residual of `v` after projection onto span(q), relative to |v|.
fn independent_of(q: &[Vector], v: &Vector) -> bool {
    let n0 = norm(v);
    if n0 == 0.0 {
        return false;
    }
    let mut w = *v;
    for _ in 0..2 {
        for qj in q {
            w = axpy(-dot(qj, &w), qj, &w);
        }
    }
    norm(&w) > 1e-10 * n0
}

/// Orthonormal complement of span(q) in ℝ^dim.
fn complement(q: &[Vector], dim: usize) -> SmallVec<[Vector; 3]> {
    let mut basis: SmallVec<[Vector; 3]> = q.iter().copied().collect();
    let mut z: SmallVec<[Vector; 3]> = SmallVec::new();
    while basis.len() < dim {
        // pick the coordinate axis with the largest residual
        let mut best = ([0.0; 3], -1.0);
        for k in 0..dim {
            let mut v = [0.0; 3];
            v[k] = 1.0;
            for _ in 0..2 {
                for b in &basis {
                    v = axpy(-dot(b, &v), b, &v);
                }
            }
            let n = norm(&v);
            if n > best.1 {
                best = (v, n);
            }
        }
        let (v, n) = best;
        let u = [v[0] / n, v[1] / n, v[2] / n];
        basis.push(u);
        z.push(u);
    }
    z
}

/// Minimizes `½x·Hx − g·x` over `{0 ≤ a_j·x ≤ u_j}`.
///
/// The problem is positively homogeneous in `(g, u)`, so it is solved with
/// both divided by the largest `u_j` and the result scaled back; the
/// tolerances then act on data of unit size.
pub fn solve_qp_active_set(obj: &QuadraticObjective, cons: &BoxedDirectionalConstraints, tol: f64) -> Result<Vector, OptimError> {
    let scale = cons.rows().iter().map(|r| r.upper).fold(0.0, f64::max);
    if scale == 0.0 || scale == 1.0 {
        return solve_unit(obj, cons, tol);
    }
    let unit_obj = QuadraticObjective { dim: obj.dim, h: obj.h, g: obj.g.map(|v| v / scale) };
    let mut unit_cons = cons.clone();
    for r in unit_cons.rows.iter_mut() {
        r.upper /= scale;
    }
    let up = |x: Vector| x.map(|v| v * scale);
    match solve_unit(&unit_obj, &unit_cons, tol) {
        Ok(x) => Ok(up(x)),
        Err(OptimError::IterationLimit { iterations, last }) => Err(OptimError::IterationLimit { iterations, last: up(last) }),
        Err(e) => Err(e),
    }
}

/// Starts from `x = 0` with every row of zero width in the working set. The
/// multiplier released is the most negative one, the blocking row is the one
/// with the smallest step ratio (lowest index on ties). After `3(d + m)`
/// iterations the method gives up and reports the last iterate.
fn solve_unit(obj: &QuadraticObjective, cons: &BoxedDirectionalConstraints, tol: f64) -> Result<Vector, OptimError> {
    let dim = obj.dim();
    if cons.dim() != dim {
        return Err(OptimError::Dimension(cons.dim()));
    }
    let h = obj.hessian();
    let g = obj.gradient();
    let rows = cons.rows();
    let mut x = [0.0; 3];
    let mut work: SmallVec<[Active; 3]> = SmallVec::new();
    let mut in_work: SmallVec<[bool; 12]> = SmallVec::from_elem(false, rows.len());

    for (j, row) in rows.iter().enumerate() {
        if row.upper == 0.0 && work.len() < dim {
            let f = factorize(&work);
            if independent_of(&f.q, &row.direction) {
                work.push(Active { row: j, face: Face::Fixed, normal: row.direction });
                in_work[j] = true;
            }
        }
    }

    let cap = 3 * (dim + rows.len());
    let g_norm = 1.0 + norm(g);
    let h_norm = h.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    for _ in 0..cap {
        let grad = axpy(-1.0, g, &mat_vec(h, &x));
        let f = factorize(&work);
        let z = complement(&f.q, dim);
        let mut p = [0.0; 3];
        if !z.is_empty() {
            let k = z.len();
            let mut rh = [[0.0; 3]; 3];
            let mut rhs = [0.0; 3];
            for a in 0..k {
                let hz = mat_vec(h, &z[a]);
                for b in 0..k {
                    rh[b][a] = dot(&z[b], &hz);
                }
                rhs[a] = -dot(&z[a], &grad);
            }
            let Some(l) = cholesky(&rh, k) else {
                return Err(OptimError::NotPositiveDefinite);
            };
            let pz = cholesky_solve(&l, k, &rhs);
            for a in 0..k {
                p = axpy(pz[a], &z[a], &p);
            }
        }

        if norm(&p) <= tol * (1.0 + norm(&x)) {
            // multipliers from R λ = Qᵀ grad
            let n = work.len();
            let mut lambda = [0.0; 3];
            for i in (0..n).rev() {
                let mut s = dot(&f.q[i], &grad);
                for k in i + 1..n {
                    s -= f.r[i][k] * lambda[k];
                }
                lambda[i] = s / f.r[i][i];
            }
            // the gradient carries rounding error of order |H||x|
            let lambda_tol = tol * (g_norm + h_norm * norm(&x));
            let mut drop: Option<(usize, f64)> = None;
            for (i, w) in work.iter().enumerate() {
                if w.face != Face::Fixed && lambda[i] < -lambda_tol && drop.is_none_or(|(_, l)| lambda[i] < l) {
                    drop = Some((i, lambda[i]));
                }
            }
            match drop {
                None => return Ok(x),
                Some((i, _)) => {
                    in_work[work[i].row] = false;
                    work.remove(i);
                }
            }
            continue;
        }

        let pn = norm(&p);
        let mut alpha = 1.0;
        let mut block: Option<(usize, Face)> = None;
        for (j, row) in rows.iter().enumerate() {
            if in_work[j] {
                continue;
            }
            let ap = dot(&row.direction, &p);
            let thr = 1e-12 * norm(&row.direction) * pn;
            let ax = dot(&row.direction, &x);
            let (ratio, face) = if ap < -thr {
                (ax.max(0.0) / -ap, Face::Lower)
            } else if ap > thr {
                ((row.upper - ax).max(0.0) / ap, Face::Upper)
            } else {
                continue;
            };
            if ratio < alpha {
                alpha = ratio;
                block = Some((j, face));
            }
        }
        x = axpy(alpha, &p, &x);
        if let Some((j, face)) = block {
            let a = rows[j].direction;
            let normal = match face {
                Face::Upper => [-a[0], -a[1], -a[2]],
                _ => a,
            };
            // snap onto the blocking face
            let target = if face == Face::Upper { rows[j].upper } else { 0.0 };
            let miss = target - dot(&a, &x);
            if miss.abs() <= 1e-12 * (1.0 + target.abs()) {
                x = axpy(miss / dot(&a, &a), &a, &x);
            }
            work.push(Active { row: j, face, normal });
            in_work[j] = true;
        }
    }
    Err(OptimError::IterationLimit { iterations: cap, last: x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::DEFAULT_TOL;

    fn eye(dim: usize) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        for i in 0..dim {
            h[i][i] = 1.0;
        }
        h
    }

    #[test]
    fn separable_box_clip() {
        let obj = QuadraticObjective::new(2, eye(2), [1.0, 0.0, 0.0]).unwrap();
        let mut c = BoxedDirectionalConstraints::new(2).unwrap();
        c.push(&[1.0, 0.0], 0.5).unwrap();
        c.push(&[0.0, 1.0], 1.0).unwrap();
        let x = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        assert_eq!(x, [0.5, 0.0, 0.0]);
    }

    #[test]
    fn zero_gradient_gives_origin() {
        let obj = QuadraticObjective::new(3, eye(3), [0.0; 3]).unwrap();
        let mut c = BoxedDirectionalConstraints::new(3).unwrap();
        c.push(&[1.0, 2.0, 3.0], 0.7).unwrap();
        c.push(&[-1.0, 0.5, 0.0], 0.0).unwrap();
        assert_eq!(solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap(), [0.0; 3]);
    }

    #[test]
    fn zero_width_rows_pin_the_solution() {
        let obj = QuadraticObjective::new(2, eye(2), [3.0, -1.0, 0.0]).unwrap();
        let mut c = BoxedDirectionalConstraints::new(2).unwrap();
        c.push(&[1.0, 1.0], 0.0).unwrap();
        c.push(&[1.0, -1.0], 0.0).unwrap();
        c.push(&[2.0, 2.0], 0.0).unwrap();
        assert_eq!(solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap(), [0.0; 3]);
    }

    #[test]
    fn unconstrained_minimum_when_interior() {
        let h = [[2.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0; 3]];
        let obj = QuadraticObjective::new(2, h, [0.1, 0.1, 0.0]).unwrap();
        let mut c = BoxedDirectionalConstraints::new(2).unwrap();
        c.push(&[1.0, 1.0], 10.0).unwrap();
        let x = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        // H⁻¹ g for H = [[2, .5], [.5, 1]], g = (.1, .1): det 1.75
        let expect = [(0.1 - 0.05) / 1.75, (0.2 - 0.05) / 1.75];
        assert!((x[0] - expect[0]).abs() < 1e-15 && (x[1] - expect[1]).abs() < 1e-15);
    }

    #[test]
    fn releases_a_wrong_sided_constraint() {
        // minimum of |x - (1, -1)|² over 0 ≤ x1 + x2 ≤ 1 and 0 ≤ x1 ≤ 2 is (1, -1)
        let obj = QuadraticObjective::new(2, eye(2), [1.0, -1.0, 0.0]).unwrap();
        let mut c = BoxedDirectionalConstraints::new(2).unwrap();
        c.push(&[1.0, 1.0], 1.0).unwrap();
        c.push(&[1.0, 0.0], 2.0).unwrap();
        let x = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] + 1.0).abs() < 1e-14, "{x:?}");
    }

    #[test]
    fn tiny_data_is_solved_at_unit_scale() {
        let h = [[2.2823829577310923, -0.4096238130681389, 0.0], [-0.40962381306813894, 0.7176170422689074, 0.0], [0.0; 3]];
        let g = [-7.738022462766229e-11, 8.190437212344816e-11, 0.0];
        let obj = QuadraticObjective::new(2, h, g).unwrap();
        let mut c = BoxedDirectionalConstraints::new(2).unwrap();
        c.push(&[-0.05976539334374442, 0.011924827740669903], 2.3522499443387287e-13).unwrap();
        c.push(&[-0.019530786687488866, 0.023849655481339806], 3.301137448053367e-12).unwrap();
        c.push(&[-0.04023460665625564, -0.011924827740669905], 2.515112058725738e-13).unwrap();
        let x = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        let y = crate::optim::qp_oracle_enumerate(&obj, &c);
        let size = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(size > 0.0);
        for k in 0..2 {
            assert!((x[k] - y[k]).abs() <= 1e-8 * size, "{x:?} vs {y:?}");
        }
    }

    #[test]
    fn ill_conditioned_minimum_on_a_face_does_not_cycle() {
        let h = [
            [2.237909733271937, 4.311198146151578, -1.9983806244984832],
            [4.311198146151578, 8.423536930951476, -4.5483478980699],
            [-1.9983806244984832, -4.5483478980699, 5.910942878175608],
        ];
        let obj = QuadraticObjective::new(3, h, [-1.6735246035026174, -3.4767021706384407, 3.00612558150405]).unwrap();
        let mut c = BoxedDirectionalConstraints::new(3).unwrap();
        c.push(&[-0.3114957052595124, -0.6949925708670333, 0.8396285080570198], 0.5101861947168587).unwrap();
        c.push(&[-0.40924057382885604, -0.7198786997131403, -0.03965432182474249], 0.11582497412366033).unwrap();
        c.push(&[0.023762802736770894, 0.10485600865516309, -0.3573553865056214], 0.9716619018929253).unwrap();
        let x = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        let y = crate::optim::qp_oracle_enumerate(&obj, &c);
        for k in 0..3 {
            assert!((x[k] - y[k]).abs() <= 1e-8 * 1000.0, "{x:?} vs {y:?}");
        }
    }
}
