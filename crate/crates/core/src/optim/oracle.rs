//! Brute-force reference solver for the QP, used to check the active-set
//! method. Independent of it: the KKT systems are solved by Gaussian
//! elimination with partial pivoting.

use super::linalg::{dot, norm};
use super::{BoxedDirectionalConstraints, QuadraticObjective, Vector};

const MAX_KKT: usize = 6;

/// Solves the `n × n` system in place, `None` if numerically singular.
fn gauss_solve(a: &mut [[f64; MAX_KKT]; MAX_KKT], b: &mut [f64; MAX_KKT], n: usize) -> Option<()> {
    let scale = (0..n).flat_map(|i| a[i][..n].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            for k in col..n {
                a[i][k] -= f * a[col][k];
            }
            b[i] -= f * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[i][k] * b[k];
        }
        b[i] = s / a[i][i];
    }
    Some(())
}

/// Global minimizer of the QP by enumeration of all active sets of at most
/// `d` faces (each row contributes `a·x = 0` and `a·x = u`). Intended for at
/// most 12 rows.
pub fn qp_oracle_enumerate(obj: &QuadraticObjective, cons: &BoxedDirectionalConstraints) -> Vector {
    let dim = obj.dim();
    let h = obj.hessian();
    let g = obj.gradient();
    let rows = cons.rows();
    let mut faces: Vec<(usize, f64)> = Vec::new();
    for (j, r) in rows.iter().enumerate() {
        if r.direction.iter().all(|v| *v == 0.0) {
            continue;
        }
        faces.push((j, 0.0));
        if r.upper > 0.0 {
            faces.push((j, r.upper));
        }
    }

    // feasibility slack relative to the data size (the problem is homogeneous in g and u)
    let size = rows.iter().map(|r| r.upper).fold(0.0, f64::max);
    let mut best = ([0.0; 3], 0.0);
    let mut chosen: Vec<usize> = Vec::with_capacity(dim);
    let mut visit = |chosen: &[usize]| {
        let k = chosen.len();
        let n = dim + k;
        let mut a = [[0.0; MAX_KKT]; MAX_KKT];
        let mut b = [0.0; MAX_KKT];
        for i in 0..dim {
            a[i][..dim].copy_from_slice(&h[i][..dim]);
            b[i] = g[i];
        }
        for (c, &f) in chosen.iter().enumerate() {
            let (row, value) = faces[f];
            for i in 0..dim {
                a[dim + c][i] = rows[row].direction[i];
                a[i][dim + c] = rows[row].direction[i];
            }
            b[dim + c] = value;
        }
        if gauss_solve(&mut a, &mut b, n).is_none() {
            return;
        }
        let mut x = [0.0; 3];
        x[..dim].copy_from_slice(&b[..dim]);
        let feasible = rows.iter().all(|r| {
            let v = dot(&r.direction, &x);
            let slack = 1e-9 * size + 1e-13 * norm(&r.direction) * norm(&x);
            v >= -slack && v <= r.upper + slack
        });
        if feasible {
            let f = obj.value(&x);
            if f < best.1 {
                best = (x, f);
            }
        }
    };

    fn recurse(start: usize, depth: usize, faces: &[(usize, f64)], chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        visit(chosen);
        if depth == 0 {
            return;
        }
        for f in start..faces.len() {
            if chosen.iter().any(|&c| faces[c].0 == faces[f].0) {
                continue;
            }
            chosen.push(f);
            recurse(f + 1, depth - 1, faces, chosen, visit);
            chosen.pop();
        }
    }
    recurse(0, dim, &faces, &mut chosen, &mut visit);
    best.0
}
