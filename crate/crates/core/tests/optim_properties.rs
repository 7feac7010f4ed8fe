use muscl::optim::{
    qp_oracle_enumerate, solve_lp, solve_qp_active_set, BoxedDirectionalConstraints, QuadraticObjective, Vector, DEFAULT_TOL,
};
use proptest::prelude::*;

fn norm(v: &Vector) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn spd(dim: usize, m: &[f64]) -> [[f64; 3]; 3] {
    let mut h = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            let mut s = 0.0;
            for k in 0..dim {
                s += m[i * 3 + k] * m[j * 3 + k];
            }
            h[i][j] = s + if i == j { 0.2 } else { 0.0 };
        }
    }
    h
}

#[derive(Debug, Clone)]
struct Instance {
    dim: usize,
    m: Vec<f64>,
    g: Vec<f64>,
    rows: Vec<(Vec<f64>, f64)>,
}

impl Instance {
    fn build(&self, lambda: f64) -> (QuadraticObjective, BoxedDirectionalConstraints) {
        let g = [self.g[0] * lambda, self.g[1] * lambda, self.g[2] * lambda];
        let obj = QuadraticObjective::new(self.dim, spd(self.dim, &self.m), g).unwrap();
        let mut c = BoxedDirectionalConstraints::new(self.dim).unwrap();
        for (a, u) in &self.rows {
            c.push(a, u * lambda).unwrap();
        }
        (obj, c)
    }
}

fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=3).prop_flat_map(|dim| {
        let row = (prop::collection::vec(-1.0f64..1.0, dim), prop_oneof![1 => Just(0.0), 5 => 0.0f64..2.0]);
        (Just(dim), prop::collection::vec(-1.0f64..1.0, 9), prop::collection::vec(-3.0f64..3.0, 3), prop::collection::vec(row, 2..=8))
            .prop_map(|(dim, m, g, rows)| Instance { dim, m, g, rows })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn active_set_agrees_with_enumeration(inst in instance()) {
        let (obj, c) = inst.build(1.0);
        let x = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        let y = qp_oracle_enumerate(&obj, &c);
        let gap = norm(&[x[0] - y[0], x[1] - y[1], x[2] - y[2]]);
        prop_assert!(gap <= 1e-8 * (1.0 + norm(&y)), "{x:?} vs {y:?}");
    }

    #[test]
    fn qp_solution_is_feasible_and_not_worse_than_origin(inst in instance()) {
        let (obj, c) = inst.build(1.0);
        let x = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        for r in c.rows() {
            let v = r.direction[0] * x[0] + r.direction[1] * x[1] + r.direction[2] * x[2];
            let slack = if r.upper == 0.0 { 1e-12 } else { 1e-10 * r.upper };
            prop_assert!(v >= -slack && v <= r.upper + slack, "row {r:?} value {v}");
        }
        prop_assert!(obj.value(&x) <= 1e-15);
    }

    #[test]
    fn qp_scales_with_data(inst in instance(), lambda in 0.01f64..100.0) {
        let (obj, c) = inst.build(1.0);
        let x = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        let (obj, c) = inst.build(lambda);
        let y = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        for k in 0..3 {
            prop_assert!((y[k] - lambda * x[k]).abs() <= 1e-10 * lambda * (1.0 + norm(&x)), "{x:?} {y:?}");
        }
    }

    #[test]
    fn qp_scales_across_magnitudes(inst in instance(), exponent in -14i32..6) {
        let lambda = 10f64.powi(exponent);
        let (obj, c) = inst.build(1.0);
        let x = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        let (obj, c) = inst.build(lambda);
        let y = solve_qp_active_set(&obj, &c, DEFAULT_TOL).unwrap();
        for k in 0..3 {
            prop_assert!((y[k] - lambda * x[k]).abs() <= 1e-10 * lambda * (1.0 + norm(&x)), "{x:?} {y:?}");
        }
    }

    #[test]
    fn lp_scales_across_magnitudes(inst in instance(), exponent in -14i32..6) {
        let lambda = 10f64.powi(exponent);
        let (_, c) = inst.build(1.0);
        let obj = c.rows().iter().fold([0.0; 3], |s, r| [s[0] + r.direction[0], s[1] + r.direction[1], s[2] + r.direction[2]]);
        let Ok(x) = solve_lp(&obj, &c) else { return Ok(()) };
        let (_, c) = inst.build(lambda);
        let y = solve_lp(&obj, &c).unwrap();
        for k in 0..3 {
            prop_assert!((y[k] - lambda * x[k]).abs() <= 1e-9 * lambda * (1.0 + norm(&x)), "{x:?} {y:?}");
        }
    }

    #[test]
    fn lp_solution_is_a_feasible_vertex(inst in instance()) {
        let (_, c) = inst.build(1.0);
        let mut obj = [0.0; 3];
        for r in c.rows() {
            for k in 0..3 {
                obj[k] += r.direction[k];
            }
        }
        let x = match solve_lp(&obj, &c) {
            Ok(x) => x,
            // rows that do not span ℝ^d may leave the objective unbounded
            Err(muscl::optim::OptimError::Unbounded) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        };
        prop_assert!(c.violation(&x) <= 1e-10 * (1.0 + norm(&x)));
        let all: Vec<Vector> = c.rows().iter().map(|r| r.direction).collect();
        if x != [0.0; 3] && rank(&all, c.dim()) == c.dim() {
            // active rows must span ℝ^d
            let scale = 1e-9 * (1.0 + norm(&x));
            let active: Vec<Vector> = c
                .rows()
                .iter()
                .filter(|r| {
                    let v = r.direction[0] * x[0] + r.direction[1] * x[1] + r.direction[2] * x[2];
                    v.abs() <= scale || (v - r.upper).abs() <= scale
                })
                .map(|r| r.direction)
                .collect();
            prop_assert!(rank(&active, c.dim()) == c.dim(), "{x:?} active {active:?}");
        }
    }
}

fn rank(vs: &[Vector], dim: usize) -> usize {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vs {
        let mut w = *v;
        for b in &basis {
            let c = w[0] * b[0] + w[1] * b[1] + w[2] * b[2];
            for k in 0..3 {
                w[k] -= c * b[k];
            }
        }
        let n = norm(&w);
        if n > 1e-9 * norm(v) {
            basis.push([w[0] / n, w[1] / n, w[2] / n]);
        }
    }
    basis.len().min(dim)
}
