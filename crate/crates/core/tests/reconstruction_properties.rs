use muscl::field::CellField;
use muscl::mesh::{
    attach_ghosts, build_cartesian, checkerboard_refine, periodic_box_spec, uniform_refine, uniform_spec, unit_square_123, BoundaryKind,
    GhostPlacement, Mesh,
};
use muscl::optim::Vector;
use muscl::reconstruction::{ReconstructionConfig, ReconstructionKind, Reconstructor};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn with_dirichlet(mesh: Mesh) -> Mesh {
    let spec = uniform_spec(&mesh, BoundaryKind::Dirichlet);
    attach_ghosts(mesh, &spec, GhostPlacement::Reflected).unwrap()
}

fn random_field(mesh: &Mesh, ncomp: usize, rng: &mut ChaCha8Rng) -> CellField {
    let mut f = CellField::zeros(mesh, ncomp);
    // mix smooth, flat and rough values so that zero jumps occur too
    let mut draw = || match rng.random_range(0..4) {
        0 => 0.5,
        1 => (rng.random_range(0..5) as f64) * 0.25,
        _ => rng.random_range(-1.0..1.0),
    };
    for v in f.cell_values_mut() {
        *v = draw();
    }
    for v in f.ghost_values_mut() {
        *v = draw();
    }
    f
}

fn cartesian(dim: usize, n: usize, periodic: bool) -> Mesh {
    let lower = vec![0.0; dim];
    let upper: Vec<f64> = (0..dim).map(|a| 1.0 + 0.5 * a as f64).collect();
    let counts: Vec<usize> = (0..dim).map(|a| n + a).collect();
    let mesh = build_cartesian(&lower, &upper, &counts).unwrap();
    if periodic {
        attach_ghosts(mesh, &periodic_box_spec(dim), GhostPlacement::Reflected).unwrap()
    } else {
        with_dirichlet(mesh)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn qp_equals_minmod_on_cartesian_grids(seed in any::<u64>(), dim in 1usize..=3, periodic in any::<bool>()) {
        let n = [0, 12, 8, 5][dim];
        let mesh = cartesian(dim, n, periodic);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = random_field(&mesh, 2, &mut rng);
        let weights: Vec<Vec<f64>> = (0..mesh.num_elements())
            .map(|e| mesh.adjacency(e).iter().map(|_| rng.random_range(0.1..=10.0)).collect())
            .collect();
        let qp = Reconstructor::with_weights(&mesh, ReconstructionConfig::with_kind(ReconstructionKind::Qp), |e, i, _| weights[e][i]).unwrap();
        let mm = Reconstructor::new(&mesh, ReconstructionConfig::with_kind(ReconstructionKind::Minmod)).unwrap();
        let a = qp.reconstruct(&field).unwrap();
        let b = mm.reconstruct(&field).unwrap();
        for e in 0..mesh.num_elements() {
            for k in 0..2 {
                for i in 0..3 {
                    let gap = (a.gradient(e, k)[i] - b.gradient(e, k)[i]).abs();
                    prop_assert!(gap <= 1e-10, "cell {e} comp {k}: {:?} vs {:?}", a.gradient(e, k), b.gradient(e, k));
                }
            }
        }
    }

    #[test]
    fn limited_operators_are_admissible(seed in any::<u64>(), which in 0usize..5) {
        let mesh = match which {
            0 => with_dirichlet(unit_square_123()),
            1 => with_dirichlet(uniform_refine(&unit_square_123()).unwrap()),
            2 => with_dirichlet(checkerboard_refine(&build_cartesian(&[0.0, 0.0], &[1.0, 1.0], &[6, 6]).unwrap()).unwrap()),
            3 => cartesian(3, 4, false),
            _ => unit_square_123(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = random_field(&mesh, 1, &mut rng);
        for kind in [ReconstructionKind::LsfLimited, ReconstructionKind::Lp, ReconstructionKind::Qp] {
            let r = Reconstructor::new(&mesh, ReconstructionConfig::with_kind(kind)).unwrap();
            let lin = r.reconstruct(&field).unwrap();
            let v = r.admissibility_violation(&field, &lin);
            prop_assert!(v <= 1e-10, "{kind:?} violation {v}");
            for e in 0..mesh.num_elements() {
                prop_assert_eq!(lin.value(e, 0), field.state(e)[0]);
            }
        }
    }

    #[test]
    fn qp_beats_sampled_admissible_gradients(seed in any::<u64>()) {
        let mesh = with_dirichlet(unit_square_123());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = random_field(&mesh, 1, &mut rng);
        let r = Reconstructor::new(&mesh, ReconstructionConfig::with_kind(ReconstructionKind::Qp)).unwrap();
        for cell in (0..mesh.num_elements()).step_by(11) {
            let (_, cons) = r.assemble_cell_problem(&field, cell, 0).unwrap();
            let vertices = polytope_vertices(&cons);
            let best = r.cell_gradient(&field, cell, 0).unwrap();
            let j_best = r.objective(&field, cell, 0, &best);
            for _ in 0..100 {
                let mut w = [0.0; 3];
                let coeffs: Vec<f64> = vertices.iter().map(|_| rng.random_range(0.0..1.0)).collect();
                let total: f64 = coeffs.iter().sum();
                for (v, c) in vertices.iter().zip(&coeffs) {
                    for k in 0..3 {
                        w[k] += c / total * v[k];
                    }
                }
                prop_assert!(cons.violation(&w) <= 1e-9);
                prop_assert!(j_best <= r.objective(&field, cell, 0, &w) + 1e-12);
            }
        }
    }
}

/// Vertices of `{0 ≤ a·x ≤ u}` in 2D by intersecting pairs of faces.
fn polytope_vertices(cons: &muscl::optim::BoxedDirectionalConstraints) -> Vec<Vector> {
    let rows = cons.rows();
    let mut out = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            for bi in [0.0, rows[i].upper] {
                for bj in [0.0, rows[j].upper] {
                    let (a, b) = (rows[i].direction, rows[j].direction);
                    let det = a[0] * b[1] - a[1] * b[0];
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let x = [(bi * b[1] - bj * a[1]) / det, (a[0] * bj - b[0] * bi) / det, 0.0];
                    if cons.violation(&x) <= 1e-12 {
                        out.push(x);
                    }
                }
            }
        }
    }
    if out.is_empty() {
        out.push([0.0; 3]);
    }
    out
}

#[test]
fn reconstruction_is_independent_of_worker_count() {
    let mesh = with_dirichlet(uniform_refine(&unit_square_123()).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let field = random_field(&mesh, 2, &mut rng);
    for kind in [ReconstructionKind::Qp, ReconstructionKind::Lp, ReconstructionKind::LsfLimited] {
        let r = Reconstructor::new(&mesh, ReconstructionConfig::with_kind(kind)).unwrap();
        let runs: Vec<_> = [1, 2, 8]
            .iter()
            .map(|&n| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
                pool.install(|| r.reconstruct(&field).unwrap())
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }
}
