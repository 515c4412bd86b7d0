mod common;

use common::distorted_square;
use mixedforms::assembly::*;
use mixedforms::benchmark::{run_benchmark, BenchmarkConfig, Case};
use mixedforms::exterior::{grad_lambda, p1lambda1_values, OneForm};
use mixedforms::material::NeoHookeanParams;
use mixedforms::mesh::SimplicialMesh2D;
use mixedforms::quadrature::quadrature;
use mixedforms::solver::{solve, Problem, SolverConfig};

const F: [[f64; 2]; 2] = [[1.2, 0.1], [0.0, 0.9]];

fn affine_bcs(mesh: &SimplicialMesh2D, layout: &DofLayout) -> BoundaryConditions {
    let mut bcs = BoundaryConditions::default();
    for &e in mesh.boundary_edges() {
        for v in mesh.edges()[e] {
            let x = mesh.vertices()[v];
            for c in 0..2 {
                bcs.prescribe(mesh, layout, v, c, F[c][0] * x[0] + F[c][1] * x[1] - x[c]);
            }
        }
    }
    bcs
}

/// Max deviation of θ¹, θ² from the rows of `F` over the quadrature points.
fn theta_error(mesh: &SimplicialMesh2D, layout: &DofLayout, state: &MixedState) -> f64 {
    let quad = quadrature(4).unwrap();
    let mut err = 0.0f64;
    for t in 0..mesh.num_triangles() {
        let g = mesh.element_geometry(t).unwrap();
        let s = state.local(layout, t).0;
        for (bary, _) in quad.iter() {
            let psi = p1lambda1_values(&grad_lambda(&g), bary);
            for i in 0..2 {
                let th = (0..6).fold(OneForm::ZERO, |a, k| a + s[6 * i + k] * psi[k]);
                err = err.max((th.0[0] - F[i][0]).abs()).max((th.0[1] - F[i][1]).abs());
            }
        }
    }
    err
}

#[test]
fn affine_deformation_is_reproduced_exactly() {
    let mesh = distorted_square(4);
    assert_eq!(mesh.num_triangles(), 32);
    let layout = DofLayout::new(&mesh);
    let params = NeoHookeanParams::new(1.0, 10.0).unwrap();
    let bcs = affine_bcs(&mesh, &layout);
    let problem = Problem { mesh: &mesh, layout: &layout, params: &params, bcs: &bcs };
    let config = SolverConfig { load_steps: 1, ..Default::default() };
    let (state, report) = solve(&problem, &config, MixedState::identity(&mesh, &layout)).unwrap();

    let last = report.history.last().unwrap();
    assert!(last.residual_norm < 1e-10, "{}", last.residual_norm);
    assert!(report.steps[0].iterations <= 6, "{} iterations", report.steps[0].iterations);
    assert!(theta_error(&mesh, &layout, &state) < 1e-10);

    let quad = quadrature(4).unwrap();
    let fields = field_integrals(&mesh, &layout, &state, &quad).unwrap();
    let p: Vec<f64> = fields.elements.iter().map(|e| e.piola_norm / e.area).collect();
    let (lo, hi) = p.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi > 0.1 && (hi - lo) / hi < 1e-9, "piola norm in [{lo}, {hi}]");
    let compat = compatibility_residual(&mesh, &layout, &state, &quad).unwrap();
    assert!(compat.iter().all(|c| c.max_component() < 1e-10));
}

#[test]
fn patch_test_end_to_end_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let mesh_path = dir.path().join("square.m2d");
    let bc_path = dir.path().join("square.bc");
    std::fs::write(
        &mesh_path,
        "m2d 1\n4 2\n0 0\n2 0\n2 1\n0 1\n0 1 2\n0 2 3\nedges 4\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n",
    )
    .unwrap();
    std::fs::write(&bc_path, "dirichlet 1 ux 0.2*x + 0.1*y\ndirichlet 1 uy -0.1y\n").unwrap();

    let mut cfg = BenchmarkConfig::new(Case::File);
    cfg.set("mesh", mesh_path.to_str().unwrap()).unwrap();
    cfg.set("bc", bc_path.to_str().unwrap()).unwrap();
    cfg.set("refine", "2").unwrap();
    cfg.set("mu", "1").unwrap();
    cfg.set("kappa", "10").unwrap();
    let run = run_benchmark(&cfg).unwrap();
    assert_eq!(run.setup.mesh.num_triangles(), 32);
    assert!(theta_error(&run.setup.mesh, &run.setup.layout, &run.state) < 1e-10);
    assert!(run.metrics.max_compat < 1e-10);
    let j = F[0][0] * F[1][1] - F[0][1] * F[1][0];
    assert!((run.metrics.min_j - j).abs() < 1e-12 && (run.metrics.max_j - j).abs() < 1e-12);
    // ∫|θ|² = |F|² · area.
    let f2: f64 = F.iter().flatten().map(|v| v * v).sum();
    assert!((run.metrics.theta_sq - 2.0 * f2).abs() < 1e-10);
}
