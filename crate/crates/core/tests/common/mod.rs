#![allow(dead_code)]

use mixedforms::assembly::{LocalState, LOCAL_DOFS};
use mixedforms::exterior::{grad_lambda, OneForm};
use mixedforms::material::{energy_gradient, energy_hessian, NeoHookeanParams, PointKinematics};
use mixedforms::mesh::{ElementGeometry, Point, SimplicialMesh2D};
use mixedforms::solver::linear_solve;
use mixedforms::sparse::TripletMatrix;
use rand::Rng;

/// Random triangle with a minimum angle of roughly 15° and diameter ~1.
pub fn random_triangle(rng: &mut impl Rng) -> ElementGeometry {
    loop {
        let p: [Point; 3] = std::array::from_fn(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let area2 = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let len2 = |a: Point, b: Point| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
        let longest = len2(p[0], p[1]).max(len2(p[1], p[2])).max(len2(p[2], p[0]));
        if area2 > 0.5 * longest {
            return ElementGeometry::new(p).unwrap();
        }
    }
}

/// `θ`-coefficients of the constant 1-form with vertex potential values `c`
/// (coefficient of `λⁱ dλʲ` is `c_j − c_i`).
pub fn lift(c: [f64; 3]) -> [f64; 6] {
    mixedforms::exterior::P1_PAIRS.map(|[i, j]| c[j] - c[i])
}

/// Deformation near `x ↦ F x` with perturbed θ and random tractions; J stays
/// well away from zero for the perturbation sizes used.
pub fn random_local_state(rng: &mut impl Rng, g: &ElementGeometry, traction_scale: f64) -> LocalState {
    let f = [
        [1.0 + rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)],
        [rng.gen_range(-0.3..0.3), 1.0 + rng.gen_range(-0.3..0.3)],
    ];
    let mut s = [0.0; LOCAL_DOFS];
    for c in 0..2 {
        let phi: [f64; 3] = std::array::from_fn(|n| {
            let x = g.vertex_coords[n];
            f[c][0] * x[0] + f[c][1] * x[1] + 0.05 * rng.gen_range(-1.0..1.0)
        });
        let th = lift(phi);
        for k in 0..6 {
            s[6 * c + k] = th[k] + 0.05 * rng.gen_range(-1.0..1.0);
        }
        for m in 0..3 {
            s[12 + 3 * c + m] = traction_scale * rng.gen_range(-1.0..1.0);
            s[18 + 3 * c + m] = phi[m];
        }
    }
    LocalState(s)
}

/// Unit square, `n × n` cells split along one diagonal, interior vertices
/// shifted deterministically (2n² triangles).
pub fn distorted_square(n: usize) -> SimplicialMesh2D {
    let h = 1.0 / n as f64;
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let (mut x, mut y) = (i as f64 * h, j as f64 * h);
            if i > 0 && i < n && j > 0 && j < n {
                x += 0.25 * h * ((3 * i + 7 * j) as f64).sin();
                y += 0.25 * h * ((5 * i + 2 * j) as f64).cos();
            }
            vertices.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if (i + j) % 2 == 0 {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            } else {
                triangles.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                triangles.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
    }
    SimplicialMesh2D::new(vertices, triangles).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Standard P₁ displacement element for the same stored energy, used as an
/// independent reference: clamps every vertex carrying `clamped` and applies
/// `traction` on the edges carrying `loaded`. Returns vertex displacements.
pub fn displacement_fem(
    mesh: &SimplicialMesh2D,
    params: &NeoHookeanParams,
    clamped: i32,
    loaded: i32,
    traction: [f64; 2],
    steps: usize,
) -> Vec<Point> {
    let nv = mesh.num_vertices();
    let mut x: Vec<f64> = (0..2 * nv).map(|i| mesh.vertices()[i % nv][i / nv]).collect();
    let mut fixed = vec![false; 2 * nv];
    for v in mesh.vertices_with_marker(clamped) {
        fixed[v] = true;
        fixed[nv + v] = true;
    }
    let mut f = vec![0.0; 2 * nv];
    for e in mesh.edges_with_marker(loaded) {
        let [a, b] = mesh.edges()[e];
        let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
        let half = 0.5 * (pa[0] - pb[0]).hypot(pa[1] - pb[1]);
        for c in 0..2 {
            f[c * nv + a] += half * traction[c];
            f[c * nv + b] += half * traction[c];
        }
    }
    for step in 1..=steps {
        let alpha = step as f64 / steps as f64;
        for iter in 0.. {
            assert!(iter < 30, "displacement reference did not converge");
            let mut r: Vec<f64> = f.iter().map(|v| -alpha * v).collect();
            let mut k = TripletMatrix::new(2 * nv);
            for (t, tri) in mesh.triangles().iter().enumerate() {
                let g = mesh.element_geometry(t).unwrap();
                let gr = grad_lambda(&g);
                let th = |c: usize| (0..3).fold(OneForm::ZERO, |a, n| a + x[c * nv + tri[n]] * gr[n]);
                let kin = PointKinematics::new(th(0), th(1));
                // θ-basis slots 0..3 carry dλⁿ; the rest are unused.
                let basis = [gr[0], gr[1], gr[2], OneForm::ZERO, OneForm::ZERO, OneForm::ZERO];
                let gw = energy_gradient(params, &kin, &basis).unwrap();
                let hw = energy_hessian(params, &kin, &basis).unwrap();
                let dof = |a: usize| match a {
                    0..=2 => Some(tri[a]),
                    6..=8 => Some(nv + tri[a - 6]),
                    _ => None,
                };
                for a in 0..12 {
                    let Some(ga) = dof(a) else { continue };
                    r[ga] += g.area * gw[a];
                    for b in 0..12 {
                        if let Some(gb) = dof(b) {
                            if !fixed[ga] && !fixed[gb] {
                                k.push(ga, gb, g.area * hw[a][b]);
                            }
                        }
                    }
                }
            }
            let mut norm = 0.0;
            for i in 0..2 * nv {
                if fixed[i] {
                    r[i] = 0.0;
                    k.push(i, i, 1.0);
                } else {
                    norm += r[i] * r[i];
                }
            }
            if norm.sqrt() < 1e-9 {
                break;
            }
            let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
            let d = linear_solve(&k, &rhs).unwrap();
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += di;
            }
            // At large bulk moduli the residual floor is set by round-off.
            if d.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-12 {
                break;
            }
        }
    }
    (0..nv)
        .map(|v| [x[v] - mesh.vertices()[v][0], x[nv + v] - mesh.vertices()[v][1]])
        .collect()
}
