//! Global scatter of element contributions and post-processing integrals.
//!
//! Elements are evaluated in parallel and scattered serially in element
//! order, so assembled values do not depend on the thread count.

use rayon::prelude::*;

use super::element::{
    element_functional, element_residual, element_residual_tangent, ElementMatrix, LOCAL_DOFS,
};
use super::{BoundaryConditions, DofLayout, MixedState};
use crate::error::{Error, Result};
use crate::exterior::{grad_lambda, p1lambda1_derivatives, p1lambda1_values, whitney_values, OneForm};
use crate::material::{frobenius, piola_stress, NeoHookeanParams, PointKinematics};
use crate::mesh::SimplicialMesh2D;
use crate::quadrature::QuadratureRule;
use crate::sparse::TripletMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssemblyMode {
    Value,
    Residual,
    Full,
}

/// Functional value, residual and (optionally) tangent over all DoFs.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub value: f64,
    pub residual: Vec<f64>,
    pub tangent: Option<TripletMatrix>,
}

/// System restricted to the free DoFs.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    /// Global index of each free DoF.
    pub free: Vec<usize>,
    pub tangent: TripletMatrix,
    /// `−R_f − K_fd Δu_d`.
    pub rhs: Vec<f64>,
}

impl GlobalSystem {
    /// Norm of the residual restricted to the free DoFs.
    pub fn free_residual_norm(&self, dirichlet: &[bool]) -> f64 {
        self.residual
            .iter()
            .zip(dirichlet)
            .filter(|(_, &d)| !d)
            .map(|(r, _)| r * r)
            .sum::<f64>()
            .sqrt()
    }

    /// Deletes Dirichlet rows and columns. `increment` holds the change still to
    /// be applied to each DoF (only Dirichlet entries are read); its coupling
    /// moves to the right-hand side.
    pub fn reduce(&self, dirichlet: &[bool], increment: &[f64]) -> Result<ReducedSystem> {
        let tangent = self
            .tangent
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("system assembled without tangent".into()))?;
        let n = self.residual.len();
        if dirichlet.len() != n || increment.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: dirichlet.len().min(increment.len()),
            });
        }
        let mut map = vec![usize::MAX; n];
        let mut free = Vec::with_capacity(n);
        for g in 0..n {
            if !dirichlet[g] {
                map[g] = free.len();
                free.push(g);
            }
        }
        let mut rhs: Vec<f64> = free.iter().map(|&g| -self.residual[g]).collect();
        let mut k = TripletMatrix::with_capacity(free.len(), tangent.nnz());
        for (r, c, v) in tangent.iter() {
            let (fr, fc) = (map[r], map[c]);
            match (fr != usize::MAX, fc != usize::MAX) {
                (true, true) => k.push(fr, fc, v),
                (true, false) => rhs[fr] -= v * increment[c],
                _ => {}
            }
        }
        Ok(ReducedSystem {
            free,
            tangent: k,
            rhs,
        })
    }
}

enum Local {
    Value(f64),
    Residual(f64, [f64; LOCAL_DOFS]),
    Full(f64, [f64; LOCAL_DOFS], Box<ElementMatrix>),
}

/// Assembles the functional `I` at `load_factor` (Neumann loads scaled by it),
/// its gradient and, in [`AssemblyMode::Full`], its Hessian.
#[allow(clippy::too_many_arguments)]
pub fn assemble(
    mesh: &SimplicialMesh2D,
    layout: &DofLayout,
    state: &MixedState,
    params: &NeoHookeanParams,
    bcs: &BoundaryConditions,
    load_factor: f64,
    quad: &QuadratureRule,
    mode: AssemblyMode,
) -> Result<GlobalSystem> {
    state.check_len(layout)?;
    if layout.num_elements() != mesh.num_triangles() {
        return Err(Error::DimensionMismatch {
            expected: mesh.num_triangles(),
            actual: layout.num_elements(),
        });
    }
    let locals: Vec<Local> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let geometry = mesh.element_geometry(t)?;
            let local = state.local(layout, t);
            let out = match mode {
                AssemblyMode::Value => {
                    Local::Value(element_functional(&geometry, &local, params, quad)?)
                }
                AssemblyMode::Residual => Local::Residual(
                    element_functional(&geometry, &local, params, quad)?,
                    element_residual(&geometry, &local, params, quad)?,
                ),
                AssemblyMode::Full => {
                    let v = element_functional(&geometry, &local, params, quad)?;
                    let (r, k) = element_residual_tangent(&geometry, &local, params, quad)?;
                    Local::Full(v, r, k)
                }
            };
            Ok(out)
        })
        .collect::<Vec<Result<Local>>>()
        .into_iter()
        .enumerate()
        .map(|(t, r)| r.map_err(|e| e.in_element(t)))
        .collect::<Result<_>>()?;

    let n = layout.len();
    let mut value = 0.0;
    let mut residual = vec![0.0; n];
    let mut tangent = (mode == AssemblyMode::Full)
        .then(|| TripletMatrix::with_capacity(n, locals.len() * LOCAL_DOFS * LOCAL_DOFS));
    for (t, local) in locals.iter().enumerate() {
        let dofs = layout.element_dofs(t);
        match local {
            Local::Value(v) => value += v,
            Local::Residual(v, r) => {
                value += v;
                scatter_vec(dofs, r, &mut residual);
            }
            Local::Full(v, r, k) => {
                value += v;
                scatter_vec(dofs, r, &mut residual);
                let m = tangent.as_mut().expect("full mode allocates tangent");
                for a in 0..LOCAL_DOFS {
                    let (ga, sa) = dofs[a];
                    for b in 0..LOCAL_DOFS {
                        let v = k[a][b];
                        if v != 0.0 {
                            let (gb, sb) = dofs[b];
                            m.push(ga, gb, sa * sb * v);
                        }
                    }
                }
            }
        }
    }

    let load = bcs.external_load(mesh, layout);
    value -= load_factor * dot(&load, &state.values);
    if mode != AssemblyMode::Value {
        for (r, f) in residual.iter_mut().zip(&load) {
            *r -= load_factor * f;
        }
    }
    Ok(GlobalSystem {
        value,
        residual,
        tangent,
    })
}

fn scatter_vec(dofs: &[(usize, f64); LOCAL_DOFS], r: &[f64; LOCAL_DOFS], out: &mut [f64]) {
    for (&(g, s), v) in dofs.iter().zip(r) {
        out[g] += s * v;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Smallest J over all quadrature points (may be ≤ 0).
pub fn min_jacobian(
    mesh: &SimplicialMesh2D,
    layout: &DofLayout,
    state: &MixedState,
    quad: &QuadratureRule,
) -> Result<f64> {
    state.check_len(layout)?;
    let per_element: Vec<f64> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.element_geometry(t)?;
            let grads = grad_lambda(&g);
            let s = state.local(layout, t).0;
            Ok(quad
                .iter()
                .map(|(bary, _)| {
                    let (th1, th2) = thetas(&grads, bary, &s);
                    th1.wedge(th2)
                })
                .fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<_>>()?;
    Ok(per_element.into_iter().fold(f64::INFINITY, f64::min))
}

fn thetas(grads: &[OneForm; 3], bary: [f64; 3], s: &[f64; LOCAL_DOFS]) -> (OneForm, OneForm) {
    let psi = p1lambda1_values(grads, bary);
    let mut th = [OneForm::ZERO; 2];
    for (k, &p) in psi.iter().enumerate() {
        th[0] += s[k] * p;
        th[1] += s[6 + k] * p;
    }
    (th[0], th[1])
}

/// Per-element compatibility measures for θⁱ ≈ dφⁱ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElementCompatibility {
    /// `‖θⁱ − dφⁱ‖_{L²(element)}` for i = 1, 2.
    pub l2: [f64; 2],
    /// `|dθⁱ|`, the constant `dx¹∧dx²` coefficient of the exterior derivative.
    pub curl: [f64; 2],
}

impl ElementCompatibility {
    pub fn total(&self) -> f64 {
        self.l2.iter().chain(&self.curl).sum()
    }

    pub fn max_component(&self) -> f64 {
        self.l2.iter().chain(&self.curl).fold(0.0f64, |a, &b| a.max(b))
    }
}

pub fn compatibility_residual(
    mesh: &SimplicialMesh2D,
    layout: &DofLayout,
    state: &MixedState,
    quad: &QuadratureRule,
) -> Result<Vec<ElementCompatibility>> {
    state.check_len(layout)?;
    (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.element_geometry(t)?;
            let grads = grad_lambda(&g);
            let s = state.local(layout, t).0;
            let dphi = [0, 1].map(|i| {
                (0..3).fold(OneForm::ZERO, |acc, n| acc + s[18 + 3 * i + n] * grads[n])
            });
            let mut sq = [0.0; 2];
            for (bary, w) in quad.iter() {
                let (th1, th2) = thetas(&grads, bary, &s);
                sq[0] += w * g.area * (th1 - dphi[0]).norm_squared();
                sq[1] += w * g.area * (th2 - dphi[1]).norm_squared();
            }
            let d = p1lambda1_derivatives(&grads);
            let curl = [0, 1].map(|i| (0..6).map(|k| s[6 * i + k] * d[k]).sum::<f64>().abs());
            Ok(ElementCompatibility {
                l2: sq.map(f64::sqrt),
                curl,
            })
        })
        .collect()
}

/// Quadrature-evaluated field measures over one element.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElementFields {
    /// `∫ |θ¹|² + |θ²|² dA`.
    pub theta_sq: f64,
    /// `∫ ‖P‖_F dA`.
    pub piola_norm: f64,
    pub area: f64,
    pub min_j: f64,
    pub max_j: f64,
    /// Area average of J.
    pub mean_j: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldIntegrals {
    pub theta_sq: f64,
    pub piola_norm: f64,
    pub min_j: f64,
    pub max_j: f64,
    pub elements: Vec<ElementFields>,
}

pub fn field_integrals(
    mesh: &SimplicialMesh2D,
    layout: &DofLayout,
    state: &MixedState,
    quad: &QuadratureRule,
) -> Result<FieldIntegrals> {
    state.check_len(layout)?;
    let elements: Vec<ElementFields> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.element_geometry(t)?;
            let grads = grad_lambda(&g);
            let s = state.local(layout, t).0;
            let mut f = ElementFields {
                area: g.area,
                min_j: f64::INFINITY,
                max_j: f64::NEG_INFINITY,
                ..Default::default()
            };
            for (bary, w) in quad.iter() {
                let (th1, th2) = thetas(&grads, bary, &s);
                let kin = PointKinematics::new(th1, th2);
                let wh = whitney_values(&grads, bary);
                let t1 = (0..3).fold(OneForm::ZERO, |a, m| a + s[12 + m] * wh[m]);
                let t2 = (0..3).fold(OneForm::ZERO, |a, m| a + s[15 + m] * wh[m]);
                let dw = w * g.area;
                f.theta_sq += dw * kin.i1;
                f.piola_norm += dw * frobenius(&piola_stress(&kin, t1, t2));
                f.mean_j += dw * kin.j;
                f.min_j = f.min_j.min(kin.j);
                f.max_j = f.max_j.max(kin.j);
            }
            f.mean_j /= g.area;
            Ok(f)
        })
        .collect::<Result<_>>()?;
    Ok(FieldIntegrals {
        theta_sq: elements.iter().map(|e| e.theta_sq).sum(),
        piola_norm: elements.iter().map(|e| e.piola_norm).sum(),
        min_j: elements.iter().map(|e| e.min_j).fold(f64::INFINITY, f64::min),
        max_j: elements.iter().map(|e| e.max_j).fold(f64::NEG_INFINITY, f64::max),
        elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::quadrature;

    #[test]
    fn single_triangle_system_equals_element_system() {
        let mesh = SimplicialMesh2D::new(vec![[0.0, 0.0], [1.0, 0.0], [0.2, 0.9]], vec![[0, 1, 2]])
            .unwrap();
        let layout = DofLayout::new(&mesh);
        let mut state = MixedState::from_deformation(&mesh, &layout, |x| [1.1 * x[0], x[1] + 0.1 * x[0]]);
        for (i, v) in state.values.iter_mut().enumerate() {
            *v += 0.01 * ((i * 7) % 5) as f64;
        }
        let p = NeoHookeanParams::new(1.0, 5.0).unwrap();
        let q = quadrature(4).unwrap();
        let bc = BoundaryConditions::default();
        let sys = assemble(&mesh, &layout, &state, &p, &bc, 1.0, &q, AssemblyMode::Full).unwrap();
        let g = mesh.element_geometry(0).unwrap();
        let local = state.local(&layout, 0);
        let r = element_residual(&g, &local, &p, &q).unwrap();
        let dofs = layout.element_dofs(0);
        for a in 0..LOCAL_DOFS {
            let (ga, sa) = dofs[a];
            assert!((sys.residual[ga] - sa * r[a]).abs() < 1e-14);
        }
        assert!(sys.tangent.unwrap().max_asymmetry() == 0.0);
    }

    #[test]
    fn reduce_moves_dirichlet_coupling_to_rhs() {
        let mut k = TripletMatrix::new(3);
        for (r, c, v) in [(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0), (2, 2, 1.0), (0, 2, 4.0), (2, 0, 4.0)] {
            k.push(r, c, v);
        }
        let sys = GlobalSystem {
            value: 0.0,
            residual: vec![1.0, 2.0, 3.0],
            tangent: Some(k),
        };
        let red = sys.reduce(&[false, true, false], &[0.0, 0.5, 0.0]).unwrap();
        assert_eq!(red.free, vec![0, 2]);
        assert_eq!(red.rhs, vec![-1.0 - 0.5, -3.0]);
        assert_eq!(red.tangent.to_dense(), vec![vec![2.0, 4.0], vec![4.0, 1.0]]);
        assert_eq!(sys.free_residual_norm(&[false, true, false]), 10f64.sqrt());
    }
}
