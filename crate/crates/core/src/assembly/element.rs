//! Element value, residual and tangent of the mixed functional.
//!
//! Local DoF order: θ¹ `0..6`, θ² `6..12` (P₁Λ¹ pairs), t¹ `12..15`,
//! t² `15..18` (Whitney edges), φ¹ `18..21`, φ² `21..24` (vertices).
//!
//! With `eʲ = θʲ − dφʲ` the constraint density is
//!
//! ```text
//! G = Σⱼ t¹(Eⱼ) θ² ∧ eʲ + t²(Eⱼ) θ¹ ∧ eʲ
//! ```
//!
//! and the element functional is `∫ (W − G) dA`. The residual and tangent are
//! its exact first and second derivatives. Several block formulas differ from
//! the commonly printed ones in index placement (e.g. the θ¹θ² coupling
//! carries `t²(E₂) − t¹(E₁)`); these follow from differentiating `G` directly
//! and are pinned by finite-difference tests.

use crate::error::Result;
use crate::exterior::{grad_lambda, p1lambda1_values, whitney_values, OneForm};
use crate::material::{
    energy_density, energy_gradient, energy_hessian, NeoHookeanParams, PointKinematics,
};
use crate::mesh::ElementGeometry;
use crate::quadrature::QuadratureRule;

pub const LOCAL_DOFS: usize = 24;

const TH1: usize = 0;
const TH2: usize = 6;
const T1: usize = 12;
const T2: usize = 15;
const PH1: usize = 18;
const PH2: usize = 21;

/// Element DoF vector with orientation signs already applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalState(pub [f64; LOCAL_DOFS]);

pub type ElementMatrix = [[f64; LOCAL_DOFS]; LOCAL_DOFS];

/// Basis values and field values at one quadrature point.
struct PointFields {
    psi: [OneForm; 6],
    whitney: [OneForm; 3],
    grads: [OneForm; 3],
    kin: PointKinematics,
    t: [OneForm; 2],
    dphi: [OneForm; 2],
}

impl PointFields {
    fn new(grads: &[OneForm; 3], bary: [f64; 3], s: &LocalState) -> Self {
        let psi = p1lambda1_values(grads, bary);
        let whitney = whitney_values(grads, bary);
        let c = &s.0;
        let combine = |basis: &[OneForm], coeffs: &[f64]| {
            basis
                .iter()
                .zip(coeffs)
                .fold(OneForm::ZERO, |acc, (&b, &k)| acc + k * b)
        };
        let theta1 = combine(&psi, &c[TH1..TH1 + 6]);
        let theta2 = combine(&psi, &c[TH2..TH2 + 6]);
        Self {
            psi,
            whitney,
            grads: *grads,
            kin: PointKinematics::new(theta1, theta2),
            t: [
                combine(&whitney, &c[T1..T1 + 3]),
                combine(&whitney, &c[T2..T2 + 3]),
            ],
            dphi: [
                combine(grads, &c[PH1..PH1 + 3]),
                combine(grads, &c[PH2..PH2 + 3]),
            ],
        }
    }

    fn theta(&self, i: usize) -> OneForm {
        if i == 0 {
            self.kin.theta1
        } else {
            self.kin.theta2
        }
    }

    /// `eʲ = θʲ − dφʲ`.
    fn mismatch(&self, j: usize) -> OneForm {
        self.theta(j) - self.dphi[j]
    }

    /// Constraint density `G`.
    fn constraint(&self) -> f64 {
        let (th1, th2) = (self.kin.theta1, self.kin.theta2);
        (0..2)
            .map(|j| {
                let e = self.mismatch(j);
                self.t[0].eval(j) * th2.wedge(e) + self.t[1].eval(j) * th1.wedge(e)
            })
            .sum()
    }
}

fn for_each_point(
    geometry: &ElementGeometry,
    quad: &QuadratureRule,
    state: &LocalState,
    mut f: impl FnMut(&PointFields, f64) -> Result<()>,
) -> Result<()> {
    let grads = grad_lambda(geometry);
    for (bary, w) in quad.iter() {
        f(&PointFields::new(&grads, bary, state), w * geometry.area)?;
    }
    Ok(())
}

/// `∫ (W − G) dA` over one element (boundary loads excluded).
pub fn element_functional(
    geometry: &ElementGeometry,
    state: &LocalState,
    params: &NeoHookeanParams,
    quad: &QuadratureRule,
) -> Result<f64> {
    let mut total = 0.0;
    for_each_point(geometry, quad, state, |p, dw| {
        total += dw * (energy_density(params, &p.kin)? - p.constraint());
        Ok(())
    })?;
    Ok(total)
}

pub fn element_residual(
    geometry: &ElementGeometry,
    state: &LocalState,
    params: &NeoHookeanParams,
    quad: &QuadratureRule,
) -> Result<[f64; LOCAL_DOFS]> {
    let mut r = [0.0; LOCAL_DOFS];
    for_each_point(geometry, quad, state, |p, dw| {
        add_point_residual(p, params, dw, &mut r)
    })?;
    Ok(r)
}

fn add_point_residual(
    p: &PointFields,
    params: &NeoHookeanParams,
    dw: f64,
    r: &mut [f64; LOCAL_DOFS],
) -> Result<()> {
    let gw = energy_gradient(params, &p.kin, &p.psi)?;
    let (th1, th2) = (p.kin.theta1, p.kin.theta2);
    let (e1, e2) = (p.mismatch(0), p.mismatch(1));
    let [t1, t2] = p.t;
    let [dphi1, dphi2] = p.dphi;
    for (k, &psi) in p.psi.iter().enumerate() {
        let dg1 = t1.eval(0) * th2.wedge(psi) - t2.eval(0) * psi.wedge(dphi1)
            + t2.eval(1) * psi.wedge(e2);
        let dg2 = t1.eval(0) * psi.wedge(e1) - t1.eval(1) * psi.wedge(dphi2)
            + t2.eval(1) * th1.wedge(psi);
        r[TH1 + k] += dw * (gw[k] - dg1);
        r[TH2 + k] += dw * (gw[6 + k] - dg2);
    }
    for (m, &w) in p.whitney.iter().enumerate() {
        r[T1 + m] -= dw * (w.eval(0) * th2.wedge(e1) + w.eval(1) * th2.wedge(e2));
        r[T2 + m] -= dw * (w.eval(0) * th1.wedge(e1) + w.eval(1) * th1.wedge(e2));
    }
    for (n, &g) in p.grads.iter().enumerate() {
        r[PH1 + n] += dw * (t1.eval(0) * th2.wedge(g) + t2.eval(0) * th1.wedge(g));
        r[PH2 + n] += dw * (t1.eval(1) * th2.wedge(g) + t2.eval(1) * th1.wedge(g));
    }
    Ok(())
}

/// Exact Hessian of [`element_functional`]; symmetric, with vanishing t-t and φ-φ blocks.
pub fn element_tangent(
    geometry: &ElementGeometry,
    state: &LocalState,
    params: &NeoHookeanParams,
    quad: &QuadratureRule,
) -> Result<Box<ElementMatrix>> {
    let mut k = Box::new([[0.0; LOCAL_DOFS]; LOCAL_DOFS]);
    for_each_point(geometry, quad, state, |p, dw| {
        add_point_tangent(p, params, dw, &mut k)
    })?;
    Ok(k)
}

/// Residual and tangent in one sweep.
pub(crate) fn element_residual_tangent(
    geometry: &ElementGeometry,
    state: &LocalState,
    params: &NeoHookeanParams,
    quad: &QuadratureRule,
) -> Result<([f64; LOCAL_DOFS], Box<ElementMatrix>)> {
    let mut r = [0.0; LOCAL_DOFS];
    let mut k = Box::new([[0.0; LOCAL_DOFS]; LOCAL_DOFS]);
    for_each_point(geometry, quad, state, |p, dw| {
        add_point_residual(p, params, dw, &mut r)?;
        add_point_tangent(p, params, dw, &mut k)
    })?;
    Ok((r, k))
}

fn add_point_tangent(
    p: &PointFields,
    params: &NeoHookeanParams,
    dw: f64,
    k: &mut ElementMatrix,
) -> Result<()> {
    let hw = energy_hessian(params, &p.kin, &p.psi)?;
    for a in 0..12 {
        for b in 0..12 {
            k[a][b] += dw * hw[a][b];
        }
    }
    let (th1, th2) = (p.kin.theta1, p.kin.theta2);
    let (e1, e2) = (p.mismatch(0), p.mismatch(1));
    let [t1, t2] = p.t;
    let [dphi1, dphi2] = p.dphi;

    // Every entry below is −∂²G; the symmetric counterpart is written alongside.
    let mut put = |a: usize, b: usize, g: f64| {
        k[a][b] -= dw * g;
        k[b][a] -= dw * g;
    };
    let coupling = t2.eval(1) - t1.eval(0);
    for (kk, &psi) in p.psi.iter().enumerate() {
        for (l, &psl) in p.psi.iter().enumerate() {
            put(TH1 + kk, TH2 + l, coupling * psi.wedge(psl));
        }
        for (m, &w) in p.whitney.iter().enumerate() {
            put(TH1 + kk, T1 + m, w.eval(0) * th2.wedge(psi));
            put(
                TH1 + kk,
                T2 + m,
                -w.eval(0) * psi.wedge(dphi1) + w.eval(1) * psi.wedge(e2),
            );
            put(
                TH2 + kk,
                T1 + m,
                w.eval(0) * psi.wedge(e1) - w.eval(1) * psi.wedge(dphi2),
            );
            put(TH2 + kk, T2 + m, w.eval(1) * th1.wedge(psi));
        }
        for (n, &g) in p.grads.iter().enumerate() {
            put(TH1 + kk, PH1 + n, -t2.eval(0) * psi.wedge(g));
            put(TH1 + kk, PH2 + n, -t2.eval(1) * psi.wedge(g));
            put(TH2 + kk, PH1 + n, -t1.eval(0) * psi.wedge(g));
            put(TH2 + kk, PH2 + n, -t1.eval(1) * psi.wedge(g));
        }
    }
    for (m, &w) in p.whitney.iter().enumerate() {
        for (n, &g) in p.grads.iter().enumerate() {
            put(T1 + m, PH1 + n, -w.eval(0) * th2.wedge(g));
            put(T1 + m, PH2 + n, -w.eval(1) * th2.wedge(g));
            put(T2 + m, PH1 + n, -w.eval(0) * th1.wedge(g));
            put(T2 + m, PH2 + n, -w.eval(1) * th1.wedge(g));
        }
    }
    Ok(())
}
