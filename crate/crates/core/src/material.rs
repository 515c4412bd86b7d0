//! Neo-Hookean stored energy written in terms of the deformation 1-forms.
//!
//! With `I₁ = |θ¹|² + |θ²|²` and `J = ⋆(θ¹ ∧ θ²)`,
//!
//! ```text
//! W(θ¹, θ²) = μ/2 (I₁ − 2) − μ ln J + κ/2 (ln J)²
//! ```
//!
//! Derivatives are taken with respect to the coefficients of θ¹ and θ² on a
//! set of six basis 1-forms `ψ_k` evaluated at the same point, so that
//! `θⁱ = Σ_k cⁱ_k ψ_k`. Gradient entries `0..6` belong to θ¹, `6..12` to θ².

use crate::error::{Error, Result};
use crate::exterior::OneForm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeoHookeanParams {
    pub mu: f64,
    pub kappa: f64,
}

impl NeoHookeanParams {
    pub fn new(mu: f64, kappa: f64) -> Result<Self> {
        if !(mu > 0.0 && kappa > 0.0 && mu.is_finite() && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "material parameters must be positive (mu={mu}, kappa={kappa})"
            )));
        }
        Ok(Self { mu, kappa })
    }
}

/// Values of θ¹, θ² and their invariants at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointKinematics {
    pub theta1: OneForm,
    pub theta2: OneForm,
    pub i1: f64,
    pub j: f64,
}

impl PointKinematics {
    pub fn new(theta1: OneForm, theta2: OneForm) -> Self {
        Self {
            theta1,
            theta2,
            i1: theta1.norm_squared() + theta2.norm_squared(),
            j: theta1.wedge(theta2),
        }
    }

    pub fn identity() -> Self {
        Self::new(OneForm::DX, OneForm::DY)
    }

    /// Right Cauchy-Green tensor `C = Σᵢ θⁱ ⊗ θⁱ`.
    pub fn cauchy_green(&self) -> [[f64; 2]; 2] {
        let (a, b) = (self.theta1.0, self.theta2.0);
        let mut c = [[0.0; 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                c[r][s] = a[r] * a[s] + b[r] * b[s];
            }
        }
        c
    }

    fn admissible_j(&self) -> Result<f64> {
        if self.j > 0.0 && self.j.is_finite() {
            Ok(self.j)
        } else {
            Err(Error::NonPositiveJacobian {
                jacobian: self.j,
                element: None,
            })
        }
    }
}

pub fn energy_density(params: &NeoHookeanParams, kin: &PointKinematics) -> Result<f64> {
    let j = kin.admissible_j()?;
    let ln_j = j.ln();
    Ok(0.5 * params.mu * (kin.i1 - 2.0) - params.mu * ln_j + 0.5 * params.kappa * ln_j * ln_j)
}

/// Scalar factors of the energy derivatives at one point.
struct Factors {
    /// ∂W/∂J
    dw_dj: f64,
    /// ∂²W/∂J²
    d2w_dj2: f64,
}

fn factors(params: &NeoHookeanParams, kin: &PointKinematics) -> Result<Factors> {
    let j = kin.admissible_j()?;
    let ln_j = j.ln();
    let (mu, kappa) = (params.mu, params.kappa);
    Ok(Factors {
        dw_dj: (kappa * ln_j - mu) / j,
        d2w_dj2: (mu + kappa - kappa * ln_j) / (j * j),
    })
}

/// Gradient of W with respect to the coefficients of θ¹ and θ² on `basis`.
pub fn energy_gradient(
    params: &NeoHookeanParams,
    kin: &PointKinematics,
    basis: &[OneForm; 6],
) -> Result<[f64; 12]> {
    let f = factors(params, kin)?;
    let mut g = [0.0; 12];
    for (k, &psi) in basis.iter().enumerate() {
        // D I₁ = 2 ψ·θⁱ ; D_θ¹ J = ψ ∧ θ² ; D_θ² J = θ¹ ∧ ψ
        g[k] = params.mu * psi.dot(kin.theta1) + f.dw_dj * psi.wedge(kin.theta2);
        g[6 + k] = params.mu * psi.dot(kin.theta2) + f.dw_dj * kin.theta1.wedge(psi);
    }
    Ok(g)
}

/// Hessian of W with respect to the coefficients of θ¹ and θ² on `basis`.
pub fn energy_hessian(
    params: &NeoHookeanParams,
    kin: &PointKinematics,
    basis: &[OneForm; 6],
) -> Result<[[f64; 12]; 12]> {
    let f = factors(params, kin)?;
    let mut dj = [0.0; 12];
    for (k, &psi) in basis.iter().enumerate() {
        dj[k] = psi.wedge(kin.theta2);
        dj[6 + k] = kin.theta1.wedge(psi);
    }
    let mut h = [[0.0; 12]; 12];
    for a in 0..12 {
        for b in 0..12 {
            h[a][b] = f.d2w_dj2 * (dj[a] * dj[b]);
        }
    }
    for k in 0..6 {
        for l in 0..6 {
            let gram = params.mu * basis[k].dot(basis[l]);
            h[k][l] += gram;
            h[6 + k][6 + l] += gram;
            // D_θ¹ D_θ² J = ψ_k ∧ ψ_l
            let cross = f.dw_dj * basis[k].wedge(basis[l]);
            h[k][6 + l] += cross;
            h[6 + l][k] += cross;
        }
    }
    Ok(h)
}

/// First Piola stress `P = t¹ ⊗ θ² + t² ⊗ θ¹`, `P[a][b] = t¹_a θ²_b + t²_a θ¹_b`.
pub fn piola_stress(kin: &PointKinematics, t1: OneForm, t2: OneForm) -> [[f64; 2]; 2] {
    let mut p = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            p[a][b] = t1.0[a] * kin.theta2.0[b] + t2.0[a] * kin.theta1.0[b];
        }
    }
    p
}

pub fn frobenius(m: &[[f64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}
