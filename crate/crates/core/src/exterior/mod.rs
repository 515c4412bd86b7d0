//! Lowest-order polynomial differential forms on a triangle.
//!
//! All 1-forms are stored on the global Cartesian co-basis `dx¹, dx²`; the
//! barycentric representation only appears while evaluating basis functions.

mod poly;

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub use poly::{koszul, Monomial, PolyForm, Polynomial};

use crate::error::{Error, Result};
use crate::mesh::{ElementGeometry, Point, LOCAL_EDGES};

/// Constant 1-form `a dx¹ + b dx²`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OneForm(pub [f64; 2]);

impl OneForm {
    pub const ZERO: Self = Self([0.0, 0.0]);
    pub const DX: Self = Self([1.0, 0.0]);
    pub const DY: Self = Self([0.0, 1.0]);

    pub fn new(a: f64, b: f64) -> Self {
        Self([a, b])
    }

    /// Coefficient of `self ∧ other` on `dx¹ ∧ dx²`.
    #[inline]
    pub fn wedge(self, other: Self) -> f64 {
        self.0[0] * other.0[1] - self.0[1] * other.0[0]
    }

    /// Euclidean inner product of the components.
    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1]
    }

    /// Pairing with the Cartesian frame vector `E_i`.
    #[inline]
    pub fn eval(self, frame: usize) -> f64 {
        self.0[frame]
    }

    /// Action on an arbitrary vector.
    #[inline]
    pub fn apply(self, v: [f64; 2]) -> f64 {
        self.0[0] * v[0] + self.0[1] * v[1]
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }
}

impl Add for OneForm {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl AddAssign for OneForm {
    fn add_assign(&mut self, o: Self) {
        self.0[0] += o.0[0];
        self.0[1] += o.0[1];
    }
}

impl Sub for OneForm {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Neg for OneForm {
    type Output = Self;
    fn neg(self) -> Self {
        Self([-self.0[0], -self.0[1]])
    }
}

impl Mul<OneForm> for f64 {
    type Output = OneForm;
    fn mul(self, f: OneForm) -> OneForm {
        OneForm([self * f.0[0], self * f.0[1]])
    }
}

/// Wedge product of two constant 1-forms, as the `dx¹ ∧ dx²` coefficient.
pub fn wedge11(a: OneForm, b: OneForm) -> f64 {
    a.wedge(b)
}

/// Hodge star of `c dx¹ ∧ dx²` under the Euclidean metric and standard orientation.
pub fn hodge_star_2form(coefficient: f64, _geometry: &ElementGeometry) -> f64 {
    coefficient
}

/// Barycentric coordinates of a physical point.
pub fn barycentric(geometry: &ElementGeometry, point: Point) -> [f64; 3] {
    let p0 = geometry.vertex_coords[0];
    let d = [point[0] - p0[0], point[1] - p0[1]];
    let g = &geometry.grad_lambda;
    let l1 = g[1][0] * d[0] + g[1][1] * d[1];
    let l2 = g[2][0] * d[0] + g[2][1] * d[1];
    [1.0 - l1 - l2, l1, l2]
}

/// `dλⁱ` for the three vertices.
pub fn grad_lambda(geometry: &ElementGeometry) -> [OneForm; 3] {
    geometry.grad_lambda.map(OneForm)
}

/// Vertex pairs of the local P₁Λ¹ basis `λⁱ dλʲ`.
pub const P1_PAIRS: [[usize; 2]; 6] = [[0, 1], [1, 0], [1, 2], [2, 1], [2, 0], [0, 2]];

/// Whitney form `λⁱ dλʲ − λʲ dλⁱ` of local edge `edge` (ordered as [`LOCAL_EDGES`]).
pub fn whitney_basis(geometry: &ElementGeometry, edge: usize, bary: [f64; 3]) -> OneForm {
    let [i, j] = LOCAL_EDGES[edge];
    let g = grad_lambda(geometry);
    bary[i] * g[j] - bary[j] * g[i]
}

/// Basis function `index` of P₁Λ¹, i.e. `λⁱ dλʲ` for `[i, j] = P1_PAIRS[index]`.
pub fn p1lambda1_basis(geometry: &ElementGeometry, index: usize, bary: [f64; 3]) -> OneForm {
    let [i, j] = P1_PAIRS[index];
    bary[i] * OneForm(geometry.grad_lambda[j])
}

/// All six P₁Λ¹ basis values at a point.
pub fn p1lambda1_values(grads: &[OneForm; 3], bary: [f64; 3]) -> [OneForm; 6] {
    P1_PAIRS.map(|[i, j]| bary[i] * grads[j])
}

/// All three Whitney basis values at a point.
pub fn whitney_values(grads: &[OneForm; 3], bary: [f64; 3]) -> [OneForm; 3] {
    LOCAL_EDGES.map(|[i, j]| bary[i] * grads[j] - bary[j] * grads[i])
}

/// `d(λⁱ dλʲ) = dλⁱ ∧ dλʲ` for each P₁Λ¹ basis function.
pub fn p1lambda1_derivatives(grads: &[OneForm; 3]) -> [f64; 6] {
    P1_PAIRS.map(|[i, j]| grads[i].wedge(grads[j]))
}

/// Exterior derivative of a Whitney 1-form with per-edge coefficients.
///
/// Uses `d(λⁱ dλʲ − λʲ dλⁱ) = 2 dλⁱ ∧ dλʲ`; the result is constant on the element.
pub fn exterior_derivative_whitney(coeffs: [f64; 3], geometry: &ElementGeometry) -> f64 {
    let g = grad_lambda(geometry);
    LOCAL_EDGES
        .iter()
        .zip(coeffs)
        .map(|(&[i, j], c)| c * 2.0 * g[i].wedge(g[j]))
        .sum()
}

/// Line integral of a 1-form field along the segment `a → b`.
///
/// Two-point Gauss, exact for fields with affine coefficients.
pub fn line_integral(a: Point, b: Point, field: impl Fn(Point) -> OneForm) -> f64 {
    let tangent = [b[0] - a[0], b[1] - a[1]];
    let g = 0.5 / 3f64.sqrt();
    [0.5 - g, 0.5 + g]
        .iter()
        .map(|&s| {
            let p = [a[0] + s * tangent[0], a[1] + s * tangent[1]];
            0.5 * field(p).apply(tangent)
        })
        .sum()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `(dim P_r Λᵏ(ℝᵐ), dim P_r⁻ Λᵏ(ℝᵐ))`.
pub fn space_dimensions(r: usize, k: usize, m: usize) -> Result<(usize, usize)> {
    if r < 1 || k > m {
        return Err(Error::InvalidArgument(format!(
            "space dimensions need r >= 1 and 0 <= k <= m (got r={r}, k={k}, m={m})"
        )));
    }
    let full = binomial(r + m, m) * binomial(m, k);
    let trimmed = binomial(r + k - 1, k) * binomial(m + r, m - k);
    Ok((full, trimmed))
}
