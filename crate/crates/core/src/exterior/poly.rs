//! Polynomial differential forms on ℝ² with monomial coefficients, and the
//! Koszul operator (contraction with the position field `X = x¹∂₁ + x²∂₂`).

use std::collections::BTreeMap;

/// Exponents `(a, b)` of `(x¹)ᵃ (x²)ᵇ`.
pub type Monomial = (u32, u32);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    pub fn x() -> Self {
        Self::from_terms([((1, 0), 1.0)])
    }

    pub fn y() -> Self {
        Self::from_terms([((0, 1), 1.0)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, f64)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: f64) {
        let entry = self.terms.entry(m).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, f64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.terms()
            .map(|((a, b), c)| c * x[0].powi(a as i32) * x[1].powi(b as i32))
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.terms().map(|(m, c)| (m, s * c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in self.terms() {
            for ((p, q), d) in other.terms() {
                out.add_term((a + p, b + q), c * d);
            }
        }
        out
    }

    /// Partial derivative along `x¹` (`var = 0`) or `x²` (`var = 1`).
    pub fn derivative(&self, var: usize) -> Self {
        Self::from_terms(self.terms().filter_map(|((a, b), c)| match var {
            0 if a > 0 => Some(((a - 1, b), c * a as f64)),
            1 if b > 0 => Some(((a, b - 1), c * b as f64)),
            _ => None,
        }))
    }
}

/// Polynomial 0-, 1- or 2-form on ℝ².
#[derive(Debug, Clone, PartialEq)]
pub enum PolyForm {
    Zero(Polynomial),
    /// `f dx¹ + g dx²`.
    One([Polynomial; 2]),
    /// `h dx¹ ∧ dx²`.
    Two(Polynomial),
}

impl PolyForm {
    pub fn form_degree(&self) -> usize {
        match self {
            PolyForm::Zero(_) => 0,
            PolyForm::One(_) => 1,
            PolyForm::Two(_) => 2,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs_coefficient() == 0.0
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        match self {
            PolyForm::Zero(p) | PolyForm::Two(p) => p.max_abs_coefficient(),
            PolyForm::One([f, g]) => f.max_abs_coefficient().max(g.max_abs_coefficient()),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        match self {
            PolyForm::Zero(p) => PolyForm::Zero(p.scale(s)),
            PolyForm::One([f, g]) => PolyForm::One([f.scale(s), g.scale(s)]),
            PolyForm::Two(p) => PolyForm::Two(p.scale(s)),
        }
    }

    /// Sum of two forms of equal degree.
    pub fn add(&self, other: &Self) -> Option<Self> {
        Some(match (self, other) {
            (PolyForm::Zero(a), PolyForm::Zero(b)) => PolyForm::Zero(a.add(b)),
            (PolyForm::One([a, b]), PolyForm::One([c, d])) => PolyForm::One([a.add(c), b.add(d)]),
            (PolyForm::Two(a), PolyForm::Two(b)) => PolyForm::Two(a.add(b)),
            _ => return None,
        })
    }

    /// Exterior derivative. `d` of a 2-form is the zero 2-form (there are no 3-forms in ℝ²).
    pub fn exterior_derivative(&self) -> Self {
        match self {
            PolyForm::Zero(p) => PolyForm::One([p.derivative(0), p.derivative(1)]),
            PolyForm::One([f, g]) => PolyForm::Two(g.derivative(0).add(&f.derivative(1).scale(-1.0))),
            PolyForm::Two(_) => PolyForm::Two(Polynomial::zero()),
        }
    }
}

/// Koszul operator κ_X with `X` the position field based at the origin.
///
/// `κ(f dxⁱ) = f xⁱ` and `κ(h dx¹∧dx²) = h (x¹ dx² − x² dx¹)`. κ vanishes on
/// 0-forms; the result is reported as the zero 0-form.
pub fn koszul(form: &PolyForm) -> PolyForm {
    let (x, y) = (Polynomial::x(), Polynomial::y());
    match form {
        PolyForm::Zero(_) => PolyForm::Zero(Polynomial::zero()),
        PolyForm::One([f, g]) => PolyForm::Zero(f.mul(&x).add(&g.mul(&y))),
        PolyForm::Two(h) => PolyForm::One([h.mul(&y).scale(-1.0), h.mul(&x)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomials(max_degree: u32) -> Vec<Monomial> {
        (0..=max_degree)
            .flat_map(|d| (0..=d).map(move |a| (a, d - a)))
            .collect()
    }

    #[test]
    fn koszul_of_dx_is_x() {
        let dx = PolyForm::One([Polynomial::constant(1.0), Polynomial::zero()]);
        assert_eq!(koszul(&dx), PolyForm::Zero(Polynomial::x()));
    }

    #[test]
    fn koszul_annihilates_reference_whitney_form() {
        // λ¹dλ² − λ²dλ¹ = x dy − y dx on the reference triangle.
        let w = PolyForm::One([Polynomial::y().scale(-1.0), Polynomial::x()]);
        assert!(koszul(&w).is_zero());
    }

    #[test]
    fn koszul_squared_vanishes() {
        for m in monomials(2) {
            let two = PolyForm::Two(Polynomial::from_terms([(m, 1.0)]));
            assert!(koszul(&koszul(&two)).is_zero());
            for slot in 0..2 {
                let mut c = [Polynomial::zero(), Polynomial::zero()];
                c[slot] = Polynomial::from_terms([(m, 1.0)]);
                assert!(koszul(&koszul(&PolyForm::One(c))).is_zero());
            }
        }
    }

    #[test]
    fn homotopy_formula_on_homogeneous_forms() {
        // (dκ + κd) ω = (r + k) ω for ω homogeneous of polynomial degree r and form degree k.
        for m in monomials(3) {
            let r = (m.0 + m.1) as f64;
            let p = Polynomial::from_terms([(m, 1.5)]);
            let forms = [
                PolyForm::Zero(p.clone()),
                PolyForm::One([p.clone(), Polynomial::zero()]),
                PolyForm::One([Polynomial::zero(), p.clone()]),
                PolyForm::Two(p.clone()),
            ];
            for w in forms {
                let k = w.form_degree() as f64;
                let lhs = match w.form_degree() {
                    0 => koszul(&w.exterior_derivative()),
                    2 => koszul(&w).exterior_derivative(),
                    _ => koszul(&w)
                        .exterior_derivative()
                        .add(&koszul(&w.exterior_derivative()))
                        .unwrap(),
                };
                let diff = lhs.add(&w.scale(-(r + k))).unwrap();
                assert!(diff.max_abs_coefficient() < 1e-14, "{w:?}");
            }
        }
    }

    #[test]
    fn d_squared_vanishes() {
        let p = Polynomial::from_terms([((2, 1), 3.0), ((0, 3), -1.0), ((1, 0), 2.0)]);
        assert!(PolyForm::Zero(p).exterior_derivative().exterior_derivative().is_zero());
    }
}
