//! Mixed finite element discretisation of planar hyperelasticity in the
//! language of finite element exterior calculus.
//!
//! Unknowns are the deformation `φ` (P₁ Lagrange), the deformation one-forms
//! `θ¹, θ²` (full P₁Λ¹) and the traction one-forms `t¹, t²` (Whitney P₁⁻Λ¹).
//! Stationary points of a three-field functional are found with Newton's
//! method under load stepping.

pub mod assembly;
pub mod bcfile;
pub mod benchmark;
pub mod error;
pub mod exterior;
pub mod material;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod sparse;
pub mod vtk;

pub use error::{Error, Result};
