//! Symmetric quadrature on triangles (Dunavant-type rules).
//!
//! Weights sum to one; multiply by the element area at the use site.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 3], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Area-normalised integral of `f` over the reference triangle.
    pub fn integrate(&self, f: impl Fn([f64; 3]) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }

    fn push_centroid(&mut self, w: f64) {
        self.points.push([1.0 / 3.0; 3]);
        self.weights.push(w);
    }

    fn push_orbit3(&mut self, a: f64, w: f64) {
        let b = 1.0 - 2.0 * a;
        for p in [[b, a, a], [a, b, a], [a, a, b]] {
            self.points.push(p);
            self.weights.push(w);
        }
    }

    fn push_orbit6(&mut self, a: f64, b: f64, w: f64) {
        let c = 1.0 - a - b;
        for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            self.points.push(p);
            self.weights.push(w);
        }
    }
}

/// Rule exact for polynomials of total degree `degree` (1..=6).
pub fn quadrature(degree: usize) -> Result<QuadratureRule> {
    let mut q = QuadratureRule {
        points: Vec::new(),
        weights: Vec::new(),
        degree,
    };
    match degree {
        1 => q.push_centroid(1.0),
        2 => q.push_orbit3(1.0 / 6.0, 1.0 / 3.0),
        3 | 4 => {
            q.degree = 4;
            q.push_orbit3(0.445_948_490_915_964_886_32, 0.223_381_589_678_011_465_7);
            q.push_orbit3(0.091_576_213_509_770_743_46, 0.109_951_743_655_321_867_64);
        }
        5 => {
            let s = 15f64.sqrt();
            q.push_centroid(9.0 / 40.0);
            q.push_orbit3((6.0 - s) / 21.0, (155.0 - s) / 1200.0);
            q.push_orbit3((6.0 + s) / 21.0, (155.0 + s) / 1200.0);
        }
        6 => {
            q.push_orbit3(0.249_286_745_170_910_421_29, 0.116_786_275_726_379_366_03);
            q.push_orbit3(0.063_089_014_491_502_228_34, 0.050_844_906_370_206_816_921);
            q.push_orbit6(
                0.053_145_049_844_816_947_353,
                0.310_352_451_033_784_405_42,
                0.082_851_075_618_373_575_194,
            );
        }
        d => return Err(Error::UnsupportedQuadratureDegree(d)),
    }
    Ok(q)
}
