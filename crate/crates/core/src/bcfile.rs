//! Boundary-condition files (`.bc`).
//!
//! ```text
//! # comment
//! dirichlet <vertex-marker> <ux|uy|both> <a+bx+cy>
//! neumann   <edge-marker> <tx> <ty>
//! ```
//!
//! Dirichlet values are displacements at full load; the affine expression is
//! evaluated at the reference position of each marked vertex.

use std::fs;
use std::path::Path;

use crate::assembly::{BoundaryConditions, DofLayout};
use crate::error::{Error, Result};
use crate::mesh::{Point, SimplicialMesh2D};

/// `a + b·x + c·y`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Affine {
    pub constant: f64,
    pub x: f64,
    pub y: f64,
}

impl Affine {
    pub fn eval(&self, p: Point) -> f64 {
        self.constant + self.x * p[0] + self.y * p[1]
    }

    /// Parses sums of terms such as `0.1`, `-2*x`, `3.5y`, `x`, `1e-3*y`.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err("empty expression".into());
        }
        let bytes = s.as_bytes();
        // Split at '+'/'-' that are not part of an exponent.
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            let c = bytes[i];
            if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'+' | b'-' | b'*') {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);

        let mut out = Affine::default();
        for term in terms {
            let (sign, body) = match term.as_bytes()[0] {
                b'+' => (1.0, &term[1..]),
                b'-' => (-1.0, &term[1..]),
                _ => (1.0, term),
            };
            let (coef, var) = match body.char_indices().last() {
                Some((i, c @ ('x' | 'y'))) => {
                    let c_str = body[..i].trim_end_matches('*');
                    let coef = if c_str.is_empty() {
                        1.0
                    } else {
                        c_str.parse::<f64>().map_err(|_| format!("bad coefficient '{c_str}'"))?
                    };
                    (coef, Some(c))
                }
                _ => (body.parse::<f64>().map_err(|_| format!("bad term '{term}'"))?, None),
            };
            match var {
                None => out.constant += sign * coef,
                Some('x') => out.x += sign * coef,
                Some(_) => out.y += sign * coef,
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BcEntry {
    Dirichlet {
        marker: i32,
        components: Vec<usize>,
        value: Affine,
    },
    Neumann {
        marker: i32,
        traction: [f64; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BcFile {
    pub entries: Vec<BcEntry>,
}

impl BcFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: i + 1, message };
            let mut words = line.split_whitespace();
            let kind = words.next().unwrap_or_default();
            let marker = words
                .next()
                .ok_or_else(|| err("missing marker".into()))?
                .parse::<i32>()
                .map_err(|e| err(format!("bad marker: {e}")))?;
            let rest: Vec<&str> = words.collect();
            match kind {
                "dirichlet" => {
                    let (comp, expr) = rest
                        .split_first()
                        .ok_or_else(|| err("missing component".into()))?;
                    let components = match *comp {
                        "ux" => vec![0],
                        "uy" => vec![1],
                        "both" => vec![0, 1],
                        other => return Err(err(format!("unknown component '{other}'"))),
                    };
                    if expr.is_empty() {
                        return Err(err("missing value".into()));
                    }
                    let value = Affine::parse(&expr.join("")).map_err(err)?;
                    entries.push(BcEntry::Dirichlet { marker, components, value });
                }
                "neumann" => {
                    if rest.len() != 2 {
                        return Err(err(format!("expected 2 traction components, got {}", rest.len())));
                    }
                    let t = |s: &str| s.parse::<f64>().map_err(|e| err(format!("bad traction '{s}': {e}")));
                    entries.push(BcEntry::Neumann {
                        marker,
                        traction: [t(rest[0])?, t(rest[1])?],
                    });
                }
                other => return Err(err(format!("unknown condition '{other}'"))),
            }
        }
        Ok(Self { entries })
    }

    /// Later lines override earlier ones on shared vertices.
    pub fn apply(&self, mesh: &SimplicialMesh2D, layout: &DofLayout) -> Result<BoundaryConditions> {
        let mut bcs = BoundaryConditions::default();
        for entry in &self.entries {
            match entry {
                BcEntry::Dirichlet { marker, components, value } => {
                    if mesh.vertices_with_marker(*marker).is_empty() {
                        return Err(Error::InvalidArgument(format!("no vertex carries marker {marker}")));
                    }
                    bcs.prescribe_marker(mesh, layout, *marker, components, |p| value.eval(p));
                }
                BcEntry::Neumann { marker, traction } => {
                    let before = bcs.neumann.len();
                    bcs.add_traction(mesh, *marker, *traction);
                    if bcs.neumann.len() == before {
                        return Err(Error::InvalidArgument(format!(
                            "no boundary edge carries marker {marker}"
                        )));
                    }
                }
            }
        }
        Ok(bcs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_forms() {
        let cases = [
            ("0", (0.0, 0.0, 0.0)),
            ("0.2*x", (0.0, 0.2, 0.0)),
            ("1 + 0.2x - 0.1*y", (1.0, 0.2, -0.1)),
            ("-x+y", (0.0, -1.0, 1.0)),
            ("1e-3*y-2.5e+1", (-25.0, 0.0, 1e-3)),
            ("x*", (0.0, 0.0, 0.0)),
        ];
        for (text, (a, b, c)) in cases.iter().take(5) {
            let f = Affine::parse(text).unwrap();
            assert_eq!((f.constant, f.x, f.y), (*a, *b, *c), "{text}");
        }
        assert!(Affine::parse(cases[5].0).is_err());
        assert!(Affine::parse("2*z").is_err());
        assert!(Affine::parse("").is_err());
    }

    #[test]
    fn parse_lines() {
        let f = BcFile::parse("# patch\ndirichlet 1 both 0.2*x+0.1*y\n\nneumann 2 0 -3.5 # shear\n").unwrap();
        assert_eq!(f.entries.len(), 2);
        assert_eq!(
            f.entries[1],
            BcEntry::Neumann { marker: 2, traction: [0.0, -3.5] }
        );
        let e = BcFile::parse("dirichlet 1 uz 0").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        assert!(BcFile::parse("neumann 1 0").is_err());
        assert!(BcFile::parse("robin 1 0").is_err());
    }
}
