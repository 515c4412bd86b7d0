//! Structured meshes of the benchmark domains.
//!
//! Each generator maps a structured grid of quads onto the domain and splits
//! every quad into two counter-clockwise triangles. The number of cells per
//! direction doubles with each refinement level, so level `r + 1` resolves the
//! same geometry as a uniform refinement of level `r` (except along the curved
//! hole of the plate, whose polygon gains vertices with every level).

use std::f64::consts::FRAC_PI_2;

use super::{Point, SimplicialMesh2D};

/// Boundary marker values used by the generators.
pub mod markers {
    pub const COOK_CLAMPED: i32 = 1;
    pub const COOK_LOADED: i32 = 2;
    pub const COOK_BOTTOM: i32 = 3;
    pub const COOK_TOP: i32 = 4;

    pub const BLOCK_BOTTOM: i32 = 1;
    pub const BLOCK_SYMMETRY: i32 = 2;
    pub const BLOCK_LOADED: i32 = 3;
    pub const BLOCK_TOP_FREE: i32 = 4;
    pub const BLOCK_RIGHT: i32 = 5;

    pub const PLATE_HOLE: i32 = 1;
    pub const PLATE_BOTTOM: i32 = 2;
    pub const PLATE_LEFT: i32 = 3;
    pub const PLATE_RIGHT: i32 = 4;
    pub const PLATE_TOP: i32 = 5;
}

/// Trapezoidal cantilever: clamped on `x = 0`, sheared on `x = width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CookGeometry {
    pub width: f64,
    pub left_height: f64,
    pub right_height: f64,
    /// Height of the lower right corner.
    pub right_bottom: f64,
    /// Cells per direction at refinement 0.
    pub base_divisions: usize,
}

impl Default for CookGeometry {
    fn default() -> Self {
        Self {
            width: 48.0,
            left_height: 44.0,
            right_height: 16.0,
            right_bottom: 44.0,
            base_divisions: 2,
        }
    }
}

impl CookGeometry {
    /// Upper corner of the loaded edge.
    pub fn probe(&self) -> Point {
        [self.width, self.right_bottom + self.right_height]
    }
}

/// Symmetric half of a block compressed on part of its top face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockGeometry {
    pub half_width: f64,
    pub height: f64,
    /// Loaded part of the top face, measured from the symmetry line.
    pub loaded_half_width: f64,
    pub base_divisions: usize,
}

impl Default for BlockGeometry {
    fn default() -> Self {
        Self {
            half_width: 10.0,
            height: 10.0,
            loaded_half_width: 5.0,
            base_divisions: 2,
        }
    }
}

impl BlockGeometry {
    /// Centre of the loaded face, on the symmetry line.
    pub fn probe(&self) -> Point {
        [0.0, self.height]
    }
}

/// Quarter of a square plate with a centred circular hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateGeometry {
    pub half_side: f64,
    pub hole_radius: f64,
    pub base_divisions: usize,
}

impl Default for PlateGeometry {
    fn default() -> Self {
        Self {
            half_side: 1.0,
            hole_radius: 0.5,
            base_divisions: 2,
        }
    }
}

impl PlateGeometry {
    /// Corner of the extended face on the symmetry axis `y = 0`.
    pub fn probe(&self) -> Point {
        [self.half_side, 0.0]
    }
}

fn structured(nx: usize, ny: usize, map: impl Fn(f64, f64) -> Point) -> SimplicialMesh2D {
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(map(i as f64 / nx as f64, j as f64 / ny as f64));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    SimplicialMesh2D::new(vertices, triangles).expect("structured map is orientation preserving")
}

fn near(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * scale
}

pub fn generate_cook(geometry: &CookGeometry, refinement: usize) -> SimplicialMesh2D {
    use markers::*;
    let g = *geometry;
    let n = g.base_divisions.max(1) << refinement;
    let mut mesh = structured(n, n, |u, v| {
        let x = g.width * u;
        let bottom = g.right_bottom * u;
        let top = g.left_height + (g.right_bottom + g.right_height - g.left_height) * u;
        [x, bottom + v * (top - bottom)]
    });
    let scale = g.width.max(g.left_height);
    mesh.mark_boundary_edges(|p, q| {
        if near(p[0], 0.0, scale) && near(q[0], 0.0, scale) {
            Some(COOK_CLAMPED)
        } else if near(p[0], g.width, scale) && near(q[0], g.width, scale) {
            Some(COOK_LOADED)
        } else if near(p[1], g.right_bottom * p[0] / g.width, scale)
            && near(q[1], g.right_bottom * q[0] / g.width, scale)
        {
            Some(COOK_BOTTOM)
        } else {
            Some(COOK_TOP)
        }
    });
    mesh
}

pub fn generate_block(geometry: &BlockGeometry, refinement: usize) -> SimplicialMesh2D {
    use markers::*;
    let g = *geometry;
    let n = g.base_divisions.max(1) << refinement;
    let mut mesh = structured(n, n, |u, v| [g.half_width * u, g.height * v]);
    let scale = g.half_width.max(g.height);
    mesh.mark_boundary_edges(|p, q| {
        let mid_x = 0.5 * (p[0] + q[0]);
        if near(p[1], 0.0, scale) && near(q[1], 0.0, scale) {
            Some(BLOCK_BOTTOM)
        } else if near(p[0], 0.0, scale) && near(q[0], 0.0, scale) {
            Some(BLOCK_SYMMETRY)
        } else if near(p[1], g.height, scale) && near(q[1], g.height, scale) {
            Some(if mid_x < g.loaded_half_width {
                BLOCK_LOADED
            } else {
                BLOCK_TOP_FREE
            })
        } else {
            Some(BLOCK_RIGHT)
        }
    });
    mesh
}

/// Quarter plate `[0, L]²` minus the disc of radius `R` about the origin.
///
/// A structured grid runs from the hole (angles spaced uniformly) out to the
/// two outer faces; the angular direction uses twice as many cells as the
/// radial one so that each outer face receives `n` cells.
pub fn generate_plate_with_hole(geometry: &PlateGeometry, refinement: usize) -> SimplicialMesh2D {
    use markers::*;
    let g = *geometry;
    let n = g.base_divisions.max(1) << refinement;
    let (l, r) = (g.half_side, g.hole_radius);
    // u runs along the hole from the x axis to the y axis, v radially outwards.
    // The outer face is traversed in the same direction: first the right face
    // bottom to top, then the top face right to left.
    let mut mesh = structured(2 * n, n, |u, v| {
        // Reversed so that (u, v) is a positively oriented chart.
        let u = 1.0 - u;
        let angle = FRAC_PI_2 * u;
        let inner = [r * angle.cos(), r * angle.sin()];
        let outer = if u <= 0.5 {
            [l, l * 2.0 * u]
        } else {
            [l * (2.0 - 2.0 * u), l]
        };
        [
            inner[0] + v * (outer[0] - inner[0]),
            inner[1] + v * (outer[1] - inner[1]),
        ]
    });
    mesh.mark_boundary_edges(|p, q| {
        if near(p[1], 0.0, l) && near(q[1], 0.0, l) {
            Some(PLATE_BOTTOM)
        } else if near(p[0], 0.0, l) && near(q[0], 0.0, l) {
            Some(PLATE_LEFT)
        } else if near(p[0], l, l) && near(q[0], l, l) {
            Some(PLATE_RIGHT)
        } else if near(p[1], l, l) && near(q[1], l, l) {
            Some(PLATE_TOP)
        } else {
            Some(PLATE_HOLE)
        }
    });
    mesh
}
