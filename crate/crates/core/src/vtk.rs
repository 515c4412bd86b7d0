//! Legacy ASCII VTK output of a solved state.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::assembly::{compatibility_residual, field_integrals, DofLayout, MixedState};
use crate::error::Result;
use crate::mesh::SimplicialMesh2D;
use crate::quadrature::QuadratureRule;

/// Unstructured grid on the deformed configuration. Cell fields are element
/// averages of ‖P‖_F and J, and the element compatibility residual
/// `Σᵢ ‖θⁱ − dφⁱ‖ + |dθⁱ|`.
pub fn to_vtk_string(
    mesh: &SimplicialMesh2D,
    layout: &DofLayout,
    state: &MixedState,
    quad: &QuadratureRule,
) -> Result<String> {
    let fields = field_integrals(mesh, layout, state, quad)?;
    let compat = compatibility_residual(mesh, layout, state, quad)?;
    let nv = mesh.num_vertices();
    let nt = mesh.num_triangles();

    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\nmixedforms solution\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {nv} double");
    for v in 0..nv {
        let p = state.deformed_position(layout, v);
        let _ = writeln!(s, "{:.15e} {:.15e} 0", p[0], p[1]);
    }
    let _ = writeln!(s, "CELLS {nt} {}", 4 * nt);
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        s.push_str("5\n");
    }

    let _ = writeln!(s, "POINT_DATA {nv}\nVECTORS displacement double");
    for v in 0..nv {
        let u = state.displacement(mesh, layout, v);
        let _ = writeln!(s, "{:.15e} {:.15e} 0", u[0], u[1]);
    }

    let _ = writeln!(s, "CELL_DATA {nt}");
    let mut scalar = |name: &str, values: &mut dyn Iterator<Item = f64>| {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in values {
            let _ = writeln!(s, "{v:.15e}");
        }
    };
    scalar("piola_norm", &mut fields.elements.iter().map(|e| e.piola_norm / e.area));
    scalar("J", &mut fields.elements.iter().map(|e| e.mean_j));
    scalar("compat_residual", &mut compat.iter().map(|c| c.total()));
    Ok(s)
}

pub fn write_vtk(
    mesh: &SimplicialMesh2D,
    layout: &DofLayout,
    state: &MixedState,
    quad: &QuadratureRule,
    path: impl AsRef<Path>,
) -> Result<()> {
    fs::write(path, to_vtk_string(mesh, layout, state, quad)?)?;
    Ok(())
}
