//! ASCII `.m2d` mesh files.
//!
//! ```text
//! m2d 1
//! <nv> <nt>
//! x y [vertex_marker]          (nv lines)
//! i j k [triangle_marker]      (nt lines, 0-based, counter-clockwise)
//! edges <n>                    (optional section)
//! a b marker                   (n lines)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Coordinates are written
//! with 17 significant digits so that a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::SimplicialMesh2D;
use crate::error::{Error, Result};

pub fn write_m2d(mesh: &SimplicialMesh2D, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_m2d_string(mesh))?;
    Ok(())
}

pub fn read_m2d(path: impl AsRef<Path>) -> Result<SimplicialMesh2D> {
    from_m2d_str(&fs::read_to_string(path)?)
}

pub fn to_m2d_string(mesh: &SimplicialMesh2D) -> String {
    let mut s = String::new();
    s.push_str("m2d 1\n");
    let _ = writeln!(s, "{} {}", mesh.num_vertices(), mesh.num_triangles());
    for (p, m) in mesh.vertices().iter().zip(mesh.vertex_markers()) {
        let _ = writeln!(s, "{:.16e} {:.16e} {}", p[0], p[1], m);
    }
    for (t, m) in mesh.triangles().iter().zip(mesh.triangle_markers()) {
        let _ = writeln!(s, "{} {} {} {}", t[0], t[1], t[2], m);
    }
    let marked = (0..mesh.num_edges())
        .filter(|&e| mesh.edge_markers()[e] != 0)
        .collect::<Vec<_>>();
    if !marked.is_empty() {
        let _ = writeln!(s, "edges {}", marked.len());
        for e in marked {
            let [a, b] = mesh.edges()[e];
            let _ = writeln!(s, "{} {} {}", a, b, mesh.edge_markers()[e]);
        }
    }
    s
}

pub fn from_m2d_str(text: &str) -> Result<SimplicialMesh2D> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, magic) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty mesh file"))?;
    if magic.split_whitespace().collect::<Vec<_>>() != ["m2d", "1"] {
        return Err(Error::parse(ln, format!("expected `m2d 1`, found `{magic}`")));
    }
    let (ln, counts) = lines
        .next()
        .ok_or_else(|| Error::parse(ln + 1, "missing vertex/triangle counts"))?;
    let counts: Vec<usize> = parse_fields(ln, counts)?;
    let [nv, nt] = counts[..] else {
        return Err(Error::parse(ln, "expected `<nv> <nt>`"));
    };

    let mut vertices = Vec::with_capacity(nv);
    let mut vertex_markers = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "unexpected end of file in vertex block"))?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if !(2..=3).contains(&f.len()) {
            return Err(Error::parse(ln, "expected `x y [marker]`"));
        }
        let x = parse_one::<f64>(ln, f[0])?;
        let y = parse_one::<f64>(ln, f[1])?;
        vertices.push([x, y]);
        vertex_markers.push(f.get(2).map_or(Ok(0), |m| parse_one::<i32>(ln, m))?);
    }

    let mut triangles = Vec::with_capacity(nt);
    let mut triangle_markers = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "unexpected end of file in triangle block"))?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if !(3..=4).contains(&f.len()) {
            return Err(Error::parse(ln, "expected `i j k [marker]`"));
        }
        triangles.push([
            parse_one::<usize>(ln, f[0])?,
            parse_one::<usize>(ln, f[1])?,
            parse_one::<usize>(ln, f[2])?,
        ]);
        triangle_markers.push(f.get(3).map_or(Ok(0), |m| parse_one::<i32>(ln, m))?);
    }

    let mut mesh = SimplicialMesh2D::new(vertices, triangles)?;
    for (v, m) in vertex_markers.into_iter().enumerate() {
        mesh.set_vertex_marker(v, m);
    }
    for (t, m) in triangle_markers.into_iter().enumerate() {
        mesh.set_triangle_marker(t, m);
    }

    if let Some((ln, header)) = lines.next() {
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 2 || f[0] != "edges" {
            return Err(Error::parse(ln, format!("unexpected trailing line `{header}`")));
        }
        let n = parse_one::<usize>(ln, f[1])?;
        for _ in 0..n {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| Error::parse(0, "unexpected end of file in edge block"))?;
            let f: Vec<i64> = parse_fields(ln, l)?;
            let [a, b, m] = f[..] else {
                return Err(Error::parse(ln, "expected `a b marker`"));
            };
            let e = mesh
                .find_edge(a as usize, b as usize)
                .ok_or_else(|| Error::parse(ln, format!("no edge ({a}, {b}) in mesh")))?;
            mesh.set_edge_marker(e, m as i32);
        }
        if let Some((ln, l)) = lines.next() {
            return Err(Error::parse(ln, format!("unexpected trailing line `{l}`")));
        }
    }
    Ok(mesh)
}

fn parse_one<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("cannot parse `{tok}`")))
}

fn parse_fields<T: std::str::FromStr>(line: usize, l: &str) -> Result<Vec<T>> {
    l.split_whitespace().map(|t| parse_one(line, t)).collect()
}
