//! Two-dimensional simplicial complexes.
//!
//! Edges are globally oriented from the lower to the higher vertex index.
//! Every triangle stores, for its three local edges `(0,1)`, `(1,2)`, `(2,0)`,
//! the global edge index and the sign relating the local traversal to the
//! global orientation. Tangential continuity of edge-based 1-form fields is
//! expressed entirely through these signs.

mod generate;
mod io;

use std::collections::HashMap;

pub use generate::{
    generate_block, generate_cook, generate_plate_with_hole, markers, BlockGeometry,
    CookGeometry, PlateGeometry,
};
pub use io::{read_m2d, write_m2d};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Local edges of a triangle as pairs of local vertex indices.
pub const LOCAL_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

const DEGENERACY_TOL: f64 = 1e-14;

/// Reference to a global edge from inside a triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRef {
    pub edge: usize,
    /// `+1` when the local traversal agrees with the global low-to-high orientation.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialMesh2D {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_index: HashMap<[usize; 2], usize>,
    triangle_edges: Vec<[EdgeRef; 3]>,
    edge_triangles: Vec<Vec<usize>>,
    boundary_edges: Vec<usize>,
    vertex_markers: Vec<i32>,
    edge_markers: Vec<i32>,
    triangle_markers: Vec<i32>,
}

impl SimplicialMesh2D {
    /// Builds the complex from vertex coordinates and counter-clockwise triangles.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        if vertices.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        let mut seen = HashMap::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references a vertex outside 0..{nv}"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0] {
                return Err(Error::InvalidMesh(format!("triangle {t} repeats a vertex")));
            }
            let mut key = *tri;
            key.sort_unstable();
            if let Some(prev) = seen.insert(key, t) {
                return Err(Error::InvalidMesh(format!(
                    "triangles {prev} and {t} are duplicates"
                )));
            }
            let p = tri.map(|v| vertices[v]);
            let signed_area = signed_area(&p);
            if signed_area <= DEGENERACY_TOL * triangle_scale(&p).powi(2) {
                return Err(Error::DegenerateTriangle {
                    triangle: t,
                    signed_area,
                });
            }
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_triangles: Vec<Vec<usize>> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut refs = [EdgeRef { edge: 0, sign: 1 }; 3];
            for (m, [i, j]) in LOCAL_EDGES.iter().enumerate() {
                let (a, b) = (tri[*i], tri[*j]);
                let key = [a.min(b), a.max(b)];
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_triangles.push(Vec::with_capacity(2));
                    edges.len() - 1
                });
                edge_triangles[e].push(t);
                if edge_triangles[e].len() > 2 {
                    return Err(Error::NonManifoldEdge(key[0], key[1]));
                }
                refs[m] = EdgeRef {
                    edge: e,
                    sign: if a < b { 1 } else { -1 },
                };
            }
            triangle_edges.push(refs);
        }
        // Two triangles sharing an edge must traverse it in opposite directions.
        for (e, tris) in edge_triangles.iter().enumerate() {
            if let [t0, t1] = tris[..] {
                let s0 = local_sign(&triangle_edges[t0], e);
                let s1 = local_sign(&triangle_edges[t1], e);
                if s0 + s1 != 0 {
                    return Err(Error::InvalidMesh(format!(
                        "triangles {t0} and {t1} are inconsistently oriented"
                    )));
                }
            }
        }
        let boundary_edges = (0..edges.len())
            .filter(|&e| edge_triangles[e].len() == 1)
            .collect();
        let ne = edges.len();
        let nt = triangles.len();
        Ok(Self {
            vertices,
            triangles,
            edges,
            edge_index,
            triangle_edges,
            edge_triangles,
            boundary_edges,
            vertex_markers: vec![0; nv],
            edge_markers: vec![0; ne],
            triangle_markers: vec![0; nt],
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangle_edges(&self) -> &[[EdgeRef; 3]] {
        &self.triangle_edges
    }

    /// Triangles incident to each edge (one or two).
    pub fn edge_triangles(&self, edge: usize) -> &[usize] {
        &self.edge_triangles[edge]
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    pub fn is_boundary_edge(&self, edge: usize) -> bool {
        self.edge_triangles[edge].len() == 1
    }

    pub fn vertex_markers(&self) -> &[i32] {
        &self.vertex_markers
    }

    pub fn edge_markers(&self) -> &[i32] {
        &self.edge_markers
    }

    pub fn triangle_markers(&self) -> &[i32] {
        &self.triangle_markers
    }

    pub fn set_vertex_marker(&mut self, vertex: usize, marker: i32) {
        self.vertex_markers[vertex] = marker;
    }

    pub fn set_triangle_marker(&mut self, triangle: usize, marker: i32) {
        self.triangle_markers[triangle] = marker;
    }

    /// Looks up the global edge joining two vertices.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&[a.min(b), a.max(b)]).copied()
    }

    pub fn set_edge_marker(&mut self, edge: usize, marker: i32) {
        self.edge_markers[edge] = marker;
    }

    /// Tags every boundary edge for which `rule(p, q)` returns a marker.
    pub fn mark_boundary_edges(&mut self, mut rule: impl FnMut(Point, Point) -> Option<i32>) {
        for &e in &self.boundary_edges {
            let [a, b] = self.edges[e];
            if let Some(m) = rule(self.vertices[a], self.vertices[b]) {
                self.edge_markers[e] = m;
            }
        }
    }

    /// Vertices carrying `marker`, either directly or through an incident marked boundary edge.
    pub fn vertices_with_marker(&self, marker: i32) -> Vec<usize> {
        let mut hit = vec![false; self.vertices.len()];
        for (v, &m) in self.vertex_markers.iter().enumerate() {
            if m == marker {
                hit[v] = true;
            }
        }
        for (e, &m) in self.edge_markers.iter().enumerate() {
            if m == marker {
                let [a, b] = self.edges[e];
                hit[a] = true;
                hit[b] = true;
            }
        }
        (0..hit.len()).filter(|&v| hit[v]).collect()
    }

    pub fn edges_with_marker(&self, marker: i32) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edge_markers[e] == marker)
            .collect()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Number of closed loops formed by the boundary edges.
    pub fn boundary_loops(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        let mut on_boundary = vec![false; self.vertices.len()];
        for &e in &self.boundary_edges {
            let [a, b] = self.edges[e];
            on_boundary[a] = true;
            on_boundary[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        (0..self.vertices.len())
            .filter(|&v| on_boundary[v] && find(&mut parent, v) == v)
            .count()
    }

    /// Affine data of triangle `t`.
    pub fn element_geometry(&self, t: usize) -> Result<ElementGeometry> {
        let tri = self
            .triangles
            .get(t)
            .ok_or_else(|| Error::InvalidArgument(format!("triangle index {t} out of range")))?;
        ElementGeometry::new(tri.map(|v| self.vertices[v]))
    }

    pub fn total_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|tri| signed_area(&tri.map(|v| self.vertices[v])))
            .sum()
    }

    /// Splits every triangle into four through its edge midpoints.
    ///
    /// The midpoint of edge `e` becomes vertex `V + e`. Boundary markers are
    /// inherited by the child edges, and by the midpoint vertex.
    pub fn refine_uniform(&self) -> Result<Self> {
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(self.edges.iter().map(|&[a, b]| {
            let (p, q) = (self.vertices[a], self.vertices[b]);
            [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
        }));
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (tri, refs) in self.triangles.iter().zip(&self.triangle_edges) {
            let [a, b, c] = *tri;
            let [mab, mbc, mca] = refs.map(|r| nv + r.edge);
            triangles.push([a, mab, mca]);
            triangles.push([mab, b, mbc]);
            triangles.push([mca, mbc, c]);
            triangles.push([mab, mbc, mca]);
        }
        let mut fine = Self::new(vertices, triangles)?;
        fine.vertex_markers[..nv].copy_from_slice(&self.vertex_markers);
        for (t, &m) in self.triangle_markers.iter().enumerate() {
            fine.triangle_markers[4 * t..4 * t + 4].fill(m);
        }
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            let m = self.edge_markers[e];
            if m == 0 {
                continue;
            }
            let mid = nv + e;
            for half in [[a, mid], [mid, b]] {
                if let Some(fe) = fine.find_edge(half[0], half[1]) {
                    fine.edge_markers[fe] = m;
                }
            }
            if self.is_boundary_edge(e) {
                fine.vertex_markers[mid] = m;
            }
        }
        Ok(fine)
    }

    /// Same complex with vertex `v` renamed to `perm[v]`.
    pub fn relabel_vertices(&self, perm: &[usize]) -> Result<Self> {
        let nv = self.vertices.len();
        if perm.len() != nv {
            return Err(Error::DimensionMismatch {
                expected: nv,
                actual: perm.len(),
            });
        }
        let mut vertices = vec![[0.0; 2]; nv];
        let mut vertex_markers = vec![0; nv];
        for v in 0..nv {
            vertices[perm[v]] = self.vertices[v];
            vertex_markers[perm[v]] = self.vertex_markers[v];
        }
        let triangles = self.triangles.iter().map(|t| t.map(|v| perm[v])).collect();
        let mut out = Self::new(vertices, triangles)?;
        out.vertex_markers = vertex_markers;
        out.triangle_markers = self.triangle_markers.clone();
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            if self.edge_markers[e] != 0 {
                let fe = out
                    .find_edge(perm[a], perm[b])
                    .expect("relabeling preserves edges");
                out.edge_markers[fe] = self.edge_markers[e];
            }
        }
        Ok(out)
    }
}

fn local_sign(refs: &[EdgeRef; 3], edge: usize) -> i8 {
    refs.iter().find(|r| r.edge == edge).map_or(0, |r| r.sign)
}

fn signed_area(p: &[Point; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

fn triangle_scale(p: &[Point; 3]) -> f64 {
    LOCAL_EDGES
        .iter()
        .map(|&[i, j]| (p[j][0] - p[i][0]).hypot(p[j][1] - p[i][1]))
        .fold(0.0, f64::max)
}

/// Affine map from the reference triangle onto a physical triangle.
///
/// `x = P0 + T (λ¹, λ²)`, so the columns of `T` are `P1 − P0` and `P2 − P0`
/// and the gradients of λ¹, λ² are the rows of `T⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub vertex_coords: [Point; 3],
    /// `t[row][col]`.
    pub t: [[f64; 2]; 2],
    pub area: f64,
    pub grad_lambda: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(p: [Point; 3]) -> Result<Self> {
        let t = [
            [p[1][0] - p[0][0], p[2][0] - p[0][0]],
            [p[1][1] - p[0][1], p[2][1] - p[0][1]],
        ];
        let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        let scale = triangle_scale(&p);
        if !(det.abs() > DEGENERACY_TOL * scale * scale) {
            return Err(Error::DegenerateTriangle {
                triangle: usize::MAX,
                signed_area: 0.5 * det,
            });
        }
        let inv = [
            [t[1][1] / det, -t[0][1] / det],
            [-t[1][0] / det, t[0][0] / det],
        ];
        let g1 = inv[0];
        let g2 = inv[1];
        let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
        Ok(Self {
            vertex_coords: p,
            t,
            area: 0.5 * det.abs(),
            grad_lambda: [g0, g1, g2],
        })
    }

    pub fn det(&self) -> f64 {
        self.t[0][0] * self.t[1][1] - self.t[0][1] * self.t[1][0]
    }

    /// Physical point with barycentric coordinates `bary`.
    pub fn point(&self, bary: [f64; 3]) -> Point {
        let p = &self.vertex_coords;
        [
            bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
            bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
        ]
    }

    pub fn centroid(&self) -> Point {
        self.point([1.0 / 3.0; 3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> SimplicialMesh2D {
        SimplicialMesh2D::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn single_triangle_counts() {
        let m = SimplicialMesh2D::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]])
            .unwrap();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_triangles()), (3, 3, 1));
        assert_eq!(m.boundary_edges().len(), 3);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn square_counts_and_orientation() {
        let m = unit_square();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_triangles()), (4, 5, 2));
        assert_eq!(m.boundary_edges().len(), 4);
        let interior: Vec<_> = (0..5).filter(|&e| !m.is_boundary_edge(e)).collect();
        assert_eq!(interior.len(), 1);
        let e = interior[0];
        assert_eq!(m.edges()[e], [0, 2]);
        let s: i8 = m
            .triangle_edges()
            .iter()
            .flat_map(|r| r.iter())
            .filter(|r| r.edge == e)
            .map(|r| r.sign)
            .sum();
        assert_eq!(s, 0);
        for (tri, refs) in m.triangles().iter().zip(m.triangle_edges()) {
            for (k, [i, j]) in LOCAL_EDGES.iter().enumerate() {
                let [a, b] = m.edges()[refs[k].edge];
                let expected = if tri[*i] == a && tri[*j] == b { 1 } else { -1 };
                assert_eq!(refs[k].sign, expected);
            }
        }
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(m.boundary_loops(), 1);
    }

    #[test]
    fn rejects_clockwise_and_degenerate() {
        let cw = SimplicialMesh2D::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]], vec![[0, 1, 2]]);
        assert!(matches!(cw, Err(Error::DegenerateTriangle { .. })));
        let flat = SimplicialMesh2D::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], vec![[0, 1, 2]]);
        assert!(matches!(flat, Err(Error::DegenerateTriangle { .. })));
    }

    #[test]
    fn rejects_non_manifold_edge() {
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0], [0.5, 2.0]];
        // Three triangles on edge (0,1); the third one duplicates orientation too.
        let r = SimplicialMesh2D::new(verts, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]);
        assert!(matches!(
            r,
            Err(Error::NonManifoldEdge(0, 1)) | Err(Error::InvalidMesh(_))
        ));
    }

    #[test]
    fn rejects_duplicates_and_bad_indices() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(SimplicialMesh2D::new(v.clone(), vec![[0, 1, 2], [1, 2, 0]]).is_err());
        assert!(SimplicialMesh2D::new(v, vec![[0, 1, 7]]).is_err());
    }

    #[test]
    fn reference_geometry() {
        let g = ElementGeometry::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(g.grad_lambda, [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(g.area, 0.5);
        assert_eq!(g.det(), 1.0);
    }

    #[test]
    fn scaled_and_right_triangle_geometry() {
        let g = ElementGeometry::new([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]).unwrap();
        assert_eq!(g.grad_lambda, [[-0.5, -0.5], [0.5, 0.0], [0.0, 0.5]]);
        assert_eq!(g.area, 2.0);
        let r = ElementGeometry::new([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(r.area, 1.0);
        assert_eq!(r.det(), 2.0);
    }

    #[test]
    fn grad_lambda_reproduces_kronecker() {
        let g = ElementGeometry::new([[0.3, -0.2], [2.1, 0.4], [0.7, 1.9]]).unwrap();
        let p = g.vertex_coords;
        for i in 0..3 {
            let s: [f64; 2] = [0, 1].map(|c| g.grad_lambda.iter().map(|r| r[c]).sum());
            assert!(s[0].abs() < 1e-15 && s[1].abs() < 1e-15);
            for j in 0..3 {
                // λⁱ is affine with value δ_i0 ... recovered from its gradient and P0.
                let d = [p[j][0] - p[0][0], p[j][1] - p[0][1]];
                let base = if i == 0 { 1.0 } else { 0.0 };
                let val = base + g.grad_lambda[i][0] * d[0] + g.grad_lambda[i][1] * d[1];
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((val - expect).abs() < 1e-14, "λ{i}(P{j}) = {val}");
            }
        }
        assert!((g.det() - 2.0 * g.area).abs() < 1e-14);
    }

    #[test]
    fn refinement_counts_and_area() {
        let m = SimplicialMesh2D::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]])
            .unwrap();
        let f = m.refine_uniform().unwrap();
        assert_eq!((f.num_vertices(), f.num_edges(), f.num_triangles()), (6, 9, 4));
        assert_eq!(f.euler_characteristic(), 1);
        let sq = unit_square();
        let f2 = sq.refine_uniform().unwrap();
        assert_eq!(f2.num_triangles(), 8);
        assert_eq!(f2.num_vertices(), sq.num_vertices() + sq.num_edges());
        assert!((f2.total_area() - sq.total_area()).abs() < 1e-12);
        assert_eq!(f2.euler_characteristic(), 1);
    }

    #[test]
    fn refinement_inherits_edge_markers() {
        let mut m = unit_square();
        m.mark_boundary_edges(|p, q| (p[0] == 0.0 && q[0] == 0.0).then_some(7));
        let f = m.refine_uniform().unwrap();
        assert_eq!(f.edges_with_marker(7).len(), 2);
        assert_eq!(f.vertices_with_marker(7).len(), 3);
    }
}
