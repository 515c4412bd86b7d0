//! Degrees of freedom, element contributions and global assembly of the
//! discrete mixed functional
//!
//! ```text
//! I = ∫ W(θ¹, θ²) dA
//!   − ∫ (t¹ ⊗ θ² + t² ⊗ θ¹) ∧̇ (E₁ ⊗ (θ¹ − dφ¹) + E₂ ⊗ (θ² − dφ²))
//!   − ∫_∂ ⟨t̄, φ⟩ dL
//! ```
//!
//! with `(α ⊗ a) ∧̇ (v ⊗ b) = α(v) a ∧ b`. θⁱ live in P₁Λ¹ (two DoFs per edge),
//! tⁱ in the Whitney space P₁⁻Λ¹ (one DoF per edge) and φⁱ in P₁Λ⁰ (one DoF
//! per vertex).

mod element;
mod global;

pub use element::{
    element_functional, element_residual, element_tangent, ElementMatrix, LocalState,
    LOCAL_DOFS,
};
pub use global::{
    assemble, compatibility_residual, field_integrals, min_jacobian, AssemblyMode,
    ElementCompatibility, ElementFields, FieldIntegrals, GlobalSystem, ReducedSystem,
};

use crate::error::{Error, Result};
use crate::mesh::{Point, SimplicialMesh2D};

/// The six unknown fields, in global block order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Theta1,
    Theta2,
    T1,
    T2,
    Phi1,
    Phi2,
}

/// Contiguous block layout `[θ¹ | θ² | t¹ | t² | φ¹ | φ²]`.
///
/// θ blocks hold two DoFs per edge: for an edge `a → b` (`a < b`) slot 0 is
/// the coefficient of `λᵃ dλᵇ` and slot 1 that of `λᵇ dλᵃ`. t blocks hold one
/// Whitney coefficient per globally oriented edge; φ blocks one value per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    num_edges: usize,
    num_vertices: usize,
    /// Per triangle, the 24 local DoFs as (global index, sign).
    element_dofs: Vec<[(usize, f64); LOCAL_DOFS]>,
}

impl DofLayout {
    pub fn new(mesh: &SimplicialMesh2D) -> Self {
        let (ne, nv) = (mesh.num_edges(), mesh.num_vertices());
        let element_dofs = mesh
            .triangles()
            .iter()
            .zip(mesh.triangle_edges())
            .map(|(tri, refs)| {
                let mut map = [(0usize, 1.0f64); LOCAL_DOFS];
                for (m, r) in refs.iter().enumerate() {
                    // Local pair 2m is λ^{v_m} dλ^{v_{m+1}}: slot 0 when the local
                    // traversal matches the global orientation.
                    let (first, second) = if r.sign > 0 { (0, 1) } else { (1, 0) };
                    map[2 * m] = (2 * r.edge + first, 1.0);
                    map[2 * m + 1] = (2 * r.edge + second, 1.0);
                    map[6 + 2 * m] = (2 * ne + 2 * r.edge + first, 1.0);
                    map[6 + 2 * m + 1] = (2 * ne + 2 * r.edge + second, 1.0);
                    let s = f64::from(r.sign);
                    map[12 + m] = (4 * ne + r.edge, s);
                    map[15 + m] = (5 * ne + r.edge, s);
                }
                for (n, &v) in tri.iter().enumerate() {
                    map[18 + n] = (6 * ne + v, 1.0);
                    map[21 + n] = (6 * ne + nv + v, 1.0);
                }
                map
            })
            .collect();
        Self {
            num_edges: ne,
            num_vertices: nv,
            element_dofs,
        }
    }

    pub fn len(&self) -> usize {
        6 * self.num_edges + 2 * self.num_vertices
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn block_range(&self, block: Block) -> std::ops::Range<usize> {
        let (ne, nv) = (self.num_edges, self.num_vertices);
        match block {
            Block::Theta1 => 0..2 * ne,
            Block::Theta2 => 2 * ne..4 * ne,
            Block::T1 => 4 * ne..5 * ne,
            Block::T2 => 5 * ne..6 * ne,
            Block::Phi1 => 6 * ne..6 * ne + nv,
            Block::Phi2 => 6 * ne + nv..6 * ne + 2 * nv,
        }
    }

    /// Global index of θⁱ (component 0 or 1) on `edge`, `slot` as described above.
    pub fn theta(&self, component: usize, edge: usize, slot: usize) -> usize {
        2 * self.num_edges * component + 2 * edge + slot
    }

    pub fn traction(&self, component: usize, edge: usize) -> usize {
        (4 + component) * self.num_edges + edge
    }

    pub fn phi(&self, component: usize, vertex: usize) -> usize {
        6 * self.num_edges + component * self.num_vertices + vertex
    }

    pub fn element_dofs(&self, triangle: usize) -> &[(usize, f64); LOCAL_DOFS] {
        &self.element_dofs[triangle]
    }

    pub fn num_elements(&self) -> usize {
        self.element_dofs.len()
    }
}

/// Concatenated unknowns `(θ¹, θ², t¹, t², φ¹, φ²)`.
///
/// φ holds the deformed position; the displacement is `φ − X`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    pub values: Vec<f64>,
}

impl MixedState {
    pub fn zeros(layout: &DofLayout) -> Self {
        Self {
            values: vec![0.0; layout.len()],
        }
    }

    /// Compatible state `φ = map(X)`, `θⁱ = dφⁱ` (lifted edgewise), `t = 0`.
    pub fn from_deformation(
        mesh: &SimplicialMesh2D,
        layout: &DofLayout,
        map: impl Fn(Point) -> Point,
    ) -> Self {
        let mut s = Self::zeros(layout);
        let phi: Vec<Point> = mesh.vertices().iter().map(|&x| map(x)).collect();
        for (v, p) in phi.iter().enumerate() {
            s.values[layout.phi(0, v)] = p[0];
            s.values[layout.phi(1, v)] = p[1];
        }
        s.lift_theta_from_phi(mesh, layout);
        s
    }

    /// Reference configuration: `φ = X`, `θ = dX`, `t = 0`.
    pub fn identity(mesh: &SimplicialMesh2D, layout: &DofLayout) -> Self {
        Self::from_deformation(mesh, layout, |x| x)
    }

    /// Overwrites θ with the edgewise lift of dφ.
    pub fn lift_theta_from_phi(&mut self, mesh: &SimplicialMesh2D, layout: &DofLayout) {
        for (e, &[a, b]) in mesh.edges().iter().enumerate() {
            for i in 0..2 {
                let jump = self.values[layout.phi(i, b)] - self.values[layout.phi(i, a)];
                self.values[layout.theta(i, e, 0)] = jump;
                self.values[layout.theta(i, e, 1)] = -jump;
            }
        }
    }

    pub fn block(&self, layout: &DofLayout, block: Block) -> &[f64] {
        &self.values[layout.block_range(block)]
    }

    pub fn deformed_position(&self, layout: &DofLayout, vertex: usize) -> Point {
        [
            self.values[layout.phi(0, vertex)],
            self.values[layout.phi(1, vertex)],
        ]
    }

    pub fn displacement(&self, mesh: &SimplicialMesh2D, layout: &DofLayout, vertex: usize) -> Point {
        let p = self.deformed_position(layout, vertex);
        let x = mesh.vertices()[vertex];
        [p[0] - x[0], p[1] - x[1]]
    }

    pub fn check_len(&self, layout: &DofLayout) -> Result<()> {
        if self.values.len() != layout.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.len(),
                actual: self.values.len(),
            });
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("state contains non-finite values".into()));
        }
        Ok(())
    }

    /// Element-local DoF vector with orientation signs applied.
    pub fn local(&self, layout: &DofLayout, triangle: usize) -> LocalState {
        LocalState(layout.element_dofs(triangle).map(|(g, s)| s * self.values[g]))
    }
}

/// A φ DoF with a prescribed displacement, applied proportionally to the load factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletDof {
    pub dof: usize,
    /// Reference coordinate `X` of this component.
    pub reference: f64,
    /// Displacement at full load.
    pub displacement: f64,
}

impl DirichletDof {
    /// Prescribed deformed position at `load_factor`.
    pub fn target(&self, load_factor: f64) -> f64 {
        self.reference + load_factor * self.displacement
    }
}

/// Dead traction per unit reference length on a boundary edge, at full load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannEdge {
    pub edge: usize,
    pub traction: [f64; 2],
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundaryConditions {
    pub dirichlet: Vec<DirichletDof>,
    pub neumann: Vec<NeumannEdge>,
}

impl BoundaryConditions {
    /// Prescribes displacement component `component` (0 = x, 1 = y) of `vertex`
    /// as `value(X)`. A later prescription of the same DoF replaces the earlier one.
    pub fn prescribe(
        &mut self,
        mesh: &SimplicialMesh2D,
        layout: &DofLayout,
        vertex: usize,
        component: usize,
        displacement: f64,
    ) {
        let dof = layout.phi(component, vertex);
        let entry = DirichletDof {
            dof,
            reference: mesh.vertices()[vertex][component],
            displacement,
        };
        match self.dirichlet.iter_mut().find(|d| d.dof == dof) {
            Some(d) => *d = entry,
            None => self.dirichlet.push(entry),
        }
    }

    /// Prescribes `u = value(X)` on every vertex carrying `marker`.
    pub fn prescribe_marker(
        &mut self,
        mesh: &SimplicialMesh2D,
        layout: &DofLayout,
        marker: i32,
        components: &[usize],
        value: impl Fn(Point) -> f64,
    ) {
        for v in mesh.vertices_with_marker(marker) {
            for &c in components {
                self.prescribe(mesh, layout, v, c, value(mesh.vertices()[v]));
            }
        }
    }

    pub fn add_traction(&mut self, mesh: &SimplicialMesh2D, marker: i32, traction: [f64; 2]) {
        for e in mesh.edges_with_marker(marker) {
            if mesh.is_boundary_edge(e) {
                self.neumann.push(NeumannEdge { edge: e, traction });
            }
        }
    }

    /// Consistent nodal loads of the Neumann data at full load (φ DoFs only).
    ///
    /// The traction is constant per edge and φ is linear along it, so the
    /// two-point Gauss rule is exact: each endpoint receives `t̄ L / 2`.
    pub fn external_load(&self, mesh: &SimplicialMesh2D, layout: &DofLayout) -> Vec<f64> {
        let mut f = vec![0.0; layout.len()];
        for n in &self.neumann {
            let [a, b] = mesh.edges()[n.edge];
            let (p, q) = (mesh.vertices()[a], mesh.vertices()[b]);
            let len = (q[0] - p[0]).hypot(q[1] - p[1]);
            for v in [a, b] {
                for i in 0..2 {
                    f[layout.phi(i, v)] += 0.5 * len * n.traction[i];
                }
            }
        }
        f
    }

    /// Boolean mask of Dirichlet DoFs.
    pub fn dirichlet_mask(&self, layout: &DofLayout) -> Vec<bool> {
        let mut mask = vec![false; layout.len()];
        for d in &self.dirichlet {
            mask[d.dof] = true;
        }
        mask
    }

    /// Writes the prescribed values at `load_factor` into `state`.
    pub fn apply_dirichlet(&self, state: &mut MixedState, load_factor: f64) {
        for d in &self.dirichlet {
            state.values[d.dof] = d.target(load_factor);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> SimplicialMesh2D {
        SimplicialMesh2D::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn layout_sizes() {
        let tri =
            SimplicialMesh2D::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap();
        assert_eq!(DofLayout::new(&tri).len(), 24);
        let sq = square();
        let l = DofLayout::new(&sq);
        assert_eq!(l.len(), 38);
        assert_eq!(l.block_range(Block::Theta1).len(), 10);
        assert_eq!(l.block_range(Block::Theta2).len(), 10);
        assert_eq!(l.block_range(Block::T1).len(), 5);
        assert_eq!(l.block_range(Block::T2).len(), 5);
        assert_eq!(l.block_range(Block::Phi1).len(), 4);
        assert_eq!(l.block_range(Block::Phi2).len(), 4);
        assert_eq!(l.block_range(Block::Phi2).end, l.len());
    }

    #[test]
    fn shared_edge_dofs_agree_between_elements() {
        let sq = square();
        let l = DofLayout::new(&sq);
        // Interior edge 0-2: triangle 0 traverses 2→0, triangle 1 traverses 0→2.
        let e = sq.find_edge(0, 2).unwrap();
        let d0 = l.element_dofs(0);
        let d1 = l.element_dofs(1);
        // Triangle 0 = [0,1,2], local edge 2 = (2,0): pair 4 is λ²dλ⁰ = global slot 1.
        assert_eq!(d0[4], (l.theta(0, e, 1), 1.0));
        assert_eq!(d0[5], (l.theta(0, e, 0), 1.0));
        // Triangle 1 = [0,2,3], local edge 0 = (0,2): pair 0 is λ⁰dλ² = slot 0.
        assert_eq!(d1[0], (l.theta(0, e, 0), 1.0));
        assert_eq!(d0[14], (l.traction(0, e), -1.0));
        assert_eq!(d1[12], (l.traction(0, e), 1.0));
        // Every global DoF is reached.
        let mut hit = vec![false; l.len()];
        for t in 0..2 {
            for (g, _) in l.element_dofs(t) {
                hit[*g] = true;
            }
        }
        assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn identity_lift_matches_edge_vectors() {
        let sq = square();
        let l = DofLayout::new(&sq);
        let s = MixedState::identity(&sq, &l);
        for (e, &[a, b]) in sq.edges().iter().enumerate() {
            let (p, q) = (sq.vertices()[a], sq.vertices()[b]);
            assert_eq!(s.values[l.theta(0, e, 0)], q[0] - p[0]);
            assert_eq!(s.values[l.theta(1, e, 1)], p[1] - q[1]);
        }
        assert!(s.block(&l, Block::T1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn external_load_integrates_traction() {
        let mut sq = square();
        sq.mark_boundary_edges(|p, q| (p[0] == 1.0 && q[0] == 1.0).then_some(2));
        let l = DofLayout::new(&sq);
        let mut bc = BoundaryConditions::default();
        bc.add_traction(&sq, 2, [0.0, 3.0]);
        let f = bc.external_load(&sq, &l);
        let total: f64 = f[l.block_range(Block::Phi2)].iter().sum();
        assert!((total - 3.0).abs() < 1e-15);
        assert_eq!(f[l.phi(1, 1)], 1.5);
        assert_eq!(f[l.phi(1, 2)], 1.5);
    }

    #[test]
    fn prescribe_replaces_previous_value() {
        let sq = square();
        let l = DofLayout::new(&sq);
        let mut bc = BoundaryConditions::default();
        bc.prescribe(&sq, &l, 2, 0, 0.5);
        bc.prescribe(&sq, &l, 2, 0, 0.25);
        assert_eq!(bc.dirichlet.len(), 1);
        assert_eq!(bc.dirichlet[0].target(1.0), 1.25);
        assert_eq!(bc.dirichlet[0].target(0.5), 1.125);
    }
}
