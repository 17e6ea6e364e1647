use std::sync::Arc;

use super::basis;
use crate::error::{Error, Result};
use crate::mesh::{CellGeometry, Mesh};

/// Continuous Lagrange space of degree 1 or 2 with 1 or 2 components.
///
/// Nodes are numbered vertices first, then edge midpoints (P2). Vector dofs
/// interleave components per node: `dof = node * components + c`.
#[derive(Debug, Clone)]
pub struct FunctionSpace {
    mesh: Arc<Mesh>,
    degree: u32,
    components: usize,
    nodes_per_cell: usize,
    node_coords: Vec<[f64; 2]>,
    node_on_boundary: Vec<bool>,
    cell_nodes: Vec<usize>,
}

impl FunctionSpace {
    pub fn new(mesh: Arc<Mesh>, degree: u32, components: usize) -> Result<Self> {
        if !(1..=2).contains(&degree) {
            return Err(Error::Unsupported(format!("Lagrange degree {degree}")));
        }
        if !(1..=2).contains(&components) {
            return Err(Error::Unsupported(format!("{components} components")));
        }
        let npc = basis::nodes_per_cell(degree);
        let nv = mesh.num_vertices();
        let mut node_coords = mesh.vertices.clone();
        let mut node_on_boundary = mesh.vertex_on_boundary.clone();
        if degree == 2 {
            for (e, &[a, b]) in mesh.edges.iter().enumerate() {
                let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
                node_coords.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                node_on_boundary.push(mesh.edge_on_boundary[e]);
            }
        }
        let mut cell_nodes = Vec::with_capacity(mesh.num_cells() * npc);
        for (c, cell) in mesh.cells.iter().enumerate() {
            cell_nodes.extend_from_slice(cell);
            if degree == 2 {
                cell_nodes.extend(mesh.cell_edges[c].iter().map(|&e| nv + e));
            }
        }
        Ok(FunctionSpace { mesh, degree, components, nodes_per_cell: npc, node_coords, node_on_boundary, cell_nodes })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.nodes_per_cell
    }

    pub fn num_nodes(&self) -> usize {
        self.node_coords.len()
    }

    /// Number of degrees of freedom.
    pub fn dim(&self) -> usize {
        self.num_nodes() * self.components
    }

    pub fn node_coords(&self) -> &[[f64; 2]] {
        &self.node_coords
    }

    pub fn node_on_boundary(&self) -> &[bool] {
        &self.node_on_boundary
    }

    #[inline]
    pub fn cell_nodes(&self, cell: usize) -> &[usize] {
        &self.cell_nodes[cell * self.nodes_per_cell..(cell + 1) * self.nodes_per_cell]
    }

    /// Coordinates of a dof (its node's position).
    pub fn dof_coord(&self, dof: usize) -> [f64; 2] {
        self.node_coords[dof / self.components]
    }

    /// Sorted dofs located on the boundary of the square.
    pub fn boundary_dofs(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (node, &b) in self.node_on_boundary.iter().enumerate() {
            if b {
                out.extend((0..self.components).map(|c| node * self.components + c));
            }
        }
        out
    }

    /// Shape values and physical gradients of the local nodes at a reference
    /// point. For vector spaces the scalar node basis is returned; the vector
    /// basis is that function times a unit vector.
    pub fn evaluate_basis(&self, cell: usize, xi: [f64; 2]) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
        let geo = self.mesh.cell_geometry(cell)?;
        let mut v = vec![0.0; self.nodes_per_cell];
        let mut g = vec![[0.0; 2]; self.nodes_per_cell];
        basis::values(self.degree, xi, &mut v);
        basis::ref_gradients(self.degree, xi, &mut g);
        for gi in g.iter_mut() {
            *gi = geo.push_gradient(*gi);
        }
        Ok((v, g))
    }

    pub fn geometry(&self, cell: usize) -> CellGeometry {
        self.mesh.geometry_unchecked(cell, &self.mesh.cells[cell])
    }

    /// True when both spaces live on the same mesh object.
    pub fn same_mesh(&self, other: &FunctionSpace) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh)
    }
}

/// A finite element function: one coefficient per dof.
#[derive(Debug, Clone)]
pub struct FieldFunction {
    pub space: Arc<FunctionSpace>,
    pub coeffs: Vec<f64>,
}

impl FieldFunction {
    pub fn zeros(space: Arc<FunctionSpace>) -> Self {
        let n = space.dim();
        FieldFunction { space, coeffs: vec![0.0; n] }
    }

    pub fn from_coeffs(space: Arc<FunctionSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::Dimension { expected: space.dim(), got: coeffs.len() });
        }
        Ok(FieldFunction { space, coeffs })
    }

    /// Value of component `c` given tabulated shape values on `cell`.
    #[inline]
    pub fn value_with(&self, cell: usize, c: usize, shape: &[f64]) -> f64 {
        let nc = self.space.components;
        self.space.cell_nodes(cell).iter().zip(shape).map(|(&n, &s)| self.coeffs[n * nc + c] * s).sum()
    }

    /// Physical gradient of component `c` given physical shape gradients.
    #[inline]
    pub fn grad_with(&self, cell: usize, c: usize, grads: &[[f64; 2]]) -> [f64; 2] {
        let nc = self.space.components;
        let mut g = [0.0; 2];
        for (&n, gr) in self.space.cell_nodes(cell).iter().zip(grads) {
            let a = self.coeffs[n * nc + c];
            g[0] += a * gr[0];
            g[1] += a * gr[1];
        }
        g
    }
}

/// Nodal interpolation: `f` writes the field's components at a point.
pub fn interpolate<F>(space: &Arc<FunctionSpace>, f: F) -> FieldFunction
where
    F: Fn([f64; 2], &mut [f64]),
{
    let nc = space.components();
    let mut coeffs = vec![0.0; space.dim()];
    for (node, &x) in space.node_coords().iter().enumerate() {
        f(x, &mut coeffs[node * nc..(node + 1) * nc]);
    }
    FieldFunction { space: space.clone(), coeffs }
}

pub fn interpolate_scalar<F: Fn([f64; 2]) -> f64>(space: &Arc<FunctionSpace>, f: F) -> FieldFunction {
    interpolate(space, |x, out| out[0] = f(x))
}

pub fn interpolate_vector<F: Fn([f64; 2]) -> [f64; 2]>(space: &Arc<FunctionSpace>, f: F) -> FieldFunction {
    interpolate(space, |x, out| out.copy_from_slice(&f(x)))
}
