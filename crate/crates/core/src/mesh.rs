//! Structured triangulations of the unit square.
//!
//! Level `l` has `n = 2^l` squares per side. Every square is split along its
//! lower-left to upper-right diagonal, so all cells are congruent and the
//! family is exactly quasi-uniform.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Largest refinement level accepted by [`Mesh::unit_square`].
pub const MAX_LEVEL: u32 = 12;

#[derive(Debug, Clone)]
pub struct Mesh {
    pub level: u32,
    /// Squares per side.
    pub n: usize,
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub cells: Vec<[usize; 3]>,
    /// Vertex pairs, smaller index first.
    pub edges: Vec<[usize; 2]>,
    /// Local edge `k` of a cell is opposite its local vertex `k`.
    pub cell_edges: Vec<[usize; 3]>,
    pub vertex_on_boundary: Vec<bool>,
    pub edge_on_boundary: Vec<bool>,
}

/// Affine data of one cell: `x = jacobian * xi + origin`.
#[derive(Debug, Clone, Copy)]
pub struct CellGeometry {
    pub coords: [[f64; 2]; 3],
    pub area: f64,
    /// Row-major 2x2, columns are `v1 - v0` and `v2 - v0`.
    pub jacobian: [[f64; 2]; 2],
    pub origin: [f64; 2],
    pub det: f64,
    /// Inverse transpose of the Jacobian, used to map reference gradients.
    pub inv_t: [[f64; 2]; 2],
}

impl CellGeometry {
    pub fn from_coords(coords: [[f64; 2]; 3]) -> Self {
        let [v0, v1, v2] = coords;
        let jacobian = [[v1[0] - v0[0], v2[0] - v0[0]], [v1[1] - v0[1], v2[1] - v0[1]]];
        let det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
        let inv_t = [
            [jacobian[1][1] / det, -jacobian[1][0] / det],
            [-jacobian[0][1] / det, jacobian[0][0] / det],
        ];
        CellGeometry { coords, area: 0.5 * det, jacobian, origin: v0, det, inv_t }
    }

    /// Physical point of a reference coordinate.
    pub fn map(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jacobian[0][0] * xi[0] + self.jacobian[0][1] * xi[1],
            self.origin[1] + self.jacobian[1][0] * xi[0] + self.jacobian[1][1] * xi[1],
        ]
    }

    /// Maps a reference gradient to the physical cell.
    #[inline]
    pub fn push_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }

    pub fn centroid(&self) -> [f64; 2] {
        let c = &self.coords;
        [(c[0][0] + c[1][0] + c[2][0]) / 3.0, (c[0][1] + c[1][1] + c[2][1]) / 3.0]
    }

    pub fn longest_edge(&self) -> f64 {
        (0..3)
            .map(|k| dist(self.coords[(k + 1) % 3], self.coords[(k + 2) % 3]))
            .fold(0.0, f64::max)
    }

    pub fn inradius(&self) -> f64 {
        let perimeter: f64 = (0..3).map(|k| dist(self.coords[(k + 1) % 3], self.coords[(k + 2) % 3])).sum();
        2.0 * self.area / perimeter
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

impl Mesh {
    /// Builds the level-`level` triangulation of the unit square.
    pub fn unit_square(level: u32) -> Result<Mesh> {
        if level > MAX_LEVEL {
            return Err(Error::Resource(format!(
                "mesh level {level} exceeds the supported maximum {MAX_LEVEL}"
            )));
        }
        let n = 1usize << level;
        let h = 1.0 / n as f64;
        let vid = |i: usize, j: usize| j * (n + 1) + i;

        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        let mut vertex_on_boundary = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                // Exact lattice values at the boundary.
                let x = if i == n { 1.0 } else { i as f64 * h };
                let y = if j == n { 1.0 } else { j as f64 * h };
                vertices.push([x, y]);
                vertex_on_boundary.push(i == 0 || j == 0 || i == n || j == n);
            }
        }

        let mut cells = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v00 = vid(i, j);
                let v10 = vid(i + 1, j);
                let v01 = vid(i, j + 1);
                let v11 = vid(i + 1, j + 1);
                cells.push([v00, v10, v11]);
                cells.push([v00, v11, v01]);
            }
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::with_capacity(3 * n * n + 2 * n);
        let mut edges = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for cell in &cells {
            let mut ce = [0usize; 3];
            for (k, slot) in ce.iter_mut().enumerate() {
                let a = cell[(k + 1) % 3];
                let b = cell[(k + 2) % 3];
                let key = if a < b { [a, b] } else { [b, a] };
                *slot = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                });
            }
            cell_edges.push(ce);
        }
        let edge_on_boundary = edges
            .iter()
            .map(|&[a, b]| {
                let (pa, pb) = (vertices[a], vertices[b]);
                (pa[0] == 0.0 && pb[0] == 0.0)
                    || (pa[0] == 1.0 && pb[0] == 1.0)
                    || (pa[1] == 0.0 && pb[1] == 0.0)
                    || (pa[1] == 1.0 && pb[1] == 1.0)
            })
            .collect();

        Ok(Mesh { level, n, vertices, cells, edges, cell_edges, vertex_on_boundary, edge_on_boundary })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Longest cell edge, `sqrt(2) / n`.
    pub fn h_max(&self) -> f64 {
        std::f64::consts::SQRT_2 / self.n as f64
    }

    pub fn cell_geometry(&self, cell: usize) -> Result<CellGeometry> {
        let c = self
            .cells
            .get(cell)
            .ok_or_else(|| Error::OutOfRange(format!("cell {cell} of {}", self.cells.len())))?;
        Ok(self.geometry_unchecked(cell, c))
    }

    #[inline]
    pub(crate) fn geometry_unchecked(&self, _cell: usize, c: &[usize; 3]) -> CellGeometry {
        CellGeometry::from_coords([self.vertices[c[0]], self.vertices[c[1]], self.vertices[c[2]]])
    }

    /// Iterates over `(cell index, geometry)`.
    pub fn geometries(&self) -> impl Iterator<Item = (usize, CellGeometry)> + '_ {
        self.cells.iter().enumerate().map(move |(k, c)| (k, self.geometry_unchecked(k, c)))
    }

    /// Debug dump: `nv ne nc` header, vertex coordinates, then cell triples.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.num_vertices(), self.num_edges(), self.num_cells());
        for v in &self.vertices {
            let _ = writeln!(s, "{:.17e} {:.17e}", v[0], v[1]);
        }
        for c in &self.cells {
            let _ = writeln!(s, "{} {} {}", c[0], c[1], c[2]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_follow_combinatorial_formulas() {
        for level in 0..6 {
            let m = Mesh::unit_square(level).unwrap();
            let n = m.n;
            assert_eq!(m.num_vertices(), (n + 1) * (n + 1));
            assert_eq!(m.num_edges(), 2 * n * (n + 1) + n * n);
            assert_eq!(m.num_cells(), 2 * n * n);
            // Euler: V - E + F = 1 for a disk.
            assert_eq!(m.num_vertices() as i64 - m.num_edges() as i64 + m.num_cells() as i64, 1);
        }
        let m0 = Mesh::unit_square(0).unwrap();
        assert_eq!((m0.num_vertices(), m0.num_edges(), m0.num_cells()), (4, 5, 2));
        let m1 = Mesh::unit_square(1).unwrap();
        assert_eq!((m1.num_vertices(), m1.num_edges(), m1.num_cells()), (9, 16, 8));
        assert!((m1.h_max() - 0.707107).abs() < 1e-6);
        let m3 = Mesh::unit_square(3).unwrap();
        assert!((m3.h_max() - 0.176777).abs() < 1e-6);
    }

    #[test]
    fn rejects_huge_levels() {
        assert!(matches!(Mesh::unit_square(13), Err(Error::Resource(_))));
    }

    #[test]
    fn areas_and_orientation() {
        for level in 0..5 {
            let m = Mesh::unit_square(level).unwrap();
            let total: f64 = m.geometries().map(|(_, g)| g.area).sum();
            assert!((total - 1.0).abs() < 1e-14);
            for (_, g) in m.geometries() {
                assert!(g.det > 0.0);
                assert!((g.det - 2.0 * g.area).abs() < 1e-15);
            }
        }
        let m0 = Mesh::unit_square(0).unwrap();
        assert_eq!(m0.cell_geometry(0).unwrap().area, 0.5);
        let m2 = Mesh::unit_square(2).unwrap();
        for (_, g) in m2.geometries() {
            assert!((g.area - 1.0 / 32.0).abs() < 1e-15);
        }
        assert!(m2.cell_geometry(32).is_err());
    }

    #[test]
    fn edge_sharing() {
        let m = Mesh::unit_square(3).unwrap();
        let mut count = vec![0usize; m.num_edges()];
        for ce in &m.cell_edges {
            for &e in ce {
                count[e] += 1;
            }
        }
        for (e, &c) in count.iter().enumerate() {
            assert_eq!(c, if m.edge_on_boundary[e] { 1 } else { 2 }, "edge {e}");
        }
        assert_eq!(m.edge_on_boundary.iter().filter(|&&b| b).count(), 4 * m.n);
    }

    #[test]
    fn refinement_and_quasi_uniformity() {
        let mut prev_cells = None;
        let mut ratio: Option<f64> = None;
        for level in 0..6 {
            let m = Mesh::unit_square(level).unwrap();
            if let Some(p) = prev_cells {
                assert_eq!(m.num_cells(), 4 * p);
            }
            prev_cells = Some(m.num_cells());
            let r = m.geometries().map(|(_, g)| g.longest_edge() / g.inradius()).fold(0.0, f64::max);
            if let Some(r0) = ratio {
                assert!(((r - r0) / r0).abs() < 1e-12);
            }
            ratio = Some(r);
            let n = m.n as f64;
            for v in &m.vertices {
                for c in v {
                    assert!(((c * n).round() - c * n).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn text_dump_header() {
        let m = Mesh::unit_square(1).unwrap();
        let text = m.to_text();
        assert_eq!(text.lines().next().unwrap(), "9 16 8");
        assert_eq!(text.lines().count(), 1 + 9 + 8);
    }
}
