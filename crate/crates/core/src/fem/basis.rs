//! Lagrange P1/P2 shape functions on the reference triangle.
//!
//! Local node order: vertices 0..3, then (P2 only) the midpoint of local
//! edge `k`, which lies opposite vertex `k`.

/// Gradients of the barycentric coordinates `1 - x - y`, `x`, `y`.
const BARY_GRAD: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

#[inline]
fn barycentric(xi: [f64; 2]) -> [f64; 3] {
    [1.0 - xi[0] - xi[1], xi[0], xi[1]]
}

pub fn nodes_per_cell(degree: u32) -> usize {
    match degree {
        1 => 3,
        2 => 6,
        _ => unreachable!("degree validated by FunctionSpace"),
    }
}

/// Reference coordinates of the local nodes.
pub fn reference_nodes(degree: u32) -> &'static [[f64; 2]] {
    const P2: [[f64; 2]; 6] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.0, 0.5], [0.5, 0.0]];
    &P2[..nodes_per_cell(degree)]
}

/// Writes shape values into `out[..nodes_per_cell(degree)]`.
pub fn values(degree: u32, xi: [f64; 2], out: &mut [f64]) {
    let l = barycentric(xi);
    match degree {
        1 => out[..3].copy_from_slice(&l),
        2 => {
            for i in 0..3 {
                out[i] = l[i] * (2.0 * l[i] - 1.0);
            }
            for k in 0..3 {
                out[3 + k] = 4.0 * l[(k + 1) % 3] * l[(k + 2) % 3];
            }
        }
        _ => unreachable!(),
    }
}

/// Writes reference gradients into `out[..nodes_per_cell(degree)]`.
pub fn ref_gradients(degree: u32, xi: [f64; 2], out: &mut [[f64; 2]]) {
    match degree {
        1 => out[..3].copy_from_slice(&BARY_GRAD),
        2 => {
            let l = barycentric(xi);
            for i in 0..3 {
                let s = 4.0 * l[i] - 1.0;
                out[i] = [s * BARY_GRAD[i][0], s * BARY_GRAD[i][1]];
            }
            for k in 0..3 {
                let (a, b) = ((k + 1) % 3, (k + 2) % 3);
                out[3 + k] = [
                    4.0 * (l[b] * BARY_GRAD[a][0] + l[a] * BARY_GRAD[b][0]),
                    4.0 * (l[b] * BARY_GRAD[a][1] + l[a] * BARY_GRAD[b][1]),
                ];
            }
        }
        _ => unreachable!(),
    }
}

/// Shape values and reference gradients at every point of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub degree: u32,
    pub nodes: usize,
    /// `values[q * nodes + i]`
    pub values: Vec<f64>,
    /// `ref_grads[q * nodes + i]`
    pub ref_grads: Vec<[f64; 2]>,
}

impl Tabulation {
    pub fn new(degree: u32, points: &[[f64; 2]]) -> Self {
        let nodes = nodes_per_cell(degree);
        let mut vals = vec![0.0; points.len() * nodes];
        let mut grads = vec![[0.0; 2]; points.len() * nodes];
        for (q, &p) in points.iter().enumerate() {
            values(degree, p, &mut vals[q * nodes..(q + 1) * nodes]);
            ref_gradients(degree, p, &mut grads[q * nodes..(q + 1) * nodes]);
        }
        Tabulation { degree, nodes, values: vals, ref_grads: grads }
    }

    #[inline]
    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.nodes..(q + 1) * self.nodes]
    }

    #[inline]
    pub fn grads_at(&self, q: usize) -> &[[f64; 2]] {
        &self.ref_grads[q * self.nodes..(q + 1) * self.nodes]
    }
}
