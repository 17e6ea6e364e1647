//! Relaxation methods used inside the V-cycle.

use super::layout::NodeLayout;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmootherKind {
    /// Damped Jacobi; the weight is `omega * 2 / rho(D^{-1} A)`.
    PointJacobi { omega: f64 },
    /// Forward sweep before, backward sweep after the coarse correction.
    PointGaussSeidel,
    /// Damped Jacobi with the node blocks of the level's layout; weight
    /// `omega * 2 / rho(D_b^{-1} A)`.
    BlockJacobi { omega: f64 },
    /// Symmetric Gauss-Seidel over node blocks.
    BlockGaussSeidel,
}

impl SmootherKind {
    pub fn name(&self) -> &'static str {
        match self {
            SmootherKind::PointJacobi { .. } => "point-jacobi",
            SmootherKind::PointGaussSeidel => "point-gauss-seidel",
            SmootherKind::BlockJacobi { .. } => "block-jacobi",
            SmootherKind::BlockGaussSeidel => "block-gauss-seidel",
        }
    }
}

/// Smoother set up for one level.
#[derive(Debug, Clone)]
pub(crate) struct Smoother {
    kind: SmootherKind,
    /// Jacobi weight after spectral scaling.
    weight: f64,
    /// Node layout for block variants.
    blocks: Option<NodeLayout>,
    /// Inverse diagonal (point) or packed inverse node blocks (block).
    inv: Vec<f64>,
    inv_ptr: Vec<usize>,
    node_of: Vec<usize>,
}

impl Smoother {
    pub(crate) fn new(a: &CsrMatrix, kind: SmootherKind, layout: &NodeLayout) -> Result<Self> {
        let diag = a.diagonal();
        match kind {
            SmootherKind::PointJacobi { .. } | SmootherKind::PointGaussSeidel => {
                let mut inv = Vec::with_capacity(diag.len());
                for (i, &d) in diag.iter().enumerate() {
                    if !(d > 0.0) {
                        return Err(Error::NotSpd { column: i, pivot: d });
                    }
                    inv.push(1.0 / d);
                }
                let mut s = Smoother { kind, weight: 1.0, blocks: None, inv, inv_ptr: Vec::new(), node_of: Vec::new() };
                if let SmootherKind::PointJacobi { omega } = kind {
                    check_omega(omega)?;
                    s.weight = omega * 2.0 / s.spectral_radius(a);
                }
                Ok(s)
            }
            SmootherKind::BlockJacobi { omega: _ } | SmootherKind::BlockGaussSeidel => {
                let mut inv = Vec::new();
                let mut inv_ptr = vec![0];
                for node in 0..layout.num_nodes() {
                    let idx = layout.node(node);
                    let m = idx.len();
                    let mut block = vec![0.0; m * m];
                    for (r, &i) in idx.iter().enumerate() {
                        for (c, &j) in idx.iter().enumerate() {
                            block[r * m + c] = a.get(i, j);
                        }
                    }
                    let binv = spd_inverse(&block, m).ok_or(Error::NotSpd { column: idx[0], pivot: 0.0 })?;
                    inv.extend(binv);
                    inv_ptr.push(inv.len());
                }
                let node_of = layout.node_of();
                let mut s = Smoother { kind, weight: 1.0, blocks: Some(layout.clone()), inv, inv_ptr, node_of };
                if let SmootherKind::BlockJacobi { omega } = kind {
                    check_omega(omega)?;
                    s.weight = omega * 2.0 / s.spectral_radius(a);
                }
                Ok(s)
            }
        }
    }

    pub(crate) fn kind(&self) -> SmootherKind {
        self.kind
    }

    /// `z = M^{-1} r` with `M` the point or block diagonal.
    fn apply_diag(&self, r: &[f64], z: &mut [f64]) {
        match &self.blocks {
            None => {
                for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv) {
                    *zi = ri * di;
                }
            }
            Some(layout) => {
                for node in 0..layout.num_nodes() {
                    let idx = layout.node(node);
                    let m = idx.len();
                    let b = &self.inv[self.inv_ptr[node]..self.inv_ptr[node + 1]];
                    for (row, &i) in idx.iter().enumerate() {
                        let mut s = 0.0;
                        for (col, &j) in idx.iter().enumerate() {
                            s += b[row * m + col] * r[j];
                        }
                        z[i] = s;
                    }
                }
            }
        }
    }

    /// Largest eigenvalue of `M^{-1} A` by ten steps of the power method in
    /// the `M` inner product.
    fn spectral_radius(&self, a: &CsrMatrix) -> f64 {
        let n = a.nrows();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 17) as f64 / 17.0).collect();
        let mut ax = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut rho = 1.0;
        for _ in 0..10 {
            a.matvec(&x, &mut ax);
            self.apply_diag(&ax, &mut y);
            // Rayleigh quotient (x, A x) / (x, M x) with M x recovered from y.
            let num: f64 = x.iter().zip(&ax).map(|(p, q)| p * q).sum();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            let xm = mass_dot(self, a, &x);
            if xm > 0.0 {
                rho = num / xm;
            }
            x.iter_mut().zip(&y).for_each(|(xi, yi)| *xi = yi / norm);
        }
        rho.max(1e-300)
    }

    /// One pre-smoothing step on `x` (which may be zero on entry).
    pub(crate) fn pre(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64], work: &mut [f64], zero_guess: bool) {
        match self.kind {
            SmootherKind::PointJacobi { .. } | SmootherKind::BlockJacobi { .. } => self.jacobi(a, b, x, work, zero_guess),
            SmootherKind::PointGaussSeidel => self.gauss_seidel(a, b, x, true),
            SmootherKind::BlockGaussSeidel => self.block_gauss_seidel(a, b, x, true),
        }
    }

    /// The adjoint of [`Smoother::pre`].
    pub(crate) fn post(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64], work: &mut [f64]) {
        match self.kind {
            SmootherKind::PointJacobi { .. } | SmootherKind::BlockJacobi { .. } => self.jacobi(a, b, x, work, false),
            SmootherKind::PointGaussSeidel => self.gauss_seidel(a, b, x, false),
            SmootherKind::BlockGaussSeidel => self.block_gauss_seidel(a, b, x, false),
        }
    }

    fn jacobi(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64], work: &mut [f64], zero_guess: bool) {
        let n = b.len();
        let mut r = vec![0.0; n];
        if zero_guess {
            r.copy_from_slice(b);
        } else {
            a.matvec(x, work);
            for i in 0..n {
                r[i] = b[i] - work[i];
            }
        }
        self.apply_diag(&r, work);
        for i in 0..n {
            x[i] += self.weight * work[i];
        }
    }

    fn gauss_seidel(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64], forward: bool) {
        let n = b.len();
        let mut relax = |i: usize| {
            let (cols, vals) = a.row(i);
            let mut s = b[i];
            for (&j, &v) in cols.iter().zip(vals) {
                if j != i {
                    s -= v * x[j];
                }
            }
            x[i] = s * self.inv[i];
        };
        if forward {
            (0..n).for_each(&mut relax);
        } else {
            (0..n).rev().for_each(&mut relax);
        }
    }

    fn block_gauss_seidel(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64], forward: bool) {
        let layout = self.blocks.as_ref().expect("block smoother without layout");
        let node_of = &self.node_of;
        let mut rloc = Vec::new();
        let mut relax = |node: usize| {
            let idx = layout.node(node);
            let m = idx.len();
            rloc.clear();
            for &i in idx {
                let (cols, vals) = a.row(i);
                let mut s = b[i];
                for (&j, &v) in cols.iter().zip(vals) {
                    if node_of[j] != node {
                        s -= v * x[j];
                    }
                }
                rloc.push(s);
            }
            let binv = &self.inv[self.inv_ptr[node]..self.inv_ptr[node + 1]];
            for (row, &i) in idx.iter().enumerate() {
                x[i] = (0..m).map(|c| binv[row * m + c] * rloc[c]).sum();
            }
        };
        let nn = layout.num_nodes();
        if forward {
            (0..nn).for_each(&mut relax);
        } else {
            (0..nn).rev().for_each(&mut relax);
        }
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::InvalidParameter(format!("Jacobi damping {omega} outside (0, 1]")));
    }
    Ok(())
}

/// `(x, M x)` for the smoother's diagonal `M` (read from `a`).
fn mass_dot(s: &Smoother, a: &CsrMatrix, x: &[f64]) -> f64 {
    match &s.blocks {
        None => x.iter().zip(&s.inv).map(|(xi, di)| xi * xi / di).sum(),
        Some(layout) => {
            let mut acc = 0.0;
            for node in 0..layout.num_nodes() {
                let idx = layout.node(node);
                for &i in idx {
                    for &j in idx {
                        acc += x[i] * a.get(i, j) * x[j];
                    }
                }
            }
            acc
        }
    }
}

/// Inverse of a small dense SPD matrix by Cholesky; `None` if not SPD.
pub(crate) fn spd_inverse(a: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; m * m];
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= l[j * m + k] * l[j * m + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[j * m + j] = d;
        for i in j + 1..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k];
            }
            l[i * m + j] = s / d;
        }
    }
    let mut inv = vec![0.0; m * m];
    for c in 0..m {
        // Solve L L^T x = e_c.
        let mut y = vec![0.0; m];
        for i in 0..m {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i * m + k] * y[k];
            }
            y[i] = s / l[i * m + i];
        }
        for i in (0..m).rev() {
            let mut s = y[i];
            for k in i + 1..m {
                s -= l[k * m + i] * y[k];
            }
            y[i] = s / l[i * m + i];
        }
        for i in 0..m {
            inv[i * m + c] = y[i];
        }
    }
    Some(inv)
}


/// Largest eigenvalue of `D^{-1} A` (point diagonal), ten power steps.
pub(crate) fn point_spectral_radius(a: &CsrMatrix) -> Result<f64> {
    let s = Smoother::new(a, SmootherKind::PointGaussSeidel, &NodeLayout::scalar(a.nrows()))?;
    Ok(s.spectral_radius(a))
}
