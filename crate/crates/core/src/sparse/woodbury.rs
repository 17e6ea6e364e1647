//! Solves with a rank-one downdated operator `A - z z^T`.

use std::sync::Arc;

use super::LinearOperator;
use crate::error::{Error, Result};

/// Smallest admissible `1 - z^T A^{-1} z`.
pub const MIN_DEFLATION_SCALAR: f64 = 1e-14;

/// `(A - z z^T)^{-1} b = A^{-1} b + w (w^T b) / s` with `w = A^{-1} z`
/// and `s = 1 - z^T w` precomputed, so each apply costs one base solve.
///
/// The base solve may be exact or approximate. With an approximate base,
/// [`DeflatedSolve::refined`] computes `w` by preconditioned CG so that the
/// rank-one correction stays accurate when `s` is small.
#[derive(Clone)]
pub struct DeflatedSolve {
    base: Arc<dyn LinearOperator>,
    z: Vec<f64>,
    w: Vec<f64>,
    s: f64,
}

impl std::fmt::Debug for DeflatedSolve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeflatedSolve").field("dim", &self.z.len()).field("s", &self.s).finish()
    }
}

impl DeflatedSolve {
    pub fn new(base: Arc<dyn LinearOperator>, z: Vec<f64>) -> Result<Self> {
        if z.len() != base.dim() {
            return Err(Error::Dimension { expected: base.dim(), got: z.len() });
        }
        let mut w = vec![0.0; z.len()];
        base.apply(&z, &mut w);
        let s = 1.0 - dot(&z, &w);
        if !(s > MIN_DEFLATION_SCALAR) {
            return Err(Error::SingularDeflation(s));
        }
        Ok(DeflatedSolve { base, z, w, s })
    }

    /// Like [`DeflatedSolve::new`], with `w = A^{-1} z` solved to relative
    /// tolerance `rtol` by CG on `a` preconditioned with `base`.
    pub fn refined(base: Arc<dyn LinearOperator>, a: &dyn LinearOperator, z: Vec<f64>, rtol: f64) -> Result<Self> {
        if z.len() != base.dim() || a.dim() != base.dim() {
            return Err(Error::Dimension { expected: base.dim(), got: z.len() });
        }
        let w = pcg(a, base.as_ref(), &z, rtol, 500)?;
        let s = 1.0 - dot(&z, &w);
        if !(s > MIN_DEFLATION_SCALAR) {
            return Err(Error::SingularDeflation(s));
        }
        Ok(DeflatedSolve { base, z, w, s })
    }

    /// `1 - z^T A^{-1} z`.
    pub fn scalar(&self) -> f64 {
        self.s
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn base(&self) -> &Arc<dyn LinearOperator> {
        &self.base
    }
}

impl LinearOperator for DeflatedSolve {
    fn dim(&self) -> usize {
        self.z.len()
    }

    fn apply(&self, b: &[f64], x: &mut [f64]) {
        self.base.apply(b, x);
        let c = dot(&self.w, b) / self.s;
        for (xi, wi) in x.iter_mut().zip(&self.w) {
            *xi += c * wi;
        }
    }
}

/// Preconditioned conjugate gradients from a zero guess.
fn pcg(a: &dyn LinearOperator, m: &dyn LinearOperator, b: &[f64], rtol: f64, max_iters: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = m.apply_vec(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let r0 = rz.abs().sqrt();
    if r0 == 0.0 {
        return Ok(x);
    }
    let mut ap = vec![0.0; n];
    for _ in 0..max_iters {
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotSpd { column: 0, pivot: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        if rz_new.abs().sqrt() <= rtol * r0 {
            return Ok(x);
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged(format!("deflation vector solve after {max_iters} iterations")))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
