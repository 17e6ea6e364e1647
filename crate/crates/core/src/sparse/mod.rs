//! Sparse matrices, exact symmetric factorization, rank-one deflated solves
//! and Lanczos spectrum estimates.

mod csr;
mod factor;
pub mod lanczos;
pub mod ordering;
mod woodbury;

pub use csr::{CsrMatrix, TripletBuilder};
pub use factor::{FactorKind, Factorization, Ordering};
pub use lanczos::{lanczos_extreme_eigs, LanczosOptions, SpectrumEstimate};
pub use woodbury::{DeflatedSolve, MIN_DEFLATION_SCALAR};

/// A linear map `y = Op(x)` on vectors of length [`LinearOperator::dim`].
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// Overwrites `y`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }
}

/// Wraps a closure as an operator.
pub struct FnOperator<F: Fn(&[f64], &mut [f64]) + Send + Sync> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64]) + Send + Sync> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnOperator { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64]) + Send + Sync> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    woodbury::dot(a, b)
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
