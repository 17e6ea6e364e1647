//! Preconditioned Lanczos for the generalized symmetric problem
//! `A x = lambda B x` with `B` SPD, driven by `A` and `B^{-1}` actions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::woodbury::dot;
use super::LinearOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub max_iters: usize,
    /// Relative change of the tracked Ritz values between checks.
    pub tol: f64,
    pub seed: u64,
    /// Include the eigenvalues closest to zero on each side in the
    /// convergence test (needed for condition estimates of indefinite `A`).
    pub track_interior: bool,
    /// Fresh random start vectors allowed after an invariant subspace is hit.
    pub max_restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { max_iters: 300, tol: 1e-10, seed: 0x5eed, track_interior: false, max_restarts: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumEstimate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `(smallest, largest)` positive Ritz values.
    pub positive: Option<(f64, f64)>,
    /// `(closest to zero, most negative)` negative Ritz values.
    pub negative: Option<(f64, f64)>,
    pub iterations: usize,
    pub converged: bool,
    /// All Ritz values, ascending.
    pub ritz: Vec<f64>,
}

impl SpectrumEstimate {
    /// Smallest and largest eigenvalue modulus.
    pub fn modulus_range(&self) -> (f64, f64) {
        let min = self.ritz.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let max = self.ritz.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (min, max)
    }

    /// `max |lambda| / min |lambda|`.
    pub fn condition(&self) -> f64 {
        let (lo, hi) = self.modulus_range();
        hi / lo
    }

    fn from_ritz(ritz: Vec<f64>, iterations: usize, converged: bool) -> Self {
        let lambda_min = ritz.first().copied().unwrap_or(f64::NAN);
        let lambda_max = ritz.last().copied().unwrap_or(f64::NAN);
        let pos: Vec<f64> = ritz.iter().copied().filter(|&v| v > 0.0).collect();
        let neg: Vec<f64> = ritz.iter().copied().filter(|&v| v < 0.0).collect();
        SpectrumEstimate {
            lambda_min,
            lambda_max,
            positive: (!pos.is_empty()).then(|| (pos[0], *pos.last().unwrap())),
            negative: (!neg.is_empty()).then(|| (*neg.last().unwrap(), neg[0])),
            iterations,
            converged,
            ritz,
        }
    }

    fn tracked(&self, interior: bool) -> Vec<f64> {
        let mut v = vec![self.lambda_min, self.lambda_max];
        if interior {
            if let Some((a, _)) = self.positive {
                v.push(a);
            }
            if let Some((a, _)) = self.negative {
                v.push(a);
            }
        }
        v
    }
}

/// Extreme eigenvalues of `B^{-1} A`.
///
/// Lanczos in the `B` inner product with full reorthogonalization. Vectors
/// live in pairs: `v` in the residual (dual) space and `q = B^{-1} v`, with
/// `q_i^T v_j = delta_ij`.
pub fn lanczos_extreme_eigs(
    a: &dyn LinearOperator,
    binv: &dyn LinearOperator,
    opts: &LanczosOptions,
) -> Result<SpectrumEstimate> {
    let n = a.dim();
    if binv.dim() != n {
        return Err(Error::Dimension { expected: n, got: binv.dim() });
    }
    let max_iters = opts.max_iters.min(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut qs: Vec<Vec<f64>> = Vec::with_capacity(max_iters);
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(max_iters);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_iters);
    let mut beta: Vec<f64> = Vec::with_capacity(max_iters);

    let mut restarts = 0;
    let mut w = start_vector(&mut rng, n);
    let mut z = vec![0.0; n];
    let mut prev: Option<Vec<f64>> = None;
    let mut check_every = 1usize;

    loop {
        // Normalize the pending dual vector w in the B^{-1} inner product.
        binv.apply(&w, &mut z);
        let bnorm2 = dot(&z, &w);
        let scale = alpha.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
        if !(bnorm2 > 0.0) || bnorm2.sqrt() <= 1e-12 * scale {
            if qs.len() >= n || restarts >= opts.max_restarts {
                break;
            }
            // Invariant subspace: continue from a fresh direction.
            restarts += 1;
            w = start_vector(&mut rng, n);
            reorthogonalize(&mut w, &qs, &vs);
            binv.apply(&w, &mut z);
            let b2 = dot(&z, &w);
            if !(b2 > 0.0) {
                return Err(Error::NotConverged("Lanczos restart produced a non-positive B-norm".into()));
            }
            if !beta.is_empty() || !qs.is_empty() {
                beta.push(0.0);
            }
            let b = b2.sqrt();
            push_pair(&mut qs, &mut vs, &z, &w, b);
        } else {
            let b = bnorm2.sqrt();
            if !qs.is_empty() {
                beta.push(b);
            }
            push_pair(&mut qs, &mut vs, &z, &w, b);
        }

        let j = qs.len() - 1;
        let mut aq = vec![0.0; n];
        a.apply(&qs[j], &mut aq);
        let aj = dot(&qs[j], &aq);
        alpha.push(aj);
        for (x, v) in aq.iter_mut().zip(&vs[j]) {
            *x -= aj * v;
        }
        if j > 0 {
            let bj = beta[j - 1];
            for (x, v) in aq.iter_mut().zip(&vs[j - 1]) {
                *x -= bj * v;
            }
        }
        reorthogonalize(&mut aq, &qs, &vs);
        w = aq;

        let k = alpha.len();
        if k >= max_iters {
            let ritz = tridiagonal_eigenvalues(&alpha, &beta);
            return Ok(SpectrumEstimate::from_ritz(ritz, k, k >= n));
        }
        if k % check_every == 0 {
            let est = SpectrumEstimate::from_ritz(tridiagonal_eigenvalues(&alpha, &beta), k, false);
            let cur = est.tracked(opts.track_interior);
            if let Some(p) = &prev {
                if p.len() == cur.len() && p.iter().zip(&cur).all(|(x, y)| (x - y).abs() <= opts.tol * y.abs().max(1e-300))
                {
                    return Ok(SpectrumEstimate { converged: true, ..est });
                }
            }
            prev = Some(cur);
            check_every = if k < 20 { 1 } else { 5 };
        }
    }
    let k = alpha.len();
    let ritz = tridiagonal_eigenvalues(&alpha, &beta);
    Ok(SpectrumEstimate::from_ritz(ritz, k, true))
}

fn start_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()
}

fn push_pair(qs: &mut Vec<Vec<f64>>, vs: &mut Vec<Vec<f64>>, z: &[f64], w: &[f64], b: f64) {
    qs.push(z.iter().map(|x| x / b).collect());
    vs.push(w.iter().map(|x| x / b).collect());
}

/// Removes the `B`-components along the current basis (twice).
fn reorthogonalize(w: &mut [f64], qs: &[Vec<f64>], vs: &[Vec<f64>]) {
    for _ in 0..2 {
        for (q, v) in qs.iter().zip(vs) {
            let c = dot(q, w);
            for (x, vi) in w.iter_mut().zip(v) {
                *x -= c * vi;
            }
        }
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `alpha`
/// and off-diagonal `beta`, ascending, by Sturm bisection.
pub fn tridiagonal_eigenvalues(alpha: &[f64], beta: &[f64]) -> Vec<f64> {
    let k = alpha.len();
    if k == 0 {
        return Vec::new();
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 } + if i + 1 < k { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    let span = (hi - lo).max(hi.abs().max(lo.abs()) * 1e-15).max(1e-300);
    lo -= 1e-12 * span;
    hi += 1e-12 * span;
    // Number of eigenvalues strictly below x.
    let count_below = |x: f64| -> usize {
        let mut c = 0;
        let mut q = alpha[0] - x;
        if q < 0.0 {
            c += 1;
        }
        for i in 1..k {
            let denom = if q == 0.0 { f64::EPSILON * span } else { q };
            q = alpha[i] - x - beta[i - 1] * beta[i - 1] / denom;
            if q < 0.0 {
                c += 1;
            }
        }
        c
    };
    (0..k)
        .map(|i| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if count_below(mid) > i {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{CsrMatrix, Factorization};

    #[test]
    fn tridiagonal_reference() {
        // [[2,1],[1,2]] -> 1, 3
        let e = tridiagonal_eigenvalues(&[2.0, 2.0], &[1.0]);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
        // 1D Laplacian eigenvalues 2 - 2 cos(k pi/(n+1)).
        let n = 30;
        let e = tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]);
        for (k, v) in e.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_with_identity() {
        let a = CsrMatrix::from_diagonal(&[1.0, 2.0, 5.0]);
        let i = CsrMatrix::identity(3);
        let est = lanczos_extreme_eigs(&a, &i, &LanczosOptions::default()).unwrap();
        assert!((est.lambda_min - 1.0).abs() < 1e-8);
        assert!((est.lambda_max - 5.0).abs() < 1e-8);
    }

    #[test]
    fn preconditioner_equal_to_operator() {
        let a = CsrMatrix::from_dense(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]]);
        let f = Factorization::cholesky(&a).unwrap();
        let est = lanczos_extreme_eigs(&a, &f, &LanczosOptions::default()).unwrap();
        assert!((est.lambda_min - 1.0).abs() < 1e-8);
        assert!((est.lambda_max - 1.0).abs() < 1e-8);
    }

    #[test]
    fn indefinite_branches() {
        let a = CsrMatrix::from_diagonal(&[-3.0, -0.5, 0.25, 2.0, 7.0]);
        let i = CsrMatrix::identity(5);
        let est = lanczos_extreme_eigs(&a, &i, &LanczosOptions { max_iters: 5, ..Default::default() }).unwrap();
        let (pmin, pmax) = est.positive.unwrap();
        let (nmin, nmax) = est.negative.unwrap();
        assert!((pmin - 0.25).abs() < 1e-10 && (pmax - 7.0).abs() < 1e-10);
        assert!((nmin + 0.5).abs() < 1e-10 && (nmax + 3.0).abs() < 1e-10);
        assert!((est.condition() - 28.0).abs() < 1e-8);
    }
}
