//! Preconditioned MinRes for symmetric indefinite systems.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, LinearOperator};

#[derive(Debug, Clone, Copy)]
pub struct MinresConfig {
    /// Stop when the preconditioned residual norm `||r||_{B^{-1}}` drops
    /// below `rtol` times its initial value.
    pub rtol: f64,
    pub max_iters: usize,
}

impl Default for MinresConfig {
    fn default() -> Self {
        MinresConfig { rtol: 1e-12, max_iters: 2000 }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative preconditioned residual norms, starting with 1 at iteration 0.
    pub history: Vec<f64>,
    pub converged: bool,
    /// `||b - A x|| / ||b||` recomputed after the solve.
    pub final_relres: f64,
    pub seconds: f64,
}

impl SolveReport {
    /// True when the residual history never increases.
    pub fn is_monotone(&self) -> bool {
        self.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
    }
}

/// Solves `A x = b` from a zero initial guess with SPD preconditioner
/// `binv` (the action of `B^{-1}`).
///
/// Follows the Paige-Saunders recurrences: one operator and one
/// preconditioner application per iteration, residual norm tracked by the
/// Givens rotations. Returns the last iterate even when not converged.
pub fn minres(
    a: &dyn LinearOperator,
    binv: &dyn LinearOperator,
    b: &[f64],
    cfg: &MinresConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    let n = a.dim();
    if b.len() != n || binv.dim() != n {
        return Err(Error::Dimension { expected: n, got: if b.len() != n { b.len() } else { binv.dim() } });
    }
    if !(cfg.rtol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {}", cfg.rtol)));
    }
    let mut x = vec![0.0; n];
    let mut r1 = b.to_vec();
    let mut y = vec![0.0; n];
    binv.apply(&r1, &mut y);
    let beta1_sq = dot(&r1, &y);
    if beta1_sq < 0.0 {
        return Err(Error::NotSpd { column: 0, pivot: beta1_sq });
    }
    let beta1 = beta1_sq.sqrt();
    let mut history = vec![1.0];
    if beta1 == 0.0 {
        let report =
            SolveReport { iterations: 0, history, converged: true, final_relres: 0.0, seconds: start.elapsed().as_secs_f64() };
        return Ok((x, report));
    }

    let mut r2 = r1.clone();
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0f64, 0.0f64);
    let mut converged = false;
    let mut iters = 0;

    while iters < cfg.max_iters {
        iters += 1;
        let s = 1.0 / beta;
        for (vi, yi) in v.iter_mut().zip(&y) {
            *vi = s * yi;
        }
        a.apply(&v, &mut y);
        if iters >= 2 {
            let c = beta / oldb;
            for (yi, ri) in y.iter_mut().zip(&r1) {
                *yi -= c * ri;
            }
        }
        let alfa = dot(&v, &y);
        let c = alfa / beta;
        for (yi, ri) in y.iter_mut().zip(&r2) {
            *yi -= c * ri;
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        binv.apply(&r2, &mut y);
        oldb = beta;
        let beta_sq = dot(&r2, &y);
        if beta_sq < 0.0 {
            return Err(Error::NotSpd { column: iters, pivot: beta_sq });
        }
        beta = beta_sq.sqrt();

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        let denom = 1.0 / gamma;
        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }

        let rel = phibar.abs() / beta1;
        history.push(rel);
        if rel <= cfg.rtol || beta == 0.0 {
            converged = true;
            break;
        }
    }

    let ax = a.apply_vec(&x);
    let res: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
    let final_relres = norm2(&res) / norm2(b);
    let report = SolveReport { iterations: iters, history, converged, final_relres, seconds: start.elapsed().as_secs_f64() };
    Ok((x, report))
}
