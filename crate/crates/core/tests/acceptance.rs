//! Acceptance criteria 1-9. Each test writes one PASS/FAIL line straight to
//! stdout, past the harness capture. Targets that are not met are reported
//! as FAIL without panicking; broken machinery (errors, non-converged
//! solves where convergence is the point) panics.

use std::f64::consts::PI;
use std::io::Write;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thermoporo::amg::SmootherKind;
use thermoporo::assembly::{BlockSystem, ParameterSet, Spaces};
use thermoporo::driver::{
    amg_study, convergence_study, eig_report, heterogeneous, rates, solve, spectral_corners, step_rhs, HeterogeneousCase,
    MmsSolution, SolverChoice, SweepConfig, TimeDerivative,
};
use thermoporo::precond::{PrecondKind, PrecondMatrices, Realization};
use thermoporo::sparse::{CsrMatrix, DeflatedSolve, Factorization, LinearOperator};
use Realization::{Amg, Exact};

const KINDS: [PrecondKind; 2] = [PrecondKind::B1, PrecondKind::B2];

fn verdict(n: u32, pass: bool, detail: &str) {
    let line = format!("criterion {n}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    iters: usize,
    converged: bool,
    monotone: bool,
}

/// One backward Euler step from a zero state, data taken at `t`.
fn solve_point(params: &ParameterSet, mms: &MmsSolution, t: f64, level: u32, kind: PrecondKind, real: Realization) -> Outcome {
    let system = BlockSystem::assemble(Spaces::unit_square(level).unwrap(), params).unwrap();
    let choice = SolverChoice::new(kind, real);
    let precond = choice.build(&system).unwrap();
    let rhs = step_rhs(&system, mms, mms, t, t, &vec![0.0; system.dim()]).unwrap();
    let (_, rep) = solve(&system, &precond, &rhs, &choice.minres).unwrap();
    Outcome { iters: rep.iterations, converged: rep.converged, monotone: rep.is_monotone() }
}

fn sweep_point(params: &ParameterSet, level: u32, kind: PrecondKind, real: Realization) -> Outcome {
    let mms = MmsSolution::new(params).unwrap();
    solve_point(params, &mms, params.dt, level, kind, real)
}

fn heterog_counts(case: HeterogeneousCase, levels: &[u32], real: Realization) -> Vec<(u32, PrecondKind, usize, bool)> {
    let choices: Vec<SolverChoice> = KINDS.iter().map(|&k| SolverChoice::new(k, real)).collect();
    heterogeneous(case, levels, &choices)
        .unwrap()
        .into_iter()
        .map(|r| {
            let kind = if r.precond == PrecondKind::B1.name() { PrecondKind::B1 } else { PrecondKind::B2 };
            (r.level, kind, r.iters.unwrap_or(usize::MAX), r.converged)
        })
        .collect()
}

fn within(v: usize, lo: usize, hi: usize) -> bool {
    (lo..=hi).contains(&v)
}

fn near(v: usize, target: usize, tol: usize) -> bool {
    v.abs_diff(target) <= tol
}

fn storage_params(a0: f64, c0: f64) -> ParameterSet {
    ParameterSet { a0, c0, ..ParameterSet::unit() }
}

fn degenerate_params(lambda: f64) -> ParameterSet {
    ParameterSet { a0: 0.0, b0: 0.0, c0: 0.0, lambda: lambda.into(), ..ParameterSet::unit() }
}

#[test]
fn criterion_1_convergence() {
    let start = Instant::now();
    let params = ParameterSet::convergence_default();
    let rows = convergence_study(
        &params,
        &[1, 2, 3, 4, 5, 6],
        0.1,
        TimeDerivative::BackwardDifference(params.dt),
        &SolverChoice::new(PrecondKind::B1, Exact),
    )
    .unwrap();
    let seconds = start.elapsed().as_secs_f64();
    let r = rates(&rows);
    let fine = r.last().unwrap();
    let l5 = rows.iter().find(|row| row.level == 5).unwrap();
    assert!((l5.h - 0.0441942).abs() < 1e-6);
    let rel = |v: f64, t: f64| (v - t).abs() / t;
    let (ep, et) = (rel(l5.errors.p_h1, 0.012094), rel(l5.errors.t_h1, 0.11606));
    let rates_ok = (1..4).all(|i| (fine[i] - 2.0).abs() <= 0.1) && fine[0] >= 1.9;
    let converged = rows.iter().all(|row| row.converged);
    let pass = ep <= 0.05 && et <= 0.05 && rates_ok && converged && seconds <= 600.0;
    verdict(
        1,
        pass,
        &format!(
            "p_H1(l5)={:.6} (target 0.012094, off {:.0}%), T_H1(l5)={:.6} (target 0.11606, off {:.0}%), \
             finest rates u={:.2} xi={:.2} p={:.2} T={:.2}, converged={converged}, {seconds:.1}s",
            l5.errors.p_h1,
            100.0 * ep,
            l5.errors.t_h1,
            100.0 * et,
            fine[0],
            fine[1],
            fine[2],
            fine[3]
        ),
    );
    assert!(rates_ok && converged, "discretization rates or convergence broken");
}

#[test]
fn criterion_2_storage_robustness() {
    // (a0 = c0, B1 range, B2 range)
    let cells = [(1e1, (22, 28), (32, 39)), (1e9, (8, 13), (8, 14))];
    let mut pass = true;
    let mut detail = Vec::new();
    for (v, r1, r2) in cells {
        let params = storage_params(v, v);
        for (kind, (lo, hi)) in [(PrecondKind::B1, r1), (PrecondKind::B2, r2)] {
            let counts: Vec<usize> = (3..=6)
                .map(|l| {
                    let o = sweep_point(&params, l, kind, Exact);
                    assert!(o.converged);
                    o.iters
                })
                .collect();
            let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
            let ok = counts.iter().all(|&c| within(c, lo, hi)) && spread <= 2;
            pass &= ok;
            detail.push(format!("({v:e},{v:e}) {} l3-6 {counts:?} in [{lo},{hi}]", kind.name()));
        }
    }
    verdict(2, pass, &detail.join("; "));
}

#[test]
fn criterion_3_degenerate_storage() {
    // (lambda, B1 target, tol, B2 target, tol)
    let cells = [(1e6, 23, 3, 24, 3), (1.0, 26, 4, 74, 8)];
    let mut pass = true;
    let mut detail = Vec::new();
    for (lambda, t1, d1, t2, d2) in cells {
        let params = degenerate_params(lambda);
        let b1 = sweep_point(&params, 3, PrecondKind::B1, Exact);
        let b2 = sweep_point(&params, 3, PrecondKind::B2, Exact);
        assert!(b1.converged && b2.converged);
        pass &= near(b1.iters, t1, d1) && near(b2.iters, t2, d2);
        detail.push(format!("lambda={lambda:e}: ({}, {}) vs ({t1}±{d1}, {t2}±{d2})", b1.iters, b2.iters));
    }
    verdict(3, pass, &detail.join("; "));
}

/// No growth trend: the finest counts stay within 10% (plus one) of level 4.
fn bounded(counts: &[(u32, usize)]) -> bool {
    let at4 = counts.iter().find(|c| c.0 == 4).map(|c| c.1).unwrap();
    counts.iter().filter(|c| c.0 > 4).all(|c| c.1 as f64 <= 1.1 * at4 as f64 + 1.0)
}

#[test]
fn criterion_4_heterogeneous() {
    let levels = [2, 3, 4, 5, 6, 7];
    let mut pass = true;
    let mut detail = Vec::new();
    for (case, lo, hi) in [(HeterogeneousCase::CentralJump(0.4), 19, 26), (HeterogeneousCase::Checkerboard, 30, 46)] {
        let rows = heterog_counts(case, &levels, Exact);
        assert!(rows.iter().all(|r| r.3), "heterogeneous solve did not converge");
        for kind in KINDS {
            let counts: Vec<(u32, usize)> = rows.iter().filter(|r| r.1 == kind).map(|r| (r.0, r.2)).collect();
            let b = bounded(&counts);
            pass &= b;
            if kind == PrecondKind::B1 {
                pass &= counts.iter().all(|c| within(c.1, lo, hi));
            }
            let c: Vec<usize> = counts.iter().map(|c| c.1).collect();
            let range = if kind == PrecondKind::B1 { format!(" in [{lo},{hi}]") } else { String::new() };
            detail.push(format!("{} {} l2-7 {c:?}{range} bounded={b}", case.name(), kind.name()));
        }
    }
    verdict(4, pass, &detail.join("; "));
}

#[test]
fn criterion_5_parameter_sweep() {
    let cfg = SweepConfig::robust();
    let mut worst = 0;
    let mut all_converged = true;
    let mut monotone = true;
    let mut solves = 0;
    for params in cfg.points() {
        for &level in &[1, 4] {
            for kind in KINDS {
                let o = sweep_point(&params, level, kind, Exact);
                worst = worst.max(o.iters);
                all_converged &= o.converged;
                monotone &= o.monotone;
                solves += 1;
            }
        }
    }
    // (beta, lambda, theta, K) -> (B1, B2) on level 1
    let spots = [
        ((1e-4, 1.0, 1e-6, 1e-9), (18, 32)),
        ((1e-2, 1e3, 1e-3, 1e-3), (18, 20)),
        ((1e-4, 1e6, 1.0, 1.0), (12, 13)),
        ((1.0, 1.0, 1.0, 1.0), (18, 35)),
        ((1.0, 1e3, 1.0, 1.0), (18, 24)),
    ];
    let mut spot_ok = true;
    let mut spot_detail = Vec::new();
    for ((beta, lambda, theta, k), (t1, t2)) in spots {
        let params =
            ParameterSet { beta, lambda: lambda.into(), theta: theta.into(), k: k.into(), ..ParameterSet::sweep_base() };
        let b1 = sweep_point(&params, 1, PrecondKind::B1, Exact).iters;
        let b2 = sweep_point(&params, 1, PrecondKind::B2, Exact).iters;
        spot_ok &= near(b1, t1, 3) && near(b2, t2, 3);
        spot_detail.push(format!("({beta:e},{lambda:e},{theta:e},{k:e}) ({b1},{b2}) vs ({t1},{t2})"));
    }
    let pass = worst <= 80 && all_converged && spot_ok;
    verdict(
        5,
        pass,
        &format!(
            "{solves} solves, max count {worst} (<= 80), converged={all_converged}, monotone={monotone}; spot checks ±3: {}",
            spot_detail.join(", ")
        ),
    );
    assert!(all_converged);
}

/// Extreme eigenvalue moduli of `B^{-1} A` from dense matrices: with
/// `B^{-1} = L L^T`, the spectrum equals that of `L^T A L`.
fn dense_spectrum(system: &BlockSystem, precond: &dyn LinearOperator) -> (f64, f64) {
    let n = system.dim();
    let mut binv = DMatrix::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = precond.apply_vec(&e);
        e[j] = 0.0;
        binv.set_column(j, &DVector::from_vec(col));
    }
    let binv = (&binv + binv.transpose()) * 0.5;
    let l = binv.cholesky().expect("preconditioner is not SPD").unpack();
    let dense = system.matrix.to_dense();
    let a = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
    let s = l.transpose() * a * &l;
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigenvalues();
    let moduli = eig.iter().map(|v| v.abs());
    (moduli.clone().fold(f64::INFINITY, f64::min), moduli.fold(0.0, f64::max))
}

#[test]
fn criterion_6_spectral_robustness() {
    let level = 2;
    let choices: Vec<SolverChoice> = KINDS.iter().map(|&k| SolverChoice::new(k, Exact)).collect();
    let records = eig_report(level, &choices).unwrap();
    let corners = spectral_corners();
    let mut oracle_err = 0.0f64;
    for rec in &records {
        let params = corners
            .iter()
            .find(|p| p.lambda == rec.params.lambda && p.k == rec.params.k && p.theta == rec.params.theta && p.beta == rec.params.beta)
            .unwrap();
        let kind = if rec.precond == PrecondKind::B1.name() { PrecondKind::B1 } else { PrecondKind::B2 };
        let system = BlockSystem::assemble(Spaces::unit_square(level).unwrap(), params).unwrap();
        let precond = SolverChoice::new(kind, Exact).build(&system).unwrap();
        let (lo, hi) = dense_spectrum(&system, &precond);
        oracle_err = oracle_err.max((rec.lmin_est.unwrap() - lo).abs() / lo).max((rec.lmax_est.unwrap() - hi).abs() / hi);
    }
    let oracle_ok = oracle_err <= 1e-4;
    let mut pass = oracle_ok;
    let mut detail = vec![format!("Lanczos vs dense oracle max rel err {oracle_err:.1e}")];
    for kind in KINDS {
        let kappas: Vec<f64> = records
            .iter()
            .filter(|r| r.precond == kind.name())
            .map(|r| r.lmax_est.unwrap() / r.lmin_est.unwrap())
            .collect();
        let (lo, hi) = kappas.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &k| (a.min(k), b.max(k)));
        let ok = hi / lo <= 3.0;
        pass &= ok;
        detail.push(format!("{} condition {lo:.2}..{hi:.2} over {} corners, spread {:.2}x (<= 3)", kind.name(), kappas.len(), hi / lo));
    }
    verdict(6, pass, &detail.join("; "));
    assert!(oracle_ok, "Lanczos estimates disagree with the dense spectrum");
}

#[test]
fn criterion_7_amg_realization() {
    let levels = [3u32, 4, 5];
    // (name, per-level exact and AMG counts for B1 and B2)
    let mut cases: Vec<(String, Vec<(u32, PrecondKind, usize, usize)>)> = Vec::new();
    let static_cases = [
        ("storage(1e1,1e1)".to_string(), storage_params(1e1, 1e1)),
        ("storage(1e9,1e9)".to_string(), storage_params(1e9, 1e9)),
        ("degenerate(lambda=1e6)".to_string(), degenerate_params(1e6)),
        ("degenerate(lambda=1)".to_string(), degenerate_params(1.0)),
    ];
    for (name, params) in &static_cases {
        let mut rows = Vec::new();
        for &l in &levels {
            for kind in KINDS {
                let ex = sweep_point(params, l, kind, Exact);
                let amg = sweep_point(params, l, kind, Amg);
                assert!(ex.converged && amg.converged, "{name} level {l}");
                rows.push((l, kind, ex.iters, amg.iters));
            }
        }
        cases.push((name.clone(), rows));
    }
    for case in [HeterogeneousCase::CentralJump(0.4), HeterogeneousCase::Checkerboard] {
        let ex = heterog_counts(case, &levels, Exact);
        let amg = heterog_counts(case, &levels, Amg);
        assert!(ex.iter().chain(&amg).all(|r| r.3), "{} did not converge", case.name());
        let rows = ex.iter().zip(&amg).map(|(e, a)| (e.0, e.1, e.2, a.2)).collect();
        cases.push((case.name(), rows));
    }
    let mut worst_ratio = 0.0f64;
    let mut growth_fail = Vec::new();
    for (name, rows) in &cases {
        for &(_, _, e, a) in rows {
            worst_ratio = worst_ratio.max(a as f64 / e as f64);
        }
        for kind in KINDS {
            let amg: Vec<usize> = rows.iter().filter(|r| r.1 == kind).map(|r| r.3).collect();
            let (lo, hi) = (*amg.iter().min().unwrap(), *amg.iter().max().unwrap());
            if (hi - lo) as f64 > 0.3 * lo as f64 {
                growth_fail.push(format!("{name} {} {amg:?}", kind.name()));
            }
        }
    }
    let pass = worst_ratio <= 2.5 && growth_fail.is_empty();
    verdict(
        7,
        pass,
        &format!(
            "worst AMG/exact ratio {worst_ratio:.2} (<= 2.5); l3-5 AMG variation > 30% in {} of {} series{}{}",
            growth_fail.len(),
            2 * cases.len(),
            if growth_fail.is_empty() { "" } else { ": " },
            growth_fail.join(", ")
        ),
    );
}

#[test]
fn criterion_8_smoother_study() {
    let rows = amg_study(&[3, 4, 5]).unwrap();
    let kappa = |r: &thermoporo::driver::Record| r.extra.iter().find(|e| e.0 == "kappa").unwrap().1;
    let mut pass = true;
    let mut worst_block = 0.0f64;
    let mut cells = 0;
    for block in rows.iter().filter(|r| r.precond == SmootherKind::BlockGaussSeidel.name()) {
        let point = rows
            .iter()
            .find(|r| {
                r.precond == SmootherKind::PointGaussSeidel.name()
                    && r.level == block.level
                    && r.params.k == block.params.k
                    && r.params.theta == block.params.theta
            })
            .unwrap();
        let (kb, kp) = (kappa(block), kappa(point));
        worst_block = worst_block.max(kb);
        pass &= kb <= kp && kb <= 3.0;
        cells += 1;
    }
    verdict(8, pass, &format!("{cells} (theta, K, level) cells, max block-smoother kappa {worst_block:.3} (<= 3, <= point)"));
    assert!(pass);
}

/// `a + b e1 + c e2 + d e1 e2` with `e1^2 = e2^2 = 0`.
#[derive(Clone, Copy)]
struct Hd(f64, f64, f64, f64);

impl Hd {
    fn c(v: f64) -> Hd {
        Hd(v, 0.0, 0.0, 0.0)
    }
    fn lift(self, f: f64, df: f64, ddf: f64) -> Hd {
        Hd(f, df * self.1, df * self.2, df * self.3 + ddf * self.1 * self.2)
    }
    fn sin(self) -> Hd {
        self.lift(self.0.sin(), self.0.cos(), -self.0.sin())
    }
    fn cos(self) -> Hd {
        self.lift(self.0.cos(), -self.0.sin(), -self.0.cos())
    }
    fn exp(self) -> Hd {
        let e = self.0.exp();
        self.lift(e, e, e)
    }
}

impl Add for Hd {
    type Output = Hd;
    fn add(self, o: Hd) -> Hd {
        Hd(self.0 + o.0, self.1 + o.1, self.2 + o.2, self.3 + o.3)
    }
}

impl Sub for Hd {
    type Output = Hd;
    fn sub(self, o: Hd) -> Hd {
        self + (-o)
    }
}

impl Neg for Hd {
    type Output = Hd;
    fn neg(self) -> Hd {
        Hd(-self.0, -self.1, -self.2, -self.3)
    }
}

impl Mul for Hd {
    type Output = Hd;
    fn mul(self, o: Hd) -> Hd {
        Hd(
            self.0 * o.0,
            self.0 * o.1 + self.1 * o.0,
            self.0 * o.2 + self.2 * o.0,
            self.0 * o.3 + self.1 * o.2 + self.2 * o.1 + self.3 * o.0,
        )
    }
}

/// Largest strong-form residual of the manufactured forcing at random
/// points, with derivatives of `(u1, u2, p, T)` taken by hyper-dual numbers.
fn forcing_residual(m: &MmsSolution, samples: usize) -> f64 {
    let fields = |x: Hd, y: Hd, t: Hd| {
        let pi = Hd::c(PI);
        let e = (-t).exp();
        let u = e * (pi * x).sin() * (pi * y).sin();
        [u, u, Hd::c(m.lambda) * e * (pi * x).sin() * (pi * y).cos(), Hd::c(m.mu) * e * (pi * x).cos() * (pi * y).sin()]
    };
    let d = |pt: [f64; 3], f: usize, i: usize, j: Option<usize>| {
        let mut v = [Hd::c(pt[0]), Hd::c(pt[1]), Hd::c(pt[2])];
        v[i].1 = 1.0;
        if let Some(j) = j {
            v[j].2 = 1.0;
        }
        let r = fields(v[0], v[1], v[2])[f];
        if j.is_some() {
            r.3
        } else {
            r.1
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let pt = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
        let grad_div = |i: usize| d(pt, 0, 0, Some(i)) + d(pt, 1, 1, Some(i));
        let lap = |f: usize| d(pt, f, 0, Some(0)) + d(pt, f, 1, Some(1));
        let dt_div = grad_div(2);
        let (f, g, h) = m.forcing([pt[0], pt[1]], pt[2]);
        for c in 0..2 {
            let r = -m.mu * (lap(c) + grad_div(c)) - m.lambda * grad_div(c) + m.alpha * d(pt, 2, c, None)
                + m.beta * d(pt, 3, c, None)
                - f[c];
            worst = worst.max(r.abs());
        }
        let rp = m.c0 * d(pt, 2, 2, None) - m.b0 * d(pt, 3, 2, None) + m.alpha * dt_div - m.k * lap(2) - g;
        let rt = m.a0 * d(pt, 3, 2, None) - m.b0 * d(pt, 2, 2, None) + m.beta * dt_div - m.theta * lap(3) - h;
        worst = worst.max(rp.abs()).max(rt.abs());
    }
    worst
}

fn dense(m: &CsrMatrix) -> DMatrix<f64> {
    let d = m.to_dense();
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| d[i][j])
}

/// `A - z z^T` as a dense matrix.
fn downdated(a: &CsrMatrix, z: &[f64]) -> DMatrix<f64> {
    let z = DVector::from_column_slice(z);
    dense(a) - &z * z.transpose()
}

/// Forward error of the Sherman-Morrison solve against a dense LU solve,
/// and its residual in the dense downdated matrix.
fn woodbury_error(a: &CsrMatrix, z: &[f64], rng: &mut ChaCha8Rng) -> (f64, f64) {
    let n = a.nrows();
    assert!(n <= 500);
    let solver = DeflatedSolve::new(Arc::new(Factorization::cholesky(a).unwrap()), z.to_vec()).unwrap();
    let d = downdated(a, z);
    let lu = d.clone().lu();
    let (mut forward, mut backward) = (0.0f64, 0.0f64);
    for _ in 0..3 {
        let b = DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5);
        let x = DVector::from_vec(solver.apply_vec(b.as_slice()));
        let reference = lu.solve(&b).unwrap();
        forward = forward.max((&x - &reference).norm() / reference.norm());
        backward = backward.max((&d * &x - &b).norm() / b.norm());
    }
    (forward, backward)
}

#[test]
fn criterion_9_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut detail = Vec::new();

    // Rank-one downdated solves: the total-pressure block of the diagonal
    // preconditioner and the coupled block of the other, on small meshes.
    // With lambda = 1e6 and no storage the downdated block has condition
    // number near 1e6, so only its residual is held to the tolerance.
    let (mut wb, mut wb_res) = (0.0f64, 0.0f64);
    let jump = HeterogeneousCase::CentralJump(0.4).params().unwrap();
    let cases = [(4, jump, true), (3, degenerate_params(1e3), true), (2, storage_params(1e1, 1e1), true), (3, degenerate_params(1e6), false)];
    for (level, params, well_conditioned) in cases {
        let system = BlockSystem::assemble(Spaces::unit_square(level).unwrap(), &params).unwrap();
        let b2 = PrecondMatrices::new(PrecondKind::B2, &system);
        let b1 = PrecondMatrices::new(PrecondKind::B1, &system);
        let mut y = b1.z.clone();
        y.resize(b1.lower[0].nrows(), 0.0);
        let mut errs = vec![woodbury_error(&b2.lower[0], &b2.z, &mut rng)];
        if b1.lower[0].nrows() <= 500 {
            errs.push(woodbury_error(&b1.lower[0], &y, &mut rng));
        }
        for (f, r) in errs {
            wb_res = wb_res.max(r);
            if well_conditioned {
                wb = wb.max(f);
            }
        }
    }
    let woodbury_ok = wb <= 1e-10 && wb_res <= 1e-10;
    detail.push(format!("Woodbury vs dense max rel err {wb:.1e}, max rel residual {wb_res:.1e}"));

    // Symmetry and SPD preconditioners over the sweep grid.
    let mut asym = 0.0f64;
    let mut spd_ok = true;
    let mut spd_checked = 0;
    let mut points = SweepConfig::robust().points();
    points.extend([HeterogeneousCase::CentralJump(0.4), HeterogeneousCase::Checkerboard].map(|c| c.params().unwrap()));
    for params in &points {
        let system = BlockSystem::assemble(Spaces::unit_square(2).unwrap(), params).unwrap();
        asym = asym.max(system.matrix.asymmetry());
        for kind in KINDS {
            let m = PrecondMatrices::new(kind, &system);
            spd_ok &= Factorization::cholesky(&m.elasticity).is_ok();
            let mut z = m.z.clone();
            z.resize(m.lower[0].nrows(), 0.0);
            spd_ok &= downdated(&m.lower[0], &z).cholesky().is_some();
            for block in &m.lower[1..] {
                spd_ok &= Factorization::cholesky(block).is_ok();
            }
            spd_checked += 1;
        }
    }
    detail.push(format!("max |A - A^T| = {asym:e}"));
    detail.push(format!("{spd_checked} preconditioners SPD: {spd_ok}"));

    // Residual monotonicity on every solve over the grid, both realizations.
    let mut monotone = true;
    let mut solves = 0;
    for params in SweepConfig::robust().points() {
        for kind in KINDS {
            for real in [Exact, Amg] {
                let o = sweep_point(&params, 2, kind, real);
                monotone &= o.monotone && o.converged;
                solves += 1;
            }
        }
    }
    detail.push(format!("{solves} MinRes solves monotone: {monotone}"));

    let mut forcing = 0.0f64;
    for params in [ParameterSet::convergence_default(), ParameterSet::unit(), ParameterSet::sweep_base()] {
        forcing = forcing.max(forcing_residual(&MmsSolution::new(&params).unwrap(), 200));
    }
    detail.push(format!("manufactured forcing residual {forcing:.1e}"));

    let pass = woodbury_ok && asym == 0.0 && spd_ok && monotone && forcing <= 1e-10;
    verdict(9, pass, &detail.join("; "));
    assert!(pass);
}
