//! Static solves, backward Euler and the manufactured-solution study.

use std::sync::Arc;
use std::time::Instant;

use log::info;

use crate::assembly::{forms, BlockSystem, Field, ParameterSet, Sources, Spaces};
use crate::driver::mms::{MmsSolution, TimeDerivative};
use crate::error::{Error, Result};
use crate::fem::{errors, interpolate_scalar, interpolate_vector, FieldFunction};
use crate::krylov::{minres, MinresConfig, SolveReport};
use crate::precond::{BlockPreconditioner, PrecondKind, PrecondOptions, Realization};
use crate::sparse::{lanczos_extreme_eigs, FactorKind, Factorization, LanczosOptions, LinearOperator, Ordering};

/// Quadrature degree for error integrals and the initial projection.
pub const ERROR_QUADRATURE: u32 = 6;

#[derive(Debug, Clone, Copy)]
pub struct SolverChoice {
    pub kind: PrecondKind,
    pub realization: Realization,
    pub minres: MinresConfig,
    pub options: PrecondOptions,
}

impl SolverChoice {
    pub fn new(kind: PrecondKind, realization: Realization) -> Self {
        SolverChoice { kind, realization, minres: MinresConfig::default(), options: PrecondOptions::default() }
    }

    pub fn build(&self, system: &BlockSystem) -> Result<BlockPreconditioner> {
        BlockPreconditioner::with_options(self.kind, self.realization, system, &self.options)
    }
}

/// Extreme moduli of the eigenvalues of `B^{-1} A`.
pub fn spectrum(system: &BlockSystem, precond: &BlockPreconditioner, max_iters: usize) -> Result<(f64, f64)> {
    let opts = LanczosOptions { max_iters, tol: 1e-8, track_interior: true, ..Default::default() };
    let est = lanczos_extreme_eigs(&system.matrix, precond, &opts)?;
    Ok(est.modulus_range())
}

/// Boundary values of the closed forms at time `t`, as a full-length vector.
pub fn boundary_values(system: &BlockSystem, mms: &MmsSolution, t: f64) -> Result<Vec<f64>> {
    let sp = &system.spaces;
    let u = interpolate_vector(&sp.displacement, |x| mms.displacement(x, t));
    let p = interpolate_scalar(&sp.scalar, |x| mms.pressure(x, t));
    let temp = interpolate_scalar(&sp.scalar, |x| mms.temperature(x, t));
    system.boundary_vector(&u, &p, &temp)
}

/// Right-hand side of one step ending at `t` with Dirichlet data applied.
pub fn step_rhs(
    system: &BlockSystem,
    sources: &dyn Sources,
    mms: &MmsSolution,
    t_sources: f64,
    t_boundary: f64,
    previous: &[f64],
) -> Result<Vec<f64>> {
    let mut rhs = system.load_vector(sources, t_sources, previous)?;
    let g = boundary_values(system, mms, t_boundary)?;
    system.apply_dirichlet(&mut rhs, &g)?;
    Ok(rhs)
}

pub fn solve(system: &BlockSystem, precond: &BlockPreconditioner, rhs: &[f64], cfg: &MinresConfig) -> Result<(Vec<f64>, SolveReport)> {
    minres(&system.matrix, precond, rhs, cfg)
}

/// Initial state: nodal interpolants of `u, p, T` and the `L2` projection of
/// the total pressure.
pub fn initial_state(system: &BlockSystem, mms: &MmsSolution, t: f64) -> Result<Vec<f64>> {
    let sp = &system.spaces;
    let l = &system.layout;
    let mut x = vec![0.0; system.dim()];
    let u = interpolate_vector(&sp.displacement, |y| mms.displacement(y, t));
    let p = interpolate_scalar(&sp.scalar, |y| mms.pressure(y, t));
    let temp = interpolate_scalar(&sp.scalar, |y| mms.temperature(y, t));
    let b = forms::load(&sp.total_pressure, ERROR_QUADRATURE, |_, y, o| o[0] = mms.total_pressure(y, t))?;
    let m = Factorization::new(&system.blocks.mass_q, FactorKind::Cholesky, Ordering::Auto)?;
    let xi = m.solve(&b);
    l.slice_mut(&mut x, Field::Displacement).copy_from_slice(&u.coeffs);
    l.slice_mut(&mut x, Field::TotalPressure).copy_from_slice(&xi);
    l.slice_mut(&mut x, Field::Pressure).copy_from_slice(&p.coeffs);
    l.slice_mut(&mut x, Field::Temperature).copy_from_slice(&temp.coeffs);
    Ok(x)
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub state: Vec<f64>,
    pub reports: Vec<SolveReport>,
    pub t_final: f64,
}

impl Trajectory {
    pub fn converged(&self) -> bool {
        self.reports.iter().all(|r| r.converged)
    }

    pub fn max_iterations(&self) -> usize {
        self.reports.iter().map(|r| r.iterations).max().unwrap_or(0)
    }
}

/// Backward Euler from `initial` over `steps` steps of `dt`, with Dirichlet
/// data taken from the closed forms at each new time. Stops at the first
/// non-converged solve.
pub fn backward_euler(
    system: &BlockSystem,
    precond: &BlockPreconditioner,
    sources: &dyn Sources,
    mms: &MmsSolution,
    initial: Vec<f64>,
    steps: usize,
    cfg: &MinresConfig,
) -> Result<Trajectory> {
    let dt = system.params.dt;
    let mut state = initial;
    let mut reports = Vec::with_capacity(steps);
    let mut t = 0.0;
    for n in 1..=steps {
        t = n as f64 * dt;
        let rhs = step_rhs(system, sources, mms, t, t, &state)?;
        let (x, rep) = solve(system, precond, &rhs, cfg)?;
        let ok = rep.converged;
        reports.push(rep);
        state = x;
        if !ok {
            log::warn!("step {n} did not converge");
            break;
        }
    }
    Ok(Trajectory { state, reports, t_final: t })
}

/// Number of steps `tf / dt`, rejecting non-multiples.
pub fn step_count(dt: f64, tf: f64) -> Result<usize> {
    if !(dt > 0.0) || !(tf >= 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt}, tf = {tf}")));
    }
    let n = (tf / dt).round();
    if (n * dt - tf).abs() > 1e-9 * tf.max(dt) {
        return Err(Error::InvalidParameter(format!("tf = {tf} is not a multiple of dt = {dt}")));
    }
    Ok(n as usize)
}

/// `H1` error of `u`, `L2` error of the total pressure, `H1` errors of `p`
/// and `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldErrors {
    pub u_h1: f64,
    pub xi_l2: f64,
    pub p_h1: f64,
    pub t_h1: f64,
}

impl FieldErrors {
    pub fn as_array(&self) -> [f64; 4] {
        [self.u_h1, self.xi_l2, self.p_h1, self.t_h1]
    }
}

pub fn field_errors(system: &BlockSystem, state: &[f64], mms: &MmsSolution, t: f64) -> Result<FieldErrors> {
    let [u, xi, p, temp] = system.split(state)?;
    let q = ERROR_QUADRATURE;
    let eu = errors(&u, q, |x, o| o.copy_from_slice(&mms.displacement(x, t)), |x, o| o.copy_from_slice(&mms.displacement_grad(x, t)))?;
    let exi = errors(&xi, q, |x, o| o[0] = mms.total_pressure(x, t), |x, o| o[0] = mms.total_pressure_grad(x, t))?;
    let ep = errors(&p, q, |x, o| o[0] = mms.pressure(x, t), |x, o| o[0] = mms.pressure_grad(x, t))?;
    let et = errors(&temp, q, |x, o| o[0] = mms.temperature(x, t), |x, o| o[0] = mms.temperature_grad(x, t))?;
    Ok(FieldErrors { u_h1: eu.h1(), xi_l2: exi.l2(), p_h1: ep.h1(), t_h1: et.h1() })
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub level: u32,
    pub h: f64,
    pub dofs: usize,
    pub errors: FieldErrors,
    pub max_iterations: usize,
    pub converged: bool,
    pub final_relres: f64,
    pub seconds: f64,
}

/// `log2(e_l / e_{l+1})` per field for consecutive rows.
pub fn rates(rows: &[ConvergenceRow]) -> Vec<[f64; 4]> {
    rows.windows(2)
        .map(|w| {
            let (a, b) = (w[0].errors.as_array(), w[1].errors.as_array());
            let ratio = w[0].h / w[1].h;
            [0, 1, 2, 3].map(|i| (a[i] / b[i]).ln() / ratio.ln())
        })
        .collect()
}

/// Runs the manufactured solution from its exact initial state to `tf` on
/// each level and measures the errors at the final time.
pub fn convergence_study(
    params: &ParameterSet,
    levels: &[u32],
    tf: f64,
    time_derivative: TimeDerivative,
    choice: &SolverChoice,
) -> Result<Vec<ConvergenceRow>> {
    let mms = MmsSolution::new(params)?.with_time_derivative(time_derivative);
    let steps = step_count(params.dt, tf)?;
    let mut rows = Vec::new();
    for &level in levels {
        let start = Instant::now();
        let system = BlockSystem::assemble(Spaces::unit_square(level)?, params)?;
        let precond = choice.build(&system)?;
        let x0 = initial_state(&system, &mms, 0.0)?;
        let traj = backward_euler(&system, &precond, &mms, &mms, x0, steps, &choice.minres)?;
        let errors = field_errors(&system, &traj.state, &mms, traj.t_final)?;
        let row = ConvergenceRow {
            level,
            h: system.spaces.mesh.h_max(),
            dofs: system.dim(),
            errors,
            max_iterations: traj.max_iterations(),
            converged: traj.converged() && traj.reports.len() == steps,
            final_relres: traj.reports.last().map(|r| r.final_relres).unwrap_or(0.0),
            seconds: start.elapsed().as_secs_f64(),
        };
        info!("mms level {level}: {errors:?} in {:.2}s", row.seconds);
        rows.push(row);
    }
    Ok(rows)
}

/// Residual check `||b - A x|| / ||b||` in the Euclidean norm.
pub fn true_relative_residual(a: &dyn LinearOperator, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.apply_vec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (q - p).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nb == 0.0 {
        r
    } else {
        r / nb
    }
}

/// Shared constructor for a [`FieldFunction`] from a state slice.
pub fn field_of(system: &BlockSystem, state: &[f64], f: Field) -> Result<FieldFunction> {
    FieldFunction::from_coeffs(Arc::clone(system.spaces.space(f)), system.layout.slice(state, f).to_vec())
}
