//! Parameter sweeps, heterogeneous material cases, spectral reports and the
//! smoother study, each producing CSV records.

use std::time::Instant;

use log::{info, warn};

use crate::amg::study::{smoother_study, study_parameters, THETA_K_GRID};
use crate::amg::SmootherKind;
use crate::assembly::{lame_from_young_poisson, BlockSystem, CoefficientField, ParameterSet, Spaces};
use crate::driver::config::SweepConfig;
use crate::driver::mms::MmsSolution;
use crate::driver::report::Record;
use crate::driver::solve::{solve, spectrum, step_rhs, SolverChoice};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// One static solve of a single backward Euler step from a zero previous
/// state. `t_data` is the time at which sources and boundary data are taken.
pub fn static_point(
    case: &str,
    level: u32,
    params: &ParameterSet,
    mms: &MmsSolution,
    t_data: f64,
    choice: &SolverChoice,
    with_spectrum: bool,
) -> Result<Record> {
    let start = Instant::now();
    let system = BlockSystem::assemble(Spaces::unit_square(level)?, params)?;
    let precond = choice.build(&system)?;
    let rhs = step_rhs(&system, mms, mms, t_data, t_data, &vec![0.0; system.dim()])?;
    let (_, rep) = solve(&system, &precond, &rhs, &choice.minres)?;
    let (lmin, lmax) = if with_spectrum {
        let (a, b) = spectrum(&system, &precond, 400)?;
        (Some(a), Some(b))
    } else {
        (None, None)
    };
    if !rep.converged {
        warn!("{case} level {level}: no convergence after {} iterations", rep.iterations);
    }
    Ok(Record {
        case: case.to_string(),
        level,
        h: system.spaces.mesh.h_max(),
        dofs: system.dim(),
        params: params.clone(),
        precond: choice.kind.name().into(),
        realization: choice.realization.name().into(),
        iters: Some(rep.iterations),
        converged: rep.converged,
        final_relres: Some(rep.final_relres),
        lmin_est: lmin,
        lmax_est: lmax,
        seconds: start.elapsed().as_secs_f64(),
        extra: vec![],
    })
}

fn failed(case: &str, level: u32, params: &ParameterSet, choice: &SolverChoice, e: &Error) -> Record {
    warn!("{case} level {level}: {e}");
    Record {
        case: case.to_string(),
        level,
        h: std::f64::consts::SQRT_2 / (1u64 << level) as f64,
        dofs: 0,
        params: params.clone(),
        precond: choice.kind.name().into(),
        realization: choice.realization.name().into(),
        iters: None,
        converged: false,
        final_relres: None,
        lmin_est: None,
        lmax_est: None,
        seconds: 0.0,
        extra: vec![],
    }
}

/// Every point of the sweep at every level, for each solver choice. Sources
/// and boundary data come from the closed forms at `t = dt`. Failed points
/// are recorded as not converged and the sweep continues.
pub fn sweep(cfg: &SweepConfig, choices: &[SolverChoice]) -> Vec<Record> {
    let mut out = Vec::new();
    for params in cfg.points() {
        for &level in &cfg.levels {
            for choice in choices {
                let rec = MmsSolution::new(&params)
                    .and_then(|mms| static_point(&cfg.case, level, &params, &mms, params.dt, choice, cfg.spectrum))
                    .unwrap_or_else(|e| failed(&cfg.case, level, &params, choice, &e));
                info!("{} l{} {} {}: {:?}", rec.case, level, choice.kind.name(), choice.realization.name(), rec.iters);
                out.push(rec);
            }
        }
    }
    out
}

/// Young's modulus of every heterogeneous case.
pub const YOUNG_MODULUS: f64 = 6000.0;

const CHECKER_NU: [[f64; 4]; 4] = [
    [0.49999, 0.37, 0.499, 0.41],
    [0.3, 0.49999, 0.33, 0.4999],
    [0.49999, 0.29, 0.499, 0.3],
    [0.2, 0.4999, 0.31, 0.499],
];
const CHECKER_K: [[f64; 4]; 4] = [
    [100.0, 0.1, 1.0, 0.001],
    [0.01, 1.0, 10000.0, 0.1],
    [0.09, 0.29, 1000.0, 0.3],
    [0.001, 0.9, 0.1, 0.01],
];
const CHECKER_THETA: [[f64; 4]; 4] = [
    [10.0, 0.01, 0.1, 10.0],
    [0.1, 10000.0, 10.0, 0.1],
    [0.9, 0.09, 10.0, 0.3],
    [0.1, 0.09, 10.0, 200.0],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeterogeneousCase {
    /// Poisson ratio `nu` in the middle 2x2 block, 0.3 elsewhere.
    CentralJump(f64),
    Checkerboard,
}

impl HeterogeneousCase {
    pub fn name(&self) -> String {
        match self {
            HeterogeneousCase::CentralJump(nu) => format!("central-jump:{nu}"),
            HeterogeneousCase::Checkerboard => "checkerboard".into(),
        }
    }

    pub fn poisson_ratio(&self) -> [[f64; 4]; 4] {
        match self {
            HeterogeneousCase::CentralJump(nu) => {
                let mut g = [[0.3; 4]; 4];
                for row in g.iter_mut().take(3).skip(1) {
                    row[1] = *nu;
                    row[2] = *nu;
                }
                g
            }
            HeterogeneousCase::Checkerboard => CHECKER_NU,
        }
    }

    pub fn params(&self) -> Result<ParameterSet> {
        let nu = self.poisson_ratio();
        let mut lambda = [[0.0; 4]; 4];
        let mut mu = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let (l, m) = lame_from_young_poisson(YOUNG_MODULUS, nu[i][j])?;
                lambda[i][j] = l;
                mu[i][j] = m;
            }
        }
        let (k, theta) = match self {
            HeterogeneousCase::CentralJump(_) => (CoefficientField::Constant(1.0), CoefficientField::Constant(1.0)),
            HeterogeneousCase::Checkerboard => (CoefficientField::Grid(CHECKER_K), CoefficientField::Grid(CHECKER_THETA)),
        };
        Ok(ParameterSet {
            lambda: CoefficientField::Grid(lambda),
            mu: CoefficientField::Grid(mu),
            alpha: 3.0,
            beta: 2.0,
            a0: 4.0,
            b0: 0.1,
            c0: 0.3,
            k,
            theta,
            dt: 1e-2,
        })
    }
}

impl std::str::FromStr for HeterogeneousCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "checkerboard" {
            return Ok(HeterogeneousCase::Checkerboard);
        }
        if let Some(v) = s.strip_prefix("central-jump:") {
            let nu: f64 = v.parse().map_err(|e| Error::Config(format!("central-jump ratio '{v}': {e}")))?;
            if !(0.0..0.5).contains(&nu) {
                return Err(Error::Config(format!("Poisson ratio {nu} outside [0, 0.5)")));
            }
            return Ok(HeterogeneousCase::CentralJump(nu));
        }
        Err(Error::Config(format!("unknown case '{s}' (central-jump:<nu>|checkerboard)")))
    }
}

/// One step with data from the closed forms at `t = 0`, evaluated with unit
/// values of the spatially varying coefficients.
pub fn heterogeneous(case: HeterogeneousCase, levels: &[u32], choices: &[SolverChoice]) -> Result<Vec<Record>> {
    let params = case.params()?;
    let mms = MmsSolution::with_unit_varying(&params);
    let name = case.name();
    let mut out = Vec::new();
    for &level in levels {
        if Mesh::unit_square(level)?.n % 4 != 0 {
            return Err(Error::InvalidParameter(format!("level {level} does not resolve the 4x4 subdomains")));
        }
        for choice in choices {
            let rec = static_point(&name, level, &params, &mms, 0.0, choice, false)
                .unwrap_or_else(|e| failed(&name, level, &params, choice, &e));
            info!("{name} l{level} {} {}: {:?}", choice.kind.name(), choice.realization.name(), rec.iters);
            out.push(rec);
        }
    }
    Ok(out)
}

/// Parameter corners for the spectral report: lambda in `{1, 1e3, 1e6}`,
/// `K, theta` in `{1, 1e-6}`, beta in `{1e-4, 1}`.
pub fn spectral_corners() -> Vec<ParameterSet> {
    let mut out = Vec::new();
    for beta in [1e-4, 1.0] {
        for lambda in [1.0, 1e3, 1e6] {
            for k in [1.0, 1e-6] {
                for theta in [1.0, 1e-6] {
                    out.push(ParameterSet {
                        beta,
                        lambda: lambda.into(),
                        k: k.into(),
                        theta: theta.into(),
                        ..ParameterSet::sweep_base()
                    });
                }
            }
        }
    }
    out
}

/// Extreme eigenvalue moduli of the exactly preconditioned operator over
/// [`spectral_corners`]. The block diagonal preconditioner is only reported
/// at `beta = 1`, where its storage-coefficient assumptions hold.
pub fn eig_report(level: u32, choices: &[SolverChoice]) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for params in spectral_corners() {
        for choice in choices {
            if choice.kind == crate::precond::PrecondKind::B2 && params.beta != 1.0 {
                continue;
            }
            let start = Instant::now();
            let system = BlockSystem::assemble(Spaces::unit_square(level)?, &params)?;
            let precond = choice.build(&system)?;
            let (lmin, lmax) = spectrum(&system, &precond, system.dim().min(1000))?;
            out.push(Record {
                case: "eig".into(),
                level,
                h: system.spaces.mesh.h_max(),
                dofs: system.dim(),
                params: params.clone(),
                precond: choice.kind.name().into(),
                realization: choice.realization.name().into(),
                iters: None,
                converged: true,
                final_relres: None,
                lmin_est: Some(lmin),
                lmax_est: Some(lmax),
                seconds: start.elapsed().as_secs_f64(),
                extra: vec![],
            });
        }
    }
    Ok(out)
}

/// The point and nodal-block Gauss-Seidel smoothers on the equal-order
/// coupled block; `lmin_est`/`lmax_est` are the V-cycle preconditioned
/// extremes and `precond` names the smoother.
pub fn amg_study(levels: &[u32]) -> Result<Vec<Record>> {
    let base = study_parameters();
    let smoothers = [SmootherKind::PointGaussSeidel, SmootherKind::BlockGaussSeidel];
    let rows = smoother_study(&base, &THETA_K_GRID, levels, &smoothers)?;
    Ok(rows
        .into_iter()
        .map(|r| Record {
            case: "amg-study".into(),
            level: r.level,
            h: std::f64::consts::SQRT_2 / (1u64 << r.level) as f64,
            dofs: 0,
            params: ParameterSet { theta: r.theta.into(), k: r.k.into(), ..base.clone() },
            precond: r.smoother.name().into(),
            realization: "amg".into(),
            iters: None,
            converged: true,
            final_relres: None,
            lmin_est: Some(r.lambda_min),
            lmax_est: Some(r.lambda_max),
            seconds: 0.0,
            extra: vec![("kappa".into(), r.kappa), ("amg_levels".into(), r.amg_levels as f64)],
        })
        .collect())
}
