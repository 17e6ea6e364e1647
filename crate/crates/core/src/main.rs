use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thermoporo::assembly::{BlockSystem, ParameterSet, Spaces};
use thermoporo::driver::{self, rates, ConvergenceRow, HeterogeneousCase, Record, SolverChoice, SweepConfig, TimeDerivative};
use thermoporo::mesh::Mesh;
use thermoporo::precond::{PrecondKind, Realization};
use thermoporo::{Error, Result};

#[derive(Parser)]
#[command(name = "thermoporo", version, about = "Four-field thermo-poroelasticity solver and preconditioner experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// Preconditioners, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "b1,b2")]
    precond: Vec<PrecondKind>,
    /// Realizations, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "exact")]
    realization: Vec<Realization>,
    /// MinRes relative tolerance in the preconditioned norm.
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
}

impl SolverArgs {
    fn choices(&self) -> Vec<SolverChoice> {
        let mut out = Vec::new();
        for &r in &self.realization {
            for &k in &self.precond {
                let mut c = SolverChoice::new(k, r);
                c.minres.rtol = self.rtol;
                c.minres.max_iters = self.max_iters;
                out.push(c);
            }
        }
        out
    }
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution convergence study.
    Mms {
        #[arg(long, default_value = "1..6")]
        levels: String,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 0.1)]
        tf: f64,
        #[arg(long, default_value = "b1")]
        precond: PrecondKind,
        #[arg(long, default_value = "exact")]
        realization: Realization,
        /// Time derivative in the sources: `discrete` (backward difference,
        /// no time error) or `exact`.
        #[arg(long, default_value = "discrete")]
        forcing: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter sweep from a key=value file, or `preset:robust|storage|degenerate`.
    Sweep {
        #[arg(long)]
        grid: String,
        /// Overrides the levels of the grid file.
        #[arg(long)]
        levels: Option<String>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heterogeneous material case: central-jump:<nu> or checkerboard.
    Heterog {
        #[arg(long)]
        case: HeterogeneousCase,
        #[arg(long, default_value = "2..6")]
        levels: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Point versus nodal-block smoother study on the equal-order coupled block.
    AmgStudy {
        #[arg(long, default_value = "3..5")]
        levels: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extreme eigenvalue moduli of the preconditioned operator over parameter corners.
    Eig {
        #[arg(long, default_value_t = 2)]
        level: u32,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the assembled operator (Matrix Market) and/or a mesh dump.
    Export {
        #[arg(long, default_value_t = 2)]
        level: u32,
        /// Optional key=value file with coefficient values; defaults to the
        /// convergence-study parameters.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
}

fn finish(records: &[Record], out: Option<&PathBuf>) -> Result<bool> {
    print!("{}", driver::table(records));
    if let Some(path) = out {
        driver::write_csv_file(path, records)?;
        println!("wrote {}", path.display());
    }
    Ok(records.iter().all(|r| r.converged))
}

fn mms_records(params: &ParameterSet, rows: &[ConvergenceRow], choice: &SolverChoice) -> Vec<Record> {
    rows.iter()
        .map(|r| Record {
            case: "mms".into(),
            level: r.level,
            h: r.h,
            dofs: r.dofs,
            params: params.clone(),
            precond: choice.kind.name().into(),
            realization: choice.realization.name().into(),
            iters: Some(r.max_iterations),
            converged: r.converged,
            final_relres: Some(r.final_relres),
            lmin_est: None,
            lmax_est: None,
            seconds: r.seconds,
            extra: vec![
                ("err_u_h1".into(), r.errors.u_h1),
                ("err_xi_l2".into(), r.errors.xi_l2),
                ("err_p_h1".into(), r.errors.p_h1),
                ("err_t_h1".into(), r.errors.t_h1),
            ],
        })
        .collect()
}

fn load_grid(spec: &str) -> Result<SweepConfig> {
    match spec.strip_prefix("preset:") {
        Some(name) => SweepConfig::preset(name),
        None => SweepConfig::parse(&std::fs::read_to_string(spec)?),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Mms { levels, dt, tf, precond, realization, forcing, out } => {
            let params = ParameterSet { dt, ..ParameterSet::convergence_default() };
            let choice = SolverChoice::new(precond, realization);
            let td = match forcing.as_str() {
                "discrete" => TimeDerivative::BackwardDifference(dt),
                "exact" => TimeDerivative::Exact,
                _ => return Err(Error::Config(format!("unknown forcing '{forcing}' (discrete|exact)"))),
            };
            let rows = driver::convergence_study(&params, &driver::parse_levels(&levels)?, tf, td, &choice)?;
            println!("{:>10} {:>12} {:>12} {:>12} {:>12}", "h", "u H1", "xi L2", "p H1", "T H1");
            let r = rates(&rows);
            for (i, row) in rows.iter().enumerate() {
                let e = row.errors.as_array();
                let mut line = format!("{:>10.6}", row.h);
                for (k, v) in e.iter().enumerate() {
                    match i.checked_sub(1).map(|j| r[j][k]) {
                        Some(rate) => line.push_str(&format!(" {v:>12.6} ({rate:.2})")),
                        None => line.push_str(&format!(" {v:>12.6}       ")),
                    }
                }
                println!("{line}");
            }
            finish(&mms_records(&params, &rows, &choice), out.as_ref())
        }
        Command::Sweep { grid, levels, solver, out } => {
            let mut cfg = load_grid(&grid)?;
            if let Some(l) = levels {
                cfg.levels = driver::parse_levels(&l)?;
            }
            finish(&driver::sweep(&cfg, &solver.choices()), out.as_ref())
        }
        Command::Heterog { case, levels, solver, out } => {
            let recs = driver::heterogeneous(case, &driver::parse_levels(&levels)?, &solver.choices())?;
            finish(&recs, out.as_ref())
        }
        Command::AmgStudy { levels, out } => {
            let recs = driver::amg_study(&driver::parse_levels(&levels)?)?;
            finish(&recs, out.as_ref())
        }
        Command::Eig { level, solver, out } => finish(&driver::eig_report(level, &solver.choices())?, out.as_ref()),
        Command::Export { level, params, matrix, mesh } => {
            if matrix.is_none() && mesh.is_none() {
                return Err(Error::Config("nothing to export: pass --matrix and/or --mesh".into()));
            }
            if let Some(path) = mesh {
                std::fs::write(&path, Mesh::unit_square(level)?.to_text())?;
                println!("wrote {}", path.display());
            }
            if let Some(path) = matrix {
                let p = match params {
                    Some(f) => {
                        let mut cfg = SweepConfig::parse(&std::fs::read_to_string(f)?)?;
                        cfg.base.clone_from(&cfg.points()[0]);
                        cfg.base
                    }
                    None => ParameterSet::convergence_default(),
                };
                let system = BlockSystem::assemble(Spaces::unit_square(level)?, &p)?;
                let f = std::io::BufWriter::new(std::fs::File::create(&path)?);
                system.matrix.write_matrix_market(f)?;
                println!("wrote {} ({} x {}, {} nonzeros)", path.display(), system.dim(), system.dim(), system.matrix.nnz());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some solves did not converge");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
