//! Python module `thermoporo_py`: the convergence study, single solves,
//! sweeps and heterogeneous cases, returning plain dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use thermoporo::assembly::ParameterSet;
use thermoporo::driver::{self, parse_levels, HeterogeneousCase, MmsSolution, Record, SolverChoice, SweepConfig, TimeDerivative};
use thermoporo::precond::{PrecondKind, Realization};

fn err(e: thermoporo::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn choice(precond: &str, realization: &str) -> PyResult<SolverChoice> {
    let kind: PrecondKind = precond.parse().map_err(err)?;
    let real: Realization = realization.parse().map_err(err)?;
    Ok(SolverChoice::new(kind, real))
}

fn record<'py>(py: Python<'py>, r: &Record) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("case", &r.case)?;
    d.set_item("level", r.level)?;
    d.set_item("h", r.h)?;
    d.set_item("dofs", r.dofs)?;
    d.set_item("precond", &r.precond)?;
    d.set_item("realization", &r.realization)?;
    d.set_item("iters", r.iters)?;
    d.set_item("converged", r.converged)?;
    d.set_item("final_relres", r.final_relres)?;
    d.set_item("lmin_est", r.lmin_est)?;
    d.set_item("lmax_est", r.lmax_est)?;
    d.set_item("seconds", r.seconds)?;
    for (k, v) in &r.extra {
        d.set_item(k, v)?;
    }
    Ok(d)
}

fn records<'py>(py: Python<'py>, rs: &[Record]) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rs.iter().map(|r| record(py, r)).collect()
}

/// Manufactured-solution errors per level with the rates against the
/// previous level (`None` on the first).
#[pyfunction]
#[pyo3(signature = (levels = "1..4", dt = 0.01, tf = 0.1, precond = "b1", realization = "exact"))]
fn mms<'py>(
    py: Python<'py>,
    levels: &str,
    dt: f64,
    tf: f64,
    precond: &str,
    realization: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let params = ParameterSet { dt, ..ParameterSet::convergence_default() };
    let levels = parse_levels(levels).map_err(err)?;
    let c = choice(precond, realization)?;
    let rows = py
        .detach(|| driver::convergence_study(&params, &levels, tf, TimeDerivative::BackwardDifference(dt), &c))
        .map_err(err)?;
    let rates = driver::rates(&rows);
    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let d = PyDict::new(py);
        d.set_item("level", row.level)?;
        d.set_item("h", row.h)?;
        d.set_item("dofs", row.dofs)?;
        let e = row.errors;
        d.set_item("errors", (e.u_h1, e.xi_l2, e.p_h1, e.t_h1))?;
        d.set_item("rates", if i == 0 { None } else { Some(rates[i - 1]) })?;
        d.set_item("max_iterations", row.max_iterations)?;
        d.set_item("converged", row.converged)?;
        out.push(d);
    }
    Ok(out)
}

/// One static solve at the sweep base point with the given overrides.
#[pyfunction]
#[pyo3(signature = (level, precond = "b1", realization = "exact", beta = 1.0, lamb = 1.0, theta = 1.0, k = 1.0))]
#[allow(clippy::too_many_arguments)]
fn solve_point<'py>(
    py: Python<'py>,
    level: u32,
    precond: &str,
    realization: &str,
    beta: f64,
    lamb: f64,
    theta: f64,
    k: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let params = ParameterSet { beta, lambda: lamb.into(), theta: theta.into(), k: k.into(), ..ParameterSet::sweep_base() };
    let c = choice(precond, realization)?;
    let rec = py
        .detach(|| {
            let mms = MmsSolution::new(&params)?;
            driver::static_point("point", level, &params, &mms, params.dt, &c, false)
        })
        .map_err(err)?;
    record(py, &rec)
}

/// A sweep from `preset:<name>` or key=value text.
#[pyfunction]
#[pyo3(signature = (grid, levels = None, precond = "b1", realization = "exact"))]
fn sweep<'py>(
    py: Python<'py>,
    grid: &str,
    levels: Option<&str>,
    precond: &str,
    realization: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = match grid.strip_prefix("preset:") {
        Some(name) => SweepConfig::preset(name),
        None => SweepConfig::parse(grid),
    }
    .map_err(err)?;
    if let Some(l) = levels {
        cfg.levels = parse_levels(l).map_err(err)?;
    }
    let c = choice(precond, realization)?;
    let rs = py.detach(|| driver::sweep(&cfg, &[c]));
    records(py, &rs)
}

#[pyfunction]
#[pyo3(signature = (case, levels = "2..4", precond = "b1", realization = "exact"))]
fn heterog<'py>(
    py: Python<'py>,
    case: &str,
    levels: &str,
    precond: &str,
    realization: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let case: HeterogeneousCase = case.parse().map_err(err)?;
    let levels = parse_levels(levels).map_err(err)?;
    let c = choice(precond, realization)?;
    let rs = py.detach(|| driver::heterogeneous(case, &levels, &[c])).map_err(err)?;
    records(py, &rs)
}

#[pyfunction]
fn csv_header() -> Vec<&'static str> {
    driver::CSV_HEADER.to_vec()
}

#[pymodule]
fn thermoporo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(mms, m)?)?;
    m.add_function(wrap_pyfunction!(solve_point, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(heterog, m)?)?;
    m.add_function(wrap_pyfunction!(csv_header, m)?)?;
    Ok(())
}
